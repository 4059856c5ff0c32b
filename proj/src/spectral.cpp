#include "spectral.hpp"

#include "error.hpp"
#include "reduce.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace sparselab {

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

double glue(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

long long wrap_index(long long i, int n) {
    long long m = i % n;
    if (m < 0) m += n;
    return m;
}

// Mean over half-step offset angles of f1(x - t cos) f2(x - t sin) at the
// sample points listed in idx.
std::vector<double> circle_average_at(const periodic_field& f1, const periodic_field& f2,
                                      double t, int n_theta,
                                      const std::vector<int>& idx) {
    const int n = f1.n;
    const double dx = f1.spacing();
    std::vector<long long> oc(n_theta), os(n_theta);
    for (int l = 0; l < n_theta; ++l) {
        const double th = kTau * (l + 0.5) / n_theta;
        oc[l] = std::llround(t * std::cos(th) / dx);
        os[l] = std::llround(t * std::sin(th) / dx);
    }
    std::vector<double> out(idx.size());
    std::vector<double> terms(n_theta);
    for (std::size_t m = 0; m < idx.size(); ++m) {
        const long long j = idx[m];
        for (int l = 0; l < n_theta; ++l)
            terms[l] = f1.v[(std::size_t)wrap_index(j - oc[l], n)] *
                       f2.v[(std::size_t)wrap_index(j - os[l], n)];
        out[m] = pairwise_sum(terms.data(), terms.size()) / n_theta;
    }
    return out;
}

std::vector<int> stride_indices(int n, int stride) {
    if (stride < 1) fail_invalid("stride must be positive");
    std::vector<int> idx;
    idx.reserve((std::size_t)(n / stride + 1));
    for (int j = 0; j < n; j += stride) idx.push_back(j);
    return idx;
}

double strided_l1(const std::vector<double>& vals, double period) {
    std::vector<double> a(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i) a[i] = std::fabs(vals[i]);
    return pairwise_sum(a.data(), a.size()) / (double)a.size() * period;
}

} // namespace

void periodic_field::validate() const {
    if (!power_of_two(n) || n < 8) fail_invalid("sample count must be a power of two >= 8");
    if (!(period > 0.0)) fail_invalid("period must be positive");
    if (v.size() != (std::size_t)n) fail_invalid("sample storage size mismatch");
}

double periodic_field::at(double x) const {
    return v[(std::size_t)wrap_index(std::llround(x / spacing()), n)];
}

periodic_field make_periodic(int n, double period) {
    periodic_field f;
    f.n = n;
    f.period = period;
    f.v.assign((std::size_t)std::max(n, 0), 0.0);
    f.validate();
    return f;
}

std::vector<std::complex<double>> fft_forward(const periodic_field& f) {
    f.validate();
    std::vector<std::complex<double>> in(f.v.begin(), f.v.end()), out(f.v.size());
    fftw_plan plan = fftw_plan_dft_1d(f.n, reinterpret_cast<fftw_complex*>(in.data()),
                                      reinterpret_cast<fftw_complex*>(out.data()),
                                      FFTW_FORWARD, FFTW_ESTIMATE);
    if (!plan) fail_internal("fft plan creation failed");
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    return out;
}

periodic_field fft_inverse(const std::vector<std::complex<double>>& spec, double period) {
    const int n = (int)spec.size();
    if (!power_of_two(n) || n < 8) fail_invalid("spectrum size must be a power of two >= 8");
    std::vector<std::complex<double>> in = spec, out(spec.size());
    fftw_plan plan = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(in.data()),
                                      reinterpret_cast<fftw_complex*>(out.data()),
                                      FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!plan) fail_internal("fft plan creation failed");
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    periodic_field f = make_periodic(n, period);
    for (int j = 0; j < n; ++j) f.v[(std::size_t)j] = out[(std::size_t)j].real() / n;
    return f;
}

double bump_psi(double a) {
    const double r = std::fabs(a);
    if (r <= 1.0) return 1.0;
    if (r >= 2.0) return 0.0;
    const double up = glue(2.0 - r);
    return up / (up + glue(r - 1.0));
}

double band_symbol(double xi, int k) {
    const double s = std::ldexp(1.0, -k); // 2^-k
    return bump_psi(xi * s) - bump_psi(xi * s * 2.0);
}

periodic_field band_project(const periodic_field& f, int k) {
    f.validate();
    if (k < 0) fail_invalid("band index must be nonnegative");
    const double nyquist = f.n / (2.0 * f.period);
    if (!(std::ldexp(1.0, k + 1) < nyquist))
        fail_invalid("band " + std::to_string(k) + " reaches the Nyquist frequency");
    std::vector<std::complex<double>> spec = fft_forward(f);
    for (int j = 0; j < f.n; ++j) {
        const double xi = ((j <= f.n / 2) ? j : j - f.n) / f.period;
        spec[(std::size_t)j] *= band_symbol(xi, k);
    }
    return fft_inverse(spec, f.period);
}

double periodic_l1(const periodic_field& f) {
    f.validate();
    std::vector<double> a(f.v.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::fabs(f.v[i]);
    return pairwise_sum(a.data(), a.size()) * f.spacing();
}

double periodic_l2(const periodic_field& f) {
    f.validate();
    std::vector<double> a(f.v.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = f.v[i] * f.v[i];
    return std::sqrt(pairwise_sum(a.data(), a.size()) * f.spacing());
}

periodic_field circle_average(const periodic_field& f1, const periodic_field& f2, double t,
                              int n_theta) {
    f1.validate();
    f2.validate();
    if (f1.n != f2.n || f1.period != f2.period) fail_invalid("fields must share one sampling");
    if (n_theta < 4) fail_invalid("need at least four angles");
    if (!(t > 0.0)) fail_invalid("radius must be positive");
    std::vector<int> idx = stride_indices(f1.n, 1);
    periodic_field out = make_periodic(f1.n, f1.period);
    out.v = circle_average_at(f1, f2, t, n_theta, idx);
    return out;
}

periodic_field decaying_random_field(int n, double period, double alpha, std::uint64_t seed) {
    periodic_field f = make_periodic(n, period);
    std::vector<std::complex<double>> spec((std::size_t)n, {0.0, 0.0});
    std::mt19937_64 rng(seed);
    for (int j = 1; j < n / 2; ++j) {
        const double xi = j / period;
        const double amp = std::pow(1.0 + xi, -alpha);
        // explicit 53-bit mantissa draw, identical across standard libraries
        const double u = (double)(rng() >> 11) * 0x1p-53;
        const std::complex<double> z = std::polar(amp, kTau * u);
        spec[(std::size_t)j] = z;
        spec[(std::size_t)(n - j)] = std::conj(z);
    }
    f = fft_inverse(spec, period);
    const double l2 = periodic_l2(f);
    if (l2 > 0.0)
        for (double& x : f.v) x /= l2;
    return f;
}

band_decay_result band_decay_experiment(const periodic_field& f1, const periodic_field& f2,
                                        const std::vector<int>& k_list,
                                        const band_decay_options& opts) {
    f1.validate();
    f2.validate();
    if (f1.n != f2.n || f1.period != f2.period) fail_invalid("fields must share one sampling");
    if (k_list.empty()) fail_invalid("band list is empty");

    const std::vector<int> idx = stride_indices(f1.n, opts.stride);
    band_decay_result out;
    for (int k : k_list) {
        const periodic_field piece = opts.control ? f1 : band_project(f1, k);
        const std::vector<double> vals =
            circle_average_at(piece, f2, opts.t, opts.n_theta, idx);
        out.ks.push_back(k);
        out.values.push_back(strided_l1(vals, f1.period));
    }

    double vmax = 0.0;
    for (double v : out.values) vmax = std::max(vmax, v);
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < out.values.size(); ++i)
        if (out.values[i] > 1e-13 * vmax && out.values[i] > 0.0) {
            xs.push_back(std::ldexp(1.0, out.ks[i]));
            ys.push_back(out.values[i]);
        }
    if (xs.size() < 3) fail_invalid("insufficient data: fewer than three usable bands");
    out.fit = fit_power_law(xs, ys);
    return out;
}

periodic_continuity_result periodic_continuity_experiment(const periodic_field& f1,
                                                          const periodic_field& f2,
                                                          const std::vector<double>& h_list,
                                                          double t, int n_theta, int stride) {
    f1.validate();
    f2.validate();
    if (f1.n != f2.n || f1.period != f2.period) fail_invalid("fields must share one sampling");
    const double dx = f1.spacing();
    const std::vector<int> idx = stride_indices(f1.n, stride);

    periodic_continuity_result out;
    for (double h : h_list) {
        const long long j = std::llround(h / dx);
        if (j == 0) fail_invalid("shift " + std::to_string(h) + " snaps to zero samples");
        const double hs = (double)j * dx;
        if (std::fabs(hs - h) > 1e-12 * std::max(1.0, std::fabs(h)))
            emit_warning("shift " + std::to_string(h) + " snapped to " + std::to_string(hs));
        periodic_field diff = make_periodic(f1.n, f1.period);
        for (int i = 0; i < f1.n; ++i)
            diff.v[(std::size_t)i] =
                f1.v[(std::size_t)i] - f1.v[(std::size_t)wrap_index(i - j, f1.n)];
        const std::vector<double> vals = circle_average_at(diff, f2, t, n_theta, idx);
        out.hs.push_back(hs);
        out.values.push_back(strided_l1(vals, f1.period));
    }
    out.fit = fit_power_law(out.hs, out.values);
    return out;
}

} // namespace sparselab
