#include "maximal.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace sparselab {

std::vector<double> radius_grid::radii() const {
    if (!(t_lo > 0.0) || !(t_hi >= t_lo)) fail_invalid("radius grid needs 0 < t_lo <= t_hi");
    if (n_t < 1) fail_invalid("radius grid needs n_t >= 1");
    std::vector<double> ts;
    ts.reserve(n_t);
    if (n_t == 1) {
        ts.push_back(t_lo);
        return ts;
    }
    for (int i = 0; i < n_t; ++i) {
        const double a = static_cast<double>(i) / (n_t - 1);
        ts.push_back(geometric ? t_lo * std::pow(t_hi / t_lo, a)
                               : t_lo + a * (t_hi - t_lo));
    }
    return ts;
}

grid_function localized_maximal(const grid_function& f, const grid_function& g,
                                const radius_grid& rg, const eval_options& opts) {
    return bilinear_sup(f, g, rg.radii(), opts);
}

grid_function lacunary_maximal(const grid_function& f, const grid_function& g, int m_lo,
                               int m_hi, const eval_options& opts) {
    if (m_lo > m_hi) fail_invalid("lacunary maximal requires m_lo <= m_hi");
    std::vector<double> ts;
    for (int m = m_lo; m <= m_hi; ++m) ts.push_back(std::ldexp(1.0, m));
    return bilinear_sup(f, g, ts, opts);
}

std::vector<double> full_maximal_radii(int m_lo, int m_hi, int n_t_per_octave) {
    if (m_lo > m_hi) fail_invalid("full maximal requires m_lo <= m_hi");
    if (n_t_per_octave < 2) fail_invalid("full maximal requires n_t_per_octave >= 2");
    std::vector<double> ts;
    for (int m = m_lo; m <= m_hi; ++m) {
        const double t0 = std::ldexp(1.0, m);
        for (int i = 0; i < n_t_per_octave; ++i) {
            if (m > m_lo && i == 0) continue; // octave endpoint deduplication
            ts.push_back(t0 * std::pow(2.0, static_cast<double>(i) / (n_t_per_octave - 1)));
        }
    }
    return ts;
}

grid_function full_maximal(const grid_function& f, const grid_function& g, int m_lo, int m_hi,
                           int n_t_per_octave, const eval_options& opts) {
    return bilinear_sup(f, g, full_maximal_radii(m_lo, m_hi, n_t_per_octave), opts);
}

namespace {

// In-place sliding maximum of src over windows [max(0,i-w+1), min(i,limit)]
// evaluated for every i; window positions are clamped to [0, limit].
void sliding_window_max(const std::vector<double>& src, long long limit, long long w,
                        std::vector<double>& dst) {
    const long long n = dst.size();
    std::deque<long long> dq;
    long long next = 0;
    for (long long i = 0; i < n; ++i) {
        const long long a_hi = std::min(i, limit);
        for (; next <= a_hi; ++next) {
            while (!dq.empty() && src[dq.back()] <= src[next]) dq.pop_back();
            dq.push_back(next);
        }
        const long long a_lo = i - w + 1;
        while (!dq.empty() && dq.front() < a_lo) dq.pop_front();
        dst[i] = src[dq.front()];
    }
}

} // namespace

grid_function hardy_littlewood_maximal(const grid_function& f) {
    const grid_spec& spec = f.spec;
    const long long n = spec.n;
    grid_function out(spec);

    if (spec.d == 1) {
        std::vector<double> prefix(n + 1, 0.0);
        for (long long i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + std::abs(f.values[i]);
        std::vector<double> sums(n), best(n);
        for (long long s = 1; s <= n; ++s) {
            const long long limit = n - s;
            for (long long a = 0; a <= limit; ++a) sums[a] = prefix[a + s] - prefix[a];
            sliding_window_max(sums, limit, s, best);
            const double inv = 1.0 / s;
            for (long long i = 0; i < n; ++i)
                out.values[i] = std::max(out.values[i], best[i] * inv);
        }
        // Convert cell counts to lengths: average = mass * cellvol / (s * sp)
        // = (sum / s); the spacing cancels, so nothing further to do.
        return out;
    }

    if (spec.d == 2) {
        std::vector<double> prefix((n + 1) * (n + 1), 0.0);
        for (long long i = 0; i < n; ++i)
            for (long long j = 0; j < n; ++j)
                prefix[(i + 1) * (n + 1) + (j + 1)] = std::abs(f.values[i * n + j]) +
                                                      prefix[i * (n + 1) + (j + 1)] +
                                                      prefix[(i + 1) * (n + 1) + j] -
                                                      prefix[i * (n + 1) + j];
        std::vector<double> sums(n * n, 0.0), rowmax(n * n, 0.0);
        std::vector<double> line(n), lineout(n);
        for (long long s = 1; s <= n; ++s) {
            const long long limit = n - s;
            for (long long a = 0; a <= limit; ++a)
                for (long long b = 0; b <= limit; ++b)
                    sums[a * n + b] = prefix[(a + s) * (n + 1) + (b + s)] -
                                      prefix[a * (n + 1) + (b + s)] -
                                      prefix[(a + s) * (n + 1) + b] + prefix[a * (n + 1) + b];
            // Slide along axis 1 for each fixed top row a, then along axis 0.
            for (long long a = 0; a <= limit; ++a) {
                for (long long b = 0; b < n; ++b) line[b] = b <= limit ? sums[a * n + b] : 0.0;
                sliding_window_max(line, limit, s, lineout);
                for (long long j = 0; j < n; ++j) rowmax[a * n + j] = lineout[j];
            }
            const double inv = 1.0 / (static_cast<double>(s) * s);
            for (long long j = 0; j < n; ++j) {
                for (long long a = 0; a < n; ++a) line[a] = a <= limit ? rowmax[a * n + j] : 0.0;
                sliding_window_max(line, limit, s, lineout);
                for (long long i = 0; i < n; ++i)
                    out.values[i * n + j] = std::max(out.values[i * n + j], lineout[i] * inv);
            }
        }
        return out;
    }

    // d = 3.
    const long long n1 = n + 1;
    std::vector<double> prefix(n1 * n1 * n1, 0.0);
    for (long long i = 0; i < n; ++i)
        for (long long j = 0; j < n; ++j)
            for (long long k = 0; k < n; ++k) {
                const auto P = [&](long long a, long long b, long long c) -> double& {
                    return prefix[(a * n1 + b) * n1 + c];
                };
                P(i + 1, j + 1, k + 1) = std::abs(f.values[(i * n + j) * n + k]) +
                                         P(i, j + 1, k + 1) + P(i + 1, j, k + 1) +
                                         P(i + 1, j + 1, k) - P(i, j, k + 1) -
                                         P(i, j + 1, k) - P(i + 1, j, k) + P(i, j, k);
            }
    std::vector<double> sums(n * n * n, 0.0), tmp(n * n * n, 0.0);
    std::vector<double> line(n), lineout(n);
    const auto S = [&](std::vector<double>& v, long long a, long long b,
                       long long c) -> double& { return v[(a * n + b) * n + c]; };
    for (long long s = 1; s <= n; ++s) {
        const long long limit = n - s;
        const auto P = [&](long long a, long long b, long long c) {
            return prefix[(a * n1 + b) * n1 + c];
        };
        for (long long a = 0; a <= limit; ++a)
            for (long long b = 0; b <= limit; ++b)
                for (long long c = 0; c <= limit; ++c)
                    S(sums, a, b, c) = P(a + s, b + s, c + s) - P(a, b + s, c + s) -
                                       P(a + s, b, c + s) - P(a + s, b + s, c) +
                                       P(a, b, c + s) + P(a, b + s, c) + P(a + s, b, c) -
                                       P(a, b, c);
        // Slide along each axis in turn.
        for (long long a = 0; a <= limit; ++a)
            for (long long b = 0; b <= limit; ++b) {
                for (long long c = 0; c < n; ++c)
                    line[c] = c <= limit ? S(sums, a, b, c) : 0.0;
                sliding_window_max(line, limit, s, lineout);
                for (long long k = 0; k < n; ++k) S(tmp, a, b, k) = lineout[k];
            }
        for (long long a = 0; a <= limit; ++a)
            for (long long k = 0; k < n; ++k) {
                for (long long b = 0; b < n; ++b)
                    line[b] = b <= limit ? S(tmp, a, b, k) : 0.0;
                sliding_window_max(line, limit, s, lineout);
                for (long long j = 0; j < n; ++j) S(sums, a, j, k) = lineout[j];
            }
        const double inv = 1.0 / (static_cast<double>(s) * s * s);
        for (long long j = 0; j < n; ++j)
            for (long long k = 0; k < n; ++k) {
                for (long long a = 0; a < n; ++a)
                    line[a] = a <= limit ? S(sums, a, j, k) : 0.0;
                sliding_window_max(line, limit, s, lineout);
                for (long long i = 0; i < n; ++i) {
                    double& o = out.values[(i * n + j) * n + k];
                    o = std::max(o, lineout[i] * inv);
                }
            }
    }
    return out;
}

grid_function linear_spherical_maximal(const grid_function& f, const radius_grid& rg,
                                       const eval_options& opts) {
    return linear_sup(f, rg.radii(), opts);
}

double continuity_norm(const grid_function& f, const grid_function& g,
                       const std::array<double, 3>& h, const exponent_triple& t,
                       const radius_grid& rg, const eval_options& opts) {
    const grid_function dg = linear_combination(1.0, g, -1.0, shift(g, h));
    const grid_function m = bilinear_sup(f, dg, rg.radii(), opts);
    if (opts.mask) {
        // Norm restricted to the mask subgrid: scale the cell volume by the
        // subsampling factor so the sum remains a Riemann estimate.
        const double frac =
            static_cast<double>(m.spec.total_cells()) / opts.mask->size();
        const double r = t.r.to_double();
        double s = 0.0;
        for (std::uint32_t idx : *opts.mask) s += std::pow(std::abs(m.values[idx]), r);
        return std::pow(s * m.spec.cell_volume() * frac, 1.0 / r);
    }
    return lp_norm(m, t.r.to_double());
}

double double_continuity_norm(const grid_function& f, const grid_function& g,
                              const std::array<double, 3>& h1, const std::array<double, 3>& h2,
                              const exponent_triple& t, const radius_grid& rg,
                              const eval_options& opts) {
    const grid_function df = linear_combination(1.0, f, -1.0, shift(f, h1));
    const grid_function dg = linear_combination(1.0, g, -1.0, shift(g, h2));
    const grid_function m = bilinear_sup(df, dg, rg.radii(), opts);
    if (opts.mask) {
        const double frac =
            static_cast<double>(m.spec.total_cells()) / opts.mask->size();
        const double r = t.r.to_double();
        double s = 0.0;
        for (std::uint32_t idx : *opts.mask) s += std::pow(std::abs(m.values[idx]), r);
        return std::pow(s * m.spec.cell_volume() * frac, 1.0 / r);
    }
    return lp_norm(m, t.r.to_double());
}

} // namespace sparselab
