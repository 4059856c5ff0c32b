// End-to-end acceptance: ten pinned checks, one line each, exit code = number
// of failures. Tolerances and runtime budgets are literals here on purpose;
// they are the contract, not knobs.

#include "../src/averaging.hpp"
#include "../src/core.hpp"
#include "../src/error.hpp"
#include "../src/experiments.hpp"
#include "../src/spectral.hpp"

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

using namespace sparselab;

namespace {

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return std::string(buf);
}

using steady = std::chrono::steady_clock;

double since(steady::time_point t0) {
    return std::chrono::duration<double>(steady::now() - t0).count();
}

struct criterion {
    bool pass = true;
    std::string detail;

    void gate(bool ok, const std::string& what) {
        pass = pass && ok;
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
    // runtime budgets are part of the contract where stated
    void budget(double seconds, double limit) {
        gate(seconds <= limit, fmt("%.1fs (budget %.0fs)", seconds, limit));
    }
};

grid_spec cube_box(int d, int n, double halfwidth) {
    grid_spec s;
    s.d = d;
    s.n = n;
    for (int a = 0; a < d; ++a) {
        s.lo[a] = -halfwidth;
        s.hi[a] = halfwidth;
    }
    return s;
}

grid_function ones(const grid_spec& spec) {
    grid_function f(spec);
    for (double& v : f.values) v = 1.0;
    return f;
}

std::size_t center_flat(const grid_spec& spec) {
    std::size_t flat = 0;
    for (int a = 0; a < spec.d; ++a) flat = flat * (std::size_t)spec.n + (std::size_t)(spec.n / 2);
    return flat;
}

double center_average(const grid_function& f, const grid_function& g, double t,
                      eval_options opts = {}) {
    const std::vector<std::uint32_t> mask{(std::uint32_t)center_flat(f.spec)};
    opts.mask = &mask;
    const grid_function out = bilinear_spherical_average(f, g, t, opts);
    return out.values[center_flat(f.spec)];
}

std::vector<double> halving(double from, int count) {
    std::vector<double> v;
    for (int i = 0; i < count; ++i) v.push_back(std::ldexp(from, -i));
    return v;
}

// ---------------------------------------------------------------- criteria

// 1. A_t(1,1) = 1 at default quadrature, every d and t.
void c_normalization(criterion& c, steady::time_point t0) {
    double worst = 0.0;
    for (int d : {1, 2, 3}) {
        const grid_spec spec = cube_box(d, d == 3 ? 48 : 128, 4.0);
        const grid_function one = ones(spec);
        for (double t : {0.5, 1.0, 2.0})
            worst = std::max(worst, std::fabs(center_average(one, one, t) - 1.0));
    }
    c.gate(worst <= 1e-6, fmt("max |A_t(1,1) - 1| = %.2e (tol 1e-6), d in {1,2,3}, t in {0.5,1,2}", worst));
    c.budget(since(t0), 10.0);
}

// 2. Equal balls of radius 0.8 in d = 2 at the origin, t = 1: the sliced
// value must match 0.28 (|y|^2 is uniform on [0,1] on the 3-sphere, so the
// probability of 0.36 <= |y|^2 <= 0.64 is exactly 0.28) and an independent
// Monte Carlo sampler of the same surface integral.
void c_slicing_oracle(criterion& c, steady::time_point t0) {
    const grid_spec spec = cube_box(2, 512, 2.0);
    const grid_function f = make_indicator(spec, region_spec::ball({0.0, 0.0, 0.0}, 0.8));
    eval_options eo;
    eo.n_radial = 256;
    eo.slot_f = {256, 0.0};
    eo.slot_g = {256, 0.0};
    const double grid_val = center_average(f, f, 1.0, eo);

    // u uniform on the 3-sphere via normalized gaussians; y, z are its halves
    std::mt19937_64 rng(424242);
    std::normal_distribution<double> nd;
    const int n_samples = 1000000;
    int hits = 0;
    for (int i = 0; i < n_samples; ++i) {
        const double a = nd(rng), b = nd(rng), u = nd(rng), v = nd(rng);
        const double s2 = a * a + b * b + u * u + v * v;
        const double y2 = (a * a + b * b) / s2, z2 = (u * u + v * v) / s2;
        if (y2 <= 0.64 && z2 <= 0.64) ++hits;
    }
    const double mc = (double)hits / n_samples;

    c.gate(std::fabs(grid_val - 0.28) <= 0.01,
           fmt("grid %.4f vs closed form 0.28 (tol 0.01)", grid_val));
    c.gate(std::fabs(grid_val - mc) <= 0.02, fmt("vs Monte Carlo %.4f (tol 0.02)", mc));
    c.budget(since(t0), 60.0);
}

// 3. Concentrated ball against an annulus, d = 2: pairing slope 3, norm
// product slope d(1/p + 1/q) = 2 at (2,2,2).
void c_scaling_ball_annulus(criterion& c, steady::time_point t0) {
    sharpness_options so;
    so.n_per_axis = 1024;
    const sharpness_result res =
        sharpness_run(extremizer_kind::ball_annulus, 2, halving(0.125, 5), so);
    c.gate(std::fabs(res.lower_fit.slope - 3.0) <= 0.2,
           fmt("pairing slope %.3f vs 3 (tol 0.2)", res.lower_fit.slope));
    c.gate(std::fabs(res.upper_fit.slope - 2.0) <= 0.05,
           fmt("norm-product slope %.3f vs 2 (tol 0.05)", res.upper_fit.slope));
    c.budget(since(t0), 600.0);
}

// 4. Matching annuli against a ball (pairing slope 1 + d = 3; the thinnest
// annulus needs more than 1228 cells per axis, so this family runs at 1536)
// and the plate triple (slope d + (d-1)/2 = 2.5, norm product 1.75 at (2,2,2)).
void c_scaling_other_families(criterion& c, steady::time_point /*t0*/) {
    sharpness_options so;
    so.n_per_axis = 1536;
    const sharpness_result ann =
        sharpness_run(extremizer_kind::annuli_ball, 2, halving(0.125, 5), so);
    c.gate(std::fabs(ann.lower_fit.slope - 3.0) <= 0.2,
           fmt("annuli pairing slope %.3f vs 3 (tol 0.2)", ann.lower_fit.slope));

    so.n_per_axis = 1024;
    const sharpness_result kn =
        sharpness_run(extremizer_kind::knapp_boxes, 2, halving(0.125, 4), so);
    c.gate(std::fabs(kn.lower_fit.slope - 2.5) <= 0.25,
           fmt("plate pairing slope %.3f vs 2.5 (tol 0.25)", kn.lower_fit.slope));
    c.gate(std::fabs(kn.upper_fit.slope - 1.75) <= 0.05,
           fmt("plate norm-product slope %.3f vs 1.75 (tol 0.05)", kn.upper_fit.slope));
}

// 5. Shift-difference decay at (2,2,2,2): a positive rate for indicator
// inputs, rate 1 for smooth inputs.
void c_continuity(criterion& c, steady::time_point /*t0*/) {
    const grid_spec spec = cube_box(2, 1024, 2.0);
    const grid_function f = make_indicator(spec, region_spec::ball({0.0, 0.0, 0.0}, 0.6));
    const std::array<double, 3> ctr{0.15, -0.1, 0.0};
    const std::vector<double> hs = halving(0.0625, 5);

    continuity_options co;
    co.norm = exponent_triple(rat(2), rat(2), rat(2));
    const continuity_result ind =
        continuity_decay_run(f, make_indicator(spec, region_spec::ball(ctr, 0.5)), hs, co);
    c.gate(ind.fit.slope > 0.05, fmt("indicator rate %.3f > 0.05", ind.fit.slope));

    // the smooth input covers the whole box, so the norm samples coarser
    co.stride = 16;
    const continuity_result sm = continuity_decay_run(f, gaussian_bump(spec, ctr, 0.3), hs, co);
    c.gate(std::fabs(sm.fit.slope - 1.0) <= 0.15,
           fmt("smooth rate %.3f vs 1 (tol 0.15)", sm.fit.slope));
}

// 6. Radius-window oscillation of a small ball, d = 2, (p,r) = (2,4):
// dilation slope 2/r - 2/p = -1/2 at the widest window, growth in the window
// width at the largest dilation.
void c_radius_perturbation(criterion& c, steady::time_point /*t0*/) {
    const grid_spec spec = cube_box(2, 2048, 1.2);
    const grid_function f =
        make_indicator(spec, region_spec::ball({0.0, 0.0, 0.0}, 4.0 * spec.min_spacing()));
    const std::vector<double> gammas{0.0025, 0.005, 0.01, 0.02, 0.1};
    const radius_perturbation_result res =
        radius_perturbation_run(f, gammas, halving(0.5, 3), {});
    c.gate(res.expected_eps_slope == -0.5, "closed-form rate is -1/2");
    c.gate(std::fabs(res.eps_fits[4].slope + 0.5) <= 0.2,
           fmt("dilation slope %.3f vs -0.5 (tol 0.2) at window 0.1", res.eps_fits[4].slope));
    c.gate(res.gamma_fit.slope > 0.0,
           fmt("window growth %.3f > 0 at dilation 0.5", res.gamma_fit.slope));
}

// 7. Frequency-band decay of periodic averages, d = 1: every frozen seed
// decays, the unprojected control is flat.
void c_band_decay(criterion& c, steady::time_point /*t0*/) {
    const std::vector<int> ks{2, 3, 4, 5, 6, 7};
    double worst_decay = -1e30, worst_control = 0.0;
    for (std::uint64_t seed : {12345ull, 777ull, 2024ull}) {
        const periodic_field f1 = decaying_random_field(65536, 8.0, 0.75, seed);
        const periodic_field f2 = decaying_random_field(65536, 8.0, 0.75, seed + 1);
        band_decay_options bo;
        const band_decay_result decay = band_decay_experiment(f1, f2, ks, bo);
        bo.control = true;
        const band_decay_result control = band_decay_experiment(f1, f2, ks, bo);
        worst_decay = std::max(worst_decay, decay.fit.slope);
        worst_control = std::max(worst_control, std::fabs(control.fit.slope));
    }
    c.gate(worst_decay <= -0.1, fmt("worst band slope %.3f <= -0.1 over 3 seeds", worst_decay));
    c.gate(worst_control < 0.02, fmt("worst control slope %.1e within 0.02", worst_control));
}

// 8. Stopping-time decomposition and sparsity on the 20-input randomized
// suite, d = 1 and 2, with a one-step grid doubling.
void c_sparse_suite(criterion& c, steady::time_point t0) {
    const sparse_suite_result res = sparse_suite({});
    bool cz = true, eta = true;
    double worst_eta_margin = 1e30;
    for (const sparse_suite_row& r : res.rows) {
        cz = cz && r.cz_reconstruction <= 1e-10 && r.cz_mean_zero <= 1e-10 &&
             r.cz_good_bound <= 1.0 + 1e-9 && r.cz_maximal;
        const double target = std::ldexp(1.0, -r.d - 2);
        eta = eta && r.sparsity_ok && r.eta + 1e-12 >= target && r.eta_target == target;
        worst_eta_margin = std::min(worst_eta_margin, r.eta - target);
    }
    c.gate((int)res.rows.size() == 20, fmt("%zu inputs", res.rows.size()));
    c.gate(cz, "split invariants (reconstruction, mean zero, bound, maximality)");
    c.gate(eta, fmt("every density >= 2^-d-2 (worst margin %.3f)", worst_eta_margin));
    c.gate(res.max_drift < 0.25, fmt("max ratio drift %.3f < 0.25 under doubling", res.max_drift));
    c.budget(since(t0), 900.0);
}

// 9. Pointwise control of the bilinear maximal function by the product of
// the cube maximal of f and the spherical maximal of g, one constant.
void c_pointwise_bound(criterion& c, steady::time_point /*t0*/) {
    const pointwise_bound_result res = pointwise_bound_suite({});
    c.gate(std::isfinite(res.max_c) && res.max_c <= 10.0,
           fmt("single constant %.3f <= 10 over %zu pairs", res.max_c, res.rows.size()));
}

// 10. The nine tabulated exponent-region facts, exact in rational arithmetic.
void c_region_predicates(criterion& c, steady::time_point /*t0*/) {
    c.gate(m_bound(2, rat(2)) == rat(3, 2), "m(2,2) = 3/2");
    c.gate(m_bound(3, rat(2)) == rat(5, 3), "m(3,2) = 5/3");
    c.gate(m_bound(2, rat(4)) == rat(5, 4), "m(2,4) = 5/4");

    c.gate(in_region(2, exponent_triple(rat(2), rat(2), rat(2))), "(2,2,2) inside, d = 2");
    c.gate(!in_region(2, exponent_triple(rat(10, 9), rat(10, 9), rat(2))),
           "(10/9,10/9,2) outside, d = 2");
    c.gate(!in_region(1, exponent_triple(rat(2), rat(2), rat(1))),
           "(2,2,1) on the hull boundary, d = 1");

    // the closed necessary region is the conjunction of the three faces
    const auto necessity_all = [](const exponent_triple& t) {
        bool all = true;
        for (extremizer_kind k : {extremizer_kind::ball_annulus, extremizer_kind::annuli_ball,
                                  extremizer_kind::knapp_boxes})
            all = all && necessity_check(k, 2, t);
        return all;
    };
    const exponent_triple a(rat(2), rat(2), rat(2)), b(rat(4, 3), rat(4, 3), rat(2)),
        d(rat(5, 4), rat(5, 4), rat(2));
    c.gate(necessity_all(a) && necessity_condition(2, a), "(2,2,2) necessary, d = 2");
    c.gate(necessity_all(b) && necessity_condition(2, b), "(4/3,4/3,2) boundary necessary");
    c.gate(!necessity_all(d) && !necessity_condition(2, d), "(5/4,5/4,2) not necessary");
}

} // namespace

int main() {
    struct entry {
        const char* name;
        void (*fn)(criterion&, steady::time_point);
    };
    const entry entries[] = {
        {"normalization", c_normalization},
        {"equal-ball slicing oracle", c_slicing_oracle},
        {"ball-annulus scaling", c_scaling_ball_annulus},
        {"annuli-ball and plate scalings", c_scaling_other_families},
        {"shift-difference decay", c_continuity},
        {"radius-window perturbation", c_radius_perturbation},
        {"frequency-band decay", c_band_decay},
        {"stopping-time and sparsity suite", c_sparse_suite},
        {"pointwise product bound", c_pointwise_bound},
        {"exponent region predicates", c_region_predicates},
    };

    int failures = 0;
    for (int i = 0; i < 10; ++i) {
        criterion c;
        const steady::time_point t0 = steady::now();
        try {
            entries[i].fn(c, t0);
        } catch (const std::exception& e) {
            c.pass = false;
            c.gate(false, std::string("exception: ") + e.what());
        }
        std::printf("[%s] %d. %s: %s [%.1fs]\n", c.pass ? "PASS" : "FAIL", i + 1,
                    entries[i].name, c.detail.c_str(), since(t0));
        std::fflush(stdout);
        if (!c.pass) ++failures;
    }
    std::printf("%d/10 criteria passed\n", 10 - failures);
    return failures;
}
