#pragma once

#include "maximal.hpp"
#include "sparse.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace sparselab {

// Sample a pointwise-defined function at the cell centers.
grid_function sample_function(const grid_spec& spec,
                              const std::function<double(const double*)>& fn);

grid_function gaussian_bump(const grid_spec& spec, const std::array<double, 3>& center,
                            double sigma);

enum class extremizer_kind { ball_annulus, annuli_ball, knapp_boxes };

struct extremizer_params {
    double g_factor = 2.0;       // ball_annulus: g radius in units of delta
    double shell_radius = 0.70710678118654752; // ball_annulus: h shell center
    double shell_width = 0.04;   // ball_annulus: h shell thickness
    double ann_center = 0.85;    // annuli_ball: common annulus radius
    double wf = 1.0, wg = 2.0;   // annuli_ball: half-widths in units of delta
    double knapp_c1 = 1.0, knapp_c2 = 1.0; // knapp_boxes: slab width factors
};

struct extremizer_triple {
    grid_function f, g, h;
};

// The three concentration families, centered at the box center. Scale delta
// must be at least four cells wide and every support must clear the box
// boundary by four cells; violations raise errors naming the needed grid.
extremizer_triple make_extremizer(extremizer_kind kind, int d, double delta,
                                  const grid_spec& spec, const extremizer_params& par = {});

// Predicted pairing exponent: pairing(M_loc(f,g), h) ~ delta^e.
double lower_exponent_closed_form(extremizer_kind kind, int d);
// Predicted norm-product exponent: |f|_p |g|_q |h|_{r'} ~ delta^e.
double upper_exponent_closed_form(extremizer_kind kind, int d, const exponent_triple& t);

// Each family witnesses one scaling obstruction; true when the exponents
// pass that family's necessary inequality. Requires d >= 2.
bool necessity_check(extremizer_kind kind, int d, const exponent_triple& t);

struct sharpness_options {
    exponent_triple t{rat(2), rat(2), rat(2)};
    int n_per_axis = 1024;
    double box_halfwidth = 0.0; // 0 = per-family default (1.0 / 1.2 / 1.6)
    extremizer_params par;
    int threads = 0;
    // quadrature policy: counts scale like 1/delta between the clamps
    double ang_per_delta = 24.0;
    int min_ang = 256, max_ang = 16384;
    double phi_per_delta = 12.0;
    int min_phi = 64, max_phi = 4096;
    double t_per_delta = 4.0;
    int min_t = 33;
    double t_lo = 1.0, t_hi = 2.0;
};

struct sharpness_row {
    double delta, lower, upper;
};

struct sharpness_result {
    std::vector<sharpness_row> rows;
    scaling_fit lower_fit, upper_fit;
    double lower_exponent = 0.0, upper_exponent = 0.0; // closed forms
    bool necessity = false;
};

// For each delta: lower = pairing(localized maximal of (f, g), h) on supp h,
// upper = |f|_p |g|_q |h|_{r'}; fits both columns against delta.
sharpness_result sharpness_run(extremizer_kind kind, int d,
                               const std::vector<double>& deltas,
                               const sharpness_options& opts = {});

struct continuity_options {
    double t = 1.0;
    exponent_triple norm{rat(2), rat(2), rat(1)}; // r = norm exponent
    int axis = 0;
    int stride = 8;
    slot_options slot_f{128, 0.0}, slot_g{512, 0.0};
    int n_radial = 256;
    int threads = 0;
};

struct continuity_row {
    double h, value;
};

struct continuity_result {
    std::vector<continuity_row> rows;
    scaling_fit fit;
};

// value(h) = || A_t(f, g - shift(g, h e_axis)) ||_{L^r} on a stride subgrid.
continuity_result continuity_decay_run(const grid_function& f, const grid_function& g,
                                       const std::vector<double>& hs,
                                       const continuity_options& opts = {});

struct radius_perturbation_options {
    double p = 2.0, r = 4.0;
    int n_s = 801;  // dilation samples across [1, 2]
    int stride = 8;
    slot_options slot{16384, 0.0};
    int threads = 0;
};

struct radius_perturbation_result {
    std::vector<double> gammas, epss;
    std::vector<std::vector<double>> values; // [gamma index][eps index]
    std::vector<scaling_fit> eps_fits;       // one per gamma
    scaling_fit gamma_fit;                   // against gamma, at epss[0]
    double expected_eps_slope = 0.0;         // d/r - (d-1), the saturated rate
};

// V(gamma, eps) = || sup over s,u in [1,2], |s-u| < gamma of
// |LinAvg f(x, eps s) - LinAvg f(x, eps u)| ||_{L^r} / |f|_p.
// Dilation covariance pins the eps slope at d/r - (d-1) once the support of
// f is small against eps * gamma.
radius_perturbation_result radius_perturbation_run(const grid_function& f,
                                                   const std::vector<double>& gammas,
                                                   const std::vector<double>& epss,
                                                   const radius_perturbation_options& opts = {});

struct pointwise_bound_options {
    int d = 2, n = 256;
    double box_halfwidth = 2.0;
    int m_lo = -1, m_hi = 0, n_t_per_octave = 17;
    int stride = 4;
    int n_pairs = 6;
    std::uint64_t seed = 2026;
    slot_options slot{256, 0.0};
    int n_radial = 256;
    int threads = 0;
};

struct pointwise_bound_row {
    int idx;
    double c; // max over the subgrid of M(f,g) / (HL f * M_sph g)
};

struct pointwise_bound_result {
    std::vector<pointwise_bound_row> rows;
    double max_c = 0.0;
};

// Randomized nonnegative indicator mixtures; checks the product-type control
// of the bilinear maximal by Hardy-Littlewood times the linear spherical
// maximal over the matching radius range. The linear maximal runs over every
// radius-table node, so each value the bilinear side consumed is dominated.
pointwise_bound_result pointwise_bound_suite(const pointwise_bound_options& opts = {});

struct sparse_suite_options {
    std::uint64_t seed = 7;
    int n_d1 = 12, n_d2 = 8;
    int n1 = 2048, n2 = 128; // base resolutions per dimension
    exponent_triple t{rat(2), rat(2), rat(2)};
    double c0 = 0.0;         // 0 = 2 * 3^d
    double cz_c0 = 2.0;
    bool doubled = true;     // rerun on a doubled grid and compare
    int m_lo = -1, m_hi = 0;
    int npo_d1 = 33, npo_d2 = 9;
    slot_options slot{256, 0.0};
    int n_radial = 128;
    int threads = 0;
};

struct sparse_suite_row {
    int d = 0, idx = 0;
    double cz_reconstruction = 0.0; // |good + bad - f|_inf
    double cz_mean_zero = 0.0;      // worst |mean of bad over a stopping cube|
    double cz_good_bound = 0.0;     // |good|_inf / (2^{d/p} c0 base)
    bool cz_maximal = false;        // stopping cubes exceed, parents do not
    double eta = 0.0, eta_target = 0.0;
    bool sparsity_ok = false;
    double ratio_base = 0.0, ratio_doubled = 0.0;
    double drift = 0.0; // |ratio change| / ratio_base
};

struct sparse_suite_result {
    std::vector<sparse_suite_row> rows;
    double max_drift = 0.0;
    bool pass = false;
};

// Randomized indicator-mixture inputs on [0,2]^d; runs the stopping-time
// decomposition checks, the sparsity verification, and the domination ratio
// at the base and doubled resolutions.
sparse_suite_result sparse_suite(const sparse_suite_options& opts = {});

} // namespace sparselab
