#include <doctest.h>

#include "../src/error.hpp"
#include "../src/experiments.hpp"

#include <cmath>
#include <string>
#include <vector>

using namespace sparselab;

namespace {

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

std::string thrown_message(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const error& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST_CASE("closed form exponents carry the tabulated values") {
    const exponent_triple t222(rat(2), rat(2), rat(2));
    CHECK(lower_exponent_closed_form(extremizer_kind::ball_annulus, 2) == 3.0);
    CHECK(lower_exponent_closed_form(extremizer_kind::annuli_ball, 2) == 3.0);
    CHECK(lower_exponent_closed_form(extremizer_kind::knapp_boxes, 2) == 2.5);
    CHECK(lower_exponent_closed_form(extremizer_kind::ball_annulus, 3) == 5.0);

    CHECK(upper_exponent_closed_form(extremizer_kind::ball_annulus, 2, t222) == 2.0);
    CHECK(upper_exponent_closed_form(extremizer_kind::knapp_boxes, 2, t222) ==
          doctest::Approx(1.75).epsilon(1e-15));
    // upper exponents respect Hoelder scaling in the first two slots
    const exponent_triple t442(rat(4), rat(4), rat(2));
    CHECK(upper_exponent_closed_form(extremizer_kind::ball_annulus, 2, t442) == 1.0);
}

TEST_CASE("each family witnesses its own necessity face") {
    // (10/9, 10/9, 2) breaks the concentration face (sum 1.8 > 3/2) while
    // satisfying the slab face (1.8 <= 1 + d/r = 2)
    const exponent_triple bad0(rat(10, 9), rat(10, 9), rat(2));
    CHECK_FALSE(necessity_check(extremizer_kind::ball_annulus, 2, bad0));
    CHECK(necessity_check(extremizer_kind::annuli_ball, 2, bad0));

    // (2, 2, 2) sits inside every face
    const exponent_triple good(rat(2), rat(2), rat(2));
    for (extremizer_kind k : {extremizer_kind::ball_annulus, extremizer_kind::annuli_ball,
                              extremizer_kind::knapp_boxes})
        CHECK(necessity_check(k, 2, good));

    // at r = 8 the transverse face is strictly the strongest: sum 23/16
    // exceeds the knapp bound 11/8 but not the concentration bound 3/2
    const exponent_triple mid(rat(32, 23), rat(32, 23), rat(8));
    CHECK(necessity_check(extremizer_kind::ball_annulus, 2, mid));
    CHECK_FALSE(necessity_check(extremizer_kind::knapp_boxes, 2, mid));

    CHECK_THROWS_AS(necessity_check(extremizer_kind::ball_annulus, 1, good), error);
}

TEST_CASE("extremizer guards name the failing resolution") {
    // delta thinner than four cells
    const std::string small = thrown_message([] {
        make_extremizer(extremizer_kind::ball_annulus, 2, 1.0 / 64.0, cube_box(2, 64, 1.0));
    });
    CHECK(small.find("four cells") != std::string::npos);
    CHECK(small.find("n >=") != std::string::npos);

    // support running into the box boundary
    const std::string tight = thrown_message([] {
        make_extremizer(extremizer_kind::ball_annulus, 2, 0.25, cube_box(2, 256, 0.75));
    });
    CHECK(tight.find("four cells") != std::string::npos);

    // a narrow slab factor passes the delta guard (0.1 = 4 cells) while the
    // slab width 2 * 0.2 * delta undercuts the 2.5-cell floor
    const std::string thin = thrown_message([] {
        extremizer_params par;
        par.knapp_c1 = 0.2;
        make_extremizer(extremizer_kind::knapp_boxes, 2, 0.1, cube_box(2, 128, 1.6), par);
    });
    CHECK(thin.find("thin") != std::string::npos);
}

TEST_CASE("extremizer supports scale with delta") {
    const grid_spec spec = cube_box(2, 512, 1.0);
    extremizer_params par;
    const extremizer_triple big = make_extremizer(extremizer_kind::ball_annulus, 2, 0.2, spec, par);
    const extremizer_triple small =
        make_extremizer(extremizer_kind::ball_annulus, 2, 0.1, spec, par);

    // f is the delta-ball: mass drops by the area factor 4
    const double mb = lp_norm(big.f, 1.0), ms = lp_norm(small.f, 1.0);
    CHECK(mb == doctest::Approx(M_PI * 0.04).epsilon(0.05));
    CHECK(mb / ms == doctest::Approx(4.0).epsilon(0.08));

    // h is the fixed shell: its mass is delta independent
    CHECK(lp_norm(big.h, 1.0) == doctest::Approx(lp_norm(small.h, 1.0)).epsilon(0.01));

    // every support is nonnegative and nontrivial
    for (const grid_function* p : {&big.f, &big.g, &big.h}) {
        double lo = 0.0, mass = 0.0;
        for (double v : p->values) {
            lo = std::min(lo, v);
            mass += v;
        }
        CHECK(lo == 0.0);
        CHECK(mass > 0.0);
    }
}

TEST_CASE("coarse sharpness run recovers the concentration scaling") {
    sharpness_options opts;
    opts.n_per_axis = 128;
    const std::vector<double> deltas{0.25, 0.125, 0.0625};
    const sharpness_result res =
        sharpness_run(extremizer_kind::ball_annulus, 2, deltas, opts);

    REQUIRE(res.rows.size() == 3);
    for (const sharpness_row& r : res.rows) {
        CHECK(r.lower > 0.0);
        CHECK(r.upper > 0.0);
    }
    CHECK(res.lower_exponent == 3.0);
    CHECK(res.upper_exponent == doctest::Approx(2.0));
    CHECK(res.necessity);
    // the norm column is nearly exact even at this resolution
    CHECK(res.upper_fit.slope == doctest::Approx(2.0).epsilon(0.15 / 2.0));
    // the pairing column needs finer grids for tight slopes: loose window
    CHECK(res.lower_fit.slope > 2.0);
    CHECK(res.lower_fit.slope < 4.0);
}

TEST_CASE("continuity decay of smooth inputs is near linear") {
    const grid_spec spec = cube_box(2, 256, 2.0);
    const grid_function f = gaussian_bump(spec, {0.0, 0.0, 0.0}, 0.5);
    const grid_function g = gaussian_bump(spec, {0.2, -0.1, 0.0}, 0.35);
    continuity_options opts;
    opts.slot_f = {128, 0.0};
    opts.slot_g = {256, 0.0};
    opts.n_radial = 128;
    const std::vector<double> hs{0.125, 0.0625, 0.03125};
    const continuity_result res = continuity_decay_run(f, g, hs, opts);

    REQUIRE(res.rows.size() == 3);
    for (std::size_t i = 0; i + 1 < res.rows.size(); ++i)
        CHECK(res.rows[i].value > res.rows[i + 1].value); // smaller h, smaller gap
    CHECK(res.fit.slope == doctest::Approx(1.0).epsilon(0.3));
}

TEST_CASE("radius perturbation saturates at the dilation-covariant rate") {
    // d = 1, r = 4: the saturated epsilon slope is d/r - (d-1) = 1/4
    const grid_spec spec = cube_box(1, 2048, 1.2);
    const double b = 4.0 * spec.spacing(0);
    const grid_function f = make_indicator(spec, region_spec::ball({0.0, 0.0, 0.0}, b));

    radius_perturbation_options opts;
    opts.p = 2.0;
    opts.r = 4.0;
    opts.n_s = 401;
    const std::vector<double> gammas{0.005, 0.01, 0.02, 0.1};
    const std::vector<double> epss{0.5, 0.25, 0.125};
    const radius_perturbation_result res = radius_perturbation_run(f, gammas, epss, opts);

    CHECK(res.expected_eps_slope == doctest::Approx(0.25).epsilon(1e-15));
    REQUIRE(res.eps_fits.size() == 4);
    // at the widest gamma the support is small against gamma * eps
    CHECK(res.eps_fits[3].slope == doctest::Approx(0.25).epsilon(0.2 / 0.25));
    // more aperture never shrinks the variation
    for (std::size_t e = 0; e < epss.size(); ++e)
        CHECK(res.values[3][e] >= res.values[0][e] * (1.0 - 1e-12));
    // a 1d indicator profile is a sharp staircase in the radius, so every
    // admissible window already sees the whole jump: V is flat in gamma
    CHECK(res.gamma_fit.slope == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("radius perturbation gamma growth needs a continuous profile") {
    // in d = 2 the circle fraction inside a small ball ramps continuously,
    // so below saturation the windowed variation grows with gamma
    const grid_spec spec = cube_box(2, 512, 1.2);
    const double b = 4.0 * spec.spacing(0);
    const grid_function f = make_indicator(spec, region_spec::ball({0.0, 0.0, 0.0}, b));

    radius_perturbation_options opts;
    opts.p = 2.0;
    opts.r = 4.0;
    opts.n_s = 401;
    opts.stride = 32;
    opts.slot = {512, 0.0};
    const std::vector<double> gammas{0.005, 0.01, 0.02};
    const std::vector<double> epss{0.5, 0.42, 0.36};
    const radius_perturbation_result res = radius_perturbation_run(f, gammas, epss, opts);

    CHECK(res.expected_eps_slope == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(res.values[1][0] > res.values[0][0]);
    CHECK(res.values[2][0] > res.values[1][0]);
    CHECK(res.gamma_fit.slope > 0.2);
}

TEST_CASE("pointwise product bound holds on a small randomized suite") {
    pointwise_bound_options opts;
    opts.n = 64;
    opts.n_pairs = 3;
    opts.n_t_per_octave = 9;
    opts.stride = 8;
    opts.slot = {128, 0.0};
    opts.n_radial = 64;
    const pointwise_bound_result res = pointwise_bound_suite(opts);

    REQUIRE(res.rows.size() == 3);
    double worst = 0.0;
    for (const pointwise_bound_row& r : res.rows) {
        CHECK(r.c > 0.0);
        worst = std::max(worst, r.c);
    }
    CHECK(res.max_c == doctest::Approx(worst).epsilon(1e-15));
    CHECK(res.max_c <= 10.0);
}

TEST_CASE("sparse suite invariants hold at reduced resolution") {
    sparse_suite_options opts;
    opts.n_d1 = 2;
    opts.n_d2 = 1;
    opts.n1 = 256;
    opts.n2 = 32;
    opts.npo_d1 = 9;
    opts.npo_d2 = 5;
    opts.slot = {128, 0.0};
    opts.n_radial = 64;
    const sparse_suite_result res = sparse_suite(opts);

    REQUIRE(res.rows.size() == 3);
    double drift = 0.0;
    for (const sparse_suite_row& r : res.rows) {
        CHECK(r.cz_reconstruction <= 1e-10);
        CHECK(r.cz_mean_zero <= 1e-10);
        CHECK(r.cz_good_bound <= 1.0 + 1e-9);
        CHECK(r.cz_maximal);
        CHECK(r.sparsity_ok);
        CHECK(r.eta >= r.eta_target);
        CHECK(r.ratio_base > 0.0);
        CHECK(r.ratio_doubled > 0.0);
        drift = std::max(drift, r.drift);
    }
    CHECK(res.max_drift == doctest::Approx(drift).epsilon(1e-15));
    // eta_target is the dimensional floor 2^{-d-2}
    CHECK(res.rows[0].eta_target == doctest::Approx(std::pow(2.0, -3.0)).epsilon(1e-15));
}
