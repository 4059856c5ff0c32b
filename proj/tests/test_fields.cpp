#include <doctest.h>

#include "../src/error.hpp"
#include "../src/grid.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

using namespace sparselab;

namespace {

std::vector<std::string> captured_warnings;
void capture(const std::string& msg) { captured_warnings.push_back(msg); }

struct warning_capture {
    warning_capture() {
        captured_warnings.clear();
        set_warning_handler(&capture);
    }
    ~warning_capture() { set_warning_handler(nullptr); }
};

grid_spec square(int d, int n, double lo, double hi) {
    grid_spec s;
    s.d = d;
    s.n = n;
    for (int a = 0; a < d; ++a) {
        s.lo[a] = lo;
        s.hi[a] = hi;
    }
    return s;
}

} // namespace

TEST_CASE("grid_spec validation and geometry") {
    grid_spec s = square(2, 8, -1.0, 1.0);
    CHECK_NOTHROW(s.validate());
    CHECK(s.spacing(0) == 0.25);
    CHECK(s.cell_volume() == doctest::Approx(0.0625));
    CHECK(s.total_cells() == 64);
    CHECK(s.center(0, 0) == doctest::Approx(-0.875));
    CHECK(s.center(0, 7) == doctest::Approx(0.875));

    s.n = 1;
    CHECK_THROWS_AS(s.validate(), error);
    s.n = 8;
    s.hi[1] = -2.0;
    CHECK_THROWS_AS(s.validate(), error);
    s = square(4, 8, 0.0, 1.0);
    CHECK_THROWS_AS(s.validate(), error);
}

TEST_CASE("indicator membership and measures") {
    const grid_spec spec = square(2, 512, -1.0, 1.0);
    const grid_function ball = make_indicator(spec, region_spec::ball({0.0, 0.0, 0.0}, 0.5));
    double origin[2] = {0.0, 0.0};
    double edge[2] = {1.0, 0.0};
    CHECK(ball.lookup(origin) == 1.0);
    CHECK(ball.lookup(edge) == 0.0);

    // Riemann-sum area vs closed form pi/4
    CHECK(lp_norm(ball, 1.0) == doctest::Approx(M_PI / 4.0).epsilon(0.02));

    // annulus area pi (r_out^2 - r_in^2) with r_in = 1/sqrt(2), r_out = r_in + 0.1
    const double rin = 1.0 / std::sqrt(2.0);
    const grid_function ann = make_indicator(spec, region_spec::annulus({0.0, 0.0, 0.0}, rin, rin + 0.1));
    const double area = M_PI * (0.1 * 0.1 + 2.0 * 0.1 * rin);
    CHECK(lp_norm(ann, 1.0) == doctest::Approx(area).epsilon(0.02));

    // region missing the box gives the zero function, not an error
    const grid_function off = make_indicator(spec, region_spec::ball({5.0, 5.0, 0.0}, 0.25));
    CHECK(lp_norm(off, 1.0) == 0.0);
}

TEST_CASE("closed-boundary convention of regions") {
    // centers sit at odd multiples of 1/16; the ball of radius exactly 1/4
    // about the center 1/16 reaches the centers at -3/16 and 5/16 exactly
    // (boundary points, included by the closed convention)
    const grid_spec spec = square(1, 16, -1.0, 1.0);
    const grid_function f = make_indicator(spec, region_spec::ball({1.0 / 16.0, 0.0, 0.0}, 0.25));
    CHECK(f.lookup1(-3.0 / 16.0) == 1.0);
    CHECK(f.lookup1(5.0 / 16.0) == 1.0);
    CHECK(f.lookup1(-5.0 / 16.0) == 0.0);
    CHECK(f.lookup1(7.0 / 16.0) == 0.0);
}

TEST_CASE("shift maps samples to samples") {
    const grid_spec spec = square(1, 256, -2.0, 2.0);
    const grid_function f = make_indicator(spec, region_spec::box({0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}));

    // h = 0 is the identity
    grid_function same = shift(f, {0.0, 0.0, 0.0});
    CHECK(same.values == f.values);

    // exact multiple: chi_[0,1] moved by 1/2 equals chi_[0.5,1.5] sampled directly
    const grid_function moved = shift(f, {0.5, 0.0, 0.0});
    const grid_function direct =
        make_indicator(spec, region_spec::box({0.5, 0.0, 0.0}, {1.5, 0.0, 0.0}));
    CHECK(moved.values == direct.values);

    // +spacing then -spacing is the identity for interior supports
    const double sp = spec.spacing(0);
    const grid_function back = shift(shift(f, {sp, 0.0, 0.0}), {-sp, 0.0, 0.0});
    CHECK(back.values == f.values);

    // norms survive interior shifts exactly
    CHECK(lp_norm(moved, 2.0) == doctest::Approx(lp_norm(f, 2.0)).epsilon(1e-14));
}

TEST_CASE("shift snapping and degenerate warnings") {
    const grid_spec spec = square(1, 64, -2.0, 2.0);
    const grid_function f = make_indicator(spec, region_spec::ball({0.0, 0.0, 0.0}, 0.5));

    warning_capture guard;
    const grid_function snapped = shift(f, {0.1, 0.0, 0.0}); // 0.1 / 0.0625 = 1.6 cells
    REQUIRE(captured_warnings.size() == 1);
    CHECK(captured_warnings[0].find("snapped") != std::string::npos);
    // snapped to 2 cells = 0.125
    const grid_function exact = shift(f, {0.125, 0.0, 0.0});
    CHECK(snapped.values == exact.values);

    captured_warnings.clear();
    const grid_function gone = shift(f, {5.0, 0.0, 0.0});
    REQUIRE(captured_warnings.size() == 1);
    CHECK(captured_warnings[0].find("degenerate") != std::string::npos);
    CHECK(lp_norm(gone, 1.0) == 0.0);
}

TEST_CASE("lp_norm values and homogeneity") {
    const grid_spec spec = square(1, 256, -2.0, 2.0);
    const grid_function f = make_indicator(spec, region_spec::box({0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}));
    // unit-mass indicator: every p gives 1
    for (double p : {0.5, 1.0, 2.0, 4.0})
        CHECK(lp_norm(f, p) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(lp_norm(f, std::numeric_limits<double>::infinity()) == 1.0);

    // constant c on volume V: c * V^{1/p}
    grid_function c(spec);
    for (double& v : c.values) v = 2.5;
    CHECK(lp_norm(c, 2.0) == doctest::Approx(2.5 * std::pow(4.0, 0.5)).epsilon(1e-13));

    const grid_function g = linear_combination(3.0, f, 0.0, f);
    CHECK(lp_norm(g, 2.0) == doctest::Approx(3.0 * lp_norm(f, 2.0)).epsilon(1e-12));
}

TEST_CASE("pairing is the grid inner product") {
    const grid_spec spec = square(1, 256, -2.0, 2.0);
    const grid_function a = make_indicator(spec, region_spec::box({0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}));
    const grid_function b =
        make_indicator(spec, region_spec::box({0.5, 0.0, 0.0}, {1.5, 0.0, 0.0}));
    const grid_function zero(spec);

    CHECK(pairing(a, a) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(pairing(a, zero) == 0.0);
    CHECK(pairing(a, b) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(pairing(a, b) == pairing(b, a));

    // bilinearity
    const grid_function combo = linear_combination(2.0, a, -3.0, b);
    CHECK(pairing(combo, b) ==
          doctest::Approx(2.0 * pairing(a, b) - 3.0 * pairing(b, b)).epsilon(1e-12));

    grid_function other(square(1, 128, -2.0, 2.0));
    CHECK_THROWS_AS(pairing(a, other), error);
}

TEST_CASE("serialization round trips") {
    const grid_spec spec = square(2, 32, -1.0, 1.5);
    grid_function f = make_indicator(spec, region_spec::ball({0.2, -0.3, 0.0}, 0.6));
    f = linear_combination(1.0, f, 0.25,
                           make_indicator(spec, region_spec::box({-0.9, -0.9, 0.0},
                                                                 {-0.1, 0.4, 0.0})));

    const std::string bin = "/tmp/sparselab_test_field.bin";
    const std::string csv = "/tmp/sparselab_test_field.csv";
    save_binary(f, bin);
    const grid_function fb = load_binary(bin);
    CHECK(fb.spec == f.spec);
    CHECK(fb.values == f.values);

    save_csv(f, csv);
    const grid_function fc = load_csv(csv);
    CHECK(fc.spec == f.spec);
    CHECK(fc.values == f.values); // %.17g round-trips doubles exactly

    CHECK_THROWS_AS(load_binary("/tmp/sparselab_no_such_file.bin"), error);
    CHECK_THROWS_AS(load_csv(bin), error); // wrong format header
    std::remove(bin.c_str());
    std::remove(csv.c_str());
}

TEST_CASE("nonzero_bbox finds the support box") {
    const grid_spec spec = square(2, 64, 0.0, 2.0);
    const grid_function f =
        make_indicator(spec, region_spec::box({0.5, 0.75, 0.0}, {1.0, 1.25, 0.0}));
    std::array<long long, 3> ilo{}, ihi{};
    REQUIRE(nonzero_bbox(f, ilo, ihi));
    // spacing 1/32; centers inside [0.5, 1.0] are cells 16..31
    CHECK(ilo[0] == 16);
    CHECK(ihi[0] == 31);
    CHECK(ilo[1] == 24);
    CHECK(ihi[1] == 39);

    const grid_function zero(spec);
    CHECK_FALSE(nonzero_bbox(zero, ilo, ihi));
}

TEST_CASE("pairing and shift are adjoint on interior supports") {
    const grid_spec spec = square(2, 64, -2.0, 2.0);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    grid_function f(spec), g(spec);
    // random fields supported away from the boundary
    const long long n = spec.n;
    for (long long i = 8; i < n - 8; ++i)
        for (long long j = 8; j < n - 8; ++j) {
            f.values[i * n + j] = u(rng);
            g.values[i * n + j] = u(rng);
        }
    const double sp = spec.spacing(0);
    const std::array<double, 3> h{3 * sp, -2 * sp, 0.0};
    const std::array<double, 3> mh{-3 * sp, 2 * sp, 0.0};
    CHECK(pairing(shift(f, h), g) == doctest::Approx(pairing(f, shift(g, mh))).epsilon(1e-13));
}
