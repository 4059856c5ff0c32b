#include <doctest.h>

#include "../src/dyadic.hpp"
#include "../src/error.hpp"

#include <cmath>
#include <random>
#include <set>
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

grid_spec box_spec(int d, int n, double lo, double hi) {
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

TEST_CASE("cube geometry and child partition") {
    dyadic_cube q{2, 0, 3, {{-1, 2, 0}}};
    CHECK(q.side() == 8.0);
    CHECK(q.corner(0) == -8.0);
    CHECK(q.corner(1) == 16.0);

    const std::vector<dyadic_cube> kids = children(q);
    REQUIRE(kids.size() == 4);
    std::set<std::pair<long long, long long>> corners;
    for (const dyadic_cube& c : kids) {
        CHECK(c.level == 2);
        CHECK(c.lattice_id == q.lattice_id);
        CHECK(c.side() == 4.0);
        // child corners tile the parent: offsets {0, side} on each axis
        for (int a = 0; a < 2; ++a) {
            const double off = c.corner(a) - q.corner(a);
            CHECK((off == 0.0 || off == 4.0));
        }
        corners.insert({c.coords[0], c.coords[1]});
        CHECK(parent(c) == q);
    }
    CHECK(corners.size() == 4); // pairwise distinct, hence a partition
}

TEST_CASE("base third lattice scales sides by one third") {
    dyadic_cube q{1, -1, 0, {{2, 0, 0}}};
    CHECK(q.side() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(q.corner(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    const std::vector<dyadic_cube> kids = children(q);
    REQUIRE(kids.size() == 2);
    CHECK(kids[0].side() == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
}

TEST_CASE("shifted lattice offsets alternate with level parity") {
    // digit 0 never shifts; digit c shifts by c/3 at even levels, (3-c)/3 odd
    CHECK(lattice_offset(1, 1, 0, 0) == 0.0); // id 1 = digit 0
    CHECK(lattice_offset(1, 2, 0, 0) == doctest::Approx(1.0 / 3.0));
    CHECK(lattice_offset(1, 2, 0, 1) == doctest::Approx(2.0 / 3.0));
    CHECK(lattice_offset(1, 3, 0, 0) == doctest::Approx(2.0 / 3.0));
    CHECK(lattice_offset(1, 3, 0, 1) == doctest::Approx(1.0 / 3.0));
    // d = 2: id - 1 = 5 = 2 + 1*3 gives digit 2 on axis 0, digit 1 on axis 1
    CHECK(lattice_offset(2, 6, 0, 0) == doctest::Approx(2.0 / 3.0));
    CHECK(lattice_offset(2, 6, 1, 0) == doctest::Approx(1.0 / 3.0));
    CHECK_THROWS_AS(lattice_offset(2, 10, 0, 0), error);

    // the alternation keeps children inside the parent lattice: a child
    // corner must itself be a lattice corner one level down
    for (int id = 1; id <= 9; ++id)
        for (int level : {-2, -1, 0, 1, 3}) {
            dyadic_cube q{2, id, level, {{3, -2, 0}}};
            for (const dyadic_cube& c : children(q))
                for (int a = 0; a < 2; ++a) {
                    const double expect =
                        c.coords[a] * c.side() + lattice_offset(2, id, a, c.level) * c.side();
                    CHECK(c.corner(a) == doctest::Approx(expect).epsilon(1e-12));
                }
        }
}

TEST_CASE("three lattice cover contains the triple of every base cube") {
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<int> lev(-6, 6);
    std::uniform_int_distribution<long long> crd(-40, 40);
    for (int d : {1, 2, 3}) {
        for (int iter = 0; iter < 400; ++iter) {
            dyadic_cube q{d, -1, lev(rng), {{0, 0, 0}}};
            for (int a = 0; a < d; ++a) q.coords[a] = crd(rng);
            const dyadic_cube big = three_lattice_cover(q);
            CHECK(big.lattice_id >= 1);
            CHECK(big.lattice_id <= (int)std::llround(std::pow(3.0, d)));
            // side 2^level = 3 * side(q)
            CHECK(big.side() == doctest::Approx(3.0 * q.side()).epsilon(1e-13));
            for (int a = 0; a < d; ++a) {
                // the concentric triple of q starts one q-side to the left
                const double tlo = q.corner(a) - q.side();
                CHECK(big.corner(a) == doctest::Approx(tlo).epsilon(1e-11));
                // and the corner sits on the claimed shifted lattice
                const double expect = big.coords[a] * big.side() +
                                      lattice_offset(d, big.lattice_id, a, big.level) * big.side();
                CHECK(big.corner(a) == doctest::Approx(expect).epsilon(1e-11));
            }
        }
    }
}

TEST_CASE("cube averages match hand sums") {
    // [0,2] split into 8 cells, f = 1 on [0,1), 3 on [1,2): values by cell
    const grid_spec spec = box_spec(1, 8, 0.0, 2.0);
    grid_function f(spec);
    for (int i = 0; i < 8; ++i) f.values[i] = i < 4 ? 1.0 : 3.0;

    const dyadic_cube whole{1, 0, 1, {{0, 0, 0}}};   // [0, 2)
    const dyadic_cube left{1, 0, 0, {{0, 0, 0}}};    // [0, 1)
    const dyadic_cube right{1, 0, 0, {{1, 0, 0}}};   // [1, 2)
    CHECK(cube_average(f, left, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(cube_average(f, right, 1.0) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(cube_average(f, whole, 1.0) == doctest::Approx(2.0).epsilon(1e-14));
    // L^2 average over [0,2): sqrt((1 + 9)/2) = sqrt(5)
    CHECK(cube_average(f, whole, 2.0) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-14));
    // L^inf is the max over covered cells
    CHECK(cube_average(f, whole, std::numeric_limits<double>::infinity()) == 3.0);
    // p = 1/2: ((sqrt(1) + sqrt(3))/2)^2
    const double half = std::pow((1.0 + std::sqrt(3.0)) / 2.0, 2.0);
    CHECK(cube_average(f, whole, 0.5) == doctest::Approx(half).epsilon(1e-14));

    // zero extension: [0,4) sees the same mass over twice the volume
    const dyadic_cube twice{1, 0, 2, {{0, 0, 0}}};
    CHECK(cube_average(f, twice, 1.0) == doctest::Approx(1.0).epsilon(1e-14));

    // wholly off-grid cube warns and returns 0
    {
        warning_capture guard;
        const dyadic_cube off{1, 0, 0, {{40, 0, 0}}};
        CHECK(cube_average(f, off, 1.0) == 0.0);
        CHECK(captured_warnings.size() == 1);
    }

    CHECK_THROWS_AS(cube_average(f, whole, 0.0), error);
    CHECK_THROWS_AS(cube_average(f, whole, -1.0), error);
}

TEST_CASE("mass is additive across the child partition") {
    const grid_spec spec = box_spec(2, 64, 0.0, 2.0);
    grid_function f(spec);
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (double& v : f.values) v = u(rng);

    const dyadic_cube root = box_as_dyadic_cube(spec);
    const double whole = cube_average(f, root, 1.0) * root.side() * root.side();
    double parts = 0.0;
    for (const dyadic_cube& c : children(root))
        parts += cube_average(f, c, 1.0) * c.side() * c.side();
    CHECK(parts == doctest::Approx(whole).epsilon(1e-13));
}

TEST_CASE("cell ranges are half open in cube coordinates") {
    const grid_spec spec = box_spec(1, 8, 0.0, 2.0); // cells of width 1/4
    std::array<long long, 3> ilo{}, ihi{};
    // [0,1) covers cells 0..3; the boundary cell [1, 1.25) belongs to [1,2)
    REQUIRE(cube_cell_range(spec, dyadic_cube{1, 0, 0, {{0, 0, 0}}}, ilo, ihi));
    CHECK(ilo[0] == 0);
    CHECK(ihi[0] == 3);
    REQUIRE(cube_cell_range(spec, dyadic_cube{1, 0, 0, {{1, 0, 0}}}, ilo, ihi));
    CHECK(ilo[0] == 4);
    CHECK(ihi[0] == 7);
    // partial overlap clips to the grid
    REQUIRE(cube_cell_range(spec, dyadic_cube{1, 0, 2, {{0, 0, 0}}}, ilo, ihi));
    CHECK(ilo[0] == 0);
    CHECK(ihi[0] == 7);
    CHECK_FALSE(cube_cell_range(spec, dyadic_cube{1, 0, 0, {{9, 0, 0}}}, ilo, ihi));
}

TEST_CASE("grid boxes convert to standard cubes only when aligned") {
    const dyadic_cube q = box_as_dyadic_cube(box_spec(2, 32, 0.0, 2.0));
    CHECK(q.lattice_id == 0);
    CHECK(q.side() == 2.0);
    CHECK(q.corner(0) == 0.0);
    CHECK(q.level == 1);

    const dyadic_cube q2 = box_as_dyadic_cube(box_spec(1, 16, -4.0, -2.0));
    CHECK(q2.corner(0) == -4.0);
    CHECK(q2.side() == 2.0);

    // [-2, 2] has side 4 but corner -2, which is not a multiple of 4
    CHECK_THROWS_AS(box_as_dyadic_cube(box_spec(2, 32, -2.0, 2.0)), error);
    // side 3 is not a power of two
    CHECK_THROWS_AS(box_as_dyadic_cube(box_spec(1, 16, 0.0, 3.0)), error);
}

TEST_CASE("localization level scales with the support diameter") {
    const region_spec a = region_spec::ball({0.0, 0.0, 0.0}, 0.5);
    const int m0 = localization_level(a, a, a, 2);
    // doubling every support diameter raises the cap by exactly one octave
    const region_spec b = region_spec::ball({0.0, 0.0, 0.0}, 1.0);
    const int m1 = localization_level(b, b, b, 2);
    CHECK(m1 == m0 + 1);
    // 2^m0 <= 2^{9/2} diam <= 2^{m0+1} with diam = sqrt(2)*1 for the bounding
    // cube of B(0, 1/2) in d = 2
    const double cap = std::pow(2.0, 4.5) * std::sqrt(2.0);
    CHECK(std::pow(2.0, m0) <= cap * (1.0 + 1e-12));
    CHECK(std::pow(2.0, m0 + 1) > cap * (1.0 - 1e-12));
}
