#pragma once

#include "error.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace sparselab {

// Cell-centered uniform grid on an axis-aligned box. Samples live at
// x_i = lo + (i + 1/2) * spacing, i = 0..n-1 per axis, so no sample ever
// sits on a dyadic cube boundary and shifts by spacing multiples map
// samples to samples exactly. Values are row-major with axis 0 slowest.
struct grid_spec {
    int d = 1;
    std::array<double, 3> lo{{0, 0, 0}};
    std::array<double, 3> hi{{1, 1, 1}};
    int n = 2; // cells per axis

    void validate() const;
    double spacing(int axis) const { return (hi[axis] - lo[axis]) / n; }
    double min_spacing() const;
    double cell_volume() const;
    std::size_t total_cells() const;
    double center(int axis, long long i) const { return lo[axis] + (i + 0.5) * spacing(axis); }
    bool operator==(const grid_spec& o) const;
};

enum class region_kind { ball, annulus, box };

// Geometric region in box coordinates; membership uses the closed convention
// (boundary points belong to the region).
struct region_spec {
    region_kind kind = region_kind::ball;
    std::array<double, 3> center{{0, 0, 0}};
    double radius = 0;          // ball
    double r_in = 0, r_out = 0; // annulus
    std::array<double, 3> blo{{0, 0, 0}}, bhi{{0, 0, 0}}; // box

    static region_spec ball(std::array<double, 3> c, double r);
    static region_spec annulus(std::array<double, 3> c, double r_in, double r_out);
    static region_spec box(std::array<double, 3> lo, std::array<double, 3> hi);
    bool contains(int d, const double* x) const;
    // Axis-aligned bounding box of the region.
    void bounds(int d, double* out_lo, double* out_hi) const;
};

struct grid_function {
    grid_spec spec;
    std::vector<double> values;

    grid_function() = default;
    explicit grid_function(const grid_spec& s) : spec(s), values(s.total_cells(), 0.0) {
        s.validate();
    }

    double& at(std::size_t flat) { return values[flat]; }
    double at(std::size_t flat) const { return values[flat]; }

    // Nearest-sample lookup with zero extension outside the box.
    double lookup(const double* x) const;
    double lookup1(double x) const;
    double lookup2(double x0, double x1) const;
    double lookup3(double x0, double x1, double x2) const;
};

grid_function make_indicator(const grid_spec& spec, const region_spec& region);

// Translation by h (length units). Each component is snapped to the nearest
// multiple of the spacing (warning when the snap is not exact); values are
// moved with zero fill. |h| beyond the box extent degenerates to the zero
// function with a warning.
grid_function shift(const grid_function& f, const std::array<double, 3>& h);

// (sum |f|^p * cellvol)^(1/p) for p in (0, inf); max |f| for p = inf.
double lp_norm(const grid_function& f, double p);

// sum u * h * cellvol; specs must match exactly.
double pairing(const grid_function& u, const grid_function& h);

grid_function linear_combination(double a, const grid_function& f, double b,
                                 const grid_function& g);

void save_binary(const grid_function& f, const std::string& path);
grid_function load_binary(const std::string& path);
std::string grid_csv_text(const grid_function& f);
void save_csv(const grid_function& f, const std::string& path);
grid_function load_csv(const std::string& path);

// Tight bounding box (index space) of nonzero cells; false when f == 0.
bool nonzero_bbox(const grid_function& f, std::array<long long, 3>& ilo,
                  std::array<long long, 3>& ihi);

} // namespace sparselab
