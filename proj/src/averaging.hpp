#pragma once

#include "grid.hpp"
#include "quadrature.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace sparselab {

// Per-input quadrature controls. Zeros select defaults (128 angular nodes in
// d = 2, a ~2048-node product rule in d = 3, radius table step = spacing/2).
struct slot_options {
    int n_ang = 0;
    double table_ds = 0.0;
};

struct eval_options {
    int n_radial = 0;      // slicing nodes across the quarter arc (default 64)
    int n_circle_d1 = 0;   // d = 1 circle nodes (default 256, multiple of 4)
    slot_options slot_f, slot_g;
    // When set, evaluate only at these flat output indices (others stay 0).
    // Pairings against functions supported on the mask are unchanged.
    const std::vector<std::uint32_t>* mask = nullptr;
    int threads = 0;
};

// Conservative support geometry: padded bounding box plus padded annular
// bounds about the box center. Radius windows derived from it never exclude
// a radius whose sphere meets a nonzero cell.
struct support_info {
    bool empty = true;
    std::array<double, 3> blo{}, bhi{}; // padded bbox
    std::array<double, 3> c{};          // bbox center
    double rin = 0.0, rout = 0.0;       // padded annular bounds around c
};

support_info compute_support(const grid_function& f);

// Spherical mean evaluator for one input: value(x, s) = average of f over
// the sphere of radius s about x, restricted to the angular cap that can
// meet the support when x lies outside it.
class lin_avg_evaluator {
  public:
    lin_avg_evaluator(const grid_function& f, int n_ang, double table_ds);

    double eval(const double* x, double s) const;
    // Radius window outside of which eval(x, .) vanishes identically.
    void window(const double* x, double& lo, double& hi) const;
    bool empty() const { return sup_.empty; }
    double table_ds() const { return ds_; }
    const support_info& support() const { return sup_; }

  private:
    const grid_function& f_;
    support_info sup_;
    int n_ang_;
    double ds_;
    std::vector<double> cosn_, sinn_; // d = 2 node table (half-step offset)
    sphere_rule rule3_;               // d = 3 product rule

    friend class bilinear_engine;
};

// Mask helpers.
std::vector<std::uint32_t> mask_from_nonzero(const grid_function& h);
std::vector<std::uint32_t> mask_stride(const grid_spec& spec, int stride);

grid_function linear_spherical_average(const grid_function& f, double t,
                                       const eval_options& opts = {});
grid_function bilinear_spherical_average(const grid_function& f, const grid_function& g,
                                         double t, const eval_options& opts = {});

// sup over the radius list of |A_t(f, g)| (bilinear) or |LinAvg f| (linear).
grid_function bilinear_sup(const grid_function& f, const grid_function& g,
                           const std::vector<double>& radii, const eval_options& opts = {});
grid_function linear_sup(const grid_function& f, const std::vector<double>& radii,
                         const eval_options& opts = {});

// Low-level: for each output point, fills values[j] = LinAvg_f(x, radii[j])
// (windowed; radii outside the support window are exact zeros) and calls
// sink(flat, values). Points are visited in deterministic chunk order.
void linear_average_tables(const grid_function& f, const std::vector<double>& radii,
                           const eval_options& opts,
                           const std::function<void(std::size_t, const double*)>& sink);

} // namespace sparselab
