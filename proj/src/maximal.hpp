#pragma once

#include "averaging.hpp"
#include "core.hpp"

namespace sparselab {

struct radius_grid {
    double t_lo = 1.0;
    double t_hi = 2.0;
    int n_t = 33;
    bool geometric = true;

    std::vector<double> radii() const;
};

// sup over the radius grid of |A_t(f, g)|.
grid_function localized_maximal(const grid_function& f, const grid_function& g,
                                const radius_grid& rg, const eval_options& opts = {});

// sup over t = 2^m, m in [m_lo, m_hi].
grid_function lacunary_maximal(const grid_function& f, const grid_function& g, int m_lo,
                               int m_hi, const eval_options& opts = {});

// sup over [2^m, 2^{m+1}] per octave, n_t_per_octave geometric nodes each
// (octave endpoints included, so the lacunary radii are a subset).
grid_function full_maximal(const grid_function& f, const grid_function& g, int m_lo, int m_hi,
                           int n_t_per_octave = 33, const eval_options& opts = {});

std::vector<double> full_maximal_radii(int m_lo, int m_hi, int n_t_per_octave);

// Exact uncentered maximal over every axis-aligned cube of grid cells
// (side lengths 1..n cells), computed with prefix sums and van Herk sliding
// maxima: O(n^d) per side length.
grid_function hardy_littlewood_maximal(const grid_function& f);

// sup over the radius grid of |spherical mean of f|.
grid_function linear_spherical_maximal(const grid_function& f, const radius_grid& rg,
                                       const eval_options& opts = {});

// || sup_{t in rg} |A_t(f, g - shift(g, h))| ||_{L^{t.r}}.
double continuity_norm(const grid_function& f, const grid_function& g,
                       const std::array<double, 3>& h, const exponent_triple& t,
                       const radius_grid& rg, const eval_options& opts = {});

// Both inputs differenced: || sup_t |A_t(f - shift(f,h1), g - shift(g,h2))| ||_{L^{t.r}}.
double double_continuity_norm(const grid_function& f, const grid_function& g,
                              const std::array<double, 3>& h1, const std::array<double, 3>& h2,
                              const exponent_triple& t, const radius_grid& rg,
                              const eval_options& opts = {});

} // namespace sparselab
