#pragma once

#include "rational.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace sparselab {

// Lebesgue exponent triple (p, q, r) with p, q in (1, inf], r in (0, inf).
// Kept as exact rationals; membership predicates on boundary triples are
// contractual and must not depend on rounding.
struct exponent_triple {
    rat p, q, r;

    exponent_triple(rat p_, rat q_, rat r_);

    // Conjugate r' with 1/r + 1/r' = 1. Defined for r >= 1; r = 1 gives inf.
    rat r_conj() const;
};

rat holder_conjugate(const rat& r);

// Scaling threshold m(d, r) = min{1 + d/r, (2d-1)/d, 1/r + 2(d-1)/d}, d >= 2.
rat m_bound(int d, const rat& r);

// Open boundedness region.
//   d >= 2: 1/r < 1/p + 1/q < m(d, r), all strict (p, q finite).
//   d = 1: interior of the convex hull of (0,0,0), (0,1,1), (1,0,1),
//          (3/5,3/5,2/5) in (1/p, 1/q, 1/r) coordinates. The four face
//          planes, derived from the vertices by cross products:
//            x + y - z > 0,  -x + 3y - 3z < 0,  -3x + y + 3z > 0,
//            3x + 3y + z < 4.
bool in_region(int d, const exponent_triple& t);

// Closed necessary conditions.
//   d >= 2: 1/p + 1/q <= min{1 + d/r, (2d-1)/d, 2d/(d+1) + (d-1)/((d+1) r)}.
//   d = 1: closed hull of the four vertices above.
bool necessity_condition(int d, const exponent_triple& t);

// Individual faces of the d >= 2 necessary region, indexed by the scaling
// input family that produces them (0: concentrated ball against an annulus,
// 1: annuli against a ball, 2: plate triple). Used by necessity_check.
bool necessity_face(int face, int d, const exponent_triple& t);

struct scaling_fit {
    double slope = 0.0;
    double intercept = 0.0;
    double max_abs_residual = 0.0;
    std::size_t n_samples = 0;
};

// Least squares in log-log coordinates over (scale, value) pairs.
// Requires >= 3 samples with positive distinct scales and positive values.
scaling_fit fit_power_law(const std::vector<std::pair<double, double>>& samples);
scaling_fit fit_power_law(const std::vector<double>& scales, const std::vector<double>& values);

} // namespace sparselab
