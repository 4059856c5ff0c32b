#pragma once

#include "error.hpp"

#include <array>
#include <vector>

namespace sparselab {

// Gauss-Legendre nodes and weights on [a, b].
struct gl_rule {
    std::vector<double> x, w;
};
gl_rule gauss_legendre(int n, double a, double b);

// Quadrature on the unit sphere S^{d-1}; weights are positive and sum to 1.
//   d = 1: the two points {-1, +1}, weight 1/2 each.
//   d = 2: n equally weighted angles at half-step offset 2*pi*(j+1/2)/n.
//   d = 3: Gauss-Legendre in the polar cosine times a uniform azimuthal grid;
//          the node count is rounded to the nearest realizable product.
struct sphere_rule {
    int d = 2;
    std::vector<std::array<double, 3>> nodes;
    std::vector<double> weights;
};
sphere_rule make_sphere_rule(int d, int n_nodes);

// c_d = Gamma(d) / (pi^{d/2} Gamma(d/2)): the constant in the reduction of
// the bilinear sphere average to a radial integral of two linear averages.
double slicing_normalizer(int d);

// Radial rule for that reduction, parametrized by rho = sin(phi) so the
// weight (sin phi cos phi)^{d-1} is smooth for every d. Weights absorb the
// normalizer by construction: they are scaled to sum to exactly 1, which
// forces A_t(1, 1) = 1 without trusting c_d numerically. Node symmetry about
// phi = pi/4 makes the f <-> g exchange exact.
struct slicing_rule {
    int d = 2;
    std::vector<double> s; // sin(phi_i), increasing
    std::vector<double> c; // cos(phi_i), decreasing
    std::vector<double> w; // normalized weights, sum = 1
};
slicing_rule make_slicing_rule(int d, int n_radial);

} // namespace sparselab
