#pragma once

#include "grid.hpp"
#include "rational.hpp"

#include <array>
#include <vector>

namespace sparselab {

// Dyadic cube in one of the lattices:
//   lattice_id -1        : base third lattice D', side (1/3) 2^level,
//                          corner = coords * side.
//   lattice_id  0        : standard lattice, side 2^level, corner = coords * side.
//   lattice_id 1..3^d    : shifted lattices; (id - 1) written base 3 gives a
//                          digit c_a per axis and the corner offset on that
//                          axis is sigma(c_a, level) * side with
//                          sigma(0, m) = 0, sigma(c, m) = c/3 for even m and
//                          (3-c)/3 for odd m. The parity alternation keeps
//                          each child inside its parent's lattice.
struct dyadic_cube {
    int d = 1;
    int lattice_id = 0;
    int level = 0;
    std::array<long long, 3> coords{{0, 0, 0}};

    double side() const;
    double corner(int axis) const;
    bool operator==(const dyadic_cube& o) const;
};

// Offset fraction (multiples of 1/3) of a lattice on one axis at one level.
double lattice_offset(int d, int lattice_id, int axis, int level);

// The 2^d children partitioning Q (same lattice).
std::vector<dyadic_cube> children(const dyadic_cube& q);
dyadic_cube parent(const dyadic_cube& q);

// For Q in D': the concentric triple 3Q (side 2^level) and the shifted
// lattice 1..3^d that contains it.
dyadic_cube three_lattice_cover(const dyadic_cube& q);

// L^p average of |f| over Q: (|Q|^{-1} sum_{cells in Q} |f|^p cellvol)^{1/p},
// p in (0, inf]; |Q| is the full cube volume (zero extension off the grid).
// Empty grid intersection warns and returns 0.
double cube_average(const grid_function& f, const dyadic_cube& q, double p);

// Largest m with 2^m <= 2^{9/2} * diam(Q~), where Q~ is the bounding cube of
// the three supports: octaves above m0 cannot touch the supports.
int localization_level(const region_spec& supp_f, const region_spec& supp_g,
                       const region_spec& supp_h, int d);

// Cell index range of Q intersected with the grid; false if empty.
bool cube_cell_range(const grid_spec& spec, const dyadic_cube& q,
                     std::array<long long, 3>& ilo, std::array<long long, 3>& ihi);

// The grid box as a standard-lattice cube; requires the box to be one
// (corner and side powers of two compatible), used by the sparse module.
dyadic_cube box_as_dyadic_cube(const grid_spec& spec);

} // namespace sparselab
