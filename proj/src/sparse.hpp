#pragma once

#include "core.hpp"
#include "dyadic.hpp"
#include "maximal.hpp"

#include <string>
#include <vector>

namespace sparselab {

struct cz_decomposition {
    dyadic_cube root;
    std::vector<dyadic_cube> stopping_cubes;
    grid_function good, bad;
    double base_avg = 0.0;  // <|f|>_{Q0, p}
    double threshold = 0.0; // c0 * base_avg
    double p = 1.0;
    double c0 = 2.0;
};

// Stopping cubes are the maximal dyadic P inside q0 with
// <|f|>_{P,p} > c0 <|f|>_{q0,p} (strict: ties do not select). bad collects
// (f - <f>_P) on each P with plain (p = 1, signed) averages; good = f - bad.
// Requires c0 > 1 and a power-of-two cell count per axis inside q0.
cz_decomposition cz_decompose(const grid_function& f, const dyadic_cube& q0, double p,
                              double c0);

struct sparse_cube {
    dyadic_cube cube;
    std::vector<std::size_t> stopping_children; // indices into the family
    double e_measure = 0.0;                     // |E_Q| = |Q| - sum |children|
};

struct sparse_family {
    dyadic_cube root;
    std::vector<sparse_cube> cubes;
    double eta = 1.0; // min |E_Q| / |Q|
    double c0 = 0.0;
    double pf = 2.0, pg = 2.0, ph = 2.0; // averaging exponents (p, q, r')
};

// Joint stopping time: at a selected cube R, the stopping children are the
// maximal strict dyadic descendants P with
//   <f>_{P,p}/<f>_{R,p} + <g>_{P,q}/<g>_{R,q} + <h>_{P,r'}/<h>_{R,r'} > c0
// (zero parent averages contribute zero). Each stopping child is selected
// recursively; E_R = R minus its stopping children; single-cell cubes have
// E_Q = Q. All-zero inputs give the family {q0} with E = q0.
sparse_family build_sparse_family(const grid_function& f, const grid_function& g,
                                  const grid_function& h, const dyadic_cube& q0,
                                  const exponent_triple& t, double c0);

struct sparsity_report {
    bool pass = false;
    double min_ratio = 0.0;
    std::size_t worst_cube = 0;
    bool overlap = false;
    std::size_t overlap_a = 0, overlap_b = 0;
    std::string message;
};

// Checks |E_Q| >= eta_target |Q| for every cube and pairwise disjointness of
// the exceptional sets (cell-exact painting over the grid).
sparsity_report verify_sparsity(const sparse_family& s, const grid_spec& spec,
                                double eta_target);

// sum over the family of |Q| <f>_{Q,p} <g>_{Q,q} <h>_{Q,r'}.
double sparse_form(const sparse_family& s, const grid_function& f, const grid_function& g,
                   const grid_function& h, const exponent_triple& t);

// One row per cube: lattice_id, level, d corner coordinates, |E_Q|.
std::string sparse_family_csv(const sparse_family& s);
void save_sparse_family(const sparse_family& s, const std::string& path);

enum class maximal_kind { full, lacunary, localized };

struct domination_options {
    maximal_kind kind = maximal_kind::full;
    int m_lo = 0, m_hi = 1, n_t_per_octave = 33;
    radius_grid rg{1.0, 2.0, 33, true}; // localized window
    double c0 = 4.0;
    eval_options eval;
};

struct domination_result {
    double ratio = 0.0;
    double numerator = 0.0;   // pairing(maximal(f, g), h)
    double denominator = 0.0; // sparse form
    bool infinite = false;    // zero form against a nonzero pairing
    sparse_family family;
};

// The maximal operator is evaluated only on supp h; the pairing against h is
// unchanged by that restriction.
domination_result domination_ratio(const grid_function& f, const grid_function& g,
                                   const grid_function& h, const exponent_triple& t,
                                   const domination_options& opts = {});

} // namespace sparselab
