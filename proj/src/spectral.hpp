#pragma once

#include "core.hpp"

#include <complex>
#include <cstdint>
#include <vector>

namespace sparselab {

// Real 1d field sampled on n equispaced points of a period-L circle,
// x_j = j L / n. n must be a power of two >= 8.
struct periodic_field {
    int n = 0;
    double period = 1.0;
    std::vector<double> v;

    void validate() const;
    double spacing() const { return period / n; }
    double at(double x) const; // nearest-sample lookup, periodic wrap
};

periodic_field make_periodic(int n, double period);

// Frequencies in cycles per unit length: bin j carries xi_j = j/L for
// j <= n/2 and (j - n)/L above.
std::vector<std::complex<double>> fft_forward(const periodic_field& f);
periodic_field fft_inverse(const std::vector<std::complex<double>>& spec, double period);

// Smooth radial cutoff glued from exp(-1/x): identically 1 on [0, 1],
// identically 0 on [2, inf), strictly decreasing between.
double bump_psi(double a);

// Band symbol phi_k(xi) = psi(|xi| 2^-k) - psi(|xi| 2^-k+1); supported in
// 2^(k-1) <= |xi| <= 2^(k+1) and summing to 1 - psi(2|xi|) over k >= 0.
double band_symbol(double xi, int k);

// Multiplies the spectrum by phi_k. Requires 2^(k+1) < n/(2L) so the band
// sits strictly below the Nyquist frequency.
periodic_field band_project(const periodic_field& f, int k);

double periodic_l1(const periodic_field& f);
double periodic_l2(const periodic_field& f);

// Bilinear circle average at radius t with n_theta equispaced angles
// (half-step offset): mean over theta of f1(x - t cos) f2(x - t sin),
// nearest-sample lookups, evaluated at every grid point.
periodic_field circle_average(const periodic_field& f1, const periodic_field& f2, double t,
                              int n_theta);

// Random real field with spectral amplitude (1 + |xi|)^-alpha and phases
// drawn from the seeded generator; normalized to unit L2 norm.
periodic_field decaying_random_field(int n, double period, double alpha, std::uint64_t seed);

struct band_decay_options {
    double t = 1.0;
    int n_theta = 4096;
    int stride = 8;      // subsample stride for the L1 estimate
    bool control = false; // skip the band projection (identity control run)
};

struct band_decay_result {
    std::vector<int> ks;
    std::vector<double> values; // L1 norms of the averaged band pieces
    scaling_fit fit;            // slope of log value against log 2^k
};

// L1 decay of t-averages of band-projected first slots. Bands whose output
// is negligible against the largest one are dropped; fewer than three
// surviving bands is an error.
band_decay_result band_decay_experiment(const periodic_field& f1, const periodic_field& f2,
                                        const std::vector<int>& k_list,
                                        const band_decay_options& opts = {});

struct periodic_continuity_result {
    std::vector<double> hs; // snapped to whole sample steps
    std::vector<double> values;
    scaling_fit fit;
};

// L1 norm of A_t(f1 - shift_h f1, f2) against h; h snaps to the sample grid
// (warns when the snap moves it, errors when it snaps to zero).
periodic_continuity_result periodic_continuity_experiment(const periodic_field& f1,
                                                          const periodic_field& f2,
                                                          const std::vector<double>& h_list,
                                                          double t, int n_theta, int stride);

} // namespace sparselab
