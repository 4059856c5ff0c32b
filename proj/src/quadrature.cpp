#include "quadrature.hpp"

#include <gsl/gsl_integration.h>

#include <cmath>

namespace sparselab {

gl_rule gauss_legendre(int n, double a, double b) {
    if (n < 1) fail_invalid("gauss_legendre requires n >= 1");
    gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(n);
    if (!table) fail_internal("gauss_legendre table allocation failed");
    gl_rule rule;
    rule.x.resize(n);
    rule.w.resize(n);
    for (int i = 0; i < n; ++i)
        gsl_integration_glfixed_point(a, b, i, &rule.x[i], &rule.w[i], table);
    gsl_integration_glfixed_table_free(table);
    return rule;
}

sphere_rule make_sphere_rule(int d, int n_nodes) {
    if (d < 1 || d > 3) fail_invalid("sphere_rule requires d in {1, 2, 3}");
    if (n_nodes < 1) fail_invalid("sphere_rule requires a positive node count");
    sphere_rule rule;
    rule.d = d;
    if (d == 1) {
        rule.nodes = {{{1, 0, 0}}, {{-1, 0, 0}}};
        rule.weights = {0.5, 0.5};
        return rule;
    }
    if (d == 2) {
        rule.nodes.reserve(n_nodes);
        rule.weights.assign(n_nodes, 1.0 / n_nodes);
        for (int j = 0; j < n_nodes; ++j) {
            const double th = 2.0 * M_PI * (j + 0.5) / n_nodes;
            rule.nodes.push_back({std::cos(th), std::sin(th), 0.0});
        }
        return rule;
    }
    // d = 3: product rule, exact for spherical polynomials of degree
    // < min(2*n_polar, n_azim).
    const int n_polar = std::max(2, static_cast<int>(std::lround(std::sqrt(n_nodes / 2.0))));
    const int n_azim = 2 * n_polar;
    const gl_rule polar = gauss_legendre(n_polar, -1.0, 1.0);
    rule.nodes.reserve(static_cast<std::size_t>(n_polar) * n_azim);
    rule.weights.reserve(rule.nodes.capacity());
    for (int i = 0; i < n_polar; ++i) {
        const double u = polar.x[i]; // cos(theta)
        const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
        const double wu = polar.w[i] / 2.0 / n_azim; // total mass 1
        for (int j = 0; j < n_azim; ++j) {
            const double ph = 2.0 * M_PI * (j + 0.5) / n_azim;
            rule.nodes.push_back({s * std::cos(ph), s * std::sin(ph), u});
            rule.weights.push_back(wu);
        }
    }
    return rule;
}

double slicing_normalizer(int d) {
    if (d < 2) fail_invalid("slicing_normalizer requires d >= 2");
    return std::exp(std::lgamma(d) - 0.5 * d * std::log(M_PI) - std::lgamma(0.5 * d));
}

slicing_rule make_slicing_rule(int d, int n_radial) {
    if (d < 2 || d > 3) fail_invalid("slicing rule requires d in {2, 3}");
    if (n_radial < 2) fail_invalid("slicing rule requires >= 2 radial nodes");
    const gl_rule gl = gauss_legendre(n_radial, 0.0, M_PI / 2.0);
    slicing_rule rule;
    rule.d = d;
    rule.s.resize(n_radial);
    rule.c.resize(n_radial);
    rule.w.resize(n_radial);
    double total = 0.0;
    for (int i = 0; i < n_radial; ++i) {
        const double sp = std::sin(gl.x[i]);
        const double cp = std::cos(gl.x[i]);
        rule.s[i] = sp;
        rule.c[i] = cp;
        double w = gl.w[i];
        for (int k = 1; k < d; ++k) w *= sp * cp;
        rule.w[i] = w;
        total += w;
    }
    for (double& w : rule.w) w /= total;
    return rule;
}

} // namespace sparselab
