#include "dyadic.hpp"

#include <cmath>

namespace sparselab {

double dyadic_cube::side() const {
    const double s = std::ldexp(1.0, level);
    return lattice_id == -1 ? s / 3.0 : s;
}

double lattice_offset(int d, int lattice_id, int axis, int level) {
    if (lattice_id <= 0) return 0.0;
    int max_id = 1;
    for (int a = 0; a < d; ++a) max_id *= 3;
    if (lattice_id > max_id) fail_invalid("lattice id out of range for this dimension");
    int digits = lattice_id - 1;
    for (int a = 0; a < axis; ++a) digits /= 3;
    const int c = digits % 3;
    if (c == 0) return 0.0;
    const bool even = ((level % 2) + 2) % 2 == 0;
    return (even ? c : 3 - c) / 3.0;
}

double dyadic_cube::corner(int axis) const {
    return (coords[axis] + lattice_offset(d, lattice_id, axis, level)) * side();
}

bool dyadic_cube::operator==(const dyadic_cube& o) const {
    return d == o.d && lattice_id == o.lattice_id && level == o.level && coords == o.coords;
}

std::vector<dyadic_cube> children(const dyadic_cube& q) {
    std::vector<dyadic_cube> out;
    out.reserve(1u << q.d);
    for (int bits = 0; bits < (1 << q.d); ++bits) {
        dyadic_cube c = q;
        c.level = q.level - 1;
        for (int a = 0; a < q.d; ++a) {
            const long long e = (bits >> a) & 1;
            // corner_child = corner_parent + e * side/2 translated into the
            // child level's coordinates (the offset difference is integral).
            const double off_p = lattice_offset(q.d, q.lattice_id, a, q.level);
            const double off_c = lattice_offset(q.d, q.lattice_id, a, q.level - 1);
            const double cc = 2.0 * (q.coords[a] + off_p) + e - off_c;
            c.coords[a] = static_cast<long long>(std::llround(cc));
        }
        out.push_back(c);
    }
    return out;
}

dyadic_cube parent(const dyadic_cube& q) {
    dyadic_cube p = q;
    p.level = q.level + 1;
    for (int a = 0; a < q.d; ++a) {
        const double off_p = lattice_offset(q.d, q.lattice_id, a, q.level + 1);
        const double off_c = lattice_offset(q.d, q.lattice_id, a, q.level);
        // Invert the child map: coords_p = floor((coords_c + off_c)/2 - off_p).
        const double corner_units = (q.coords[a] + off_c) / 2.0 - off_p;
        p.coords[a] = static_cast<long long>(std::floor(corner_units + 1e-12));
    }
    return p;
}

dyadic_cube three_lattice_cover(const dyadic_cube& q) {
    if (q.lattice_id != -1) fail_invalid("three_lattice_cover expects a cube of the base third lattice");
    dyadic_cube t;
    t.d = q.d;
    t.level = q.level;
    int id = 0;
    int pow3 = 1;
    for (int a = 0; a < q.d; ++a) {
        // 3Q corner on this axis is (coords-1) * side/3; write coords-1 = 3K + c.
        const long long m = q.coords[a] - 1;
        long long c = m % 3;
        if (c < 0) c += 3;
        const long long K = (m - c) / 3;
        t.coords[a] = K;
        int digit = 0;
        if (c != 0) {
            const bool even = ((q.level % 2) + 2) % 2 == 0;
            digit = even ? static_cast<int>(c) : static_cast<int>(3 - c);
        }
        id += digit * pow3;
        pow3 *= 3;
    }
    t.lattice_id = 1 + id;
    return t;
}

bool cube_cell_range(const grid_spec& spec, const dyadic_cube& q,
                     std::array<long long, 3>& ilo, std::array<long long, 3>& ihi) {
    for (int a = 0; a < spec.d; ++a) {
        const double sp = spec.spacing(a);
        const double lo = q.corner(a);
        const double hi = lo + q.side();
        // Cells whose centers lie in [lo, hi); centers are offset half a
        // spacing so ties cannot occur for lattice-aligned cubes.
        long long i0 = static_cast<long long>(std::ceil((lo - spec.lo[a]) / sp - 0.5 - 1e-12));
        long long i1 = static_cast<long long>(std::floor((hi - spec.lo[a]) / sp - 0.5 + 1e-12));
        // Boundary cells: center exactly on the corner belongs to the cube
        // above; the epsilon keeps strictly-inside centers included.
        if (spec.center(a, i0) < lo) ++i0;
        if (spec.center(a, i1) >= hi) --i1;
        i0 = std::max<long long>(i0, 0);
        i1 = std::min<long long>(i1, spec.n - 1);
        if (i0 > i1) return false;
        ilo[a] = i0;
        ihi[a] = i1;
    }
    return true;
}

double cube_average(const grid_function& f, const dyadic_cube& q, double p) {
    if (q.d != f.spec.d) fail_invalid("cube_average dimension mismatch");
    if (!(p > 0.0)) fail_invalid("cube_average requires p > 0");
    std::array<long long, 3> ilo, ihi;
    if (!cube_cell_range(f.spec, q, ilo, ihi)) {
        emit_warning("cube_average: cube does not intersect the grid");
        return 0.0;
    }
    const long long n = f.spec.n;
    const int d = f.spec.d;
    const bool inf_p = std::isinf(p);
    double acc = 0.0;
    for (long long i = ilo[0]; i <= ihi[0]; ++i) {
        for (long long j = d >= 2 ? ilo[1] : 0; j <= (d >= 2 ? ihi[1] : 0); ++j) {
            for (long long k = d >= 3 ? ilo[2] : 0; k <= (d >= 3 ? ihi[2] : 0); ++k) {
                const std::size_t flat = d == 1 ? i : (d == 2 ? i * n + j : (i * n + j) * n + k);
                const double v = std::abs(f.values[flat]);
                if (inf_p) acc = std::max(acc, v);
                else if (p == 1.0) acc += v;
                else if (p == 2.0) acc += v * v;
                else acc += std::pow(v, p);
            }
        }
    }
    if (inf_p) return acc;
    double vol = 1.0;
    for (int a = 0; a < d; ++a) vol *= q.side();
    return std::pow(acc * f.spec.cell_volume() / vol, 1.0 / p);
}

int localization_level(const region_spec& supp_f, const region_spec& supp_g,
                       const region_spec& supp_h, int d) {
    if (d < 1 || d > 3) fail_invalid("localization_level requires d in {1, 2, 3}");
    double lo[3], hi[3], rlo[3], rhi[3];
    supp_f.bounds(d, lo, hi);
    supp_g.bounds(d, rlo, rhi);
    for (int a = 0; a < d; ++a) {
        lo[a] = std::min(lo[a], rlo[a]);
        hi[a] = std::max(hi[a], rhi[a]);
    }
    supp_h.bounds(d, rlo, rhi);
    double side = 0.0;
    for (int a = 0; a < d; ++a) {
        lo[a] = std::min(lo[a], rlo[a]);
        hi[a] = std::max(hi[a], rhi[a]);
        side = std::max(side, hi[a] - lo[a]);
    }
    if (!(side > 0.0)) fail_invalid("localization_level requires nondegenerate supports");
    const double diam = side * std::sqrt(static_cast<double>(d));
    return static_cast<int>(std::floor(4.5 + std::log2(diam)));
}

dyadic_cube box_as_dyadic_cube(const grid_spec& spec) {
    const double side = spec.hi[0] - spec.lo[0];
    for (int a = 1; a < spec.d; ++a)
        if (spec.hi[a] - spec.lo[a] != side)
            fail_invalid("grid box must be a cube to serve as a dyadic root");
    const double level_f = std::log2(side);
    const int level = static_cast<int>(std::llround(level_f));
    if (std::abs(std::ldexp(1.0, level) - side) > 1e-12 * side)
        fail_invalid("grid box side must be a power of two to serve as a dyadic root");
    dyadic_cube q;
    q.d = spec.d;
    q.lattice_id = 0;
    q.level = level;
    for (int a = 0; a < spec.d; ++a) {
        const double c = spec.lo[a] / side;
        const long long ci = static_cast<long long>(std::llround(c));
        if (std::abs(c - ci) > 1e-12)
            fail_invalid("grid box corner must sit on the standard dyadic lattice");
        q.coords[a] = ci;
    }
    return q;
}

} // namespace sparselab
