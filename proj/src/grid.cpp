#include "grid.hpp"

#include "reduce.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace sparselab {

void grid_spec::validate() const {
    if (d < 1 || d > 3) fail_invalid("grid dimension must be 1, 2 or 3");
    if (n < 2) fail_invalid("grid needs n_per_axis >= 2");
    for (int a = 0; a < d; ++a)
        if (!(hi[a] > lo[a])) fail_invalid("grid box must have hi > lo on every axis");
    const double cells = std::pow(static_cast<double>(n), d);
    if (cells > 1.6e9) fail_invalid("grid too large");
}

double grid_spec::min_spacing() const {
    double s = spacing(0);
    for (int a = 1; a < d; ++a) s = std::min(s, spacing(a));
    return s;
}

double grid_spec::cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < d; ++a) v *= spacing(a);
    return v;
}

std::size_t grid_spec::total_cells() const {
    std::size_t t = 1;
    for (int a = 0; a < d; ++a) t *= static_cast<std::size_t>(n);
    return t;
}

bool grid_spec::operator==(const grid_spec& o) const {
    if (d != o.d || n != o.n) return false;
    for (int a = 0; a < d; ++a)
        if (lo[a] != o.lo[a] || hi[a] != o.hi[a]) return false;
    return true;
}

region_spec region_spec::ball(std::array<double, 3> c, double r) {
    if (!(r >= 0)) fail_invalid("ball radius must be nonnegative");
    region_spec s;
    s.kind = region_kind::ball;
    s.center = c;
    s.radius = r;
    return s;
}

region_spec region_spec::annulus(std::array<double, 3> c, double r_in, double r_out) {
    if (!(0 <= r_in && r_in <= r_out)) fail_invalid("annulus needs 0 <= r_in <= r_out");
    region_spec s;
    s.kind = region_kind::annulus;
    s.center = c;
    s.r_in = r_in;
    s.r_out = r_out;
    return s;
}

region_spec region_spec::box(std::array<double, 3> lo, std::array<double, 3> hi) {
    region_spec s;
    s.kind = region_kind::box;
    s.blo = lo;
    s.bhi = hi;
    return s;
}

bool region_spec::contains(int d, const double* x) const {
    switch (kind) {
        case region_kind::ball: {
            double r2 = 0;
            for (int a = 0; a < d; ++a) r2 += (x[a] - center[a]) * (x[a] - center[a]);
            return r2 <= radius * radius;
        }
        case region_kind::annulus: {
            double r2 = 0;
            for (int a = 0; a < d; ++a) r2 += (x[a] - center[a]) * (x[a] - center[a]);
            return r_in * r_in <= r2 && r2 <= r_out * r_out;
        }
        case region_kind::box:
            for (int a = 0; a < d; ++a)
                if (x[a] < blo[a] || x[a] > bhi[a]) return false;
            return true;
    }
    return false;
}

void region_spec::bounds(int d, double* out_lo, double* out_hi) const {
    for (int a = 0; a < d; ++a) {
        switch (kind) {
            case region_kind::ball:
                out_lo[a] = center[a] - radius;
                out_hi[a] = center[a] + radius;
                break;
            case region_kind::annulus:
                out_lo[a] = center[a] - r_out;
                out_hi[a] = center[a] + r_out;
                break;
            case region_kind::box:
                out_lo[a] = blo[a];
                out_hi[a] = bhi[a];
                break;
        }
    }
}

double grid_function::lookup1(double x) const {
    const double t = (x - spec.lo[0]) / spec.spacing(0);
    if (t < 0.0 || t >= spec.n) return 0.0;
    return values[static_cast<std::size_t>(t)];
}

double grid_function::lookup2(double x0, double x1) const {
    const double t0 = (x0 - spec.lo[0]) / spec.spacing(0);
    if (t0 < 0.0 || t0 >= spec.n) return 0.0;
    const double t1 = (x1 - spec.lo[1]) / spec.spacing(1);
    if (t1 < 0.0 || t1 >= spec.n) return 0.0;
    return values[static_cast<std::size_t>(t0) * spec.n + static_cast<std::size_t>(t1)];
}

double grid_function::lookup3(double x0, double x1, double x2) const {
    const double t0 = (x0 - spec.lo[0]) / spec.spacing(0);
    if (t0 < 0.0 || t0 >= spec.n) return 0.0;
    const double t1 = (x1 - spec.lo[1]) / spec.spacing(1);
    if (t1 < 0.0 || t1 >= spec.n) return 0.0;
    const double t2 = (x2 - spec.lo[2]) / spec.spacing(2);
    if (t2 < 0.0 || t2 >= spec.n) return 0.0;
    return values[(static_cast<std::size_t>(t0) * spec.n + static_cast<std::size_t>(t1)) * spec.n +
                  static_cast<std::size_t>(t2)];
}

double grid_function::lookup(const double* x) const {
    switch (spec.d) {
        case 1: return lookup1(x[0]);
        case 2: return lookup2(x[0], x[1]);
        default: return lookup3(x[0], x[1], x[2]);
    }
}

grid_function make_indicator(const grid_spec& spec, const region_spec& region) {
    spec.validate();
    grid_function f(spec);
    const long long n = spec.n;
    double x[3];
    if (spec.d == 1) {
        for (long long i = 0; i < n; ++i) {
            x[0] = spec.center(0, i);
            f.values[i] = region.contains(1, x) ? 1.0 : 0.0;
        }
    } else if (spec.d == 2) {
        for (long long i = 0; i < n; ++i) {
            x[0] = spec.center(0, i);
            for (long long j = 0; j < n; ++j) {
                x[1] = spec.center(1, j);
                f.values[i * n + j] = region.contains(2, x) ? 1.0 : 0.0;
            }
        }
    } else {
        for (long long i = 0; i < n; ++i) {
            x[0] = spec.center(0, i);
            for (long long j = 0; j < n; ++j) {
                x[1] = spec.center(1, j);
                for (long long k = 0; k < n; ++k) {
                    x[2] = spec.center(2, k);
                    f.values[(i * n + j) * n + k] = region.contains(3, x) ? 1.0 : 0.0;
                }
            }
        }
    }
    return f;
}

grid_function shift(const grid_function& f, const std::array<double, 3>& h) {
    const grid_spec& s = f.spec;
    long long off[3] = {0, 0, 0};
    for (int a = 0; a < s.d; ++a) {
        const double sp = s.spacing(a);
        const double k = h[a] / sp;
        const double rounded = std::nearbyint(k);
        if (std::abs(k - rounded) > 1e-9)
            emit_warning("shift component snapped to the nearest spacing multiple");
        if (std::abs(h[a]) > s.hi[a] - s.lo[a]) {
            emit_warning("degenerate shift: |h| exceeds the box extent, returning zero function");
            return grid_function(s);
        }
        off[a] = static_cast<long long>(rounded);
    }
    grid_function out(s);
    const long long n = s.n;
    // out(i) = f(i - off): a sample moved by +h lands at index i = j + off.
    if (s.d == 1) {
        for (long long i = 0; i < n; ++i) {
            const long long j = i - off[0];
            if (j >= 0 && j < n) out.values[i] = f.values[j];
        }
    } else if (s.d == 2) {
        for (long long i = 0; i < n; ++i) {
            const long long j0 = i - off[0];
            if (j0 < 0 || j0 >= n) continue;
            for (long long i1 = 0; i1 < n; ++i1) {
                const long long j1 = i1 - off[1];
                if (j1 >= 0 && j1 < n) out.values[i * n + i1] = f.values[j0 * n + j1];
            }
        }
    } else {
        for (long long i = 0; i < n; ++i) {
            const long long j0 = i - off[0];
            if (j0 < 0 || j0 >= n) continue;
            for (long long i1 = 0; i1 < n; ++i1) {
                const long long j1 = i1 - off[1];
                if (j1 < 0 || j1 >= n) continue;
                for (long long i2 = 0; i2 < n; ++i2) {
                    const long long j2 = i2 - off[2];
                    if (j2 >= 0 && j2 < n)
                        out.values[(i * n + i1) * n + i2] = f.values[(j0 * n + j1) * n + j2];
                }
            }
        }
    }
    return out;
}

double lp_norm(const grid_function& f, double p) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : f.values) m = std::max(m, std::abs(v));
        return m;
    }
    if (!(p > 0.0)) fail_invalid("lp_norm requires p > 0");
    const double* v = f.values.data();
    double s;
    if (p == 2.0)
        s = pairwise_sum_f(std::size_t(0), f.values.size(),
                           [v](std::size_t i) { return v[i] * v[i]; });
    else if (p == 1.0)
        s = pairwise_sum_f(std::size_t(0), f.values.size(),
                           [v](std::size_t i) { return std::abs(v[i]); });
    else
        s = pairwise_sum_f(std::size_t(0), f.values.size(),
                           [v, p](std::size_t i) { return std::pow(std::abs(v[i]), p); });
    return std::pow(s * f.spec.cell_volume(), 1.0 / p);
}

double pairing(const grid_function& u, const grid_function& h) {
    if (!(u.spec == h.spec)) fail_invalid("pairing requires identical grid specs");
    const double* a = u.values.data();
    const double* b = h.values.data();
    const double s = pairwise_sum_f(std::size_t(0), u.values.size(),
                                    [a, b](std::size_t i) { return a[i] * b[i]; });
    return s * u.spec.cell_volume();
}

grid_function linear_combination(double a, const grid_function& f, double b,
                                 const grid_function& g) {
    if (!(f.spec == g.spec)) fail_invalid("linear combination requires identical grid specs");
    grid_function out(f.spec);
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = a * f.values[i] + b * g.values[i];
    return out;
}

namespace {
constexpr char kMagic[4] = {'S', 'L', 'G', 'F'};
constexpr std::uint32_t kVersion = 1;
} // namespace

// Binary layout (little endian): magic "SLGF", u32 version, u32 d, u32 n,
// d doubles lo, d doubles hi, then n^d doubles row-major (axis 0 slowest).
void save_binary(const grid_function& f, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) fail_io("cannot open '" + path + "' for writing");
    os.write(kMagic, 4);
    const std::uint32_t ver = kVersion, d = f.spec.d, n = f.spec.n;
    os.write(reinterpret_cast<const char*>(&ver), 4);
    os.write(reinterpret_cast<const char*>(&d), 4);
    os.write(reinterpret_cast<const char*>(&n), 4);
    os.write(reinterpret_cast<const char*>(f.spec.lo.data()), 8 * f.spec.d);
    os.write(reinterpret_cast<const char*>(f.spec.hi.data()), 8 * f.spec.d);
    os.write(reinterpret_cast<const char*>(f.values.data()), 8 * f.values.size());
    if (!os) fail_io("write failed for '" + path + "'");
}

grid_function load_binary(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) fail_io("cannot open '" + path + "'");
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0) fail_io("bad magic in '" + path + "'");
    std::uint32_t ver = 0, d = 0, n = 0;
    is.read(reinterpret_cast<char*>(&ver), 4);
    is.read(reinterpret_cast<char*>(&d), 4);
    is.read(reinterpret_cast<char*>(&n), 4);
    if (!is || ver != kVersion) fail_io("unsupported version in '" + path + "'");
    if (d < 1 || d > 3 || n < 2) fail_io("corrupt header in '" + path + "'");
    grid_spec spec;
    spec.d = static_cast<int>(d);
    spec.n = static_cast<int>(n);
    is.read(reinterpret_cast<char*>(spec.lo.data()), 8 * spec.d);
    is.read(reinterpret_cast<char*>(spec.hi.data()), 8 * spec.d);
    spec.validate();
    grid_function f(spec);
    is.read(reinterpret_cast<char*>(f.values.data()), 8 * f.values.size());
    if (!is) fail_io("truncated data in '" + path + "'");
    return f;
}

// CSV layout: "# sparselab-grid v1", a header line "d=<d> n=<n> lo=... hi=..."
// then one %.17g value per line in the same row-major order as the binary.
std::string grid_csv_text(const grid_function& f) {
    std::string out = "# sparselab-grid v1\n";
    char buf[512];
    out += "# d=" + std::to_string(f.spec.d) + " n=" + std::to_string(f.spec.n);
    for (int a = 0; a < f.spec.d; ++a) {
        std::snprintf(buf, sizeof buf, " lo%d=%.17g hi%d=%.17g", a, f.spec.lo[a], a, f.spec.hi[a]);
        out += buf;
    }
    out += "\n";
    for (double v : f.values) {
        std::snprintf(buf, sizeof buf, "%.17g\n", v);
        out += buf;
    }
    return out;
}

void save_csv(const grid_function& f, const std::string& path) {
    std::ofstream os(path);
    if (!os) fail_io("cannot open '" + path + "' for writing");
    os << grid_csv_text(f);
    if (!os) fail_io("write failed for '" + path + "'");
}

grid_function load_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) fail_io("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(is, line) || line.rfind("# sparselab-grid", 0) != 0)
        fail_io("missing grid CSV header in '" + path + "'");
    if (!std::getline(is, line)) fail_io("missing grid CSV spec line in '" + path + "'");
    grid_spec spec;
    {
        std::istringstream ss(line);
        std::string tok;
        while (ss >> tok) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = tok.substr(0, eq);
            const double val = std::strtod(tok.c_str() + eq + 1, nullptr);
            if (key == "d") spec.d = static_cast<int>(val);
            else if (key == "n") spec.n = static_cast<int>(val);
            else if (key.rfind("lo", 0) == 0) spec.lo[key[2] - '0'] = val;
            else if (key.rfind("hi", 0) == 0) spec.hi[key[2] - '0'] = val;
        }
    }
    spec.validate();
    grid_function f(spec);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        if (!std::getline(is, line)) fail_io("truncated grid CSV '" + path + "'");
        f.values[i] = std::strtod(line.c_str(), nullptr);
    }
    return f;
}

bool nonzero_bbox(const grid_function& f, std::array<long long, 3>& ilo,
                  std::array<long long, 3>& ihi) {
    const long long n = f.spec.n;
    ilo = {n, n, n};
    ihi = {-1, -1, -1};
    bool any = false;
    const int d = f.spec.d;
    std::size_t flat = 0;
    long long idx[3] = {0, 0, 0};
    const std::size_t total = f.values.size();
    for (flat = 0; flat < total; ++flat) {
        if (f.values[flat] != 0.0) {
            any = true;
            for (int a = 0; a < d; ++a) {
                ilo[a] = std::min(ilo[a], idx[a]);
                ihi[a] = std::max(ihi[a], idx[a]);
            }
        }
        for (int a = d - 1; a >= 0; --a) {
            if (++idx[a] < n) break;
            idx[a] = 0;
        }
    }
    return any;
}

} // namespace sparselab
