#include "averaging.hpp"

#include "reduce.hpp"

#include <algorithm>
#include <cmath>

namespace sparselab {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

int default_n_ang(int d) { return d == 3 ? 2048 : 128; }

// Euclidean distance range from x to the padded bbox.
void bbox_dist_range(int d, const support_info& s, const double* x, double& lo, double& hi) {
    double lo2 = 0.0, hi2 = 0.0;
    for (int a = 0; a < d; ++a) {
        const double below = s.blo[a] - x[a];
        const double above = x[a] - s.bhi[a];
        const double out = std::max({below, above, 0.0});
        lo2 += out * out;
        const double far = std::max(std::abs(x[a] - s.blo[a]), std::abs(x[a] - s.bhi[a]));
        hi2 += far * far;
    }
    lo = std::sqrt(lo2);
    hi = std::sqrt(hi2);
}

} // namespace

support_info compute_support(const grid_function& f) {
    support_info s;
    std::array<long long, 3> ilo, ihi;
    if (!nonzero_bbox(f, ilo, ihi)) return s;
    s.empty = false;
    const grid_spec& spec = f.spec;
    for (int a = 0; a < spec.d; ++a) {
        // Half-cell pad: a lookup at y reads the cell containing y, so y can
        // be up to half a spacing (per axis) from a nonzero cell center.
        const double pad = 0.5 * spec.spacing(a);
        s.blo[a] = spec.center(a, ilo[a]) - pad;
        s.bhi[a] = spec.center(a, ihi[a]) + pad;
        s.c[a] = 0.5 * (s.blo[a] + s.bhi[a]);
    }
    // Annular bounds around the bbox center (tight for shell-like supports).
    double rmin = 1e300, rmax = 0.0;
    const long long n = spec.n;
    const int d = spec.d;
    double pad2 = 0.0;
    for (int a = 0; a < d; ++a) pad2 += 0.25 * spec.spacing(a) * spec.spacing(a);
    const double pad = std::sqrt(pad2);
    long long idx[3] = {0, 0, 0};
    const std::size_t total = f.values.size();
    for (std::size_t flat = 0; flat < total; ++flat) {
        if (f.values[flat] != 0.0) {
            double r2 = 0.0;
            for (int a = 0; a < d; ++a) {
                const double dx = spec.center(a, idx[a]) - s.c[a];
                r2 += dx * dx;
            }
            const double r = std::sqrt(r2);
            rmin = std::min(rmin, r);
            rmax = std::max(rmax, r);
        }
        for (int a = d - 1; a >= 0; --a) {
            if (++idx[a] < n) break;
            idx[a] = 0;
        }
    }
    s.rin = std::max(0.0, rmin - pad);
    s.rout = rmax + pad;
    return s;
}

lin_avg_evaluator::lin_avg_evaluator(const grid_function& f, int n_ang, double table_ds)
    : f_(f), sup_(compute_support(f)) {
    const int d = f.spec.d;
    n_ang_ = n_ang > 0 ? n_ang : default_n_ang(d);
    ds_ = table_ds > 0.0 ? table_ds : 0.5 * f.spec.min_spacing();
    if (d == 2) {
        cosn_.resize(n_ang_);
        sinn_.resize(n_ang_);
        for (int j = 0; j < n_ang_; ++j) {
            const double th = kTwoPi * (j + 0.5) / n_ang_;
            cosn_[j] = std::cos(th);
            sinn_[j] = std::sin(th);
        }
    } else if (d == 3) {
        rule3_ = make_sphere_rule(3, n_ang_);
    }
}

void lin_avg_evaluator::window(const double* x, double& lo, double& hi) const {
    if (sup_.empty) {
        lo = 1.0;
        hi = 0.0;
        return;
    }
    const int d = f_.spec.d;
    bbox_dist_range(d, sup_, x, lo, hi);
    double dc2 = 0.0;
    for (int a = 0; a < d; ++a) dc2 += (x[a] - sup_.c[a]) * (x[a] - sup_.c[a]);
    const double dc = std::sqrt(dc2);
    // Shell bound: |x - y| >= |rin - dc| and <= dc + rout for |y - c| in
    // [rin, rout].
    if (dc > sup_.rout) lo = std::max(lo, dc - sup_.rout);
    else if (dc < sup_.rin) lo = std::max(lo, sup_.rin - dc);
    hi = std::min(hi, dc + sup_.rout);
}

double lin_avg_evaluator::eval(const double* x, double s) const {
    if (sup_.empty || s < 0.0) return 0.0;
    const int d = f_.spec.d;
    if (d == 1) {
        return 0.5 * (f_.lookup1(x[0] - s) + f_.lookup1(x[0] + s));
    }
    if (d == 2) {
        const double dx = x[0] - sup_.c[0], dy = x[1] - sup_.c[1];
        const double dc = std::sqrt(dx * dx + dy * dy);
        int j_lo = 0, j_hi = n_ang_ - 1;
        bool wrap = false;
        if (dc > sup_.rout && s > 0.0) {
            // Only directions within the cap around (x - c) can reach the
            // support: for any s, the half-angle is at most asin(rout/dc).
            const double half = std::asin(std::min(1.0, sup_.rout / dc));
            const double alpha = std::atan2(dy, dx);
            const double step = kTwoPi / n_ang_;
            const double a_lo = alpha - half - step;
            const double a_hi = alpha + half + step;
            j_lo = static_cast<int>(std::floor(a_lo / step - 0.5));
            j_hi = static_cast<int>(std::ceil(a_hi / step - 0.5));
            if (j_hi - j_lo + 1 >= n_ang_) {
                j_lo = 0;
                j_hi = n_ang_ - 1;
            } else {
                wrap = true;
            }
        }
        double acc = 0.0;
        if (!wrap) {
            for (int j = j_lo; j <= j_hi; ++j)
                acc += f_.lookup2(x[0] - s * cosn_[j], x[1] - s * sinn_[j]);
        } else {
            for (int j = j_lo; j <= j_hi; ++j) {
                const int jj = ((j % n_ang_) + n_ang_) % n_ang_;
                acc += f_.lookup2(x[0] - s * cosn_[jj], x[1] - s * sinn_[jj]);
            }
        }
        return acc / n_ang_;
    }
    double acc = 0.0;
    for (std::size_t j = 0; j < rule3_.nodes.size(); ++j) {
        const auto& w = rule3_.nodes[j];
        acc += rule3_.weights[j] *
               f_.lookup3(x[0] - s * w[0], x[1] - s * w[1], x[2] - s * w[2]);
    }
    return acc;
}

std::vector<std::uint32_t> mask_from_nonzero(const grid_function& h) {
    std::vector<std::uint32_t> mask;
    for (std::size_t i = 0; i < h.values.size(); ++i)
        if (h.values[i] != 0.0) mask.push_back(static_cast<std::uint32_t>(i));
    return mask;
}

std::vector<std::uint32_t> mask_stride(const grid_spec& spec, int stride) {
    if (stride < 1) fail_invalid("mask stride must be >= 1");
    std::vector<std::uint32_t> mask;
    const long long n = spec.n;
    if (spec.d == 1) {
        for (long long i = 0; i < n; i += stride) mask.push_back(i);
    } else if (spec.d == 2) {
        for (long long i = 0; i < n; i += stride)
            for (long long j = 0; j < n; j += stride) mask.push_back(i * n + j);
    } else {
        for (long long i = 0; i < n; i += stride)
            for (long long j = 0; j < n; j += stride)
                for (long long k = 0; k < n; k += stride)
                    mask.push_back((i * n + j) * n + k);
    }
    return mask;
}

namespace {

void flat_to_point(const grid_spec& spec, std::size_t flat, double* x) {
    const long long n = spec.n;
    if (spec.d == 1) {
        x[0] = spec.center(0, static_cast<long long>(flat));
    } else if (spec.d == 2) {
        x[0] = spec.center(0, static_cast<long long>(flat) / n);
        x[1] = spec.center(1, static_cast<long long>(flat) % n);
    } else {
        const long long k = flat % n, j = (flat / n) % n, i = flat / (n * n);
        x[0] = spec.center(0, i);
        x[1] = spec.center(1, j);
        x[2] = spec.center(2, k);
    }
}

// Shared driver: iterates output points (mask or full grid) in deterministic
// chunks and calls point_fn(flat, x).
void for_output_points(const grid_spec& spec, const eval_options& opts,
                       const std::function<void(std::size_t, const double*)>& point_fn) {
    const int threads = resolve_threads(opts.threads);
    if (opts.mask) {
        const auto& m = *opts.mask;
        parallel_chunks(m.size(), threads, [&](std::size_t, std::size_t lo, std::size_t hi) {
            double x[3];
            for (std::size_t i = lo; i < hi; ++i) {
                flat_to_point(spec, m[i], x);
                point_fn(m[i], x);
            }
        });
    } else {
        parallel_chunks(spec.total_cells(), threads,
                        [&](std::size_t, std::size_t lo, std::size_t hi) {
                            double x[3];
                            for (std::size_t i = lo; i < hi; ++i) {
                                flat_to_point(spec, i, x);
                                point_fn(i, x);
                            }
                        });
    }
}

struct radius_table {
    long long k0 = 0, k1 = -1; // empty when k1 < k0
    double inv_ds = 0.0;
    std::vector<double> v;

    void build(const lin_avg_evaluator& ev, const double* x) {
        const double ds = ev.table_ds();
        inv_ds = 1.0 / ds;
        double lo, hi;
        ev.window(x, lo, hi);
        if (!(hi >= lo)) {
            k0 = 0;
            k1 = -1;
            return;
        }
        k0 = std::max<long long>(0, static_cast<long long>(std::floor(lo * inv_ds)) - 1);
        k1 = static_cast<long long>(std::ceil(hi * inv_ds)) + 1;
        v.resize(k1 - k0 + 1);
        for (long long k = k0; k <= k1; ++k) v[k - k0] = ev.eval(x, k * ds);
    }

    double at(double s) const {
        const long long k = static_cast<long long>(std::nearbyint(s * inv_ds));
        if (k < k0 || k > k1) return 0.0;
        return v[k - k0];
    }
};

// Evaluates all requested radii of A_t(f, g)(x) through the slicing rule and
// per-slot radius tables; calls out(t_index, value). tf/tg are caller scratch.
template <class Out>
void eval_point_slicing(const lin_avg_evaluator& ef, const lin_avg_evaluator& eg,
                        const slicing_rule& rule, const double* x,
                        const std::vector<double>& radii, radius_table& tf, radius_table& tg,
                        Out&& out) {
    tf.build(ef, x);
    tg.build(eg, x);
    if (tf.k1 < tf.k0 || tg.k1 < tg.k0) {
        for (std::size_t ti = 0; ti < radii.size(); ++ti) out(ti, 0.0);
        return;
    }
    const double fw_lo = tf.k0 / tf.inv_ds, fw_hi = tf.k1 / tf.inv_ds;
    const double gw_lo = tg.k0 / tg.inv_ds, gw_hi = tg.k1 / tg.inv_ds;
    const auto& s = rule.s;
    const auto& c = rule.c;
    const auto& w = rule.w;
    const std::size_t m = s.size();
    for (std::size_t ti = 0; ti < radii.size(); ++ti) {
        const double t = radii[ti];
        if (!(t > 0.0)) {
            out(ti, 0.0);
            continue;
        }
        // f slot: t*sin(phi) in [fw_lo, fw_hi] (s increasing).
        const std::size_t i_lo = std::lower_bound(s.begin(), s.end(), fw_lo / t) - s.begin();
        const std::size_t i_hi = std::upper_bound(s.begin(), s.end(), fw_hi / t) - s.begin();
        // g slot: t*cos(phi) in [gw_lo, gw_hi] (c decreasing).
        const std::size_t j_lo =
            std::lower_bound(c.begin(), c.end(), gw_hi / t, std::greater<double>()) - c.begin();
        const std::size_t j_hi =
            std::upper_bound(c.begin(), c.end(), gw_lo / t, std::greater<double>()) - c.begin();
        const std::size_t lo = std::max(i_lo, j_lo);
        const std::size_t hi = std::min({i_hi, j_hi, m});
        double acc = 0.0;
        for (std::size_t i = lo; i < hi; ++i)
            acc += w[i] * tf.at(t * s[i]) * tg.at(t * c[i]);
        out(ti, acc);
    }
}

int resolve_n_circle(const eval_options& opts) {
    int n = opts.n_circle_d1 > 0 ? opts.n_circle_d1 : 256;
    if (n % 4 != 0) n += 4 - n % 4; // keep the swap symmetry of the node set
    return n;
}

grid_function bilinear_radii(const grid_function& f, const grid_function& g,
                             const std::vector<double>& radii, const eval_options& opts,
                             bool take_sup) {
    if (!(f.spec == g.spec)) fail_invalid("bilinear average requires identical grid specs");
    for (double t : radii)
        if (!(t > 0.0)) fail_invalid("bilinear average requires positive radii");
    grid_function out(f.spec);
    const int d = f.spec.d;
    if (d == 1) {
        const int n_circle = resolve_n_circle(opts);
        std::vector<double> cosn(n_circle), sinn(n_circle);
        for (int j = 0; j < n_circle; ++j) {
            const double th = kTwoPi * (j + 0.5) / n_circle;
            cosn[j] = std::cos(th);
            sinn[j] = std::sin(th);
        }
        for_output_points(f.spec, opts, [&](std::size_t flat, const double* x) {
            double best = 0.0;
            for (std::size_t ti = 0; ti < radii.size(); ++ti) {
                const double t = radii[ti];
                double acc = 0.0;
                for (int j = 0; j < n_circle; ++j) {
                    const double vf = f.lookup1(x[0] - t * cosn[j]);
                    if (vf != 0.0) acc += vf * g.lookup1(x[0] - t * sinn[j]);
                }
                acc /= n_circle;
                best = take_sup ? std::max(best, std::abs(acc)) : acc;
            }
            out.values[flat] = best;
        });
        return out;
    }
    const int n_radial = opts.n_radial > 0 ? opts.n_radial : 64;
    const slicing_rule rule = make_slicing_rule(d, n_radial);
    const lin_avg_evaluator ef(f, opts.slot_f.n_ang, opts.slot_f.table_ds);
    const lin_avg_evaluator eg(g, opts.slot_g.n_ang, opts.slot_g.table_ds);
    if (ef.empty() || eg.empty()) return out;
    for_output_points(f.spec, opts, [&](std::size_t flat, const double* x) {
        thread_local radius_table tf, tg;
        double best = 0.0;
        eval_point_slicing(ef, eg, rule, x, radii, tf, tg, [&](std::size_t, double v) {
            best = take_sup ? std::max(best, std::abs(v)) : v;
        });
        out.values[flat] = best;
    });
    return out;
}

} // namespace

grid_function bilinear_spherical_average(const grid_function& f, const grid_function& g,
                                         double t, const eval_options& opts) {
    return bilinear_radii(f, g, {t}, opts, /*take_sup=*/false);
}

grid_function bilinear_sup(const grid_function& f, const grid_function& g,
                           const std::vector<double>& radii, const eval_options& opts) {
    if (radii.empty()) fail_invalid("bilinear_sup requires at least one radius");
    return bilinear_radii(f, g, radii, opts, /*take_sup=*/true);
}

grid_function linear_spherical_average(const grid_function& f, double t,
                                       const eval_options& opts) {
    if (!(t > 0.0)) fail_invalid("linear average requires t > 0");
    grid_function out(f.spec);
    const lin_avg_evaluator ef(f, opts.slot_f.n_ang, opts.slot_f.table_ds);
    if (ef.empty()) return out;
    for_output_points(f.spec, opts, [&](std::size_t flat, const double* x) {
        out.values[flat] = ef.eval(x, t);
    });
    return out;
}

grid_function linear_sup(const grid_function& f, const std::vector<double>& radii,
                         const eval_options& opts) {
    if (radii.empty()) fail_invalid("linear_sup requires at least one radius");
    grid_function out(f.spec);
    const lin_avg_evaluator ef(f, opts.slot_f.n_ang, opts.slot_f.table_ds);
    if (ef.empty()) return out;
    for_output_points(f.spec, opts, [&](std::size_t flat, const double* x) {
        double lo, hi;
        ef.window(x, lo, hi);
        double best = 0.0;
        for (double s : radii) {
            if (s < lo - ef.table_ds() || s > hi + ef.table_ds()) continue;
            best = std::max(best, std::abs(ef.eval(x, s)));
        }
        out.values[flat] = best;
    });
    return out;
}

void linear_average_tables(const grid_function& f, const std::vector<double>& radii,
                           const eval_options& opts,
                           const std::function<void(std::size_t, const double*)>& sink) {
    const lin_avg_evaluator ef(f, opts.slot_f.n_ang, opts.slot_f.table_ds);
    for_output_points(f.spec, opts, [&](std::size_t flat, const double* x) {
        thread_local std::vector<double> vals;
        vals.assign(radii.size(), 0.0);
        if (!ef.empty()) {
            double lo, hi;
            ef.window(x, lo, hi);
            for (std::size_t j = 0; j < radii.size(); ++j) {
                const double s = radii[j];
                if (s < lo - ef.table_ds() || s > hi + ef.table_ds()) continue;
                vals[j] = ef.eval(x, s);
            }
        }
        sink(flat, vals.data());
    });
}

} // namespace sparselab
