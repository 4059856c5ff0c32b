#include "experiments.hpp"

#include "error.hpp"
#include "reduce.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <string>

namespace sparselab {

namespace {

double unit_draw(std::mt19937_64& rng) { return (double)(rng() >> 11) * 0x1p-53; }

double draw_in(std::mt19937_64& rng, double a, double b) { return a + (b - a) * unit_draw(rng); }

int clamp_count(double want, int lo, int hi) {
    const double c = std::ceil(want);
    if (c <= lo) return lo;
    if (c >= hi) return hi;
    return (int)c;
}

void require_symmetric(const grid_spec& spec) {
    for (int a = 0; a < spec.d; ++a)
        if (std::fabs(spec.lo[a] + spec.hi[a]) > 1e-12 * (spec.hi[a] - spec.lo[a]))
            fail_invalid("extremizer grids must be centered at the origin");
}

void check_margin(const grid_spec& spec, double outer_extent, const char* what) {
    const double sp = spec.min_spacing();
    for (int a = 0; a < spec.d; ++a) {
        const double room = spec.hi[a] - 4.0 * sp;
        if (outer_extent > room)
            fail_invalid(std::string(what) + " reaches within four cells of the boundary; "
                         "need box halfwidth > " + std::to_string(outer_extent + 4.0 * sp));
    }
}

void check_thickness(double width, const grid_spec& spec, const char* what) {
    if (width < 2.5 * spec.min_spacing())
        fail_invalid(std::string(what) + " is thinner than 2.5 cells; need n >= " +
                     std::to_string((long long)std::ceil(
                         2.5 * (spec.hi[0] - spec.lo[0]) / width)));
}

// max over window starts of (window max - window min), window = w samples
double sliding_oscillation(const std::vector<double>& v, int w) {
    const int n = (int)v.size();
    std::deque<int> qmax, qmin;
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
        while (!qmax.empty() && v[(std::size_t)qmax.back()] <= v[(std::size_t)i]) qmax.pop_back();
        qmax.push_back(i);
        while (!qmin.empty() && v[(std::size_t)qmin.back()] >= v[(std::size_t)i]) qmin.pop_back();
        qmin.push_back(i);
        const int lo = i - w + 1;
        if (qmax.front() < lo) qmax.pop_front();
        if (qmin.front() < lo) qmin.pop_front();
        if (i >= w - 1)
            best = std::max(best, v[(std::size_t)qmax.front()] - v[(std::size_t)qmin.front()]);
    }
    return best;
}

std::array<double, 3> origin() { return {0.0, 0.0, 0.0}; }

grid_function indicator_sum(const grid_spec& spec,
                            const std::vector<std::pair<double, region_spec>>& parts) {
    grid_function acc(spec);
    for (const auto& pr : parts)
        acc = linear_combination(1.0, acc, pr.first, make_indicator(spec, pr.second));
    return acc;
}

} // namespace

grid_function sample_function(const grid_spec& spec,
                              const std::function<double(const double*)>& fn) {
    spec.validate();
    grid_function f(spec);
    const long long n = spec.n;
    double x[3] = {0.0, 0.0, 0.0};
    std::size_t flat = 0;
    long long idx[3] = {0, 0, 0};
    const long long count = (long long)f.values.size();
    for (long long t = 0; t < count; ++t, ++flat) {
        long long rem = t;
        for (int a = spec.d - 1; a >= 0; --a) {
            idx[a] = rem % n;
            rem /= n;
        }
        for (int a = 0; a < spec.d; ++a) x[a] = spec.center(a, idx[a]);
        f.values[flat] = fn(x);
    }
    return f;
}

grid_function gaussian_bump(const grid_spec& spec, const std::array<double, 3>& center,
                            double sigma) {
    if (!(sigma > 0.0)) fail_invalid("sigma must be positive");
    return sample_function(spec, [&](const double* x) {
        double q = 0.0;
        for (int a = 0; a < spec.d; ++a) q += (x[a] - center[a]) * (x[a] - center[a]);
        return std::exp(-q / (2.0 * sigma * sigma));
    });
}

extremizer_triple make_extremizer(extremizer_kind kind, int d, double delta,
                                  const grid_spec& spec, const extremizer_params& par) {
    spec.validate();
    if (spec.d != d) fail_invalid("grid dimension mismatch");
    require_symmetric(spec);
    const double sp = spec.min_spacing();
    if (delta < 4.0 * sp)
        fail_invalid("delta below four cells; need n >= " +
                     std::to_string((long long)std::ceil(
                         4.0 * (spec.hi[0] - spec.lo[0]) / delta)));

    extremizer_triple out{grid_function(spec), grid_function(spec), grid_function(spec)};
    switch (kind) {
    case extremizer_kind::ball_annulus: {
        const double r0 = par.shell_radius, w = par.shell_width;
        if (!(w > 0.0) || !(r0 > w / 2.0)) fail_invalid("bad shell geometry");
        check_thickness(w, spec, "shell");
        check_margin(spec, r0 + w / 2.0, "shell");
        check_margin(spec, par.g_factor * delta, "second ball");
        out.f = make_indicator(spec, region_spec::ball(origin(), delta));
        out.g = make_indicator(spec, region_spec::ball(origin(), par.g_factor * delta));
        out.h = make_indicator(spec, region_spec::annulus(origin(), r0 - w / 2.0, r0 + w / 2.0));
        break;
    }
    case extremizer_kind::annuli_ball: {
        const double c0 = par.ann_center;
        const double fin = c0 - par.wf * delta, fout = c0 + par.wf * delta;
        const double gin = c0 - par.wg * delta, gout = c0 + par.wg * delta;
        if (!(gin > 4.0 * sp)) fail_invalid("annulus inner radius too small at this delta");
        check_thickness(2.0 * par.wf * delta, spec, "first annulus");
        check_thickness(2.0 * par.wg * delta, spec, "second annulus");
        check_margin(spec, gout, "outer annulus");
        out.f = make_indicator(spec, region_spec::annulus(origin(), fin, fout));
        out.g = make_indicator(spec, region_spec::annulus(origin(), gin, gout));
        out.h = make_indicator(spec, region_spec::ball(origin(), delta));
        break;
    }
    case extremizer_kind::knapp_boxes: {
        if (d < 2) fail_invalid("slab family needs d >= 2");
        const double rd = std::sqrt(delta);
        const double s2 = std::sqrt(2.0);
        check_thickness(2.0 * par.knapp_c1 * delta, spec, "first slab");
        check_thickness(2.0 * par.knapp_c2 * delta, spec, "second slab");
        check_margin(spec, std::max({par.knapp_c1 * rd, par.knapp_c2 * rd, s2}), "slab family");
        std::array<double, 3> flo{}, fhi{}, glo{}, ghi{}, hlo{}, hhi{};
        for (int a = 0; a < d - 1; ++a) {
            flo[a] = -par.knapp_c1 * rd;
            fhi[a] = par.knapp_c1 * rd;
            glo[a] = -par.knapp_c2 * rd;
            ghi[a] = par.knapp_c2 * rd;
            hlo[a] = -rd;
            hhi[a] = rd;
        }
        flo[d - 1] = -par.knapp_c1 * delta;
        fhi[d - 1] = par.knapp_c1 * delta;
        glo[d - 1] = -par.knapp_c2 * delta;
        ghi[d - 1] = par.knapp_c2 * delta;
        hlo[d - 1] = 1.0 / s2;
        hhi[d - 1] = s2;
        out.f = make_indicator(spec, region_spec::box(flo, fhi));
        out.g = make_indicator(spec, region_spec::box(glo, ghi));
        out.h = make_indicator(spec, region_spec::box(hlo, hhi));
        break;
    }
    }
    return out;
}

double lower_exponent_closed_form(extremizer_kind kind, int d) {
    switch (kind) {
    case extremizer_kind::ball_annulus: return 2.0 * d - 1.0;
    case extremizer_kind::annuli_ball: return d + 1.0;
    case extremizer_kind::knapp_boxes: return d + (d - 1.0) / 2.0;
    }
    fail_internal("unknown extremizer kind");
}

double upper_exponent_closed_form(extremizer_kind kind, int d, const exponent_triple& t) {
    const double ip = t.p.reciprocal().to_double();
    const double iq = t.q.reciprocal().to_double();
    const double irc = t.r_conj().reciprocal().to_double(); // 1 - 1/r
    switch (kind) {
    case extremizer_kind::ball_annulus: return d * (ip + iq);
    case extremizer_kind::annuli_ball: return ip + iq + d * irc;
    case extremizer_kind::knapp_boxes:
        return (d + 1.0) / 2.0 * (ip + iq) + (d - 1.0) / 2.0 * irc;
    }
    fail_internal("unknown extremizer kind");
}

bool necessity_check(extremizer_kind kind, int d, const exponent_triple& t) {
    if (d < 2) fail_invalid("necessity faces need d >= 2");
    switch (kind) {
    case extremizer_kind::ball_annulus: return necessity_face(0, d, t);
    case extremizer_kind::annuli_ball: return necessity_face(1, d, t);
    case extremizer_kind::knapp_boxes: return necessity_face(2, d, t);
    }
    fail_internal("unknown extremizer kind");
}

sharpness_result sharpness_run(extremizer_kind kind, int d,
                               const std::vector<double>& deltas,
                               const sharpness_options& opts) {
    if (deltas.empty()) fail_invalid("empty delta list");
    double hw = opts.box_halfwidth;
    if (hw <= 0.0) {
        switch (kind) {
        case extremizer_kind::ball_annulus: hw = 1.0; break;
        case extremizer_kind::annuli_ball: hw = 1.2; break;
        case extremizer_kind::knapp_boxes: hw = 1.6; break;
        }
    }
    grid_spec spec;
    spec.d = d;
    spec.n = opts.n_per_axis;
    for (int a = 0; a < d; ++a) {
        spec.lo[a] = -hw;
        spec.hi[a] = hw;
    }
    spec.validate();

    const double pd = opts.t.p.to_double();
    const double qd = opts.t.q.to_double();
    const rat rc = opts.t.r_conj();
    const double rcd = rc.is_inf() ? std::numeric_limits<double>::infinity() : rc.to_double();

    sharpness_result out;
    std::vector<double> xs, lows, ups;
    for (double delta : deltas) {
        const extremizer_triple trip = make_extremizer(kind, d, delta, spec, opts.par);
        const std::vector<std::uint32_t> mask = mask_from_nonzero(trip.h);

        eval_options eo;
        eo.n_radial = clamp_count(opts.phi_per_delta / delta, opts.min_phi, opts.max_phi);
        const int na = clamp_count(opts.ang_per_delta / delta, opts.min_ang, opts.max_ang);
        eo.slot_f = slot_options{na, 0.0};
        eo.slot_g = slot_options{na, 0.0};
        eo.n_circle_d1 = na;
        eo.mask = &mask;
        eo.threads = opts.threads;

        radius_grid rg;
        rg.t_lo = opts.t_lo;
        rg.t_hi = opts.t_hi;
        rg.n_t = std::max(opts.min_t, (int)std::ceil(opts.t_per_delta / delta));
        rg.geometric = true;

        const grid_function m = localized_maximal(trip.f, trip.g, rg, eo);
        const double lower = pairing(m, trip.h);
        const double upper =
            lp_norm(trip.f, pd) * lp_norm(trip.g, qd) * lp_norm(trip.h, rcd);
        out.rows.push_back(sharpness_row{delta, lower, upper});
        xs.push_back(delta);
        lows.push_back(lower);
        ups.push_back(upper);
    }
    out.lower_fit = fit_power_law(xs, lows);
    out.upper_fit = fit_power_law(xs, ups);
    out.lower_exponent = lower_exponent_closed_form(kind, d);
    out.upper_exponent = upper_exponent_closed_form(kind, d, opts.t);
    out.necessity = (d >= 2) ? necessity_check(kind, d, opts.t) : in_region(d, opts.t);
    return out;
}

continuity_result continuity_decay_run(const grid_function& f, const grid_function& g,
                                       const std::vector<double>& hs,
                                       const continuity_options& opts) {
    f.spec.validate();
    if (hs.empty()) fail_invalid("empty shift list");
    if (opts.axis < 0 || opts.axis >= f.spec.d) fail_invalid("bad shift axis");
    const double sp = f.spec.spacing(opts.axis);
    const std::vector<std::uint32_t> mask = mask_stride(f.spec, opts.stride);

    eval_options eo;
    eo.n_radial = opts.n_radial;
    eo.slot_f = opts.slot_f;
    eo.slot_g = opts.slot_g;
    eo.mask = &mask;
    eo.threads = opts.threads;

    radius_grid rg{opts.t, opts.t, 1, true};

    continuity_result out;
    std::vector<double> xs, ys;
    for (double h : hs) {
        if (std::fabs(h) < 0.75 * sp)
            fail_invalid("shift " + std::to_string(h) + " is below one cell");
        std::array<double, 3> shift_vec{0.0, 0.0, 0.0};
        shift_vec[(std::size_t)opts.axis] = h;
        const double v = continuity_norm(f, g, shift_vec, opts.norm, rg, eo);
        out.rows.push_back(continuity_row{h, v});
        xs.push_back(std::fabs(h));
        ys.push_back(v);
    }
    out.fit = fit_power_law(xs, ys);
    return out;
}

radius_perturbation_result radius_perturbation_run(const grid_function& f,
                                                   const std::vector<double>& gammas,
                                                   const std::vector<double>& epss,
                                                   const radius_perturbation_options& opts) {
    f.spec.validate();
    if (gammas.empty() || epss.empty()) fail_invalid("empty gamma or eps list");
    if (opts.n_s < 16) fail_invalid("need at least 16 dilation samples");
    const int d = f.spec.d;
    const double ds_s = 1.0 / (opts.n_s - 1);

    std::vector<int> wins;
    for (double gam : gammas) {
        if (!(gam > 0.0) || gam > 1.0) fail_invalid("gamma must lie in (0, 1]");
        const int k = (int)std::ceil(gam / ds_s) - 1; // |i - j| <= k  <=>  |s_i - s_j| < gamma
        if (k < 1)
            fail_invalid("gamma " + std::to_string(gam) + " is below the dilation step; "
                         "raise n_s");
        wins.push_back(k + 1);
    }

    const double fp = lp_norm(f, opts.p);
    if (!(fp > 0.0)) fail_invalid("input has zero norm");

    const std::vector<std::uint32_t> mask = mask_stride(f.spec, opts.stride);
    const double cellvol = f.spec.cell_volume();
    const double frac = (double)f.spec.total_cells() / (double)mask.size();

    radius_perturbation_result out;
    out.gammas = gammas;
    out.epss = epss;
    out.values.assign(gammas.size(), std::vector<double>(epss.size(), 0.0));
    out.expected_eps_slope = (double)d / opts.r - (d - 1.0);

    eval_options eo;
    eo.slot_f = opts.slot;
    eo.mask = &mask;
    eo.threads = opts.threads;

    for (std::size_t ei = 0; ei < epss.size(); ++ei) {
        const double eps = epss[ei];
        if (!(eps > 0.0)) fail_invalid("eps must be positive");
        std::vector<double> radii(opts.n_s);
        for (int j = 0; j < opts.n_s; ++j) radii[(std::size_t)j] = eps * (1.0 + j * ds_s);

        std::vector<std::vector<double>> osc(gammas.size(),
                                             std::vector<double>(mask.size(), 0.0));
        std::vector<double> row((std::size_t)opts.n_s);
        linear_average_tables(f, radii, eo,
                              [&](std::size_t flat, const double* vals) {
                                  const auto it =
                                      std::lower_bound(mask.begin(), mask.end(), (std::uint32_t)flat);
                                  const std::size_t pos = (std::size_t)(it - mask.begin());
                                  std::copy(vals, vals + opts.n_s, row.begin());
                                  for (std::size_t gi = 0; gi < gammas.size(); ++gi)
                                      osc[gi][pos] = sliding_oscillation(row, wins[gi]);
                              });

        for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
            const double sr = pairwise_sum_f(std::size_t(0), osc[gi].size(), [&](std::size_t i) {
                return std::pow(osc[gi][i], opts.r);
            });
            out.values[gi][ei] = std::pow(sr * cellvol * frac, 1.0 / opts.r) / fp;
        }
    }

    for (std::size_t gi = 0; gi < gammas.size(); ++gi)
        out.eps_fits.push_back(fit_power_law(epss, out.values[gi]));
    std::vector<double> gy;
    for (std::size_t gi = 0; gi < gammas.size(); ++gi) gy.push_back(out.values[gi][0]);
    out.gamma_fit = fit_power_law(gammas, gy);
    return out;
}

namespace {

grid_function random_indicator_mix(const grid_spec& spec, std::mt19937_64& rng, int max_parts,
                                   double c_lo, double c_hi, double r_lo, double r_hi) {
    const int parts = 1 + (int)(rng() % (std::uint64_t)max_parts);
    std::vector<std::pair<double, region_spec>> specs;
    for (int i = 0; i < parts; ++i) {
        const double amp = draw_in(rng, 0.3, 3.0);
        std::array<double, 3> c{};
        for (int a = 0; a < spec.d; ++a) c[(std::size_t)a] = draw_in(rng, c_lo, c_hi);
        const int kind = (int)(rng() % 2);
        if (kind == 0) {
            specs.emplace_back(amp, region_spec::ball(c, draw_in(rng, r_lo, r_hi)));
        } else {
            std::array<double, 3> blo{}, bhi{};
            for (int a = 0; a < spec.d; ++a) {
                const double half = draw_in(rng, r_lo, r_hi);
                blo[(std::size_t)a] = c[(std::size_t)a] - half;
                bhi[(std::size_t)a] = c[(std::size_t)a] + half;
            }
            specs.emplace_back(amp, region_spec::box(blo, bhi));
        }
    }
    return indicator_sum(spec, specs);
}

} // namespace

pointwise_bound_result pointwise_bound_suite(const pointwise_bound_options& opts) {
    grid_spec spec;
    spec.d = opts.d;
    spec.n = opts.n;
    for (int a = 0; a < opts.d; ++a) {
        spec.lo[a] = -opts.box_halfwidth;
        spec.hi[a] = opts.box_halfwidth;
    }
    spec.validate();

    const std::vector<std::uint32_t> mask = mask_stride(spec, opts.stride);
    const double t_hi = std::ldexp(1.0, opts.m_hi + 1);
    const double ds = (opts.slot.table_ds > 0.0) ? opts.slot.table_ds : spec.min_spacing() / 2.0;
    std::vector<double> table_radii;
    for (int k = 1; k * ds <= t_hi + 0.5 * ds; ++k) table_radii.push_back(k * ds);

    pointwise_bound_result out;
    for (int idx = 0; idx < opts.n_pairs; ++idx) {
        std::mt19937_64 rng(opts.seed * 1000003ULL + (std::uint64_t)idx);
        const double hwm = opts.box_halfwidth;
        const grid_function f =
            random_indicator_mix(spec, rng, 3, -0.45 * hwm, 0.45 * hwm, 0.1 * hwm, 0.35 * hwm);
        const grid_function g =
            random_indicator_mix(spec, rng, 3, -0.45 * hwm, 0.45 * hwm, 0.1 * hwm, 0.35 * hwm);

        eval_options eo;
        eo.n_radial = opts.n_radial;
        eo.slot_f = opts.slot;
        eo.slot_g = opts.slot;
        eo.mask = &mask;
        eo.threads = opts.threads;

        const grid_function m =
            full_maximal(f, g, opts.m_lo, opts.m_hi, opts.n_t_per_octave, eo);
        const grid_function hl = hardy_littlewood_maximal(f);
        const grid_function msph = linear_sup(g, table_radii, eo);

        double c = 0.0;
        for (std::uint32_t flat : mask) {
            const double num = m.values[flat];
            if (num <= 0.0) continue;
            const double den = hl.values[flat] * msph.values[flat];
            c = (den > 0.0) ? std::max(c, num / den)
                            : std::numeric_limits<double>::infinity();
        }
        out.rows.push_back(pointwise_bound_row{idx, c});
        out.max_c = std::max(out.max_c, c);
    }
    return out;
}

namespace {

struct field_recipe {
    std::vector<std::pair<double, region_spec>> parts;

    grid_function realize(const grid_spec& spec) const { return indicator_sum(spec, parts); }
};

field_recipe draw_recipe(std::mt19937_64& rng, int d) {
    field_recipe rec;
    const int parts = 1 + (int)(rng() % 2);
    for (int i = 0; i < parts; ++i) {
        const double amp = draw_in(rng, 0.3, 3.0);
        std::array<double, 3> c{};
        for (int a = 0; a < d; ++a) c[(std::size_t)a] = draw_in(rng, 0.55, 1.45);
        if (rng() % 2 == 0) {
            rec.parts.emplace_back(amp, region_spec::ball(c, draw_in(rng, 0.08, 0.35)));
        } else {
            std::array<double, 3> blo{}, bhi{};
            for (int a = 0; a < d; ++a) {
                const double half = draw_in(rng, 0.08, 0.3);
                blo[(std::size_t)a] = c[(std::size_t)a] - half;
                bhi[(std::size_t)a] = c[(std::size_t)a] + half;
            }
            rec.parts.emplace_back(amp, region_spec::box(blo, bhi));
        }
    }
    return rec;
}

// plain signed mean of f over the cells of q
double signed_cell_mean(const grid_function& f, const dyadic_cube& q) {
    std::array<long long, 3> i0{}, i1{};
    if (!cube_cell_range(f.spec, q, i0, i1)) return 0.0;
    const long long n = f.spec.n;
    double sum = 0.0;
    long long cnt = 0;
    for (long long i = i0[0]; i <= i1[0]; ++i) {
        if (f.spec.d == 1) {
            sum += f.values[(std::size_t)i];
            ++cnt;
            continue;
        }
        for (long long j = i0[1]; j <= i1[1]; ++j) {
            if (f.spec.d == 2) {
                sum += f.values[(std::size_t)(i * n + j)];
                ++cnt;
                continue;
            }
            for (long long k = i0[2]; k <= i1[2]; ++k) {
                sum += f.values[(std::size_t)((i * n + j) * n + k)];
                ++cnt;
            }
        }
    }
    return (cnt > 0) ? sum / (double)cnt : 0.0;
}

} // namespace

sparse_suite_result sparse_suite(const sparse_suite_options& opts) {
    sparse_suite_result out;
    out.pass = true;

    for (int d = 1; d <= 2; ++d) {
        const int count = (d == 1) ? opts.n_d1 : opts.n_d2;
        const int n_base = (d == 1) ? opts.n1 : opts.n2;
        const double c0 = (opts.c0 > 0.0) ? opts.c0 : 2.0 * std::pow(3.0, d);
        const double eta_target = std::ldexp(1.0, -d - 2);

        for (int idx = 0; idx < count; ++idx) {
            std::mt19937_64 rng(opts.seed * 1000003ULL + (std::uint64_t)(d * 101 + idx));
            const field_recipe rf = draw_recipe(rng, d);
            const field_recipe rg_ = draw_recipe(rng, d);
            const field_recipe rh = draw_recipe(rng, d);

            const auto run_at = [&](int n, sparse_suite_row& row, bool with_cz) {
                grid_spec spec;
                spec.d = d;
                spec.n = n;
                for (int a = 0; a < d; ++a) {
                    spec.lo[a] = 0.0;
                    spec.hi[a] = 2.0;
                }
                spec.validate();
                const grid_function f = rf.realize(spec);
                const grid_function g = rg_.realize(spec);
                const grid_function h = rh.realize(spec);
                const dyadic_cube root = box_as_dyadic_cube(spec);

                if (with_cz) {
                    const double p = (idx % 2 == 0) ? 1.0 : 2.0;
                    const cz_decomposition cz = cz_decompose(f, root, p, opts.cz_c0);
                    const grid_function recon =
                        linear_combination(1.0, linear_combination(1.0, cz.good, 1.0, cz.bad),
                                           -1.0, f);
                    row.cz_reconstruction = lp_norm(recon, std::numeric_limits<double>::infinity());
                    row.cz_mean_zero = 0.0;
                    row.cz_maximal = true;
                    for (const dyadic_cube& pc : cz.stopping_cubes) {
                        row.cz_mean_zero =
                            std::max(row.cz_mean_zero, std::fabs(signed_cell_mean(cz.bad, pc)));
                        if (!(cube_average(f, pc, p) > cz.threshold)) row.cz_maximal = false;
                        if (pc.level < root.level &&
                            cube_average(f, parent(pc), p) > cz.threshold * (1.0 + 1e-12))
                            row.cz_maximal = false;
                    }
                    const double cap = std::pow(2.0, (double)d / p) * cz.threshold;
                    row.cz_good_bound =
                        (cap > 0.0)
                            ? lp_norm(cz.good, std::numeric_limits<double>::infinity()) / cap
                            : 0.0;
                }

                domination_options dop;
                dop.kind = maximal_kind::full;
                dop.m_lo = opts.m_lo;
                dop.m_hi = opts.m_hi;
                dop.n_t_per_octave = (d == 1) ? opts.npo_d1 : opts.npo_d2;
                dop.c0 = c0;
                dop.eval.n_radial = opts.n_radial;
                dop.eval.slot_f = opts.slot;
                dop.eval.slot_g = opts.slot;
                dop.eval.threads = opts.threads;

                const domination_result dr = domination_ratio(f, g, h, opts.t, dop);
                if (with_cz) {
                    row.eta = dr.family.eta;
                    row.eta_target = eta_target;
                    const sparsity_report rep =
                        verify_sparsity(dr.family, spec, eta_target);
                    row.sparsity_ok = rep.pass;
                }
                return dr;
            };

            sparse_suite_row row;
            row.d = d;
            row.idx = idx;
            const domination_result base = run_at(n_base, row, true);
            row.ratio_base = base.ratio;
            if (opts.doubled) {
                const domination_result dbl = run_at(2 * n_base, row, false);
                row.ratio_doubled = dbl.ratio;
                row.drift = (row.ratio_base > 0.0)
                                ? std::fabs(row.ratio_doubled - row.ratio_base) / row.ratio_base
                                : std::numeric_limits<double>::infinity();
                out.max_drift = std::max(out.max_drift, row.drift);
            }

            const bool ok = row.cz_reconstruction <= 1e-10 && row.cz_mean_zero <= 1e-10 &&
                            row.cz_good_bound <= 1.0 + 1e-9 && row.cz_maximal &&
                            row.sparsity_ok && std::isfinite(row.ratio_base) &&
                            (!opts.doubled || row.drift < 0.25);
            out.pass = out.pass && ok;
            out.rows.push_back(row);
        }
    }
    return out;
}

} // namespace sparselab
