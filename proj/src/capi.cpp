#include "sparselab.h"

#include "averaging.hpp"
#include "core.hpp"
#include "error.hpp"
#include "experiments.hpp"
#include "grid.hpp"
#include "maximal.hpp"
#include "runner.hpp"
#include "sparse.hpp"

#include <cstring>
#include <fstream>
#include <limits>
#include <new>
#include <string>

using namespace sparselab;

struct sl_field {
    grid_function f;
};

struct sl_sparse_family {
    sparse_family fam;
    grid_spec spec;
    std::string detail;
};

namespace {

thread_local std::string g_error;

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const error& e) {
        g_error = e.what();
        return static_cast<int>(e.code());
    } catch (const std::bad_alloc&) {
        g_error = "out of memory";
        return SL_INTERNAL;
    } catch (const std::exception& e) {
        g_error = e.what();
        return SL_INTERNAL;
    } catch (...) {
        g_error = "unknown failure";
        return SL_INTERNAL;
    }
}

int bad_arg(const char* what) {
    g_error = what;
    return SL_INVALID;
}

std::array<double, 3> arr_from(const double* p, int d) {
    std::array<double, 3> a{0.0, 0.0, 0.0};
    for (int i = 0; i < d; ++i) a[(std::size_t)i] = p[i];
    return a;
}

exponent_triple triple_from(const char* p, const char* q, const char* r) {
    if (!p || !q || !r) fail_invalid("null exponent string");
    return exponent_triple(parse_rat(p), parse_rat(q), parse_rat(r));
}

eval_options eval_from(int n_radial, int n_ang) {
    eval_options eo;
    eo.n_radial = n_radial;
    eo.slot_f = slot_options{n_ang, 0.0};
    eo.slot_g = slot_options{n_ang, 0.0};
    eo.n_circle_d1 = n_ang;
    return eo;
}

int make_field(grid_function&& f, sl_field** out) {
    *out = new sl_field{std::move(f)};
    return SL_OK;
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

} // namespace

extern "C" {

const char* sl_version(void) { return "1.0.0"; }

const char* sl_last_error(void) { return g_error.c_str(); }

int sl_field_create(int d, int n, double lo, double hi, sl_field** out) {
    if (!out) return bad_arg("null output handle");
    return guarded([&] {
        grid_spec spec;
        spec.d = d;
        spec.n = n;
        for (int a = 0; a < d && a < 3; ++a) {
            spec.lo[(std::size_t)a] = lo;
            spec.hi[(std::size_t)a] = hi;
        }
        spec.validate();
        return make_field(grid_function(spec), out);
    });
}

void sl_field_free(sl_field* f) { delete f; }

int sl_field_add_ball(sl_field* f, const double* center, double r, double amplitude) {
    if (!f || !center) return bad_arg("null argument");
    return guarded([&] {
        const grid_function ind =
            make_indicator(f->f.spec, region_spec::ball(arr_from(center, f->f.spec.d), r));
        f->f = linear_combination(1.0, f->f, amplitude, ind);
        return SL_OK;
    });
}

int sl_field_add_annulus(sl_field* f, const double* center, double r_in, double r_out,
                         double amplitude) {
    if (!f || !center) return bad_arg("null argument");
    return guarded([&] {
        const grid_function ind = make_indicator(
            f->f.spec, region_spec::annulus(arr_from(center, f->f.spec.d), r_in, r_out));
        f->f = linear_combination(1.0, f->f, amplitude, ind);
        return SL_OK;
    });
}

int sl_field_add_box(sl_field* f, const double* lo, const double* hi, double amplitude) {
    if (!f || !lo || !hi) return bad_arg("null argument");
    return guarded([&] {
        const grid_function ind = make_indicator(
            f->f.spec,
            region_spec::box(arr_from(lo, f->f.spec.d), arr_from(hi, f->f.spec.d)));
        f->f = linear_combination(1.0, f->f, amplitude, ind);
        return SL_OK;
    });
}

int sl_field_add_scaled(sl_field* dst, double a, const sl_field* src) {
    if (!dst || !src) return bad_arg("null argument");
    return guarded([&] {
        dst->f = linear_combination(1.0, dst->f, a, src->f);
        return SL_OK;
    });
}

int sl_field_shift(const sl_field* f, const double* h, sl_field** out) {
    if (!f || !h || !out) return bad_arg("null argument");
    return guarded([&] { return make_field(shift(f->f, arr_from(h, f->f.spec.d)), out); });
}

int sl_field_eval(const sl_field* f, const double* x, double* out) {
    if (!f || !x || !out) return bad_arg("null argument");
    return guarded([&] {
        *out = f->f.lookup(x);
        return SL_OK;
    });
}

int sl_field_lp_norm(const sl_field* f, double p, double* out) {
    if (!f || !out) return bad_arg("null argument");
    return guarded([&] {
        *out = lp_norm(f->f, p);
        return SL_OK;
    });
}

int sl_field_pairing(const sl_field* u, const sl_field* h, double* out) {
    if (!u || !h || !out) return bad_arg("null argument");
    return guarded([&] {
        *out = pairing(u->f, h->f);
        return SL_OK;
    });
}

int sl_field_data(const sl_field* f, const double** data, size_t* count) {
    if (!f || !data || !count) return bad_arg("null argument");
    *data = f->f.values.data();
    *count = f->f.values.size();
    return SL_OK;
}

int sl_field_dims(const sl_field* f, int* d, int* n, double* lo, double* hi) {
    if (!f) return bad_arg("null argument");
    if (d) *d = f->f.spec.d;
    if (n) *n = f->f.spec.n;
    if (lo) *lo = f->f.spec.lo[0];
    if (hi) *hi = f->f.spec.hi[0];
    return SL_OK;
}

int sl_field_save(const sl_field* f, const char* path) {
    if (!f || !path) return bad_arg("null argument");
    return guarded([&] {
        if (ends_with(path, ".csv"))
            save_csv(f->f, path);
        else
            save_binary(f->f, path);
        return SL_OK;
    });
}

int sl_field_load(const char* path, sl_field** out) {
    if (!path || !out) return bad_arg("null argument");
    return guarded([&] {
        return make_field(ends_with(path, ".csv") ? load_csv(path) : load_binary(path), out);
    });
}

int sl_linear_average(const sl_field* f, double t, int n_ang, sl_field** out) {
    if (!f || !out) return bad_arg("null argument");
    return guarded(
        [&] { return make_field(linear_spherical_average(f->f, t, eval_from(0, n_ang)), out); });
}

int sl_bilinear_average(const sl_field* f, const sl_field* g, double t, int n_radial,
                        int n_ang, sl_field** out) {
    if (!f || !g || !out) return bad_arg("null argument");
    return guarded([&] {
        return make_field(bilinear_spherical_average(f->f, g->f, t, eval_from(n_radial, n_ang)),
                          out);
    });
}

int sl_localized_maximal(const sl_field* f, const sl_field* g, double t_lo, double t_hi,
                         int n_t, int n_radial, int n_ang, sl_field** out) {
    if (!f || !g || !out) return bad_arg("null argument");
    return guarded([&] {
        radius_grid rg{t_lo, t_hi, n_t, true};
        return make_field(localized_maximal(f->f, g->f, rg, eval_from(n_radial, n_ang)), out);
    });
}

int sl_lacunary_maximal(const sl_field* f, const sl_field* g, int m_lo, int m_hi,
                        int n_radial, int n_ang, sl_field** out) {
    if (!f || !g || !out) return bad_arg("null argument");
    return guarded([&] {
        return make_field(lacunary_maximal(f->f, g->f, m_lo, m_hi, eval_from(n_radial, n_ang)),
                          out);
    });
}

int sl_full_maximal(const sl_field* f, const sl_field* g, int m_lo, int m_hi,
                    int n_t_per_octave, int n_radial, int n_ang, sl_field** out) {
    if (!f || !g || !out) return bad_arg("null argument");
    return guarded([&] {
        return make_field(
            full_maximal(f->f, g->f, m_lo, m_hi, n_t_per_octave, eval_from(n_radial, n_ang)),
            out);
    });
}

int sl_hardy_littlewood_maximal(const sl_field* f, sl_field** out) {
    if (!f || !out) return bad_arg("null argument");
    return guarded([&] { return make_field(hardy_littlewood_maximal(f->f), out); });
}

int sl_region_membership(int d, const char* p, const char* q, const char* r, int* inside) {
    if (!inside) return bad_arg("null argument");
    return guarded([&] {
        *inside = in_region(d, triple_from(p, q, r)) ? 1 : 0;
        return SL_OK;
    });
}

int sl_necessity(int d, const char* p, const char* q, const char* r, int* holds) {
    if (!holds) return bad_arg("null argument");
    return guarded([&] {
        *holds = necessity_condition(d, triple_from(p, q, r)) ? 1 : 0;
        return SL_OK;
    });
}

int sl_region_bound(int d, const char* r, double* m) {
    if (!r || !m) return bad_arg("null argument");
    return guarded([&] {
        *m = m_bound(d, parse_rat(r)).to_double();
        return SL_OK;
    });
}

int sl_sparse_build(const sl_field* f, const sl_field* g, const sl_field* h, const char* p,
                    const char* q, const char* r, double c0, sl_sparse_family** out) {
    if (!f || !g || !h || !out) return bad_arg("null argument");
    return guarded([&] {
        const dyadic_cube root = box_as_dyadic_cube(f->f.spec);
        sparse_family fam = build_sparse_family(f->f, g->f, h->f, root, triple_from(p, q, r), c0);
        *out = new sl_sparse_family{std::move(fam), f->f.spec, std::string()};
        return SL_OK;
    });
}

void sl_sparse_free(sl_sparse_family* s) { delete s; }

int sl_sparse_size(const sl_sparse_family* s, size_t* count) {
    if (!s || !count) return bad_arg("null argument");
    *count = s->fam.cubes.size();
    return SL_OK;
}

int sl_sparse_cube(const sl_sparse_family* s, size_t i, int* lattice_id, int* level,
                   long long* coords, double* e_measure) {
    if (!s) return bad_arg("null argument");
    if (i >= s->fam.cubes.size()) return bad_arg("cube index out of range");
    const sparse_cube& sc = s->fam.cubes[i];
    if (lattice_id) *lattice_id = sc.cube.lattice_id;
    if (level) *level = sc.cube.level;
    if (coords)
        for (int a = 0; a < s->spec.d; ++a) coords[a] = sc.cube.coords[(std::size_t)a];
    if (e_measure) *e_measure = sc.e_measure;
    return SL_OK;
}

int sl_sparse_eta(const sl_sparse_family* s, double* eta) {
    if (!s || !eta) return bad_arg("null argument");
    *eta = s->fam.eta;
    return SL_OK;
}

int sl_sparse_verify(sl_sparse_family* s, double eta_target, int* ok, const char** detail) {
    if (!s || !ok) return bad_arg("null argument");
    return guarded([&] {
        const sparsity_report rep = verify_sparsity(s->fam, s->spec, eta_target);
        *ok = rep.pass ? 1 : 0;
        s->detail = rep.message;
        if (detail) *detail = s->detail.c_str();
        return SL_OK;
    });
}

int sl_sparse_form(const sl_sparse_family* s, const sl_field* f, const sl_field* g,
                   const sl_field* h, const char* p, const char* q, const char* r,
                   double* out) {
    if (!s || !f || !g || !h || !out) return bad_arg("null argument");
    return guarded([&] {
        *out = sparse_form(s->fam, f->f, g->f, h->f, triple_from(p, q, r));
        return SL_OK;
    });
}

int sl_sparse_save(const sl_sparse_family* s, const char* path) {
    if (!s || !path) return bad_arg("null argument");
    return guarded([&] {
        save_sparse_family(s->fam, path);
        return SL_OK;
    });
}

int sl_domination_ratio(const sl_field* f, const sl_field* g, const sl_field* h,
                        const char* p, const char* q, const char* r, double c0, int kind,
                        int m_lo, int m_hi, int n_t, double* ratio, double* numerator,
                        double* denominator) {
    if (!f || !g || !h || !ratio) return bad_arg("null argument");
    return guarded([&] {
        domination_options opts;
        switch (kind) {
        case 0: opts.kind = maximal_kind::full; break;
        case 1: opts.kind = maximal_kind::lacunary; break;
        case 2: opts.kind = maximal_kind::localized; break;
        default: fail_invalid("kind must be 0 (full), 1 (lacunary) or 2 (localized)");
        }
        opts.m_lo = m_lo;
        opts.m_hi = m_hi;
        if (n_t > 0) {
            opts.n_t_per_octave = n_t;
            opts.rg.n_t = n_t;
        }
        opts.c0 = c0;
        const domination_result res = domination_ratio(f->f, g->f, h->f, triple_from(p, q, r), opts);
        *ratio = res.ratio;
        if (numerator) *numerator = res.numerator;
        if (denominator) *denominator = res.denominator;
        return SL_OK;
    });
}

int sl_fit_power_law(const double* scales, const double* values, size_t n, double* slope,
                     double* intercept, double* max_abs_residual) {
    if (!scales || !values || !slope) return bad_arg("null argument");
    return guarded([&] {
        const scaling_fit fit = fit_power_law(std::vector<double>(scales, scales + n),
                                              std::vector<double>(values, values + n));
        *slope = fit.slope;
        if (intercept) *intercept = fit.intercept;
        if (max_abs_residual) *max_abs_residual = fit.max_abs_residual;
        return SL_OK;
    });
}

int sl_run_kv(const char* config_text, const char* out_csv_path, char* summary,
              size_t summary_cap) {
    if (!config_text) return bad_arg("null configuration");
    return guarded([&] {
        const run_result res = run_task(config_text);
        if (out_csv_path && out_csv_path[0] != '\0') {
            std::ofstream os(out_csv_path);
            if (!os) fail_io(std::string("cannot open '") + out_csv_path + "' for writing");
            os << res.csv;
            if (!os) fail_io(std::string("write failed for '") + out_csv_path + "'");
        }
        if (summary && summary_cap > 0) {
            const size_t len = std::min(res.summary.size(), summary_cap - 1);
            std::memcpy(summary, res.summary.data(), len);
            summary[len] = '\0';
        }
        return res.exit_code == 0 ? SL_OK : SL_TOLERANCE;
    });
}

} // extern "C"
