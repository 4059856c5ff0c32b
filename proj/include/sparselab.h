#ifndef SPARSELAB_H
#define SPARSELAB_H

/* C interface to the bilinear spherical averaging laboratory.
 *
 * Every function returns a status code (SL_OK on success) and reports
 * results through out-parameters. On failure sl_last_error() returns a
 * message describing the problem (thread-local, valid until the next
 * failing call on the same thread). Handles are opaque; free fields with
 * sl_field_free and families with sl_sparse_free. Exponents arrive as
 * strings ("2", "4/3", "1.5", "inf") and are kept exact. */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#define SL_OK 0        /* success */
#define SL_TOLERANCE 1 /* a quantitative gate failed */
#define SL_INVALID 2   /* bad argument or configuration */
#define SL_IO 3        /* file problem */
#define SL_INTERNAL 4  /* unexpected failure */

const char* sl_version(void);
const char* sl_last_error(void);

/* ------------------------------------------------------------------ fields
 * A field is a scalar function sampled at the cell centers of a uniform
 * grid over [lo, hi]^d, d in {1, 2, 3}, n cells per axis, zero-extended
 * outside the box. Center/corner arrays carry d entries. */

typedef struct sl_field sl_field;

int sl_field_create(int d, int n, double lo, double hi, sl_field** out);
void sl_field_free(sl_field* f);

/* add the indicator of a region (closed boundary) to the field */
int sl_field_add_ball(sl_field* f, const double* center, double r, double amplitude);
int sl_field_add_annulus(sl_field* f, const double* center, double r_in, double r_out,
                         double amplitude);
int sl_field_add_box(sl_field* f, const double* lo, const double* hi, double amplitude);

int sl_field_add_scaled(sl_field* dst, double a, const sl_field* src); /* dst += a*src */
int sl_field_shift(const sl_field* f, const double* h, sl_field** out);
int sl_field_eval(const sl_field* f, const double* x, double* out);
int sl_field_lp_norm(const sl_field* f, double p, double* out); /* p may be INFINITY */
int sl_field_pairing(const sl_field* u, const sl_field* h, double* out);
/* borrow the raw samples (row major, axis 0 slowest); valid while f lives */
int sl_field_data(const sl_field* f, const double** data, size_t* count);
int sl_field_dims(const sl_field* f, int* d, int* n, double* lo, double* hi);

/* paths ending in ".csv" use the text format, anything else the binary one */
int sl_field_save(const sl_field* f, const char* path);
int sl_field_load(const char* path, sl_field** out);

/* ------------------------------------------------- averages and maximals
 * n_radial / n_ang equal to 0 pick the built-in defaults. */

int sl_linear_average(const sl_field* f, double t, int n_ang, sl_field** out);
int sl_bilinear_average(const sl_field* f, const sl_field* g, double t, int n_radial,
                        int n_ang, sl_field** out);
/* sup of |A_t| over n_t geometric radii in [t_lo, t_hi] */
int sl_localized_maximal(const sl_field* f, const sl_field* g, double t_lo, double t_hi,
                         int n_t, int n_radial, int n_ang, sl_field** out);
/* sup over t = 2^m, m_lo <= m <= m_hi */
int sl_lacunary_maximal(const sl_field* f, const sl_field* g, int m_lo, int m_hi,
                        int n_radial, int n_ang, sl_field** out);
/* sup over n_t_per_octave geometric radii in every octave [2^m, 2^(m+1)] */
int sl_full_maximal(const sl_field* f, const sl_field* g, int m_lo, int m_hi,
                    int n_t_per_octave, int n_radial, int n_ang, sl_field** out);
/* exact maximum of cell-cube averages of |f| over all axis-aligned cubes */
int sl_hardy_littlewood_maximal(const sl_field* f, sl_field** out);

/* --------------------------------------------------------- exponent region */

int sl_region_membership(int d, const char* p, const char* q, const char* r, int* inside);
int sl_necessity(int d, const char* p, const char* q, const char* r, int* holds);
/* scaling threshold m(d, r), d >= 2 */
int sl_region_bound(int d, const char* r, double* m);

/* ------------------------------------------------------ sparse domination */

typedef struct sl_sparse_family sl_sparse_family;

/* joint stopping-time family on the dyadic root spanned by the grid box.
 * Exponents: averages of f in L^p, g in L^q, h in L^(r'). c0 > 1. */
int sl_sparse_build(const sl_field* f, const sl_field* g, const sl_field* h, const char* p,
                    const char* q, const char* r, double c0, sl_sparse_family** out);
void sl_sparse_free(sl_sparse_family* s);

int sl_sparse_size(const sl_sparse_family* s, size_t* count);
/* cube i: lattice id (0 = standard), dyadic level, d corner coordinates
 * (corner = coords * side), |E_Q|. Any output pointer may be NULL. */
int sl_sparse_cube(const sl_sparse_family* s, size_t i, int* lattice_id, int* level,
                   long long* coords, double* e_measure);
int sl_sparse_eta(const sl_sparse_family* s, double* eta);
/* disjointness of exceptional sets plus |E_Q| >= eta_target |Q|; *ok gets
 * 1/0, *detail (optional) a message owned by the family handle */
int sl_sparse_verify(sl_sparse_family* s, double eta_target, int* ok, const char** detail);
/* sum over the family of |Q| <f>_p <g>_q <h>_r' */
int sl_sparse_form(const sl_sparse_family* s, const sl_field* f, const sl_field* g,
                   const sl_field* h, const char* p, const char* q, const char* r,
                   double* out);
/* CSV rows (lattice_id, level, corner coordinates, |E_Q|) */
int sl_sparse_save(const sl_sparse_family* s, const char* path);

/* pairing(maximal(f,g), h) / sparse form, with the family built at c0.
 * kind: 0 full (m_lo..m_hi octaves, n_t per octave), 1 lacunary,
 * 2 localized on [1, 2] with n_t radii. */
int sl_domination_ratio(const sl_field* f, const sl_field* g, const sl_field* h,
                        const char* p, const char* q, const char* r, double c0, int kind,
                        int m_lo, int m_hi, int n_t, double* ratio, double* numerator,
                        double* denominator);

/* ------------------------------------------------------------------ misc */

/* least squares slope of log(values) against log(scales), n >= 3 */
int sl_fit_power_law(const double* scales, const double* values, size_t n, double* slope,
                     double* intercept, double* max_abs_residual);

/* Run a whole experiment from key=value configuration text (one pair per
 * line; see the task documentation). Writes the result CSV to out_csv_path
 * unless it is NULL or empty, and copies the human-readable summary into
 * summary (truncated to summary_cap, always NUL-terminated when
 * summary_cap > 0). Returns SL_OK, SL_TOLERANCE when a quantitative gate
 * fails, or an error code. */
int sl_run_kv(const char* config_text, const char* out_csv_path, char* summary,
              size_t summary_cap);

#ifdef __cplusplus
}
#endif

#endif /* SPARSELAB_H */
