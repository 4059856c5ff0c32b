#include "sparse.hpp"

#include "error.hpp"
#include "reduce.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>

namespace sparselab {

namespace {

struct cell_range {
    std::array<long long, 3> i0{0, 0, 0};
    std::array<long long, 3> i1{-1, -1, -1};
    bool empty = true;

    bool contains(const long long* idx, int d) const {
        if (empty) return false;
        for (int a = 0; a < d; ++a)
            if (idx[a] < i0[a] || idx[a] > i1[a]) return false;
        return true;
    }
    long long count(int d) const {
        if (empty) return 0;
        long long c = 1;
        for (int a = 0; a < d; ++a) c *= i1[a] - i0[a] + 1;
        return c;
    }
};

cell_range range_of(const grid_spec& spec, const dyadic_cube& q) {
    cell_range r;
    r.empty = !cube_cell_range(spec, q, r.i0, r.i1);
    return r;
}

// L^p cube averages against the full cube volume, via inclusion-exclusion on
// prefix sums of |f|^p (finite p) or a dense range scan (p = infinity).
class avg_engine {
  public:
    avg_engine(const grid_function& f, double p) : spec_(f.spec), p_(p) {
        inf_ = std::isinf(p);
        if (!inf_ && p < 1.0) fail_invalid("averaging exponent must be >= 1");
        const int d = spec_.d;
        const long long n = spec_.n;
        absv_.resize(f.values.size());
        for (std::size_t i = 0; i < f.values.size(); ++i) absv_[i] = std::fabs(f.values[i]);
        if (inf_) return;
        std::vector<double> pw(absv_.size());
        if (p_ == 1.0)
            pw = absv_;
        else
            for (std::size_t i = 0; i < pw.size(); ++i)
                pw[i] = (p_ == 2.0) ? absv_[i] * absv_[i] : std::pow(absv_[i], p_);
        const long long m = n + 1;
        if (d == 1) {
            pre_.assign((std::size_t)m, 0.0);
            for (long long i = 0; i < n; ++i) pre_[(std::size_t)(i + 1)] = pre_[(std::size_t)i] + pw[(std::size_t)i];
        } else if (d == 2) {
            pre_.assign((std::size_t)(m * m), 0.0);
            for (long long i = 0; i < n; ++i)
                for (long long j = 0; j < n; ++j)
                    pre_[(std::size_t)((i + 1) * m + (j + 1))] =
                        pw[(std::size_t)(i * n + j)] + pre_[(std::size_t)(i * m + (j + 1))] +
                        pre_[(std::size_t)((i + 1) * m + j)] - pre_[(std::size_t)(i * m + j)];
        } else {
            pre_.assign((std::size_t)(m * m * m), 0.0);
            for (long long i = 0; i < n; ++i)
                for (long long j = 0; j < n; ++j)
                    for (long long k = 0; k < n; ++k) {
                        const auto at = [&](long long a, long long b, long long c) -> double& {
                            return pre_[(std::size_t)((a * m + b) * m + c)];
                        };
                        at(i + 1, j + 1, k + 1) = pw[(std::size_t)((i * n + j) * n + k)] +
                                                  at(i, j + 1, k + 1) + at(i + 1, j, k + 1) +
                                                  at(i + 1, j + 1, k) - at(i, j, k + 1) -
                                                  at(i, j + 1, k) - at(i + 1, j, k) + at(i, j, k);
                    }
        }
    }

    double avg(const dyadic_cube& q) const {
        const cell_range r = range_of(spec_, q);
        const int d = spec_.d;
        const double vol = std::pow(q.side(), d);
        if (r.empty || vol <= 0.0) return 0.0;
        if (inf_) {
            double mx = 0.0;
            const long long n = spec_.n;
            for (long long i = r.i0[0]; i <= r.i1[0]; ++i) {
                if (d == 1) {
                    mx = std::max(mx, absv_[(std::size_t)i]);
                    continue;
                }
                for (long long j = r.i0[1]; j <= r.i1[1]; ++j) {
                    if (d == 2) {
                        mx = std::max(mx, absv_[(std::size_t)(i * n + j)]);
                        continue;
                    }
                    for (long long k = r.i0[2]; k <= r.i1[2]; ++k)
                        mx = std::max(mx, absv_[(std::size_t)((i * n + j) * n + k)]);
                }
            }
            return mx;
        }
        const double s = range_sum(r) * spec_.cell_volume();
        return std::pow(std::max(0.0, s) / vol, 1.0 / p_);
    }

  private:
    double range_sum(const cell_range& r) const {
        const long long m = spec_.n + 1;
        const long long a0 = r.i0[0], a1 = r.i1[0] + 1;
        if (spec_.d == 1) return pre_[(std::size_t)a1] - pre_[(std::size_t)a0];
        const long long b0 = r.i0[1], b1 = r.i1[1] + 1;
        if (spec_.d == 2) {
            const auto at = [&](long long a, long long b) { return pre_[(std::size_t)(a * m + b)]; };
            return at(a1, b1) - at(a0, b1) - at(a1, b0) + at(a0, b0);
        }
        const long long c0 = r.i0[2], c1 = r.i1[2] + 1;
        const auto at = [&](long long a, long long b, long long c) {
            return pre_[(std::size_t)((a * m + b) * m + c)];
        };
        return at(a1, b1, c1) - at(a0, b1, c1) - at(a1, b0, c1) - at(a1, b1, c0) + at(a0, b0, c1) +
               at(a0, b1, c0) + at(a1, b0, c0) - at(a0, b0, c0);
    }

    grid_spec spec_;
    double p_;
    bool inf_ = false;
    std::vector<double> absv_;
    std::vector<double> pre_;
};

void check_dyadic_root(const grid_spec& spec, const dyadic_cube& q0) {
    std::array<long long, 3> i0{}, i1{};
    if (!cube_cell_range(spec, q0, i0, i1)) fail_invalid("root cube misses the grid");
    long long c = i1[0] - i0[0] + 1;
    for (int a = 0; a < spec.d; ++a) {
        const long long ca = i1[a] - i0[a] + 1;
        if (ca != c) fail_invalid("root cube must cover the same cell count per axis");
    }
    if ((c & (c - 1)) != 0) fail_invalid("root cube must cover a power-of-two cell block");
    const double cover = (double)c * spec.spacing(0);
    if (std::fabs(cover - q0.side()) > 1e-9 * q0.side())
        fail_invalid("root cube must align with grid cells");
}

} // namespace

cz_decomposition cz_decompose(const grid_function& f, const dyadic_cube& q0, double p,
                              double c0) {
    f.spec.validate();
    if (!(c0 > 1.0)) fail_invalid("stopping factor must exceed 1");
    if (!(p >= 1.0) && !std::isinf(p)) fail_invalid("exponent must be >= 1");
    if (q0.d != f.spec.d) fail_invalid("cube dimension mismatch");
    check_dyadic_root(f.spec, q0);

    cz_decomposition out;
    out.root = q0;
    out.p = p;
    out.c0 = c0;
    avg_engine eng(f, p);
    out.base_avg = eng.avg(q0);
    out.threshold = c0 * out.base_avg;

    if (out.base_avg > 0.0) {
        std::function<void(const dyadic_cube&)> descend = [&](const dyadic_cube& q) {
            for (const dyadic_cube& c : children(q)) {
                const cell_range r = range_of(f.spec, c);
                if (r.empty) continue;
                if (eng.avg(c) > out.threshold)
                    out.stopping_cubes.push_back(c);
                else if (r.count(f.spec.d) > 1)
                    descend(c);
            }
        };
        const cell_range root_r = range_of(f.spec, q0);
        if (root_r.count(f.spec.d) > 1) descend(q0);
    }

    out.bad = grid_function(f.spec);
    const int d = f.spec.d;
    const long long n = f.spec.n;
    for (const dyadic_cube& pcube : out.stopping_cubes) {
        const cell_range r = range_of(f.spec, pcube);
        double sum = 0.0;
        long long cnt = 0;
        const auto for_cells = [&](auto&& fn) {
            for (long long i = r.i0[0]; i <= r.i1[0]; ++i) {
                if (d == 1) {
                    fn((std::size_t)i);
                    continue;
                }
                for (long long j = r.i0[1]; j <= r.i1[1]; ++j) {
                    if (d == 2) {
                        fn((std::size_t)(i * n + j));
                        continue;
                    }
                    for (long long k = r.i0[2]; k <= r.i1[2]; ++k) fn((std::size_t)((i * n + j) * n + k));
                }
            }
        };
        for_cells([&](std::size_t idx) {
            sum += f.values[idx];
            ++cnt;
        });
        const double mean = (cnt > 0) ? sum / (double)cnt : 0.0;
        for_cells([&](std::size_t idx) { out.bad.values[idx] = f.values[idx] - mean; });
    }
    out.good = linear_combination(1.0, f, -1.0, out.bad);
    return out;
}

sparse_family build_sparse_family(const grid_function& f, const grid_function& g,
                                  const grid_function& h, const dyadic_cube& q0,
                                  const exponent_triple& t, double c0) {
    if (!(f.spec == g.spec) || !(f.spec == h.spec)) fail_invalid("fields must share one grid");
    if (!(c0 > 1.0)) fail_invalid("stopping factor must exceed 1");
    check_dyadic_root(f.spec, q0);

    sparse_family fam;
    fam.root = q0;
    fam.c0 = c0;
    fam.pf = t.p.to_double();
    fam.pg = t.q.to_double();
    const rat rc = t.r_conj();
    fam.ph = rc.is_inf() ? std::numeric_limits<double>::infinity() : rc.to_double();

    avg_engine ef(f, fam.pf), eg(g, fam.pg), eh(h, fam.ph);
    const int d = f.spec.d;

    std::function<std::size_t(const dyadic_cube&)> select = [&](const dyadic_cube& r) {
        const std::size_t idx = fam.cubes.size();
        fam.cubes.push_back(sparse_cube{r, {}, 0.0});
        const double af = ef.avg(r), ag = eg.avg(r), ah = eh.avg(r);
        double child_vol = 0.0;
        if (af > 0.0 || ag > 0.0 || ah > 0.0) {
            std::function<void(const dyadic_cube&)> descend = [&](const dyadic_cube& q) {
                for (const dyadic_cube& c : children(q)) {
                    const cell_range cr = range_of(f.spec, c);
                    if (cr.empty) continue;
                    double ratio = 0.0;
                    if (af > 0.0) ratio += ef.avg(c) / af;
                    if (ag > 0.0) ratio += eg.avg(c) / ag;
                    if (ah > 0.0) ratio += eh.avg(c) / ah;
                    if (ratio > c0) {
                        child_vol += std::pow(c.side(), d);
                        const std::size_t ci = select(c);
                        fam.cubes[idx].stopping_children.push_back(ci);
                    } else if (cr.count(d) > 1) {
                        descend(c);
                    }
                }
            };
            const cell_range rr = range_of(f.spec, r);
            if (rr.count(d) > 1) descend(r);
        }
        fam.cubes[idx].e_measure = std::pow(r.side(), d) - child_vol;
        return idx;
    };
    select(q0);

    fam.eta = 1.0;
    for (const sparse_cube& sc : fam.cubes)
        fam.eta = std::min(fam.eta, sc.e_measure / std::pow(sc.cube.side(), d));
    return fam;
}

sparsity_report verify_sparsity(const sparse_family& s, const grid_spec& spec,
                                double eta_target) {
    spec.validate();
    sparsity_report rep;
    if (s.cubes.empty()) {
        rep.message = "empty family";
        return rep;
    }
    std::vector<std::int64_t> owner(spec.total_cells(), -1);
    rep.min_ratio = std::numeric_limits<double>::infinity();
    const int d = spec.d;
    const long long n = spec.n;

    for (std::size_t idx = 0; idx < s.cubes.size(); ++idx) {
        const sparse_cube& sc = s.cubes[idx];
        const cell_range r = range_of(spec, sc.cube);
        std::vector<cell_range> kids;
        kids.reserve(sc.stopping_children.size());
        for (std::size_t ci : sc.stopping_children) {
            if (ci >= s.cubes.size()) fail_invalid("family child index out of range");
            kids.push_back(range_of(spec, s.cubes[ci].cube));
        }
        long long claimed = 0;
        long long ii[3] = {0, 0, 0};
        const auto visit = [&](std::size_t flat) {
            bool excluded = false;
            for (const cell_range& kr : kids)
                if (kr.contains(ii, d)) {
                    excluded = true;
                    break;
                }
            if (excluded) return;
            if (owner[flat] >= 0 && !rep.overlap) {
                rep.overlap = true;
                rep.overlap_a = (std::size_t)owner[flat];
                rep.overlap_b = idx;
            }
            owner[flat] = (std::int64_t)idx;
            ++claimed;
        };
        if (!r.empty) {
            for (ii[0] = r.i0[0]; ii[0] <= r.i1[0]; ++ii[0]) {
                if (d == 1) {
                    visit((std::size_t)ii[0]);
                    continue;
                }
                for (ii[1] = r.i0[1]; ii[1] <= r.i1[1]; ++ii[1]) {
                    if (d == 2) {
                        visit((std::size_t)(ii[0] * n + ii[1]));
                        continue;
                    }
                    for (ii[2] = r.i0[2]; ii[2] <= r.i1[2]; ++ii[2])
                        visit((std::size_t)((ii[0] * n + ii[1]) * n + ii[2]));
                }
            }
        }
        const double vol = std::pow(sc.cube.side(), d);
        const double ratio = (double)claimed * spec.cell_volume() / vol;
        if (ratio < rep.min_ratio) {
            rep.min_ratio = ratio;
            rep.worst_cube = idx;
        }
    }

    if (rep.overlap) {
        rep.message = "exceptional sets of cubes " + std::to_string(rep.overlap_a) + " and " +
                      std::to_string(rep.overlap_b) + " overlap";
        return rep;
    }
    if (rep.min_ratio + 1e-12 < eta_target) {
        rep.message = "cube " + std::to_string(rep.worst_cube) + " has |E|/|Q| = " +
                      std::to_string(rep.min_ratio) + " below target " +
                      std::to_string(eta_target);
        return rep;
    }
    rep.pass = true;
    rep.message = "ok";
    return rep;
}

double sparse_form(const sparse_family& s, const grid_function& f, const grid_function& g,
                   const grid_function& h, const exponent_triple& t) {
    if (!(f.spec == g.spec) || !(f.spec == h.spec)) fail_invalid("fields must share one grid");
    avg_engine ef(f, t.p.to_double()), eg(g, t.q.to_double());
    const rat rc = t.r_conj();
    avg_engine eh(h, rc.is_inf() ? std::numeric_limits<double>::infinity() : rc.to_double());
    const int d = f.spec.d;
    std::vector<double> terms(s.cubes.size());
    for (std::size_t i = 0; i < s.cubes.size(); ++i) {
        const dyadic_cube& q = s.cubes[i].cube;
        terms[i] = std::pow(q.side(), d) * ef.avg(q) * eg.avg(q) * eh.avg(q);
    }
    return pairwise_sum(terms.data(), terms.size());
}

std::string sparse_family_csv(const sparse_family& s) {
    char buf[200];
    std::string out = "# sparselab-sparse v1\n";
    std::snprintf(buf, sizeof buf, "# eta=%.17g c0=%.17g p=%.17g q=%.17g rconj=%.17g\n", s.eta,
                  s.c0, s.pf, s.pg, s.ph);
    out += buf;
    const int d = s.root.d;
    out += "lattice_id,level";
    for (int a = 0; a < d; ++a) out += ",coord" + std::to_string(a);
    out += ",e_measure\n";
    for (const sparse_cube& c : s.cubes) {
        out += std::to_string(c.cube.lattice_id) + "," + std::to_string(c.cube.level);
        for (int a = 0; a < d; ++a) out += "," + std::to_string(c.cube.coords[(std::size_t)a]);
        std::snprintf(buf, sizeof buf, ",%.17g\n", c.e_measure);
        out += buf;
    }
    return out;
}

void save_sparse_family(const sparse_family& s, const std::string& path) {
    std::ofstream os(path);
    if (!os) fail_io("cannot open '" + path + "' for writing");
    os << sparse_family_csv(s);
    if (!os) fail_io("write failed for '" + path + "'");
}

domination_result domination_ratio(const grid_function& f, const grid_function& g,
                                   const grid_function& h, const exponent_triple& t,
                                   const domination_options& opts) {
    if (!(f.spec == g.spec) || !(f.spec == h.spec)) fail_invalid("fields must share one grid");
    domination_result out;

    const std::vector<std::uint32_t> mask = mask_from_nonzero(h);
    grid_function m(f.spec);
    if (!mask.empty()) {
        eval_options eo = opts.eval;
        eo.mask = &mask;
        switch (opts.kind) {
        case maximal_kind::full:
            m = full_maximal(f, g, opts.m_lo, opts.m_hi, opts.n_t_per_octave, eo);
            break;
        case maximal_kind::lacunary:
            m = lacunary_maximal(f, g, opts.m_lo, opts.m_hi, eo);
            break;
        case maximal_kind::localized:
            m = localized_maximal(f, g, opts.rg, eo);
            break;
        }
    }
    out.numerator = pairing(m, h);

    const dyadic_cube q0 = box_as_dyadic_cube(f.spec);
    out.family = build_sparse_family(f, g, h, q0, t, opts.c0);
    out.denominator = sparse_form(out.family, f, g, h, t);

    if (out.denominator > 0.0) {
        out.ratio = out.numerator / out.denominator;
    } else if (out.numerator > 0.0) {
        out.infinite = true;
        out.ratio = std::numeric_limits<double>::infinity();
    } else {
        out.ratio = 0.0;
    }
    return out;
}

} // namespace sparselab
