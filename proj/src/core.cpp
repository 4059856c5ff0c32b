#include "core.hpp"

#include "reduce.hpp"

#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <thread>

namespace sparselab {

namespace {
std::atomic<warn_fn> g_warn_handler{nullptr};
}

void set_warning_handler(warn_fn fn) { g_warn_handler.store(fn); }

void emit_warning(const std::string& msg) {
    if (warn_fn fn = g_warn_handler.load()) {
        fn(msg);
    } else {
        std::cerr << "warning: " << msg << "\n";
    }
}

rat parse_rat(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) fail_invalid("empty exponent string");
    if (s == "inf" || s == "Inf" || s == "INF") return rat::infinity();

    const auto slash = s.find('/');
    if (slash != std::string::npos) {
        const std::string a = s.substr(0, slash), b = s.substr(slash + 1);
        if (a.empty() || b.empty()) fail_invalid("malformed rational '" + text + "'");
        return rat(std::strtoll(a.c_str(), nullptr, 10), std::strtoll(b.c_str(), nullptr, 10));
    }
    const auto dot = s.find('.');
    if (dot != std::string::npos) {
        const std::string a = s.substr(0, dot), b = s.substr(dot + 1);
        if (b.size() > 15) fail_invalid("decimal too long in '" + text + "'");
        long long den = 1;
        for (std::size_t i = 0; i < b.size(); ++i) den *= 10;
        const bool neg = !a.empty() && a[0] == '-';
        const long long whole = a.empty() || a == "-" ? 0 : std::strtoll(a.c_str(), nullptr, 10);
        const long long frac = b.empty() ? 0 : std::strtoll(b.c_str(), nullptr, 10);
        const long long mag = (whole < 0 ? -whole : whole) * den + frac;
        return rat(neg ? -mag : mag, den);
    }
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (end == nullptr || *end != '\0') fail_invalid("malformed exponent '" + text + "'");
    return rat(v);
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("SPARSELAB_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

void parallel_chunks(std::size_t n, int threads,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& chunk_fn) {
    if (n == 0) return;
    const std::size_t n_chunks = (n + kChunk - 1) / kChunk;
    const int workers = std::min<std::size_t>(std::max(1, threads), n_chunks);
    if (workers <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c)
            chunk_fn(c, c * kChunk, std::min(n, (c + 1) * kChunk));
        return;
    }
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            chunk_fn(c, c * kChunk, std::min(n, (c + 1) * kChunk));
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (int i = 1; i < workers; ++i) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
}

exponent_triple::exponent_triple(rat p_, rat q_, rat r_) : p(p_), q(q_), r(r_) {
    if (!(p > rat(1))) fail_invalid("exponent p must satisfy p > 1");
    if (!(q > rat(1))) fail_invalid("exponent q must satisfy q > 1");
    if (r.is_inf() || !(r > rat(0))) fail_invalid("exponent r must satisfy 0 < r < inf");
}

rat holder_conjugate(const rat& r) {
    if (r.is_inf()) return rat(1);
    if (r < rat(1)) fail_invalid("holder_conjugate requires r >= 1");
    if (r == rat(1)) return rat::infinity();
    // 1/r' = 1 - 1/r.
    return (rat(1) - r.reciprocal()).reciprocal();
}

rat exponent_triple::r_conj() const { return holder_conjugate(r); }

rat m_bound(int d, const rat& r) {
    if (d < 2) fail_invalid("m_bound requires d >= 2");
    if (r.is_inf() || !(r > rat(0))) fail_invalid("m_bound requires 0 < r < inf");
    const rat inv_r = r.reciprocal();
    const rat a = rat(1) + rat(d) * inv_r;
    const rat b = rat(2 * d - 1, d);
    const rat c = inv_r + rat(2 * (d - 1), d);
    return rat_min(a, rat_min(b, c));
}

namespace {

struct recip_coords {
    rat x, y, z; // (1/p, 1/q, 1/r)
};

recip_coords recips(const exponent_triple& t) {
    return {t.p.reciprocal(), t.q.reciprocal(), t.r.reciprocal()};
}

// Face functionals of the d = 1 tetrahedron; interior iff all four strict.
bool d1_hull(const recip_coords& c, bool strict) {
    const rat f1 = c.x + c.y - c.z;
    const rat f2 = rat(-1) * c.x + rat(3) * c.y - rat(3) * c.z;
    const rat f3 = rat(-3) * c.x + c.y + rat(3) * c.z;
    const rat f4 = rat(3) * c.x + rat(3) * c.y + c.z;
    if (strict)
        return f1 > rat(0) && f2 < rat(0) && f3 > rat(0) && f4 < rat(4);
    return f1 >= rat(0) && f2 <= rat(0) && f3 >= rat(0) && f4 <= rat(4);
}

} // namespace

bool in_region(int d, const exponent_triple& t) {
    if (d < 1 || d > 3) fail_invalid("in_region requires d in {1, 2, 3}");
    const recip_coords c = recips(t);
    if (d == 1) return d1_hull(c, /*strict=*/true);
    if (t.p.is_inf() || t.q.is_inf()) return false; // p, q finite inside
    const rat sum = c.x + c.y;
    return c.z < sum && sum < m_bound(d, t.r);
}

bool necessity_face(int face, int d, const exponent_triple& t) {
    if (d < 1 || d > 3) fail_invalid("necessity requires d in {1, 2, 3}");
    if (d == 1) return d1_hull(recips(t), /*strict=*/false);
    const recip_coords c = recips(t);
    const rat sum = c.x + c.y;
    switch (face) {
        case 0: return sum <= rat(2 * d - 1, d);
        case 1: return sum <= rat(1) + rat(d) * c.z;
        case 2: return sum <= rat(2 * d, d + 1) + rat(d - 1, d + 1) * c.z;
        default: fail_invalid("necessity face index must be 0, 1 or 2");
    }
}

bool necessity_condition(int d, const exponent_triple& t) {
    if (d == 1) return d1_hull(recips(t), /*strict=*/false);
    return necessity_face(0, d, t) && necessity_face(1, d, t) && necessity_face(2, d, t);
}

scaling_fit fit_power_law(const std::vector<std::pair<double, double>>& samples) {
    if (samples.size() < 3) fail_invalid("fit_power_law requires at least 3 samples");
    const std::size_t n = samples.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(samples[i].first > 0.0)) fail_invalid("fit_power_law scales must be positive");
        if (!(samples[i].second > 0.0)) fail_invalid("fit_power_law values must be positive");
        lx[i] = std::log(samples[i].first);
        ly[i] = std::log(samples[i].second);
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (lx[i] == lx[j]) fail_invalid("fit_power_law scales must be distinct");

    const double mx = pairwise_sum(lx.data(), n) / static_cast<double>(n);
    const double my = pairwise_sum(ly.data(), n) / static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    scaling_fit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.n_samples = n;
    for (std::size_t i = 0; i < n; ++i)
        fit.max_abs_residual =
            std::max(fit.max_abs_residual, std::abs(ly[i] - (fit.intercept + fit.slope * lx[i])));
    return fit;
}

scaling_fit fit_power_law(const std::vector<double>& scales, const std::vector<double>& values) {
    if (scales.size() != values.size()) fail_invalid("fit_power_law size mismatch");
    std::vector<std::pair<double, double>> samples(scales.size());
    for (std::size_t i = 0; i < scales.size(); ++i) samples[i] = {scales[i], values[i]};
    return fit_power_law(samples);
}

} // namespace sparselab
