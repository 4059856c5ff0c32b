#pragma once

#include "error.hpp"

#include <cstdint>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <string>

namespace sparselab {

// Exact rational arithmetic for Lebesgue exponents. Region membership is
// contractual on boundary triples, so comparisons must not go through
// floating point. den == 0 encodes +infinity (num forced to 1).
struct rat {
    long long num = 0;
    long long den = 1;

    constexpr rat() = default;
    constexpr rat(long long n) : num(n), den(1) {}

    rat(long long n, long long d) {
        if (d == 0) fail_invalid("rational with zero denominator");
        if (d < 0) {
            n = -n;
            d = -d;
        }
        const long long g = std::gcd(n < 0 ? -n : n, d);
        num = g ? n / g : 0;
        den = g ? d / g : 1;
    }

    static rat infinity() {
        rat r;
        r.num = 1;
        r.den = 0;
        return r;
    }

    bool is_inf() const { return den == 0; }

    double to_double() const {
        if (is_inf()) return std::numeric_limits<double>::infinity();
        return static_cast<double>(num) / static_cast<double>(den);
    }

    // 1/x with 1/inf = 0 and 1/0 = inf.
    rat reciprocal() const {
        if (is_inf()) return rat(0);
        if (num == 0) return infinity();
        return num > 0 ? rat(den, num) : rat(-den, -num);
    }

    std::string str() const {
        if (is_inf()) return "inf";
        if (den == 1) return std::to_string(num);
        return std::to_string(num) + "/" + std::to_string(den);
    }
};

inline rat operator+(const rat& a, const rat& b) {
    if (a.is_inf() || b.is_inf()) return rat::infinity();
    return rat(static_cast<long long>(a.num * b.den + b.num * a.den), a.den * b.den);
}

inline rat operator-(const rat& a, const rat& b) {
    if (a.is_inf()) return rat::infinity();
    if (b.is_inf()) fail_invalid("rational subtraction of infinity");
    return rat(a.num * b.den - b.num * a.den, a.den * b.den);
}

inline rat operator*(const rat& a, const rat& b) {
    if (a.is_inf() || b.is_inf()) {
        if (a.num == 0 || b.num == 0) fail_invalid("rational 0 * inf");
        return rat::infinity();
    }
    return rat(a.num * b.num, a.den * b.den);
}

inline rat operator/(const rat& a, const rat& b) { return a * b.reciprocal(); }

inline int cmp(const rat& a, const rat& b) {
    if (a.is_inf() && b.is_inf()) return 0;
    if (a.is_inf()) return 1;
    if (b.is_inf()) return -1;
    const __int128 l = static_cast<__int128>(a.num) * b.den;
    const __int128 r = static_cast<__int128>(b.num) * a.den;
    return l < r ? -1 : (l > r ? 1 : 0);
}

inline bool operator<(const rat& a, const rat& b) { return cmp(a, b) < 0; }
inline bool operator<=(const rat& a, const rat& b) { return cmp(a, b) <= 0; }
inline bool operator>(const rat& a, const rat& b) { return cmp(a, b) > 0; }
inline bool operator>=(const rat& a, const rat& b) { return cmp(a, b) >= 0; }
inline bool operator==(const rat& a, const rat& b) { return cmp(a, b) == 0; }
inline bool operator!=(const rat& a, const rat& b) { return cmp(a, b) != 0; }

inline rat rat_min(const rat& a, const rat& b) { return a <= b ? a : b; }

// Parses "inf", integers, fractions "a/b" and short decimals "1.25".
rat parse_rat(const std::string& text);

} // namespace sparselab
