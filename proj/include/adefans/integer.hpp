#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace adefans {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

using IntVec = std::vector<std::int64_t>;
using IntMatrix = std::vector<IntVec>;

inline std::int64_t gcd64(std::int64_t a, std::int64_t b) {
    return std::gcd(a < 0 ? -a : a, b < 0 ? -b : b);
}

inline std::int64_t content(const IntVec& v) {
    std::int64_t g = 0;
    for (auto x : v) g = gcd64(g, x);
    return g;
}

inline bool is_zero(const IntVec& v) {
    for (auto x : v)
        if (x != 0) return false;
    return true;
}

// Divides out the content. The zero vector is returned unchanged.
inline IntVec primitive(IntVec v) {
    std::int64_t g = content(v);
    if (g > 1)
        for (auto& x : v) x /= g;
    return v;
}

inline std::int64_t dot(const IntVec& a, const IntVec& b) {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline IntVec add(const IntVec& a, const IntVec& b) {
    IntVec r(a);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
}

inline IntVec sub(const IntVec& a, const IntVec& b) {
    IntVec r(a);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    return r;
}

inline IntVec scale(const IntVec& a, std::int64_t k) {
    IntVec r(a);
    for (auto& x : r) x *= k;
    return r;
}

inline IntVec mat_vec(const IntMatrix& m, const IntVec& v) {
    IntVec r(m.size(), 0);
    for (std::size_t i = 0; i < m.size(); ++i) r[i] = dot(m[i], v);
    return r;
}

inline IntMatrix transpose(const IntMatrix& m) {
    if (m.empty()) return {};
    IntMatrix t(m[0].size(), IntVec(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m[i].size(); ++j) t[j][i] = m[i][j];
    return t;
}

// Positive multiple test: returns k > 0 with v == k * w, or 0.
inline std::int64_t positive_multiple(const IntVec& v, const IntVec& w) {
    std::int64_t k = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (w[i] == 0) {
            if (v[i] != 0) return 0;
            continue;
        }
        if (v[i] % w[i] != 0) return 0;
        std::int64_t q = v[i] / w[i];
        if (q <= 0 || (k != 0 && q != k)) return 0;
        k = q;
    }
    return k;
}

inline std::int64_t to_i64(const BigInt& x) {
    if (x > BigInt(INT64_MAX) || x < BigInt(INT64_MIN)) throw std::overflow_error("integer does not fit in 64 bits");
    return static_cast<std::int64_t>(x);
}

inline std::string rational_string(const Rational& q) {
    BigInt n = boost::multiprecision::numerator(q), d = boost::multiprecision::denominator(q);
    if (d == 1) return n.str();
    return n.str() + "/" + d.str();
}

inline Rational parse_rational(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(BigInt(s));
    BigInt d(s.substr(slash + 1));
    if (d == 0) throw std::invalid_argument("zero denominator in " + s);
    return Rational(BigInt(s.substr(0, slash)), d);
}

struct IntVecHash {
    template <class V>
    std::size_t operator()(const V& v) const noexcept {
        std::size_t h = 1469598103934665603ull;
        for (auto x : v) {
            h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        }
        return h;
    }
};

}  // namespace adefans
