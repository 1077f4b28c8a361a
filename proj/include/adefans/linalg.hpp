#pragma once

#include "integer.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>

namespace adefans {

using BigMatrix = std::vector<std::vector<BigInt>>;
using RatMatrix = std::vector<std::vector<Rational>>;

inline BigMatrix to_big(const IntMatrix& m) {
    BigMatrix r(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) r[i].assign(m[i].begin(), m[i].end());
    return r;
}

// Smith normal form diagonal (nonzero divisors only, in divisibility order).
inline std::vector<BigInt> elementary_divisors(BigMatrix a) {
    std::vector<BigInt> out;
    const std::size_t rows = a.size();
    if (rows == 0) return out;
    const std::size_t cols = a[0].size();
    std::size_t t = 0;
    while (t < rows && t < cols) {
        // smallest nonzero entry as pivot
        std::size_t pi = rows, pj = cols;
        for (std::size_t i = t; i < rows; ++i)
            for (std::size_t j = t; j < cols; ++j)
                if (a[i][j] != 0 && (pi == rows || abs(a[i][j]) < abs(a[pi][pj]))) pi = i, pj = j;
        if (pi == rows) break;
        std::swap(a[t], a[pi]);
        for (auto& row : a) std::swap(row[t], row[pj]);
        bool clean = false;
        while (!clean) {
            clean = true;
            for (std::size_t i = t + 1; i < rows; ++i) {
                if (a[i][t] == 0) continue;
                BigInt q = a[i][t] / a[t][t];
                for (std::size_t j = t; j < cols; ++j) a[i][j] -= q * a[t][j];
                if (a[i][t] != 0) {
                    std::swap(a[t], a[i]);
                    clean = false;
                }
            }
            for (std::size_t j = t + 1; j < cols; ++j) {
                if (a[t][j] == 0) continue;
                BigInt q = a[t][j] / a[t][t];
                for (std::size_t i = t; i < rows; ++i) a[i][j] -= q * a[i][t];
                if (a[t][j] != 0) {
                    for (auto& row : a) std::swap(row[t], row[j]);
                    clean = false;
                }
            }
            if (clean) {
                // pivot must divide the remaining block
                for (std::size_t i = t + 1; i < rows && clean; ++i)
                    for (std::size_t j = t + 1; j < cols; ++j)
                        if (a[i][j] % a[t][t] != 0) {
                            for (std::size_t k = t; k < cols; ++k) a[t][k] += a[i][k];
                            clean = false;
                            break;
                        }
            }
        }
        out.push_back(abs(a[t][t]));
        ++t;
    }
    return out;
}

namespace detail {

inline bool mul_ok(std::int64_t a, std::int64_t b, std::int64_t& r) { return !__builtin_mul_overflow(a, b, &r); }
inline bool add_ok(std::int64_t a, std::int64_t b, std::int64_t& r) { return !__builtin_add_overflow(a, b, &r); }

// Column reduction of rows to lower triangular form; returns the pivots or nullopt on overflow.
inline std::optional<std::vector<std::int64_t>> column_pivots_i64(IntMatrix a) {
    std::vector<std::int64_t> piv;
    const std::size_t k = a.size();
    if (k == 0) return piv;
    const std::size_t r = a[0].size();
    for (std::size_t i = 0; i < k; ++i) {
        if (i >= r) {
            piv.push_back(0);
            continue;
        }
        for (;;) {
            std::size_t best = r;
            for (std::size_t j = i; j < r; ++j)
                if (a[i][j] != 0 && (best == r || std::llabs(a[i][j]) < std::llabs(a[i][best]))) best = j;
            if (best == r) break;
            if (best != i)
                for (auto& row : a) std::swap(row[i], row[best]);
            bool done = true;
            for (std::size_t j = i + 1; j < r; ++j) {
                if (a[i][j] == 0) continue;
                std::int64_t q = a[i][j] / a[i][i];
                for (std::size_t s = i; s < k; ++s) {
                    std::int64_t p, n;
                    if (!mul_ok(q, a[s][i], p) || !add_ok(a[s][j], -p, n)) return std::nullopt;
                    a[s][j] = n;
                }
                if (a[i][j] != 0) done = false;
            }
            if (done) break;
        }
        piv.push_back(a[i][i]);
    }
    return piv;
}

inline std::vector<BigInt> column_pivots_big(BigMatrix a) {
    std::vector<BigInt> piv;
    const std::size_t k = a.size();
    if (k == 0) return piv;
    const std::size_t r = a[0].size();
    for (std::size_t i = 0; i < k; ++i) {
        if (i >= r) {
            piv.push_back(0);
            continue;
        }
        for (;;) {
            std::size_t best = r;
            for (std::size_t j = i; j < r; ++j)
                if (a[i][j] != 0 && (best == r || abs(a[i][j]) < abs(a[i][best]))) best = j;
            if (best == r) break;
            if (best != i)
                for (auto& row : a) std::swap(row[i], row[best]);
            bool done = true;
            for (std::size_t j = i + 1; j < r; ++j) {
                if (a[i][j] == 0) continue;
                BigInt q = a[i][j] / a[i][i];
                for (std::size_t s = i; s < k; ++s) a[s][j] -= q * a[s][i];
                if (a[i][j] != 0) done = false;
            }
            if (done) break;
        }
        piv.push_back(a[i][i]);
    }
    return piv;
}

}  // namespace detail

// Product of the Smith divisors of the rows (gcd of maximal minors); 0 when dependent.
inline BigInt maximal_minor_gcd(const IntMatrix& rows) {
    if (auto p = detail::column_pivots_i64(rows)) {
        BigInt prod = 1;
        for (auto x : *p) prod *= BigInt(std::llabs(x));
        return prod;
    }
    BigInt prod = 1;
    for (auto& x : detail::column_pivots_big(to_big(rows))) prod *= abs(x);
    return prod;
}

// True when the rows extend to a basis of the ambient lattice.
inline bool rows_unimodular(const IntMatrix& rows) { return maximal_minor_gcd(rows) == 1; }

// Arithmetic modulo the Mersenne prime 2^61 - 1.
struct ModP {
    static constexpr std::uint64_t p = (1ull << 61) - 1;
    static std::uint64_t reduce(std::int64_t x) {
        std::int64_t r = x % static_cast<std::int64_t>(p);
        return static_cast<std::uint64_t>(r < 0 ? r + static_cast<std::int64_t>(p) : r);
    }
    static std::uint64_t mul(std::uint64_t a, std::uint64_t b) {
        unsigned __int128 z = static_cast<unsigned __int128>(a) * b;
        std::uint64_t lo = static_cast<std::uint64_t>(z & p), hi = static_cast<std::uint64_t>(z >> 61);
        std::uint64_t s = lo + hi;
        return s >= p ? s - p : s;
    }
    static std::uint64_t addm(std::uint64_t a, std::uint64_t b) {
        std::uint64_t s = a + b;
        return s >= p ? s - p : s;
    }
    static std::uint64_t subm(std::uint64_t a, std::uint64_t b) { return a >= b ? a - b : a + p - b; }
    static std::uint64_t pow(std::uint64_t a, std::uint64_t e) {
        std::uint64_t r = 1;
        while (e) {
            if (e & 1) r = mul(r, a);
            a = mul(a, a);
            e >>= 1;
        }
        return r;
    }
    static std::uint64_t inv(std::uint64_t a) { return pow(a, p - 2); }
};

// Incremental row echelon basis over F_p; rank over F_p never exceeds rank over Q.
class ModPSpan {
public:
    explicit ModPSpan(std::size_t dim) : dim_(dim) {}

    // Returns true when v increased the rank.
    bool insert(const IntVec& v) {
        std::vector<std::uint64_t> w(dim_);
        for (std::size_t i = 0; i < dim_; ++i) w[i] = ModP::reduce(v[i]);
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            std::size_t c = pivots_[r];
            if (w[c] == 0) continue;
            std::uint64_t f = w[c];
            for (std::size_t j = c; j < dim_; ++j) w[j] = ModP::subm(w[j], ModP::mul(f, rows_[r][j]));
        }
        std::size_t c = 0;
        while (c < dim_ && w[c] == 0) ++c;
        if (c == dim_) return false;
        std::uint64_t inv = ModP::inv(w[c]);
        for (std::size_t j = c; j < dim_; ++j) w[j] = ModP::mul(w[j], inv);
        // keep rows sorted by pivot so the elimination above stays valid
        std::size_t pos = 0;
        while (pos < pivots_.size() && pivots_[pos] < c) ++pos;
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            std::uint64_t f = rows_[r][c];
            if (f == 0) continue;
            for (std::size_t j = c; j < dim_; ++j) rows_[r][j] = ModP::subm(rows_[r][j], ModP::mul(f, w[j]));
        }
        rows_.insert(rows_.begin() + static_cast<std::ptrdiff_t>(pos), std::move(w));
        pivots_.insert(pivots_.begin() + static_cast<std::ptrdiff_t>(pos), c);
        return true;
    }

    std::size_t rank() const { return rows_.size(); }

private:
    std::size_t dim_;
    std::vector<std::vector<std::uint64_t>> rows_;
    std::vector<std::size_t> pivots_;
};

inline std::size_t rank_mod_p(const IntMatrix& rows) {
    if (rows.empty()) return 0;
    ModPSpan s(rows[0].size());
    for (auto& r : rows) s.insert(r);
    return s.rank();
}

inline std::uint64_t det_mod_p(const IntMatrix& m) {
    const std::size_t n = m.size();
    std::vector<std::vector<std::uint64_t>> a(n, std::vector<std::uint64_t>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a[i][j] = ModP::reduce(m[i][j]);
    std::uint64_t det = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && a[piv][c] == 0) ++piv;
        if (piv == n) return 0;
        if (piv != c) {
            std::swap(a[piv], a[c]);
            det = ModP::subm(0, det);
        }
        det = ModP::mul(det, a[c][c]);
        std::uint64_t inv = ModP::inv(a[c][c]);
        for (std::size_t r = c + 1; r < n; ++r) {
            if (a[r][c] == 0) continue;
            std::uint64_t f = ModP::mul(a[r][c], inv);
            for (std::size_t j = c; j < n; ++j) a[r][j] = ModP::subm(a[r][j], ModP::mul(f, a[c][j]));
        }
    }
    return det;
}

namespace detail {

// Hadamard-type bound on every minor: product of the row norms (rows of norm < 1 count as 1).
inline double minor_bound(const IntMatrix& rows) {
    double b = 1;
    for (auto& r : rows) {
        double s = 0;
        for (auto x : r) s += static_cast<double>(x) * static_cast<double>(x);
        b *= std::max(1.0, std::sqrt(s));
    }
    return b;
}

// Fraction-free elimination in 128-bit arithmetic; nullopt on overflow.
inline std::optional<std::int64_t> determinant_i64(const IntMatrix& m) {
    const std::size_t n = m.size();
    std::vector<std::vector<__int128>> a(n, std::vector<__int128>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a[i][j] = m[i][j];
    const __int128 lim = static_cast<__int128>(1) << 62;
    __int128 prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a[k][k] == 0) {
            std::size_t s = k + 1;
            while (s < n && a[s][k] == 0) ++s;
            if (s == n) return 0;
            std::swap(a[s], a[k]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) {
                __int128 x = a[i][j] * a[k][k] - a[i][k] * a[k][j];
                x /= prev;
                if (x > lim || x < -lim) return std::nullopt;
                a[i][j] = x;
            }
        prev = a[k][k];
    }
    return static_cast<std::int64_t>(sign * a[n - 1][n - 1]);
}

}  // namespace detail

// Exact determinant by fraction-free elimination.
inline BigInt determinant(const IntMatrix& m) {
    const std::size_t n = m.size();
    if (n == 0) return 1;
    if (detail::minor_bound(m) < 1e15)
        if (auto d = detail::determinant_i64(m)) return *d;
    BigMatrix a = to_big(m);
    BigInt prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a[k][k] == 0) {
            std::size_t s = k + 1;
            while (s < n && a[s][k] == 0) ++s;
            if (s == n) return 0;
            std::swap(a[s], a[k]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
        prev = a[k][k];
    }
    return sign * a[n - 1][n - 1];
}

inline std::size_t exact_rank(const IntMatrix& rows) {
    if (rows.empty()) return 0;
    // a nonzero minor below the prime cannot vanish modulo it
    if (detail::minor_bound(rows) < 1e18) return rank_mod_p(rows);
    RatMatrix a(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (auto x : rows[i]) a[i].emplace_back(x);
    std::size_t rank = 0;
    const std::size_t cols = a[0].size();
    for (std::size_t c = 0; c < cols && rank < a.size(); ++c) {
        std::size_t piv = rank;
        while (piv < a.size() && a[piv][c] == 0) ++piv;
        if (piv == a.size()) continue;
        std::swap(a[piv], a[rank]);
        for (std::size_t r = rank + 1; r < a.size(); ++r) {
            if (a[r][c] == 0) continue;
            Rational f = a[r][c] / a[rank][c];
            for (std::size_t j = c; j < cols; ++j) a[r][j] -= f * a[rank][j];
        }
        ++rank;
    }
    return rank;
}

// Solves x * A = b for a row vector x when the rows of A are independent; nullopt otherwise.
inline std::optional<std::vector<Rational>> solve_row_combination(const IntMatrix& rows, const IntVec& target) {
    const std::size_t k = rows.size();
    if (k == 0) return is_zero(target) ? std::optional<std::vector<Rational>>(std::vector<Rational>{}) : std::nullopt;
    const std::size_t n = target.size();
    // augmented system: columns are ambient coordinates, unknowns are the k coefficients
    RatMatrix a(n, std::vector<Rational>(k + 1));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) a[i][j] = rows[j][i];
        a[i][k] = target[i];
    }
    std::vector<std::size_t> pivcol;
    std::size_t r = 0;
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t piv = r;
        while (piv < n && a[piv][c] == 0) ++piv;
        if (piv == n) return std::nullopt;
        std::swap(a[piv], a[r]);
        Rational inv = 1 / a[r][c];
        for (std::size_t j = c; j <= k; ++j) a[r][j] *= inv;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == r || a[i][c] == 0) continue;
            Rational f = a[i][c];
            for (std::size_t j = c; j <= k; ++j) a[i][j] -= f * a[r][j];
        }
        pivcol.push_back(c);
        ++r;
    }
    for (std::size_t i = r; i < n; ++i)
        if (a[i][k] != 0) return std::nullopt;
    std::vector<Rational> x(k);
    for (std::size_t i = 0; i < r; ++i) x[pivcol[i]] = a[i][k];
    return x;
}

// Inverse of a square integer matrix over Q; nullopt when singular.
inline std::optional<RatMatrix> rational_inverse(const IntMatrix& m) {
    const std::size_t n = m.size();
    RatMatrix a(n, std::vector<Rational>(2 * n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a[i][j] = m[i][j];
        a[i][n + i] = 1;
    }
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && a[piv][c] == 0) ++piv;
        if (piv == n) return std::nullopt;
        std::swap(a[piv], a[c]);
        Rational inv = 1 / a[c][c];
        for (auto& x : a[c]) x *= inv;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c || a[i][c] == 0) continue;
            Rational f = a[i][c];
            for (std::size_t j = 0; j < 2 * n; ++j) a[i][j] -= f * a[c][j];
        }
    }
    RatMatrix inv(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) inv[i][j] = a[i][n + j];
    return inv;
}

}  // namespace adefans
