#pragma once

#include "linalg.hpp"

namespace adefans {

// Feasibility of { x >= 0 : A x = b } over Q by the two-phase simplex method (phase I only,
// Bland's rule). Returns a feasible point or nullopt.
inline std::optional<std::vector<Rational>> lp_feasible(const RatMatrix& A, const std::vector<Rational>& b) {
    const std::size_t m = A.size();
    const std::size_t n = m ? A[0].size() : 0;
    // tableau with artificial variables n..n+m-1
    RatMatrix t(m, std::vector<Rational>(n + m + 1));
    for (std::size_t i = 0; i < m; ++i) {
        bool neg = b[i] < 0;
        for (std::size_t j = 0; j < n; ++j) t[i][j] = neg ? Rational(-A[i][j]) : A[i][j];
        t[i][n + i] = 1;
        t[i][n + m] = neg ? Rational(-b[i]) : b[i];
    }
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;
    // reduced costs of the phase-I objective sum of artificials
    std::vector<Rational> cost(n + m + 1, 0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j <= n + m; ++j)
            if (j < n || j == n + m) cost[j] -= t[i][j];
    for (;;) {
        std::size_t enter = n + m;
        for (std::size_t j = 0; j < n + m; ++j)
            if (cost[j] < 0) {
                enter = j;
                break;
            }
        if (enter == n + m) break;
        std::size_t leave = m;
        Rational best;
        for (std::size_t i = 0; i < m; ++i) {
            if (t[i][enter] <= 0) continue;
            Rational ratio = t[i][n + m] / t[i][enter];
            if (leave == m || ratio < best || (ratio == best && basis[i] < basis[leave])) {
                leave = i;
                best = ratio;
            }
        }
        if (leave == m) break;  // unbounded direction cannot occur in phase I
        Rational piv = t[leave][enter];
        for (auto& x : t[leave]) x /= piv;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == leave || t[i][enter] == 0) continue;
            Rational f = t[i][enter];
            for (std::size_t j = 0; j <= n + m; ++j) t[i][j] -= f * t[leave][j];
        }
        if (cost[enter] != 0) {
            Rational f = cost[enter];
            for (std::size_t j = 0; j <= n + m; ++j) cost[j] -= f * t[leave][j];
        }
        basis[leave] = enter;
    }
    if (cost[n + m] != 0) return std::nullopt;
    std::vector<Rational> x(n, 0);
    for (std::size_t i = 0; i < m; ++i)
        if (basis[i] < n) x[basis[i]] = t[i][n + m];
    return x;
}

// Do two simplicial cones meet exactly in the cone over their common rays?
// Rays are given by their generators; `common` flags rays of s that also belong to t.
inline bool cones_meet_in_common_face(const IntMatrix& s, const IntMatrix& t) {
    // common rays, matched by equality of generators
    std::vector<bool> s_common(s.size(), false), t_common(t.size(), false);
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = 0; j < t.size(); ++j)
            if (s[i] == t[j]) s_common[i] = t_common[j] = true;
    IntMatrix all;
    for (auto& r : s) all.push_back(r);
    for (std::size_t j = 0; j < t.size(); ++j)
        if (!t_common[j]) all.push_back(t[j]);
    // independent union: unique representation, nothing more to check
    if (rank_mod_p(all) == all.size()) return true;
    const std::size_t dim = s.empty() ? (t.empty() ? 0 : t[0].size()) : s[0].size();
    const std::size_t nv = s.size() + t.size();
    RatMatrix A(dim + 1, std::vector<Rational>(nv, 0));
    std::vector<Rational> b(dim + 1, 0);
    for (std::size_t k = 0; k < dim; ++k) {
        for (std::size_t i = 0; i < s.size(); ++i) A[k][i] = s[i][k];
        for (std::size_t j = 0; j < t.size(); ++j) A[k][s.size() + j] = -t[j][k];
    }
    for (std::size_t i = 0; i < s.size(); ++i) A[dim][i] = s_common[i] ? 0 : 1;
    for (std::size_t j = 0; j < t.size(); ++j) A[dim][s.size() + j] = t_common[j] ? 0 : 1;
    b[dim] = 1;
    return !lp_feasible(A, b).has_value();
}

}  // namespace adefans
