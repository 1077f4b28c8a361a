#pragma once
// Units of M(Δ) as rational functions on the configuration space, evaluated exactly.

#include <algorithm>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "charlat.hpp"
#include "integer.hpp"
#include "rootsys.hpp"
#include "subsys.hpp"

namespace adefans {

// Coordinates (q_1..q_n) for E_n, (eps_1..eps_n) for D_n.
using ConfigPoint = std::vector<Rational>;

struct DomainError : std::domain_error {
    int root;
    DomainError(int r, const std::string& name)
        : std::domain_error("point is not admissible: root " + name + " vanishes"), root(r) {}
};

class Evaluator {
public:
    explicit Evaluator(const RootSystem& rs) : rs_(&rs) {
        if (rs.spec.family == Family::A) throw std::invalid_argument("evaluation needs a D_n or E_n system");
        e_type_ = rs.spec.family == Family::E;
        for (const IntVec& r : rs.roots) {
            IntVec f(coords(), 0);
            if (e_type_) {
                // three times the form dual to q_i = h - 3e_i, sign fixed by the first nonzero coefficient
                for (int i = 0; i < coords(); ++i) f[i] = -r[i + 1];
                for (auto c : f)
                    if (c != 0) {
                        if (c < 0) f = scale(f, -1);
                        break;
                    }
            } else {
                f = r;
            }
            forms_.push_back(std::move(f));
        }
    }

    const RootSystem& system() const { return *rs_; }
    int coords() const { return rs_->rank(); }
    const IntVec& form(int root) const { return forms_[root]; }

    Rational linear(const IntVec& f, const ConfigPoint& x) const {
        Rational s = 0;
        for (int i = 0; i < coords(); ++i)
            if (f[i] != 0) s += f[i] * x[i];
        return s;
    }

    Rational root_value(int root, const ConfigPoint& x) const {
        check_size(x);
        Rational v = linear(forms_[root], x);
        if (v == 0) throw DomainError(root, rs_->name(root));
        return v;
    }

    // First root vanishing at x, or -1.
    int offending_root(const ConfigPoint& x) const {
        check_size(x);
        for (int r = 0; r < rs_->size(); ++r)
            if (linear(forms_[r], x) == 0) return r;
        return -1;
    }
    bool admissible(const ConfigPoint& x) const { return offending_root(x) < 0; }

    Rational evaluate(const IntVec& m, const ConfigPoint& x) const {
        if (static_cast<int>(m.size()) != rs_->size()) throw std::invalid_argument("unit has wrong length");
        BigInt num = 1, den = 1;
        for (int r = 0; r < rs_->size(); ++r) {
            if (m[r] == 0) continue;
            Rational v = root_value(r, x);
            BigInt p = boost::multiprecision::pow(boost::multiprecision::numerator(v), static_cast<unsigned>(std::abs(m[r])));
            BigInt q = boost::multiprecision::pow(boost::multiprecision::denominator(v), static_cast<unsigned>(std::abs(m[r])));
            if (m[r] > 0) {
                num *= p;
                den *= q;
            } else {
                num *= q;
                den *= p;
            }
        }
        return Rational(num) / den;
    }

    // w^{-1} x: its coordinates are the coordinate forms pulled back along w.
    ConfigPoint act_inverse(const WeylElement& w, const ConfigPoint& x) const {
        check_size(x);
        IntMatrix mat = rs_->matrix_of(w.word);
        ConfigPoint y(coords());
        for (int k = 0; k < coords(); ++k) {
            IntVec basis(rs_->dim, 0);
            if (e_type_) {
                basis[0] = 1;
                basis[k + 1] = -3;
            } else {
                basis[k] = 1;
            }
            IntVec img = mat_vec(mat, basis);
            Rational s = 0;
            if (e_type_) {
                for (int i = 0; i < coords(); ++i) s -= Rational(img[i + 1]) * x[i];
                s /= 3;
            } else {
                for (int i = 0; i < coords(); ++i) s += img[i] * x[i];
            }
            y[k] = s;
        }
        return y;
    }

    ConfigPoint random_point(std::mt19937_64& rng, int lo = -50, int hi = 50) const {
        std::uniform_int_distribution<int> d(lo, hi);
        for (;;) {
            ConfigPoint x(coords());
            for (auto& c : x) c = d(rng);
            if (admissible(x)) return x;
        }
    }

private:
    void check_size(const ConfigPoint& x) const {
        if (static_cast<int>(x.size()) != coords())
            throw std::invalid_argument("point needs " + std::to_string(coords()) + " coordinates");
    }

    const RootSystem* rs_;
    bool e_type_ = false;
    std::vector<IntVec> forms_;
};

// (w m)_{w(alpha)} = m_alpha on positive representatives.
inline IntVec act_on_unit(const WeylElement& w, const IntVec& m) {
    IntVec r(m.size(), 0);
    for (std::size_t a = 0; a < m.size(); ++a) r[w.perm[a]] += m[a];
    return r;
}

// Image of u(F_i, F_j) under M(D4) -> M(Δ).
inline IntVec type_I_unit(const RootSystem& rs, const D4Record& d, int i, int j) { return d4_unit(rs, d, i, j); }

namespace detail {

inline int e_root(const RootSystem& rs, std::vector<int> idx) {
    std::sort(idx.begin(), idx.end());
    std::string n;
    for (int i : idx) n += std::to_string(i + 1);
    return rs.by_name(n);
}

inline Rational cusp_det(const ConfigPoint& q, int a, int b, int c) {
    // det of the columns (q, q^3, 1)
    const Rational& x = q[a];
    const Rational& y = q[b];
    const Rational& z = q[c];
    return x * (y * y * y - z * z * z) - y * (x * x * x - z * z * z) + z * (x * x * x - y * y * y);
}

inline void check_distinct(const std::vector<int>& idx, int n) {
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] < 0 || idx[i] >= n) throw std::invalid_argument("index out of range");
        for (std::size_t j = 0; j < i; ++j)
            if (idx[i] == idx[j]) throw std::invalid_argument("indices must be distinct");
    }
}

}  // namespace detail

// Ratio of determinants of points a,b,c,d,e on the cuspidal cubic, pairing (ab)(cd) over (ac)(bd); 0-based.
inline Rational cusp_cross_ratio(const ConfigPoint& q, int a, int b, int c, int d, int e) {
    Rational den = detail::cusp_det(q, a, c, e) * detail::cusp_det(q, b, d, e);
    if (den == 0) throw std::domain_error("degenerate point");
    return detail::cusp_det(q, a, b, e) * detail::cusp_det(q, c, d, e) / den;
}

// +1 on a_ab, a_cd, a_abe, a_cde and -1 on a_ac, a_bd, a_ace, a_bde; requires a<b<c<d.
inline IntVec cusp_unit(const RootSystem& rs, int a, int b, int c, int d, int e) {
    if (rs.spec.family != Family::E) throw std::invalid_argument("cuspidal cross-ratio needs E_n");
    detail::check_distinct({a, b, c, d, e}, rs.rank());
    if (!(a < b && b < c && c < d)) throw std::invalid_argument("first four indices must increase");
    IntVec u(rs.size(), 0);
    for (auto r : {detail::e_root(rs, {a, b}), detail::e_root(rs, {c, d}), detail::e_root(rs, {a, b, e}),
                   detail::e_root(rs, {c, d, e})})
        u[r] += 1;
    for (auto r : {detail::e_root(rs, {a, c}), detail::e_root(rs, {b, d}), detail::e_root(rs, {a, c, e}),
                   detail::e_root(rs, {b, d, e})})
        u[r] -= 1;
    return u;
}

struct CrossRatioCheck {
    bool equal = false;
    Rational determinant_ratio, root_product;
};

inline CrossRatioCheck cross_ratio_pullback_check(const Evaluator& ev, int a, int b, int c, int d, int e,
                                                  const ConfigPoint& x) {
    if (!ev.admissible(x)) throw DomainError(ev.offending_root(x), ev.system().name(ev.offending_root(x)));
    CrossRatioCheck r;
    r.determinant_ratio = cusp_cross_ratio(x, a, b, c, d, e);
    r.root_product = ev.evaluate(cusp_unit(ev.system(), a, b, c, d, e), x);
    r.equal = r.determinant_ratio == r.root_product;
    return r;
}

// (eps_a^2-eps_b^2)(eps_c^2-eps_d^2) / ((eps_a^2-eps_c^2)(eps_b^2-eps_d^2)).
inline Rational forgetful_cross_ratio(const ConfigPoint& x, int a, int b, int c, int d) {
    auto sq = [&](int i) { return x[i] * x[i]; };
    Rational den = (sq(a) - sq(c)) * (sq(b) - sq(d));
    if (den == 0) throw std::domain_error("degenerate point");
    return (sq(a) - sq(b)) * (sq(c) - sq(d)) / den;
}

// The 8-root unit of the forgetful map to four points of P^1; 0-based, requires a<b<c<d so that
// every factor is the value of a positive root.
inline IntVec forgetful_unit(const RootSystem& rs, int a, int b, int c, int d) {
    if (rs.spec.family != Family::D) throw std::invalid_argument("forgetful cross-ratio needs D_n");
    detail::check_distinct({a, b, c, d}, rs.rank());
    if (!(a < b && b < c && c < d)) throw std::invalid_argument("indices must increase");
    auto root = [&](int i, int j, int s) {
        IntVec v(rs.dim, 0);
        v[i] = 1;
        v[j] = s;
        auto [k, sign] = rs.find(v);
        if (k < 0) throw std::logic_error("missing root");
        return k;
    };
    IntVec u(rs.size(), 0);
    for (int s : {1, -1}) {
        u[root(a, b, s)] += 1;
        u[root(c, d, s)] += 1;
        u[root(a, c, s)] -= 1;
        u[root(b, d, s)] -= 1;
    }
    return u;
}

struct WeylRatioReport {
    bool constant = false;
    Rational value;
    std::size_t samples = 0;
};

inline WeylRatioReport weyl_ratio_check(const Evaluator& ev, const IntVec& m, const WeylElement& w,
                                        const std::vector<ConfigPoint>& points) {
    WeylRatioReport r;
    IntVec wm = act_on_unit(w, m);
    r.constant = true;
    for (const auto& x : points) {
        Rational q = ev.evaluate(wm, x) / ev.evaluate(m, ev.act_inverse(w, x));
        if (r.samples == 0) r.value = q;
        else if (q != r.value) r.constant = false;
        ++r.samples;
    }
    if (r.samples == 0) r.constant = false;
    return r;
}

}  // namespace adefans
