#pragma once

#include "subsys.hpp"

namespace adefans {

// Integral quadratic form on the ambient lattice: f(v) = sum_{i<=j} c[i][j] v_i v_j.
struct QuadForm {
    IntMatrix c;

    explicit QuadForm(int dim = 0) : c(dim, IntVec(dim, 0)) {}

    std::int64_t operator()(const IntVec& v) const {
        std::int64_t s = 0;
        for (std::size_t i = 0; i < c.size(); ++i)
            for (std::size_t j = i; j < c.size(); ++j) s += c[i][j] * v[i] * v[j];
        return s;
    }

    QuadForm& add(int i, int j, std::int64_t k) {
        if (i > j) std::swap(i, j);
        c[i][j] += k;
        return *this;
    }
};

inline IntVec phi_of(const RootSystem& rs, const QuadForm& f) {
    IntVec v(rs.size());
    for (int a = 0; a < rs.size(); ++a) v[a] = f(rs.roots[a]);
    return v;
}

// The lattice N = coker(phi) with coordinates dual to the basis of M that is the identity on
// the three-legged roots. psi(e_alpha) is column alpha of `psi_matrix`.
class NLattice {
public:
    const RootSystem* rs = nullptr;
    std::vector<int> t_roots;
    std::vector<int> t_position;  // root -> position in t_roots, or -1
    IntMatrix phi;                // |roots| x r(r+1)/2, rows are (c_i c_j)
    IntMatrix psi_matrix;         // rank x |roots|

    explicit NLattice(const RootSystem& sys) : rs(&sys) {
        const int n = sys.size();
        const int r = static_cast<int>(sys.simple.size());
        phi.assign(n, IntVec());
        for (int a = 0; a < n; ++a)
            for (int i = 0; i < r; ++i)
                for (int j = i; j < r; ++j) phi[a].push_back(sys.coeffs[a][i] * sys.coeffs[a][j]);
        t_roots = sys.three_legged_roots();
        t_position.assign(n, -1);
        for (std::size_t k = 0; k < t_roots.size(); ++k) t_position[t_roots[k]] = static_cast<int>(k);
        std::vector<int> strings;
        for (int a = 0; a < n; ++a)
            if (t_position[a] < 0) strings.push_back(a);
        const std::size_t q = phi.empty() ? 0 : phi[0].size();
        if (strings.size() != q) throw std::logic_error("string roots do not match the quadratic forms");
        IntMatrix phi_s;
        for (int a : strings) phi_s.push_back(phi[a]);
        auto inv = rational_inverse(phi_s);
        if (!inv) throw std::logic_error("string-root block is singular");
        psi_matrix.assign(t_roots.size(), IntVec(n, 0));
        for (std::size_t k = 0; k < t_roots.size(); ++k) {
            psi_matrix[k][t_roots[k]] = 1;
            // m_S = - phi_T(row) * phi_S^{-1}
            for (std::size_t s = 0; s < q; ++s) {
                Rational acc = 0;
                for (std::size_t j = 0; j < q; ++j) acc -= Rational(phi[t_roots[k]][j]) * (*inv)[j][s];
                if (boost::multiprecision::denominator(acc) != 1) throw std::logic_error("T-coordinates are not integral on M");
                psi_matrix[k][strings[s]] = to_i64(boost::multiprecision::numerator(acc));
            }
        }
    }

    int rank() const { return static_cast<int>(t_roots.size()); }

    IntVec psi(const IntVec& x) const { return mat_vec(psi_matrix, x); }

    IntVec psi_root(int a) const {
        IntVec v(rank());
        for (int k = 0; k < rank(); ++k) v[k] = psi_matrix[k][a];
        return v;
    }

    IntVec psi(Mask m) const {
        IntVec v(rank(), 0);
        for_each_bit(m, [&](int a) {
            for (int k = 0; k < rank(); ++k) v[k] += psi_matrix[k][a];
        });
        return v;
    }

    // Primitive generator of the ray through psi of the subsystem.
    IntVec zeta(Mask m) const { return primitive(psi(m)); }

    bool in_M(const IntVec& m) const {
        if (phi.empty()) return true;
        for (std::size_t j = 0; j < phi[0].size(); ++j) {
            std::int64_t s = 0;
            for (int a = 0; a < rs->size(); ++a) s += m[a] * phi[a][j];
            if (s != 0) return false;
        }
        return true;
    }

    // Coordinates of m in M, i.e. its values on the three-legged roots.
    IntVec m_coords(const IntVec& m) const {
        IntVec c(rank());
        for (int k = 0; k < rank(); ++k) c[k] = m[t_roots[k]];
        return c;
    }

    // Pairing of m in M with a vector of N.
    std::int64_t pair(const IntVec& m, const IntVec& v) const {
        std::int64_t s = 0;
        for (int k = 0; k < rank(); ++k) s += m[t_roots[k]] * v[k];
        return s;
    }

    // Basis element of M dual to the k-th coordinate of N, as a function on the roots.
    IntVec m_basis(int k) const {
        IntVec m(rs->size());
        for (int a = 0; a < rs->size(); ++a) m[a] = psi_matrix[k][a];
        return m;
    }
};

// Smith divisors of phi: torsion-freeness and injectivity of phi.
inline std::vector<BigInt> phi_divisors(const NLattice& n) { return elementary_divisors(to_big(n.phi)); }

inline IntVec indicator(const RootSystem& rs, Mask m) {
    IntVec v(rs.size(), 0);
    for_each_bit(m, [&](int a) { v[a] = 1; });
    return v;
}

// u(F_i, F_j): +1 on F_i, -1 on F_j, 0 elsewhere.
inline IntVec d4_unit(const RootSystem& rs, const D4Record& d, int i, int j) {
    IntVec u(rs.size(), 0);
    for_each_bit(d.fourtuples[i], [&](int a) { u[a] += 1; });
    for_each_bit(d.fourtuples[j], [&](int a) { u[a] -= 1; });
    return u;
}

struct SpanReport {
    std::size_t rank = 0;       // rank of the span
    BigInt index = 0;           // index of the span in M when full rank
    std::size_t generators = 0;
};

// Span of the D4 units inside M.
inline SpanReport d4_unit_span(const NLattice& n, const std::vector<D4Record>& catalog) {
    SpanReport r;
    IntMatrix rows;
    for (auto& d : catalog)
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) rows.push_back(n.m_coords(d4_unit(*n.rs, d, i, j)));
    r.generators = rows.size();
    if (rows.empty()) {
        r.rank = 0;
        r.index = n.rank() == 0 ? 1 : 0;
        return r;
    }
    auto div = elementary_divisors(to_big(rows));
    r.rank = div.size();
    if (static_cast<int>(r.rank) == n.rank()) {
        r.index = 1;
        for (auto& x : div) r.index *= x;
    }
    return r;
}

// Gamma-lattice data: values of psi on a family of subsystems and their common divisor.
struct GammaData {
    IntMatrix values;   // one row per subsystem: psi(Theta) in N coordinates
    std::int64_t m_gamma = 0;
};

inline GammaData b_gamma(const NLattice& n, const std::vector<Mask>& family) {
    GammaData g;
    for (Mask m : family) {
        g.values.push_back(n.psi(m));
        g.m_gamma = gcd64(g.m_gamma, content(g.values.back()));
    }
    return g;
}

// An embedding of root systems given by where the positive roots go.
struct Embedding {
    const RootSystem* sub = nullptr;
    const RootSystem* amb = nullptr;
    std::vector<int> image;  // sub root -> ambient root

    Mask image_mask() const {
        Mask m = 0;
        for (int a : image) m |= Mask(1) << a;
        return m;
    }

    std::vector<int> preimage() const {
        std::vector<int> pre(amb->size(), -1);
        for (std::size_t i = 0; i < image.size(); ++i) pre[image[i]] = static_cast<int>(i);
        return pre;
    }

    Mask pull(Mask m) const {
        auto pre = preimage();
        Mask r = 0;
        for_each_bit(m, [&](int a) {
            if (pre[a] >= 0) r |= Mask(1) << pre[a];
        });
        return r;
    }

    Mask push(Mask m) const {
        Mask r = 0;
        for_each_bit(m, [&](int a) { r |= Mask(1) << image[a]; });
        return r;
    }
};

// Extends images of the simple roots linearly.
inline Embedding embedding_from_simple(const RootSystem& sub, const RootSystem& amb, const std::vector<IntVec>& simple_images) {
    Embedding e{&sub, &amb, {}};
    for (int a = 0; a < sub.size(); ++a) {
        IntVec v(amb.dim, 0);
        for (std::size_t i = 0; i < sub.simple.size(); ++i) v = add(v, scale(simple_images[i], sub.coeffs[a][i]));
        auto [idx, sg] = amb.find(v);
        if (idx < 0 || sg < 0) throw std::invalid_argument("simple-root images do not define a positive embedding");
        e.image.push_back(idx);
    }
    return e;
}

// Coordinate inclusion D_n -> D_{n+1} or E_n -> E_{n+1}, or the identification D5 = E5 inside E6.
inline Embedding standard_embedding(const RootSystem& sub, const RootSystem& amb) {
    std::vector<IntVec> imgs;
    if (sub.spec.family == amb.spec.family && sub.spec.rank <= amb.spec.rank) {
        for (int s : sub.simple) {
            IntVec v(amb.dim, 0);
            for (int i = 0; i < sub.dim; ++i) v[i] = sub.roots[s][i];
            imgs.push_back(v);
        }
        return embedding_from_simple(sub, amb, imgs);
    }
    if (sub.spec == SystemSpec{Family::D, 5} && amb.spec.family == Family::E && amb.spec.rank >= 5) {
        // e1-e2, e2-e3, e3-e4, e4-e5, e4+e5  ->  12, 23, 34, 45, 123
        for (const char* nm : {"12", "23", "34", "45", "123"}) imgs.push_back(amb.roots[amb.by_name(nm)]);
        return embedding_from_simple(sub, amb, imgs);
    }
    throw std::invalid_argument("no standard embedding " + system_name(sub.spec) + " -> " + system_name(amb.spec));
}

// Projection N(ambient) -> N(sub) induced by restriction of functions on roots.
struct Projection {
    Embedding emb;
    const NLattice* from = nullptr;
    const NLattice* to = nullptr;
    IntMatrix matrix;  // rank(to) x rank(from)

    IntVec operator()(const IntVec& v) const { return mat_vec(matrix, v); }
};

inline Projection make_projection(const Embedding& e, const NLattice& from, const NLattice& to) {
    Projection p{e, &from, &to, IntMatrix(to.rank(), IntVec(from.rank(), 0))};
    auto pre = e.preimage();
    for (int k = 0; k < from.rank(); ++k) {
        int a = from.t_roots[k];
        if (pre[a] < 0) continue;
        IntVec col = to.psi_root(pre[a]);
        for (int i = 0; i < to.rank(); ++i) p.matrix[i][k] = col[i];
    }
    return p;
}

// The restriction square commutes on every root.
inline bool projection_commutes(const Projection& p) {
    auto pre = p.emb.preimage();
    for (int a = 0; a < p.from->rs->size(); ++a) {
        IntVec lhs = p(p.from->psi_root(a));
        IntVec rhs = pre[a] >= 0 ? p.to->psi_root(pre[a]) : IntVec(p.to->rank(), 0);
        if (lhs != rhs) return false;
    }
    return true;
}

// Weyl action on N: the matrix sending psi(e_alpha) to psi(e_{w alpha}).
inline IntMatrix weyl_on_N(const NLattice& n, const WeylElement& w) {
    IntMatrix m(n.rank(), IntVec(n.rank(), 0));
    for (int k = 0; k < n.rank(); ++k) {
        IntVec col = n.psi_root(w.perm[n.t_roots[k]]);
        for (int i = 0; i < n.rank(); ++i) m[i][k] = col[i];
    }
    return m;
}

}  // namespace adefans
