#pragma once

#include "bitset.hpp"
#include "charlat.hpp"

#include <optional>

namespace adefans {

struct RVertex {
    Mask theta = 0;     // subsystem (for D_n with equal halves, both halves)
    std::string type;   // class label of the subsystem
    IntVec ray;         // primitive generator of the ray through psi(theta)
    std::uint32_t bipartition = 0;  // D_n only: the smaller side I as an index set
};

// The complex of orthogonal-or-nested families of the ray subsystems.
class RComplex {
public:
    const RootSystem* rs = nullptr;
    const NLattice* lat = nullptr;
    std::vector<RVertex> vertices;
    std::vector<DynBitset> compat;  // adjacency of the compatibility graph
    bool fano_rule = false;         // E7: seven pairwise orthogonal A1 do not span a simplex

    int size() const { return static_cast<int>(vertices.size()); }

    int find(Mask theta) const {
        auto it = by_mask_.find(theta);
        return it == by_mask_.end() ? -1 : it->second;
    }

    bool compatible(int u, int v) const { return compat[u].test(v); }

    bool is_simplex(const std::vector<int>& s) const {
        for (std::size_t i = 0; i < s.size(); ++i)
            for (std::size_t j = i + 1; j < s.size(); ++j)
                if (!compatible(s[i], s[j])) return false;
        return !(fano_rule && contains_fano(s));
    }

    bool contains_fano(const std::vector<int>& s) const {
        int a1 = 0;
        for (int v : s)
            if (vertices[v].type == "A1") ++a1;
        return a1 >= 7;
    }

    // Maximal simplices, each sorted; list sorted. Computed once.
    const std::vector<std::vector<int>>& maximal_simplices() const {
        if (!max_cache_) max_cache_ = compute_maximal_simplices();
        return *max_cache_;
    }

    // Installs a precomputed list after checking that it is sorted and that every entry is a
    // maximal simplex; completeness is taken on trust.
    bool adopt_maximal_simplices(std::vector<std::vector<int>> list) const {
        if (!std::is_sorted(list.begin(), list.end())) return false;
        for (std::size_t i = 0; i < list.size(); ++i) {
            const auto& s = list[i];
            if (s.empty() || (i && list[i - 1] == s) || !std::is_sorted(s.begin(), s.end())) return false;
            for (int v : s)
                if (v < 0 || v >= size()) return false;
            if (!is_simplex(s)) return false;
            DynBitset common = compat[s[0]];
            for (int v : s) common &= compat[v];
            bool extendable = false;
            common.for_each([&](std::size_t v) {
                std::vector<int> t = s;
                t.push_back(static_cast<int>(v));
                if (!(fano_rule && contains_fano(t))) extendable = true;
            });
            if (extendable) return false;
        }
        // the full list is Weyl invariant, which catches lists missing part of an orbit
        for (int g = 0; g < rs->rank(); ++g) {
            const auto p = simple_action(g);
            for (const auto& s : list) {
                std::vector<int> t;
                for (int v : s) t.push_back(p[v]);
                std::sort(t.begin(), t.end());
                if (!std::binary_search(list.begin(), list.end(), t)) return false;
            }
        }
        max_cache_ = std::move(list);
        return true;
    }

    // Every nonempty simplex, sorted lexicographically.
    std::vector<std::vector<int>> all_simplices() const;

    // Vertex permutation induced by a simple reflection.
    std::vector<int> simple_action(int gen) const {
        std::vector<int> p(size());
        for (int v = 0; v < size(); ++v) p[v] = find(rs->apply_simple(gen, vertices[v].theta));
        return p;
    }

    void index() {
        by_mask_.clear();
        max_cache_.reset();
        for (int v = 0; v < size(); ++v) by_mask_[vertices[v].theta] = v;
        compat.assign(size(), DynBitset(size()));
        for (int u = 0; u < size(); ++u)
            for (int v = u + 1; v < size(); ++v) {
                Mask a = vertices[u].theta, b = vertices[v].theta;
                if (nested(a, b) || orthogonal(*rs, a, b)) {
                    compat[u].set(v);
                    compat[v].set(u);
                }
            }
    }

private:
    std::vector<std::vector<int>> compute_maximal_simplices() const;
    std::unordered_map<Mask, int> by_mask_;
    mutable std::optional<std::vector<std::vector<int>>> max_cache_;
};

inline bool supports_fans(SystemSpec s) {
    return (s.family == Family::D && s.rank >= 4 && s.rank <= 8) || (s.family == Family::E && (s.rank == 6 || s.rank == 7));
}

// Ray subsystem types of the exceptional systems.
inline std::vector<std::string> ray_types(SystemSpec s) {
    if (s == SystemSpec{Family::E, 6}) return {"A1", "A2xA2xA2"};
    if (s == SystemSpec{Family::E, 7}) return {"A1", "A2", "A3xA3", "A7"};
    return {};
}

inline Mask d_subsystem(const RootSystem& rs, std::uint32_t indices) {
    Mask m = 0;
    for (int a = 0; a < rs.size(); ++a) {
        bool inside = true;
        for (int i = 0; i < rs.dim; ++i)
            if (rs.roots[a][i] != 0 && !(indices >> i & 1)) inside = false;
        if (inside) m |= Mask(1) << a;
    }
    return m;
}

inline RComplex build_R(const RootSystem& rs, const NLattice& lat) {
    if (!supports_fans(rs.spec)) throw std::invalid_argument("no fan construction for " + system_name(rs.spec));
    RComplex r;
    r.rs = &rs;
    r.lat = &lat;
    if (rs.spec.family == Family::D) {
        const int n = rs.spec.rank;
        for (std::uint32_t I = 1; I < (1u << n); ++I) {
            int k = std::popcount(I);
            if (k < 2 || 2 * k > n) continue;
            std::uint32_t comp = ((1u << n) - 1) & ~I;
            if (2 * k == n && !(I & 1)) continue;
            RVertex v;
            v.bipartition = I;
            v.theta = d_subsystem(rs, I);
            if (2 * k == n) v.theta |= d_subsystem(rs, comp);
            v.type = recognize_type(rs, v.theta).str();
            v.ray = lat.zeta(v.theta);
            r.vertices.push_back(v);
        }
    } else {
        for (auto& t : ray_types(rs.spec))
            for (Mask m : enumerate_subsystems(rs, SubsystemType::parse(t)))
                r.vertices.push_back({m, t, lat.zeta(m), 0});
        r.fano_rule = rs.spec == SystemSpec{Family::E, 7};
    }
    r.index();
    return r;
}

inline std::vector<std::vector<int>> RComplex::compute_maximal_simplices() const {
    std::set<std::vector<int>> out;
    std::vector<int> cur;
    // Bron-Kerbosch with pivoting
    std::function<void(DynBitset, DynBitset)> bk = [&](DynBitset P, DynBitset X) {
        if (!P.any() && !X.any()) {
            std::vector<int> c = cur;
            std::sort(c.begin(), c.end());
            if (fano_rule && contains_fano(c)) {
                // only A1 vertices can be involved: drop one orthogonal A1 at a time
                for (std::size_t i = 0; i < c.size(); ++i) {
                    std::vector<int> d = c;
                    d.erase(d.begin() + static_cast<std::ptrdiff_t>(i));
                    if (!contains_fano(d)) out.insert(d);
                }
            } else {
                out.insert(c);
            }
            return;
        }
        DynBitset PX = P;
        PX |= X;
        std::size_t best = 0, best_count = 0;
        bool have = false;
        PX.for_each([&](std::size_t u) {
            std::size_t c = P.and_count(compat[u]);
            if (!have || c > best_count) best = u, best_count = c, have = true;
        });
        DynBitset cand = P.minus(compat[best]);
        cand.for_each([&](std::size_t v) {
            cur.push_back(static_cast<int>(v));
            bk(P & compat[v], X & compat[v]);
            cur.pop_back();
            P.reset(v);
            X.set(v);
        });
    };
    DynBitset P(size()), X(size());
    for (int v = 0; v < size(); ++v) P.set(v);
    bk(P, X);
    // Fano repair can produce non-maximal sets; keep only maximal ones
    std::vector<std::vector<int>> res(out.begin(), out.end());
    if (fano_rule) {
        std::vector<std::vector<int>> keep;
        for (auto& s : res) {
            bool maximal = true;
            for (int v = 0; v < size() && maximal; ++v) {
                if (std::binary_search(s.begin(), s.end(), v)) continue;
                bool ok = true;
                for (int u : s)
                    if (!compatible(u, v)) ok = false;
                if (!ok) continue;
                std::vector<int> t = s;
                t.push_back(v);
                if (!contains_fano(t)) maximal = false;
            }
            if (maximal) keep.push_back(s);
        }
        res = keep;
    }
    return res;
}

inline std::vector<std::vector<int>> RComplex::all_simplices() const {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    std::function<void(const DynBitset&, int)> rec = [&](const DynBitset& cand, int a1) {
        cand.for_each([&](std::size_t v) {
            int na1 = a1 + (vertices[v].type == "A1");
            if (fano_rule && na1 >= 7) return;
            cur.push_back(static_cast<int>(v));
            out.push_back(cur);
            DynBitset next = cand & compat[v];
            // only larger indices, so each simplex is produced once in increasing order
            next.clear_below(v + 1);
            rec(next, na1);
            cur.pop_back();
        });
    };
    DynBitset all(size());
    for (int v = 0; v < size(); ++v) all.set(v);
    rec(all, 0);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace adefans
