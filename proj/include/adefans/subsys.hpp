#pragma once

#include "rootsys.hpp"

#include <array>
#include <bit>
#include <set>
#include <functional>
#include <sstream>

namespace adefans {

// Root subsystems are stored as the set of their positive roots.
inline Mask closure(const RootSystem& rs, Mask m) {
    Mask cur = m;
    for (;;) {
        Mask next = cur;
        for_each_bit(cur, [&](int r) {
            const auto& row = rs.reflect[r];
            for_each_bit(cur, [&](int k) { next |= Mask(1) << row[k]; });
        });
        if (next == cur) return cur;
        cur = next;
    }
}

inline Mask perp(const RootSystem& rs, Mask m) {
    Mask r = rs.all;
    for_each_bit(m, [&](int i) { r &= rs.orth[i]; });
    return r;
}

inline bool orthogonal(const RootSystem& rs, Mask a, Mask b) { return (perp(rs, a) & b) == b; }
inline bool nested(Mask a, Mask b) { return (a & b) == a || (a & b) == b; }

struct Component {
    Family family;
    int rank;
    auto operator<=>(const Component&) const = default;
};

struct SubsystemType {
    std::vector<Component> parts;  // sorted
    bool operator==(const SubsystemType&) const = default;
    auto operator<=>(const SubsystemType&) const = default;

    int rank() const {
        int r = 0;
        for (auto& c : parts) r += c.rank;
        return r;
    }

    std::string str() const {
        if (parts.empty()) return "0";
        std::string s;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (i) s += "x";
            s += system_name({parts[i].family, parts[i].rank});
        }
        return s;
    }

    static SubsystemType parse(const std::string& text) {
        SubsystemType t;
        if (text == "0" || text.empty()) return t;
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, 'x')) {
            int mult = 1;
            auto caret = item.find('^');
            if (caret != std::string::npos) {
                mult = std::stoi(item.substr(caret + 1));
                item = item.substr(0, caret);
            }
            auto s = parse_system(item);
            for (int i = 0; i < mult; ++i) t.parts.push_back({s.family, s.rank});
        }
        t.normalize();
        return t;
    }

    void normalize() {
        // small ranks have two names; keep the canonical one
        for (auto& c : parts) {
            if (c.family == Family::D && c.rank == 3) c = {Family::A, 3};
            if (c.family == Family::E && c.rank == 5) c = {Family::D, 5};
        }
        std::vector<Component> out;
        for (auto& c : parts) {
            if (c.family == Family::D && c.rank == 2) {
                out.push_back({Family::A, 1});
                out.push_back({Family::A, 1});
            } else {
                out.push_back(c);
            }
        }
        parts = out;
        std::sort(parts.begin(), parts.end());
    }
};

// Simple roots of the subsystem relative to its intersection with the positive roots.
inline std::vector<int> subsystem_simple_roots(const RootSystem& rs, Mask m) {
    std::vector<int> simple;
    for_each_bit(m, [&](int a) {
        bool decomposable = false;
        for_each_bit(m, [&](int b) {
            if (decomposable || rs.pairing[a][b] != -1) return;
            if (rs.reflect_sign[b][a] > 0 && (m >> rs.reflect[b][a] & 1)) decomposable = true;
        });
        if (!decomposable) simple.push_back(a);
    });
    return simple;
}

inline SubsystemType recognize_type(const RootSystem& rs, Mask m) {
    auto simple = subsystem_simple_roots(rs, m);
    const std::size_t k = simple.size();
    std::vector<std::vector<int>> adj(k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            if (i != j && rs.pairing[simple[i]][simple[j]] != 0) adj[i].push_back(static_cast<int>(j));
    std::vector<int> comp(k, -1);
    SubsystemType t;
    for (std::size_t s = 0; s < k; ++s) {
        if (comp[s] >= 0) continue;
        std::vector<int> nodes{static_cast<int>(s)};
        comp[s] = static_cast<int>(s);
        for (std::size_t h = 0; h < nodes.size(); ++h)
            for (int nb : adj[nodes[h]])
                if (comp[nb] < 0) {
                    comp[nb] = static_cast<int>(s);
                    nodes.push_back(nb);
                }
        int size = static_cast<int>(nodes.size());
        int branch = -1;
        for (int v : nodes)
            if (adj[v].size() >= 3) branch = v;
        if (branch < 0) {
            t.parts.push_back({Family::A, size});
            continue;
        }
        std::vector<int> legs;
        for (int start : adj[branch]) {
            int len = 0, prev = branch, cur = start;
            for (;;) {
                ++len;
                int next = -1;
                for (int nb : adj[cur])
                    if (nb != prev) next = nb;
                if (next < 0) break;
                prev = cur;
                cur = next;
            }
            legs.push_back(len);
        }
        std::sort(legs.begin(), legs.end());
        if (legs[0] == 1 && legs[1] == 1) t.parts.push_back({Family::D, size});
        else t.parts.push_back({Family::E, size});
    }
    t.normalize();
    return t;
}

// Irreducible components: roots joined by non-orthogonality.
inline std::vector<Mask> irreducible_components(const RootSystem& rs, Mask m) {
    std::vector<Mask> out;
    Mask left = m;
    while (left) {
        Mask comp = left & (~left + 1), frontier = comp;
        while (frontier) {
            Mask next = 0;
            for_each_bit(frontier, [&](int a) { next |= left & ~rs.orth[a] & ~(Mask(1) << a); });
            next &= ~comp;
            comp |= next;
            frontier = next;
        }
        out.push_back(comp);
        left &= ~comp;
    }
    return out;
}

namespace detail {

// Dynkin template: node i (i > 0) is adjacent to the listed earlier nodes.
inline std::vector<std::vector<int>> dynkin_template(Component c) {
    std::vector<std::vector<int>> earlier(c.rank);
    switch (c.family) {
        case Family::A:
            for (int i = 1; i < c.rank; ++i) earlier[i] = {i - 1};
            break;
        case Family::D:
            for (int i = 1; i + 1 < c.rank; ++i) earlier[i] = {i - 1};
            earlier[c.rank - 1] = {c.rank - 3};
            break;
        case Family::E:
            for (int i = 1; i + 1 < c.rank; ++i) earlier[i] = {i - 1};
            earlier[c.rank - 1] = {2};
            break;
    }
    return earlier;
}

}  // namespace detail

// All subsystems of the given type, sorted.
inline std::vector<Mask> enumerate_subsystems(const RootSystem& rs, const SubsystemType& type) {
    const int n = rs.size();
    std::vector<Mask> plus(n, 0);
    for (int r = 0; r < n; ++r)
        for (int k = 0; k < n; ++k)
            if (rs.pairing[r][k] == 1) plus[r] |= Mask(1) << k;
    std::vector<std::vector<std::vector<int>>> templ;
    for (auto& c : type.parts) templ.push_back(detail::dynkin_template(c));
    std::set<Mask> found;
    const std::size_t ncomp = type.parts.size();
    std::vector<Mask> comp_closure(ncomp, 0);
    std::vector<int> chosen;

    std::function<void(std::size_t, int, Mask)> rec = [&](std::size_t ci, int node, Mask outside) {
        if (ci == ncomp) {
            Mask u = 0;
            for (auto m : comp_closure) u |= m;
            found.insert(u);
            return;
        }
        const auto& tp = templ[ci];
        if (node == static_cast<int>(tp.size())) {
            Mask gen = 0;
            for (std::size_t i = chosen.size() - tp.size(); i < chosen.size(); ++i) gen |= Mask(1) << chosen[i];
            Mask cl = closure(rs, gen);
            // identical consecutive components are produced in increasing order of their lowest root
            if (ci > 0 && type.parts[ci] == type.parts[ci - 1] &&
                std::countr_zero(cl) <= std::countr_zero(comp_closure[ci - 1]))
                return;
            comp_closure[ci] = cl;
            rec(ci + 1, 0, perp(rs, cl) & outside);
            comp_closure[ci] = 0;
            return;
        }
        Mask cand = outside;
        const std::size_t base = chosen.size() - node;
        for (int j = 0; j < node; ++j) {
            int r = chosen[base + j];
            bool adj = std::find(tp[node].begin(), tp[node].end(), j) != tp[node].end();
            cand &= adj ? plus[r] : rs.orth[r];
            cand &= ~(Mask(1) << r);
        }
        for_each_bit(cand, [&](int r) {
            chosen.push_back(r);
            rec(ci, node + 1, outside);
            chosen.pop_back();
        });
    };
    rec(0, 0, rs.all);
    return {found.begin(), found.end()};
}

// In E7 the A5 subsystems form two classes: perpendicular A2 ("A5-") or A1 ("A5+").
inline std::string class_label(const RootSystem& rs, Mask m) {
    SubsystemType t = recognize_type(rs, m);
    std::string s = t.str();
    if (rs.spec == SystemSpec{Family::E, 7} && s == "A5") {
        auto pt = recognize_type(rs, perp(rs, m)).str();
        return pt == "A2" ? "A5-" : "A5+";
    }
    return s;
}

inline std::vector<int> mask_roots(Mask m) {
    std::vector<int> r;
    for_each_bit(m, [&](int i) { r.push_back(i); });
    return r;
}

inline Mask roots_mask(const std::vector<int>& idx) {
    Mask m = 0;
    for (int i : idx) m |= Mask(1) << i;
    return m;
}

inline Mask names_mask(const RootSystem& rs, const std::vector<std::string>& names) {
    Mask m = 0;
    for (auto& n : names) m |= Mask(1) << rs.by_name(n);
    return m;
}

inline std::string mask_names(const RootSystem& rs, Mask m) {
    std::string s = "{";
    bool first = true;
    for_each_bit(m, [&](int i) {
        if (!first) s += ",";
        s += rs.name(i);
        first = false;
    });
    return s + "}";
}

struct D4Record {
    Mask roots;                   // the 12 positive roots
    std::array<Mask, 3> fourtuples;  // orthogonal 4-sets, ordered by lowest root
};

// The three orthogonal fourtuples of a D4 subsystem.
inline std::array<Mask, 3> d4_fourtuples(const RootSystem& rs, Mask d4) {
    std::vector<Mask> parts;
    Mask left = d4;
    while (left) {
        int r = std::countr_zero(left);
        Mask part = (rs.orth[r] & d4) | (Mask(1) << r);
        parts.push_back(part);
        left &= ~part;
    }
    if (parts.size() != 3) throw std::logic_error("not a D4 subsystem");
    for (auto p : parts)
        if (popcount(p) != 4) throw std::logic_error("not a D4 subsystem");
    std::sort(parts.begin(), parts.end(), [](Mask a, Mask b) { return std::countr_zero(a) < std::countr_zero(b); });
    return {parts[0], parts[1], parts[2]};
}

inline std::vector<D4Record> d4_catalog(const RootSystem& rs) {
    std::vector<D4Record> out;
    for (Mask m : enumerate_subsystems(rs, SubsystemType::parse("D4"))) out.push_back({m, d4_fourtuples(rs, m)});
    return out;
}

// Closed-form list of the D4 subsystems of E7, as three families of root-name fourtuples.
struct NamedD4 {
    std::string family;
    std::array<std::array<std::string, 4>, 3> fourtuples;
};

inline std::vector<NamedD4> e7_d4_families() {
    auto nm = [](std::vector<int> idx) {
        std::sort(idx.begin(), idx.end());
        std::string s;
        for (int i : idx) s += std::to_string(i);
        return s;
    };
    std::vector<NamedD4> out;
    std::vector<int> all{1, 2, 3, 4, 5, 6, 7};
    auto pairings = [](std::array<int, 4> q) {
        return std::array<std::array<int, 4>, 3>{{{q[0], q[1], q[2], q[3]}, {q[0], q[2], q[1], q[3]}, {q[0], q[3], q[1], q[2]}}};
    };
    // D(ijkl, a)
    for (int a : all) {
        std::vector<int> rest;
        for (int x : all)
            if (x != a) rest.push_back(x);
        for (int m1 = 0; m1 < 6; ++m1)
            for (int m2 = m1 + 1; m2 < 6; ++m2) {
                std::vector<int> q;
                for (int t = 0; t < 6; ++t)
                    if (t != m1 && t != m2) q.push_back(rest[t]);
                NamedD4 d{"ijkl,a", {}};
                auto ps = pairings({q[0], q[1], q[2], q[3]});
                for (int t = 0; t < 3; ++t) {
                    auto [i, j, k, l] = ps[t];
                    d.fourtuples[t] = {nm({i, j}), nm({k, l}), nm({a, i, j}), nm({a, k, l})};
                }
                out.push_back(d);
            }
    }
    // D(ij, kl, mn) with b the remaining index
    for (int b : all) {
        std::vector<int> rest;
        for (int x : all)
            if (x != b) rest.push_back(x);
        int i = rest[0];
        for (int jx = 1; jx < 6; ++jx) {
            int j = rest[jx];
            std::vector<int> r4;
            for (int t = 1; t < 6; ++t)
                if (t != jx) r4.push_back(rest[t]);
            int k = r4[0];
            for (int lx = 1; lx < 4; ++lx) {
                int l = r4[lx];
                std::vector<int> mn;
                for (int t = 1; t < 4; ++t)
                    if (t != lx) mn.push_back(r4[t]);
                int m = mn[0], n = mn[1];
                NamedD4 d{"ij,kl,mn", {}};
                d.fourtuples[0] = {nm({i, j}), nm({k, l}), nm({m, n}), std::to_string(b)};
                d.fourtuples[1] = {nm({i, k, m}), nm({i, l, n}), nm({j, k, n}), nm({j, l, m})};
                d.fourtuples[2] = {nm({i, k, n}), nm({i, l, m}), nm({j, k, m}), nm({j, l, n})};
                out.push_back(d);
            }
        }
    }
    // D(ab, cd) with ijk the remaining triple
    for (int i = 1; i <= 7; ++i)
        for (int j = i + 1; j <= 7; ++j)
            for (int k = j + 1; k <= 7; ++k) {
                std::vector<int> q;
                for (int x : all)
                    if (x != i && x != j && x != k) q.push_back(x);
                for (int p = 1; p < 4; ++p) {
                    int a = q[0], b = q[p];
                    std::vector<int> cd;
                    for (int t = 1; t < 4; ++t)
                        if (t != p) cd.push_back(q[t]);
                    int c = cd[0], dd = cd[1];
                    NamedD4 d{"ab,cd", {}};
                    const std::array<int, 3> tr{i, j, k};
                    for (int t = 0; t < 3; ++t) {
                        int x = tr[t], y = tr[(t + 1) % 3], z = tr[(t + 2) % 3];
                        d.fourtuples[t] = {std::to_string(x), nm({y, z}), nm({a, b, x}), nm({c, dd, x})};
                    }
                    out.push_back(d);
                }
            }
    return out;
}

// For a type-A_m subsystem, labels each positive root by a pair (i, j), 0 <= i < j <= m,
// so that the root corresponds to eps_i - eps_j in a standard model.
inline std::map<int, std::pair<int, int>> a_type_coordinates(const RootSystem& rs, Mask m) {
    auto simple = subsystem_simple_roots(rs, m);
    const std::size_t k = simple.size();
    std::vector<int> deg(k, 0);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            if (i != j && rs.pairing[simple[i]][simple[j]] != 0) ++deg[i];
    std::vector<int> path;
    std::vector<bool> used(k, false);
    std::size_t start = 0;
    while (start < k && deg[start] > 1) ++start;
    if (start == k) throw std::logic_error("not of type A");
    path.push_back(static_cast<int>(start));
    used[start] = true;
    while (path.size() < k) {
        int cur = path.back(), next = -1;
        for (std::size_t j = 0; j < k; ++j)
            if (!used[j] && rs.pairing[simple[cur]][simple[j]] != 0) next = static_cast<int>(j);
        if (next < 0) throw std::logic_error("not of type A");
        used[next] = true;
        path.push_back(next);
    }
    std::map<int, std::pair<int, int>> out;
    for (std::size_t a = 0; a < k; ++a) {
        IntVec v(rs.dim, 0);
        for (std::size_t b = a; b < k; ++b) {
            v = add(v, rs.roots[simple[path[b]]]);
            auto [idx, sg] = rs.find(v);
            if (idx < 0) throw std::logic_error("not of type A");
            out[idx] = {static_cast<int>(a), static_cast<int>(b + 1)};
        }
    }
    return out;
}

// Sets of k pairwise orthogonal positive roots, each as a mask.
inline std::vector<Mask> orthogonal_root_sets(const RootSystem& rs, int k) {
    std::vector<Mask> out;
    std::function<void(Mask, Mask, int)> rec = [&](Mask chosen, Mask cand, int left) {
        if (left == 0) {
            out.push_back(chosen);
            return;
        }
        for_each_bit(cand, [&](int r) {
            // candidates above r only, so each set is produced once
            Mask next = cand & rs.orth[r] & ~((Mask(2) << r) - 1);
            rec(chosen | (Mask(1) << r), next, left - 1);
        });
    };
    rec(0, rs.all, k);
    return out;
}

// Number of k-dimensional totally isotropic subspaces of F_2^{2m} with the standard symplectic
// form, by enumerating spanning sets.
inline std::size_t isotropic_subspace_count(int m, int k) {
    const std::uint32_t n = 1u << (2 * m);
    auto form = [m](std::uint32_t x, std::uint32_t y) {
        // sum over i of x_i y_{i+m} + x_{i+m} y_i
        std::uint32_t lo = (1u << m) - 1;
        return (std::popcount(((x & lo) & (y >> m)) ^ ((x >> m) & (y & lo))) & 1u);
    };
    std::set<std::vector<bool>> spaces;
    std::function<void(std::vector<std::uint32_t>&, std::uint32_t)> rec = [&](std::vector<std::uint32_t>& span, std::uint32_t from) {
        if (static_cast<int>(std::bit_width(span.size())) - 1 == k) {
            std::vector<bool> key(n, false);
            for (auto v : span) key[v] = true;
            spaces.insert(key);
            return;
        }
        for (std::uint32_t v = from; v < n; ++v) {
            if (std::find(span.begin(), span.end(), v) != span.end()) continue;
            bool iso = true;
            for (auto u : span)
                if (form(u, v)) iso = false;
            if (!iso) continue;
            std::vector<std::uint32_t> next = span;
            for (auto u : span) next.push_back(u ^ v);
            rec(next, v + 1);
        }
    };
    std::vector<std::uint32_t> zero{0};
    rec(zero, 1);
    return spaces.size();
}

}  // namespace adefans
