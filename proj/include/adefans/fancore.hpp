#pragma once

#include "lp.hpp"
#include "rcomplex.hpp"

#include <optional>
#include <unordered_set>

namespace adefans {

struct RayLabel {
    Mask theta = 0;
    std::string type;
    std::vector<int> parts;  // rays of a coarser fan summed to produce this ray
    bool operator==(const RayLabel&) const = default;
};

struct Fan {
    SystemSpec system{Family::E, 6};
    int lattice_rank = 0;
    std::string construction;
    std::vector<IntVec> rays;
    std::vector<RayLabel> labels;
    std::vector<std::vector<int>> cones;  // maximal cones as sorted ray indices
    std::vector<IntMatrix> facets;        // inward facet normals, only for non-simplicial cones

    bool operator==(const Fan&) const = default;

    IntMatrix generators(const std::vector<int>& cone) const {
        IntMatrix g;
        for (int r : cone) g.push_back(rays[r]);
        return g;
    }
};

inline Fan build_F(const RComplex& R) {
    Fan f;
    f.system = R.rs->spec;
    f.lattice_rank = R.lat->rank();
    f.construction = "F";
    for (auto& v : R.vertices) {
        f.rays.push_back(v.ray);
        f.labels.push_back({v.theta, v.type, {}});
    }
    f.cones = R.maximal_simplices();
    f.facets.assign(f.cones.size(), {});
    return f;
}

// ---------------------------------------------------------------- D4 units

struct UnitTable {
    struct Unit {
        int d4, i, j;
        IntVec m;  // as a function on the positive roots
    };
    std::vector<D4Record> catalog;
    std::vector<Unit> units;                        // six ordered pairs per D4
    std::vector<std::vector<std::int8_t>> value;    // units x R-vertices: <u, zeta>

    int unit_index(int d4, int i, int j) const {
        static constexpr int slot[3][3] = {{-1, 0, 1}, {2, -1, 3}, {4, 5, -1}};
        return 6 * d4 + slot[i][j];
    }
};

inline UnitTable build_units(const RComplex& R) {
    UnitTable t;
    t.catalog = d4_catalog(*R.rs);
    for (int k = 0; k < static_cast<int>(t.catalog.size()); ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (i != j) t.units.push_back({k, i, j, d4_unit(*R.rs, t.catalog[k], i, j)});
    t.value.assign(t.units.size(), std::vector<std::int8_t>(R.size()));
    for (std::size_t u = 0; u < t.units.size(); ++u)
        for (int v = 0; v < R.size(); ++v)
            t.value[u][v] = static_cast<std::int8_t>(R.lat->pair(t.units[u].m, R.vertices[v].ray));
    return t;
}

// Unit permutation induced by a simple reflection.
inline std::vector<int> unit_action(const RootSystem& rs, const UnitTable& t, int gen) {
    std::unordered_map<Mask, int> d4_of;
    for (int k = 0; k < static_cast<int>(t.catalog.size()); ++k) d4_of[t.catalog[k].roots] = k;
    std::vector<int> perm(t.units.size());
    for (std::size_t u = 0; u < t.units.size(); ++u) {
        auto& un = t.units[u];
        int k2 = d4_of.at(rs.apply_simple(gen, t.catalog[un.d4].roots));
        auto img = [&](int i) {
            Mask f = rs.apply_simple(gen, t.catalog[un.d4].fourtuples[i]);
            for (int a = 0; a < 3; ++a)
                if (t.catalog[k2].fourtuples[a] == f) return a;
            throw std::logic_error("fourtuple image not found");
        };
        perm[u] = t.unit_index(k2, img(un.i), img(un.j));
    }
    return perm;
}

// Kronecker dual basis made of D4 units for every ray of a cone. Entry k lists every unit
// u with <u, ray_l> = delta_kl on the cone.
inline std::vector<std::vector<int>> dual_basis_candidates(const UnitTable& t, const std::vector<int>& cone) {
    std::vector<std::vector<int>> out(cone.size());
    for (std::size_t u = 0; u < t.units.size(); ++u) {
        int one = -1;
        bool ok = true;
        for (std::size_t k = 0; k < cone.size() && ok; ++k) {
            int v = t.value[u][cone[k]];
            if (v == 0) continue;
            if (v == 1 && one < 0) one = static_cast<int>(k);
            else ok = false;
        }
        if (ok && one >= 0) out[one].push_back(static_cast<int>(u));
    }
    return out;
}

// Exact check that the listed units are dual to the cone's rays.
inline bool is_dual_basis(const UnitTable& t, const std::vector<int>& cone, const std::vector<int>& units) {
    for (std::size_t k = 0; k < cone.size(); ++k)
        for (std::size_t l = 0; l < cone.size(); ++l)
            if (t.value[units[k]][cone[l]] != (k == l ? 1 : 0)) return false;
    return true;
}

// The unit u(F1, F2) for two fourtuples of one D4, or -1.
inline int find_unit(const UnitTable& t, Mask f1, Mask f2) {
    for (std::size_t u = 0; u < t.units.size(); ++u) {
        const auto& un = t.units[u];
        const auto& d = t.catalog[un.d4];
        if (d.fourtuples[un.i] == f1 && d.fourtuples[un.j] == f2) return static_cast<int>(u);
    }
    return -1;
}

// Units dual to the ray `v` of a cone, i.e. equal to 1 on v and 0 on the other rays.
inline std::vector<int> dual_units_of_ray(const UnitTable& t, const std::vector<int>& cone, int v) {
    auto pos = std::find(cone.begin(), cone.end(), v);
    if (pos == cone.end()) return {};
    return dual_basis_candidates(t, cone)[pos - cone.begin()];
}

// ---------------------------------------------------------------- diagrams

struct Diagram {
    std::string kind;             // "pentadiagram", "tetradiagram", "ngon"
    std::vector<int> roots;       // vertex -> positive root
    std::vector<std::pair<int, int>> edges;

    Mask mask() const {
        Mask m = 0;
        for (int r : roots) m |= Mask(1) << r;
        return m;
    }
};

inline std::vector<std::pair<int, int>> diagram_template(SystemSpec s, std::string& kind) {
    std::vector<std::pair<int, int>> edges;
    if (s == SystemSpec{Family::E, 6}) {
        kind = "pentadiagram";
        // Petersen graph: 2-subsets of {0..4}, adjacent when disjoint
        std::vector<std::pair<int, int>> sub;
        for (int a = 0; a < 5; ++a)
            for (int b = a + 1; b < 5; ++b) sub.push_back({a, b});
        for (int i = 0; i < 10; ++i)
            for (int j = i + 1; j < 10; ++j) {
                auto [a, b] = sub[i];
                auto [c, d] = sub[j];
                if (a != c && a != d && b != c && b != d) edges.push_back({i, j});
            }
    } else if (s == SystemSpec{Family::E, 7}) {
        kind = "tetradiagram";
        // vertices 0..3, then midpoints of 01 02 03 12 13 23
        int mid = 4;
        for (int a = 0; a < 4; ++a)
            for (int b = a + 1; b < 4; ++b) {
                edges.push_back({a, mid});
                edges.push_back({b, mid});
                ++mid;
            }
    } else if (s.family == Family::D) {
        kind = "ngon";
        for (int i = 0; i < s.rank; ++i) edges.push_back({i, (i + 1) % s.rank});
    } else {
        throw std::invalid_argument("no diagram for " + system_name(s));
    }
    return edges;
}

// Searches for roots realising the diagram graph: adjacent vertices pair nontrivially,
// non-adjacent ones are orthogonal. `pins` fixes some vertices; `accept` filters solutions.
inline std::optional<Diagram> find_diagram(const RootSystem& rs, const std::vector<std::pair<int, int>>& pins = {},
                                           const std::function<bool(const Diagram&)>& accept = {}) {
    Diagram d;
    d.edges = diagram_template(rs.spec, d.kind);
    int nv = 0;
    for (auto [a, b] : d.edges) nv = std::max({nv, a + 1, b + 1});
    std::vector<std::vector<bool>> adj(nv, std::vector<bool>(nv, false));
    for (auto [a, b] : d.edges) adj[a][b] = adj[b][a] = true;
    std::vector<int> assign(nv, -1);
    for (auto [v, r] : pins) assign[v] = r;
    std::optional<Diagram> result;
    std::function<bool(int)> rec = [&](int v) -> bool {
        if (v == nv) {
            d.roots = assign;
            if (accept && !accept(d)) return false;
            result = d;
            return true;
        }
        auto fits = [&](int r) {
            for (int u = 0; u < nv; ++u) {
                if (u == v || assign[u] < 0) continue;
                if (assign[u] == r) return false;
                bool nz = rs.pairing[assign[u]][r] != 0;
                if (nz != adj[u][v]) return false;
            }
            return true;
        };
        if (assign[v] >= 0) return fits(assign[v]) && rec(v + 1);
        for (int r = 0; r < rs.size(); ++r) {
            if (!fits(r)) continue;
            assign[v] = r;
            if (rec(v + 1)) return true;
            assign[v] = -1;
        }
        return false;
    };
    rec(0);
    return result;
}

// The n-gon in D_n for a cyclic order of the coordinate indices.
inline Diagram ngon_diagram(const RootSystem& rs, const std::vector<int>& cyclic) {
    Diagram d;
    d.edges = diagram_template(rs.spec, d.kind);
    const int n = rs.spec.rank;
    for (int i = 0; i < n; ++i) {
        IntVec v(rs.dim, 0);
        v[cyclic[i]] = 1;
        v[cyclic[(i + 1) % n]] = -1;
        d.roots.push_back(rs.find(v).first);
    }
    return d;
}

inline std::vector<std::vector<bool>> diagram_adjacency(const RootSystem& rs, const std::vector<int>& roots) {
    const std::size_t n = roots.size();
    std::vector<std::vector<bool>> adj(n, std::vector<bool>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) adj[i][j] = i != j && rs.pairing[roots[i]][roots[j]] != 0;
    return adj;
}

// Ray subsystems whose Dynkin diagram is an induced subdiagram of the diagram.
inline std::vector<Mask> diagram_subsystems(const RootSystem& rs, const std::vector<int>& roots) {
    const int n = static_cast<int>(roots.size());
    auto adj = diagram_adjacency(rs, roots);
    std::set<Mask> out;
    for (auto& tname : ray_types(rs.spec)) {
        auto type = SubsystemType::parse(tname);
        std::vector<int> want;
        for (auto& c : type.parts) want.push_back(c.rank);
        std::sort(want.begin(), want.end());
        const int size = type.rank();
        for (std::uint32_t s = 1; s < (1u << n); ++s) {
            if (std::popcount(s) != size) continue;
            // components of the induced subgraph must be paths of the wanted lengths
            std::vector<int> seen(n, 0), lens;
            bool ok = true;
            for (int v = 0; v < n && ok; ++v) {
                if (!(s >> v & 1) || seen[v]) continue;
                std::vector<int> comp{v};
                seen[v] = 1;
                int edges = 0;
                for (std::size_t h = 0; h < comp.size(); ++h)
                    for (int u = 0; u < n; ++u)
                        if ((s >> u & 1) && adj[comp[h]][u]) {
                            ++edges;
                            if (!seen[u]) {
                                seen[u] = 1;
                                comp.push_back(u);
                            }
                        }
                edges /= 2;
                if (edges != static_cast<int>(comp.size()) - 1) ok = false;
                for (int x : comp) {
                    int deg = 0;
                    for (int u = 0; u < n; ++u)
                        if ((s >> u & 1) && adj[x][u]) ++deg;
                    if (deg > 2) ok = false;
                }
                lens.push_back(static_cast<int>(comp.size()));
            }
            if (!ok) continue;
            std::sort(lens.begin(), lens.end());
            if (lens != want) continue;
            Mask gen = 0;
            for (int v = 0; v < n; ++v)
                if (s >> v & 1) gen |= Mask(1) << roots[v];
            out.insert(closure(rs, gen));
        }
    }
    return {out.begin(), out.end()};
}

// The A1 orthogonal to the six edge midpoints of a tetradiagram.
inline int tetradiagram_extra_root(const RootSystem& rs, const std::vector<int>& roots) {
    auto adj = diagram_adjacency(rs, roots);
    Mask mids = 0;
    for (std::size_t v = 0; v < roots.size(); ++v) {
        int deg = 0;
        for (std::size_t u = 0; u < roots.size(); ++u) deg += adj[v][u];
        if (deg == 2) mids |= Mask(1) << roots[v];
    }
    Mask cand = perp(rs, mids);
    if (popcount(cand) != 1) throw std::logic_error("expected a unique root orthogonal to the midpoints");
    return std::countr_zero(cand);
}

// Rays (R-vertex indices) of the G cone of a diagram; `extended` adds the extra E7 ray.
inline std::vector<int> g_cone(const RComplex& R, const Diagram& d, bool extended) {
    std::vector<int> cone;
    const RootSystem& rs = *R.rs;
    if (rs.spec.family == Family::D) {
        // chords of the n-gon: cyclic intervals of the index cycle
        const int n = rs.spec.rank;
        std::vector<int> cyc;
        // recover the index cycle from consecutive roots
        std::vector<std::vector<int>> nb(n);
        for (int r : d.roots) {
            std::vector<int> idx;
            for (int i = 0; i < n; ++i)
                if (rs.roots[r][i] != 0) idx.push_back(i);
            nb[idx[0]].push_back(idx[1]);
            nb[idx[1]].push_back(idx[0]);
        }
        cyc.push_back(0);
        int prev = -1;
        while (static_cast<int>(cyc.size()) < n) {
            int cur = cyc.back(), next = nb[cur][0] != prev ? nb[cur][0] : nb[cur][1];
            prev = cur;
            cyc.push_back(next);
        }
        for (int start = 0; start < n; ++start)
            for (int len = 2; len <= n - 2; ++len) {
                std::uint32_t I = 0;
                for (int t = 0; t < len; ++t) I |= 1u << cyc[(start + t) % n];
                std::uint32_t comp = ((1u << n) - 1) & ~I;
                std::uint32_t small = std::popcount(I) < std::popcount(comp) ? I
                                    : std::popcount(I) > std::popcount(comp) ? comp
                                    : ((I & 1) ? I : comp);
                for (int v = 0; v < R.size(); ++v)
                    if (R.vertices[v].bipartition == small) cone.push_back(v);
            }
    } else {
        for (Mask m : diagram_subsystems(rs, d.roots)) {
            int v = R.find(m);
            if (v < 0) throw std::logic_error("diagram subsystem is not a ray");
            cone.push_back(v);
        }
        if (extended) cone.push_back(R.find(Mask(1) << tetradiagram_extra_root(rs, d.roots)));
    }
    std::sort(cone.begin(), cone.end());
    cone.erase(std::unique(cone.begin(), cone.end()), cone.end());
    return cone;
}

namespace detail {

// Weyl orbit of the seed diagram with its cone carried along by vertex permutations.
// `seed_units` (optional, aligned with the seed cone) is carried along by unit permutations.
struct GOrbitEntry {
    Mask diagram = 0;
    std::vector<int> cone;   // sorted R-vertex indices
    std::vector<int> units;  // dual units aligned with `cone`, when requested
};

inline std::vector<GOrbitEntry> g_orbit_units(const RComplex& R, bool extended, const UnitTable* t) {
    const RootSystem& rs = *R.rs;
    auto seed = find_diagram(rs);
    if (!seed) throw std::logic_error("no diagram found");
    GOrbitEntry first{seed->mask(), g_cone(R, *seed, extended), {}};
    if (t) {
        auto cand = dual_basis_candidates(*t, first.cone);
        for (auto& c : cand) first.units.push_back(c.empty() ? -1 : c[0]);
    }
    const int ngen = static_cast<int>(rs.simple.size());
    std::vector<std::vector<int>> vperm(ngen), uperm(ngen);
    for (int g = 0; g < ngen; ++g) {
        vperm[g] = R.simple_action(g);
        if (t) uperm[g] = unit_action(rs, *t, g);
    }
    std::vector<GOrbitEntry> out{first};
    std::unordered_map<Mask, std::size_t> seen{{first.diagram, 0}};
    for (std::size_t h = 0; h < out.size(); ++h)
        for (int g = 0; g < ngen; ++g) {
            Mask img = rs.apply_simple(g, out[h].diagram);
            if (seen.count(img)) continue;
            std::vector<std::pair<int, int>> pairs;
            for (std::size_t k = 0; k < out[h].cone.size(); ++k) {
                int u = out[h].units.empty() || out[h].units[k] < 0 ? -1 : uperm[g][out[h].units[k]];
                pairs.push_back({vperm[g][out[h].cone[k]], u});
            }
            std::sort(pairs.begin(), pairs.end());
            GOrbitEntry e{img, {}, {}};
            for (auto [v, u] : pairs) {
                e.cone.push_back(v);
                if (t) e.units.push_back(u);
            }
            seen[img] = out.size();
            out.push_back(std::move(e));
        }
    return out;
}

inline std::vector<std::pair<Mask, std::vector<int>>> g_orbit(const RComplex& R, bool extended, std::nullptr_t) {
    std::vector<std::pair<Mask, std::vector<int>>> out;
    for (auto& e : g_orbit_units(R, extended, nullptr)) out.push_back({e.diagram, std::move(e.cone)});
    return out;
}

}  // namespace detail

// All G cones, one per diagram in the Weyl orbit.
inline std::vector<std::vector<int>> g_cones(const RComplex& R, bool extended) {
    const RootSystem& rs = *R.rs;
    std::vector<std::vector<int>> cones;
    if (rs.spec.family == Family::D) {
        const int n = rs.spec.rank;
        std::vector<int> perm(n);
        for (int i = 0; i < n; ++i) perm[i] = i;
        // cyclic orders up to rotation and reflection: fix 0 first and perm[1] < perm[n-1]
        do {
            if (perm[0] != 0) break;
            if (perm[1] > perm[n - 1]) continue;
            cones.push_back(g_cone(R, ngon_diagram(rs, perm), false));
        } while (std::next_permutation(perm.begin() + 1, perm.end()));
    } else {
        for (auto& [m, cone] : detail::g_orbit(R, extended, nullptr)) cones.push_back(cone);
    }
    std::sort(cones.begin(), cones.end());
    return cones;
}

inline Fan build_G(const RComplex& R, bool extended) {
    Fan f;
    f.system = R.rs->spec;
    f.lattice_rank = R.lat->rank();
    f.construction = extended ? "G'" : "G";
    for (auto& v : R.vertices) {
        f.rays.push_back(v.ray);
        f.labels.push_back({v.theta, v.type, {}});
    }
    f.cones = g_cones(R, extended);
    f.facets.assign(f.cones.size(), {});
    return f;
}

// ---------------------------------------------------------------- certificates

struct SimplicialReport {
    std::size_t cones = 0;
    std::size_t strict = 0;
    std::vector<std::size_t> failures;
    bool ok() const { return failures.empty(); }
};

inline SimplicialReport strictly_simplicial(const Fan& f) {
    SimplicialReport r;
    for (std::size_t c = 0; c < f.cones.size(); ++c) {
        ++r.cones;
        if (!f.facets[c].empty() && f.facets[c].size() != f.cones[c].size()) {
            r.failures.push_back(c);
            continue;
        }
        if (rows_unimodular(f.generators(f.cones[c]))) ++r.strict;
        else r.failures.push_back(c);
    }
    return r;
}

struct GConeReport {
    std::size_t cones = 0;
    std::size_t certified = 0;   // dual basis of D4 units verified, hence det = +-1
    std::size_t unique = 0;      // the dual unit of every ray is unique in the catalog
    bool ok() const { return certified == cones; }
};

// Dual-basis certificate for every G cone. Units are propagated along the Weyl orbit and
// then checked exactly on each cone; uniqueness is checked on `unique_checks` cones.
inline GConeReport certify_g_cones(const RComplex& R, const UnitTable& t, bool extended, std::size_t unique_checks = 4) {
    GConeReport rep;
    const RootSystem& rs = *R.rs;
    if (rs.spec.family == Family::D) {
        auto cones = g_cones(R, extended);
        rep.cones = cones.size();
        for (std::size_t c = 0; c < cones.size(); ++c) {
            auto cand = dual_basis_candidates(t, cones[c]);
            std::vector<int> units;
            bool uniq = true, have = true;
            for (auto& v : cand) {
                if (v.empty()) have = false;
                else units.push_back(v[0]);
                if (v.size() != 1) uniq = false;
            }
            if (have && is_dual_basis(t, cones[c], units)) ++rep.certified;
            if (uniq) ++rep.unique;
        }
        return rep;
    }
    std::size_t checked_unique = 0;
    auto orbit = detail::g_orbit_units(R, extended, &t);
    rep.cones = orbit.size();
    for (auto& e : orbit) {
        bool have = std::find(e.units.begin(), e.units.end(), -1) == e.units.end();
        if (have && is_dual_basis(t, e.cone, e.units)) ++rep.certified;
        if (checked_unique < unique_checks) {
            bool uniq = true;
            for (auto& v : dual_basis_candidates(t, e.cone)) uniq &= v.size() == 1;
            if (uniq) ++rep.unique;
            ++checked_unique;
        }
    }
    return rep;
}

struct FanCheckReport {
    std::size_t pairs = 0;
    std::size_t lp_solves = 0;
    std::vector<std::pair<std::size_t, std::size_t>> bad;
    bool ok() const { return bad.empty(); }
};

// Pairwise check that maximal cones meet in common faces. With `sample` > 0 only that many
// random pairs (half of them sharing a ray) are examined.
inline FanCheckReport fan_pairwise(const Fan& f, std::size_t sample = 0, std::uint64_t seed = 1) {
    FanCheckReport r;
    std::vector<IntMatrix> gens;
    for (auto& c : f.cones) gens.push_back(f.generators(c));
    auto check = [&](std::size_t a, std::size_t b) {
        ++r.pairs;
        IntMatrix all = gens[a];
        for (auto& g : gens[b])
            if (std::find(gens[a].begin(), gens[a].end(), g) == gens[a].end()) all.push_back(g);
        if (rank_mod_p(all) == all.size()) return;
        ++r.lp_solves;
        if (!cones_meet_in_common_face(gens[a], gens[b])) r.bad.push_back({a, b});
    };
    const std::size_t n = f.cones.size();
    if (sample == 0) {
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a + 1; b < n; ++b) check(a, b);
        return r;
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::map<int, std::vector<std::size_t>> containing;
    for (std::size_t c = 0; c < n; ++c)
        for (int v : f.cones[c]) containing[v].push_back(c);
    for (std::size_t s = 0; s < sample; ++s) {
        std::size_t a = pick(rng), b;
        if (s % 2 == 0) {
            b = pick(rng);
        } else {
            const auto& list = containing[f.cones[a][rng() % f.cones[a].size()]];
            b = list[rng() % list.size()];
        }
        if (a != b) check(std::min(a, b), std::max(a, b));
    }
    return r;
}

// D4 projection classes of a vector of N: 0 for the zero image, 1..3 for the ray through
// psi(F_k), -1 for anything else.
inline int d4_class(const UnitTable& t, const NLattice& lat, int d4, const IntVec& v) {
    std::int64_t a = lat.pair(t.units[t.unit_index(d4, 1, 2)].m, v);  // vanishes on ray 1
    std::int64_t b = lat.pair(t.units[t.unit_index(d4, 0, 2)].m, v);  // vanishes on ray 2
    std::int64_t c = lat.pair(t.units[t.unit_index(d4, 0, 1)].m, v);  // vanishes on ray 3
    // <u(F_i,F_j), psi(F_k)> = 4 (delta_ik - delta_jk)
    if (a == 0 && b == 0 && c == 0) return 0;
    if (a == 0 && b > 0 && c > 0) return 1;
    if (b == 0 && a > 0 && c < 0) return 2;
    if (c == 0 && a < 0 && b < 0) return 3;
    return -1;
}

struct IntersectionReport {
    std::size_t simplices = 0;      // simplices examined
    std::size_t convex_fail = 0;    // images not inside a single ray of F(D4)
    std::size_t span_fail = 0;      // annihilator not spanned by the local ones
    std::size_t orbits = 0;         // Weyl orbits of maximal simplices (0 when exhaustive)
    bool exhaustive = false;
    bool ok() const { return convex_fail == 0 && span_fail == 0; }
};

namespace detail {

// Checks one simplex: D4 images are compatible and the local annihilators span Ann(gamma).
inline void check_simplex(const RComplex& R, const UnitTable& t, const std::vector<int>& gamma, IntersectionReport& rep) {
    const NLattice& lat = *R.lat;
    ++rep.simplices;
    const std::size_t target = static_cast<std::size_t>(lat.rank()) - gamma.size();
    ModPSpan span(lat.rank());
    bool convex = true;
    // D4s whose image is zero contribute two units, so add those first
    std::vector<std::pair<int, int>> local;  // (d4, class)
    for (int k = 0; k < static_cast<int>(t.catalog.size()); ++k) {
        int cls = 0;
        for (int v : gamma) {
            int c = d4_class(t, lat, k, R.vertices[v].ray);
            if (c < 0 || (c > 0 && cls > 0 && c != cls)) {
                convex = false;
                break;
            }
            if (c > 0) cls = c;
        }
        if (!convex) break;
        local.push_back({k, cls});
    }
    if (!convex) {
        ++rep.convex_fail;
        return;
    }
    std::stable_sort(local.begin(), local.end(), [](auto& a, auto& b) { return (a.second == 0) > (b.second == 0); });
    for (auto [k, cls] : local) {
        if (span.rank() == target) break;
        if (cls == 0) {
            span.insert(lat.m_coords(t.units[t.unit_index(k, 0, 1)].m));
            span.insert(lat.m_coords(t.units[t.unit_index(k, 1, 2)].m));
        } else {
            int a = cls == 1 ? 1 : 0, b = cls == 3 ? 1 : 2;
            span.insert(lat.m_coords(t.units[t.unit_index(k, a, b)].m));
        }
    }
    // rank over F_p is a lower bound for the rank over Q, which is at most the target
    if (span.rank() != target) ++rep.span_fail;
}

}  // namespace detail

// Certificate that F is the intersection of the pullbacks of the D4 fans. By default one
// maximal simplex per Weyl orbit is examined together with all its faces; the conditions are
// Weyl invariant. `exhaustive` examines every simplex.
inline IntersectionReport intersection_fan_certificate(const RComplex& R, const UnitTable& t, bool exhaustive = false) {
    IntersectionReport rep;
    rep.exhaustive = exhaustive;
    if (exhaustive) {
        for (auto& s : R.all_simplices()) detail::check_simplex(R, t, s, rep);
        return rep;
    }
    auto maxs = R.maximal_simplices();
    const int ngen = static_cast<int>(R.rs->simple.size());
    std::vector<std::vector<int>> vperm(ngen);
    for (int g = 0; g < ngen; ++g) vperm[g] = R.simple_action(g);
    std::unordered_set<std::vector<int>, IntVecHash> seen_faces;
    std::unordered_map<std::vector<int>, int, IntVecHash> index;
    for (std::size_t i = 0; i < maxs.size(); ++i) index[maxs[i]] = static_cast<int>(i);
    std::vector<bool> visited(maxs.size(), false);
    for (std::size_t s = 0; s < maxs.size(); ++s) {
        if (visited[s]) continue;
        ++rep.orbits;
        std::vector<std::size_t> q{s};
        visited[s] = true;
        for (std::size_t h = 0; h < q.size(); ++h)
            for (int g = 0; g < ngen; ++g) {
                std::vector<int> img;
                for (int v : maxs[q[h]]) img.push_back(vperm[g][v]);
                std::sort(img.begin(), img.end());
                auto it = index.find(img);
                if (it == index.end()) {
                    ++rep.convex_fail;  // the complex is not Weyl invariant
                    continue;
                }
                if (!visited[it->second]) {
                    visited[it->second] = true;
                    q.push_back(it->second);
                }
            }
        const auto& rep_simplex = maxs[s];
        const std::size_t k = rep_simplex.size();
        for (std::uint32_t sub = 1; sub < (1u << k); ++sub) {
            std::vector<int> face;
            for (std::size_t i = 0; i < k; ++i)
                if (sub >> i & 1) face.push_back(rep_simplex[i]);
            if (seen_faces.insert(face).second) detail::check_simplex(R, t, face, rep);
        }
    }
    return rep;
}

// Link of a vertex: vertices compatible with it, and simplices of the link.
inline std::vector<std::vector<int>> link(const RComplex& R, int v) {
    std::vector<std::vector<int>> out;
    for (auto& s : R.maximal_simplices()) {
        if (!std::binary_search(s.begin(), s.end(), v)) continue;
        std::vector<int> rest;
        for (int u : s)
            if (u != v) rest.push_back(u);
        out.push_back(rest);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace adefans
