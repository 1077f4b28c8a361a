#include <gtest/gtest.h>

#include <set>

#include "adefans/fanmaps.hpp"

using namespace adefans;

namespace {

const FanSystem& fans(SystemSpec s) {
    static std::map<std::string, std::unique_ptr<FanSystem>> cache;
    auto& p = cache[system_name(s)];
    if (!p) p = std::make_unique<FanSystem>(FanSystem::make(s));
    return *p;
}

const UnitTable& units(SystemSpec s) {
    static std::map<std::string, std::unique_ptr<UnitTable>> cache;
    auto& p = cache[system_name(s)];
    if (!p) p = std::make_unique<UnitTable>(build_units(*fans(s).R));
    return *p;
}

constexpr SystemSpec kD4{Family::D, 4}, kD5{Family::D, 5}, kD6{Family::D, 6}, kE6{Family::E, 6}, kE7{Family::E, 7};

// Maximal cliques of the compatibility graph by Bron-Kerbosch, independent of the complex's own search.
std::set<std::vector<int>> maximal_cliques(const RComplex& R) {
    std::set<std::vector<int>> out;
    const int n = R.size();
    std::function<void(std::vector<int>&, std::vector<int>, std::vector<int>)> bk = [&](std::vector<int>& cur, std::vector<int> p,
                                                                                      std::vector<int> x) {
        if (p.empty() && x.empty()) {
            auto c = cur;
            std::sort(c.begin(), c.end());
            out.insert(c);
            return;
        }
        while (!p.empty()) {
            int v = p.back();
            p.pop_back();
            std::vector<int> p2, x2;
            for (int u : p)
                if (R.compatible(u, v)) p2.push_back(u);
            for (int u : x)
                if (R.compatible(u, v)) x2.push_back(u);
            cur.push_back(v);
            bk(cur, p2, x2);
            cur.pop_back();
            x.push_back(v);
        }
    };
    std::vector<int> cur, all(n);
    std::iota(all.begin(), all.end(), 0);
    bk(cur, all, {});
    return out;
}

std::map<std::string, int> type_counts(const RComplex& R, const std::vector<int>& cone) {
    std::map<std::string, int> m;
    for (int v : cone) ++m[R.vertices[v].type];
    return m;
}

int unit_of(const RootSystem& rs, const UnitTable& t, std::vector<std::string> f1, std::vector<std::string> f2) {
    return find_unit(t, names_mask(rs, f1), names_mask(rs, f2));
}

bool unique_dual(const UnitTable& t, const std::vector<int>& cone, int v, int unit) {
    auto c = dual_units_of_ray(t, cone, v);
    return unit >= 0 && c.size() == 1 && c[0] == unit;
}

// The E7 tetradiagram fixed by its four vertices and six edge midpoints.
Diagram e7_witness_diagram(const RootSystem& rs) {
    auto id = [&](const char* s) { return rs.by_name(s); };
    auto d = find_diagram(rs, {{0, id("135")}, {1, id("457")}, {2, id("237")}, {3, id("124")}, {4, id("157")},
                               {5, id("235")}, {7, id("456")}, {8, id("126")}, {9, id("367")}});
    if (!d) throw std::logic_error("pinned tetradiagram not found");
    return *d;
}

}  // namespace

TEST(RayComplex, DnVerticesAreBipartitions) {
    for (int n = 4; n <= 8; ++n) {
        const auto& f = fans({Family::D, n});
        // bipartitions of an n-set with both parts of size at least 2
        EXPECT_EQ(f.R->size(), ((1 << n) - 2 - 2 * n) / 2) << n;
        std::set<std::uint32_t> seen;
        for (const auto& v : f.R->vertices) {
            int a = std::popcount(v.bipartition);
            EXPECT_GE(a, 2);
            EXPECT_LE(a, n - a);
            seen.insert(v.bipartition);
        }
        EXPECT_EQ(static_cast<int>(seen.size()), f.R->size());
    }
    EXPECT_EQ(fans(kD4).F.lattice_rank, 2);
    EXPECT_EQ(fans(kD5).F.rays.size(), 10u);
}

TEST(RayComplex, E6RaysAreRootsAndA2Cubed) {
    const auto& f = fans(kE6);
    auto a2cubed = enumerate_subsystems(*f.rs, SubsystemType::parse("A2xA2xA2"));
    EXPECT_EQ(f.F.rays.size(), 36u + a2cubed.size());
    std::set<IntVec> distinct(f.F.rays.begin(), f.F.rays.end());
    EXPECT_EQ(distinct.size(), f.F.rays.size());
    for (const auto& r : f.F.rays) EXPECT_EQ(content(r), 1);
}

TEST(RayComplex, MaximalSimplicesAreMaximalCliques) {
    for (auto s : {kD5, kD6, kE6}) {
        const auto& R = *fans(s).R;
        const auto& mine = R.maximal_simplices();
        EXPECT_EQ(std::set<std::vector<int>>(mine.begin(), mine.end()), maximal_cliques(R)) << system_name(s);
    }
}

TEST(RayComplex, FanoRuleExcludesSevenOrthogonalA1) {
    const auto& f = fans(kE7);
    EXPECT_TRUE(f.R->fano_rule);
    std::size_t max_a1 = 0;
    for (const auto& c : f.F.cones) max_a1 = std::max<std::size_t>(max_a1, type_counts(*f.R, c)["A1"]);
    EXPECT_LT(max_a1, 7u);
    // a seven-set of orthogonal roots is a clique but not a simplex
    auto sevens = orthogonal_root_sets(*f.rs, 7);
    ASSERT_FALSE(sevens.empty());
    std::vector<int> s;
    for_each_bit(sevens[0], [&](int r) { s.push_back(f.R->find(Mask(1) << r)); });
    EXPECT_TRUE(f.R->contains_fano(s));
    EXPECT_FALSE(f.R->is_simplex(s));
}

TEST(RayComplex, Links) {
    const auto& e7 = fans(kE7);
    int a7 = -1;
    for (int v = 0; v < e7.R->size() && a7 < 0; ++v)
        if (e7.R->vertices[v].type == "A7") a7 = v;
    ASSERT_GE(a7, 0);
    std::set<int> verts;
    for (auto& s : link(*e7.R, a7)) verts.insert(s.begin(), s.end());
    // boundary divisors of M_{0,8}: bipartitions of 8 points with parts of size at least 2
    EXPECT_EQ(verts.size(), (1u << 7) - 1 - 8);
    const auto& e6 = fans(kE6);
    verts.clear();
    for (auto& s : link(*e6.R, e6.R->find(Mask(1)))) verts.insert(s.begin(), s.end());
    // 15 A1 and 10 A2xA2 inside the A5 orthogonal to a root
    EXPECT_EQ(verts.size(), 25u);
}

TEST(Simpliciality, EveryConeOfFIsStrictlySimplicial) {
    for (auto s : {kD4, kD5, kD6, SystemSpec{Family::D, 7}, SystemSpec{Family::D, 8}, kE6, kE7}) {
        auto r = strictly_simplicial(fans(s).F);
        EXPECT_TRUE(r.ok()) << system_name(s);
        EXPECT_EQ(r.strict, fans(s).F.cones.size());
    }
}

TEST(Simpliciality, NonUnimodularConeIsRejected) {
    Fan f;
    f.system = kD4;
    f.lattice_rank = 2;
    f.rays = {{1, 0}, {1, 2}};
    f.labels.resize(2);
    f.cones = {{0, 1}};
    f.facets.assign(1, {});
    EXPECT_FALSE(strictly_simplicial(f).ok());
    f.rays[1] = {1, 1};
    EXPECT_TRUE(strictly_simplicial(f).ok());
}

TEST(Simpliciality, GConesOfDn) {
    for (int n = 5; n <= 7; ++n) {
        const auto& f = fans({Family::D, n});
        Fan g = build_G(*f.R, false);
        std::size_t cyclic_orders = 1;
        for (int k = 2; k < n; ++k) cyclic_orders *= k;
        EXPECT_EQ(g.cones.size(), cyclic_orders / 2);
        for (const auto& c : g.cones) {
            EXPECT_EQ(static_cast<int>(c.size()), n * (n - 3) / 2);
        }
        EXPECT_TRUE(strictly_simplicial(g).ok());
    }
}

TEST(Simpliciality, GConesOfE6) {
    const auto& f = fans(kE6);
    Fan g = build_G(*f.R, false);
    // |W(E6)| / |S5|
    EXPECT_EQ(g.cones.size(), 51840u / 120u);
    for (const auto& c : g.cones) EXPECT_EQ(c.size(), 15u);
    EXPECT_TRUE(strictly_simplicial(g).ok());
    auto cert = certify_g_cones(*f.R, units(kE6), false);
    EXPECT_TRUE(cert.ok());
    EXPECT_EQ(cert.cones, g.cones.size());
}

TEST(Simpliciality, ExtendedGConesOfE7) {
    const auto& f = fans(kE7);
    Diagram d = e7_witness_diagram(*f.rs);
    EXPECT_EQ(f.rs->name(tetradiagram_extra_root(*f.rs, d.roots)), "247");
    auto g = g_cone(*f.R, d, false);
    auto counts = type_counts(*f.R, g);
    EXPECT_EQ(g.size(), 34u);
    EXPECT_EQ(counts["A1"], 10);
    EXPECT_EQ(counts["A2"], 12);
    EXPECT_EQ(counts["A3xA3"], 9);
    EXPECT_EQ(counts["A7"], 3);
    auto gp = g_cone(*f.R, d, true);
    EXPECT_EQ(gp.size(), 35u);
    EXPECT_TRUE(rows_unimodular(f.F.generators(gp)));
    auto cert = certify_g_cones(*f.R, units(kE7), true);
    EXPECT_TRUE(cert.ok());
    // |W(E7)| / |S4 x Z/2|
    EXPECT_EQ(cert.cones, 2903040u / 48u);
    EXPECT_EQ(cert.unique, 4u);
}

TEST(FanCheck, PairwiseIntersectionsAreFaces) {
    for (auto s : {kD4, kD5, kD6, kE6}) {
        auto r = fan_pairwise(fans(s).F);
        EXPECT_TRUE(r.ok()) << system_name(s);
    }
    auto sampled = fan_pairwise(fans(kE7).F, 2000, 3);
    EXPECT_TRUE(sampled.ok());
    EXPECT_GT(sampled.pairs, 1000u);
}

TEST(FanCheck, OverlappingConesAreReported) {
    Fan f;
    f.lattice_rank = 2;
    f.rays = {{1, 0}, {0, 1}, {1, 1}, {-1, 0}};
    f.labels.resize(4);
    f.cones = {{0, 1}, {2, 3}};
    f.facets.assign(2, {});
    auto r = fan_pairwise(f);
    ASSERT_EQ(r.bad.size(), 1u);
    EXPECT_EQ(r.bad[0], (std::pair<std::size_t, std::size_t>{0, 1}));
}

TEST(IntersectionFan, D4ClassesOfRays) {
    const auto& f = fans(kD4);
    const auto& t = units(kD4);
    ASSERT_EQ(t.catalog.size(), 1u);
    std::set<int> classes;
    for (const auto& r : f.F.rays) classes.insert(d4_class(t, *f.lat, 0, r));
    EXPECT_EQ(classes, (std::set<int>{1, 2, 3}));
    EXPECT_EQ(d4_class(t, *f.lat, 0, IntVec(2, 0)), 0);
    // the negative of a ray lies in no cone of the D4 fan
    EXPECT_EQ(d4_class(t, *f.lat, 0, scale(f.F.rays[0], -1)), -1);
    EXPECT_EQ(d4_class(t, *f.lat, 0, add(f.F.rays[0], f.F.rays[1])), -1);
}

TEST(IntersectionFan, ExhaustiveCertificate) {
    for (auto s : {kD5, kD6, kE6}) {
        const auto& R = *fans(s).R;
        auto rep = intersection_fan_certificate(R, units(s), true);
        std::set<std::vector<int>> faces;
        for (const auto& m : R.maximal_simplices())
            for (std::uint32_t sub = 1; sub < (1u << m.size()); ++sub) {
                std::vector<int> face;
                for (std::size_t i = 0; i < m.size(); ++i)
                    if (sub >> i & 1) face.push_back(m[i]);
                faces.insert(face);
            }
        EXPECT_TRUE(rep.ok()) << system_name(s);
        EXPECT_EQ(rep.simplices, faces.size()) << system_name(s);
    }
}

TEST(IntersectionFan, ZeroConePasses) {
    const auto& f = fans(kE6);
    IntersectionReport rep;
    detail::check_simplex(*f.R, units(kE6), {}, rep);
    EXPECT_TRUE(rep.ok());
    EXPECT_EQ(rep.simplices, 1u);
}

TEST(IntersectionFan, OrbitCertificateForE7) {
    const auto& f = fans(kE7);
    auto rep = intersection_fan_certificate(*f.R, units(kE7), false);
    EXPECT_TRUE(rep.ok());
    EXPECT_GT(rep.orbits, 0u);
    // the orbit version agrees with the exhaustive one where both are feasible
    auto e6 = intersection_fan_certificate(*fans(kE6).R, units(kE6), false);
    EXPECT_TRUE(e6.ok());
}

TEST(DualBasis, D6RepresentativeCone) {
    const auto& f = fans(kD6);
    const auto& t = units(kD6);
    auto cone = g_cone(*f.R, ngon_diagram(*f.rs, {0, 1, 2, 3, 4, 5}), false);
    ASSERT_EQ(cone.size(), 9u);
    std::vector<int> dual;
    for (auto& c : dual_basis_candidates(t, cone)) {
        ASSERT_EQ(c.size(), 1u);
        dual.push_back(c[0]);
    }
    EXPECT_TRUE(is_dual_basis(t, cone, dual));
}

TEST(DualBasis, E7WitnessesInTheTetradiagramCone) {
    const auto& f = fans(kE7);
    const auto& rs = *f.rs;
    const auto& t = units(kE7);
    auto cone = g_cone(*f.R, e7_witness_diagram(rs), true);
    for (auto& c : dual_basis_candidates(t, cone)) EXPECT_EQ(c.size(), 1u);
    auto ray = [&](std::vector<std::string> names) { return f.R->find(names_mask(rs, names)); };
    EXPECT_TRUE(unique_dual(t, cone, ray({"247"}), unit_of(rs, t, {"247", "123", "357", "145"}, {"6", "17", "25", "34"})));
    EXPECT_TRUE(unique_dual(t, cone, ray({"237"}), unit_of(rs, t, {"237", "245", "467", "356"}, {"1", "34", "26", "57"})));
    EXPECT_TRUE(unique_dual(t, cone, ray({"367"}), unit_of(rs, t, {"6", "25", "146", "367"}, {"5", "26", "145", "357"})));
    int a7 = 0, a2 = 0, a3 = 0;
    const int r134 = rs.by_name("134"), r456 = rs.by_name("456"), r26 = rs.by_name("26");
    for (int v : cone) {
        Mask th = f.R->vertices[v].theta;
        const std::string& type = f.R->vertices[v].type;
        if (type == "A7" && !(th >> r134 & 1) && !(th >> r456 & 1)) {
            ++a7;
            EXPECT_TRUE(unique_dual(t, cone, v, unit_of(rs, t, {"7", "16", "24", "35"}, {"123", "145", "346", "256"})));
        }
        if (type == "A2" && (th >> r26 & 1)) {
            ++a2;
            EXPECT_TRUE(unique_dual(t, cone, v, unit_of(rs, t, {"7", "15", "26", "34"}, {"123", "146", "245", "356"})));
        }
        if (type == "A3xA3" && (th & names_mask(rs, {"135", "157", "457", "237", "367", "124"})) ==
                                   names_mask(rs, {"135", "157", "457", "237", "367", "124"})) {
            ++a3;
            EXPECT_TRUE(unique_dual(t, cone, v, unit_of(rs, t, {"123", "345", "146", "256"}, {"7", "24", "15", "36"})));
        }
    }
    EXPECT_EQ(a7, 1);
    EXPECT_EQ(a2, 1);
    EXPECT_EQ(a3, 1);
}

TEST(DualBasis, E6WitnessesUpToWeylConjugation) {
    const auto& f = fans(kE6);
    const auto& rs = *f.rs;
    const auto& t = units(kE6);
    const int theta = f.R->find(names_mask(rs, {"456"}));
    const int u1 = unit_of(rs, t, {"124", "135", "236", "456"}, {"7", "16", "25", "34"});
    const int u2 = unit_of(rs, t, {"7", "13", "25", "46"}, {"124", "156", "236", "345"});
    ASSERT_GE(u1, 0);
    ASSERT_GE(u2, 0);
    // {145, 123, 246, 356} is the remaining fourtuple of the same D4, not one of the unit's two
    const auto& d = t.catalog[t.units[u1].d4];
    Mask third = names_mask(rs, {"145", "123", "246", "356"});
    EXPECT_TRUE(third == d.fourtuples[0] || third == d.fourtuples[1] || third == d.fourtuples[2]);
    EXPECT_NE(third, d.fourtuples[t.units[u1].i]);
    EXPECT_NE(third, d.fourtuples[t.units[u1].j]);
    const Mask edges = names_mask(rs, {"13", "25", "46"});
    int good = 0;
    for (const auto& e : detail::g_orbit_units(*f.R, false, &t)) {
        if (!unique_dual(t, e.cone, theta, u1)) continue;
        for (int w : e.cone)
            if (f.R->vertices[w].type == "A2xA2xA2" && (f.R->vertices[w].theta & edges) == edges && unique_dual(t, e.cone, w, u2)) {
                ++good;
                // the diagram has vertex 456 whose incident edge roots are 16, 25, 34
                EXPECT_TRUE(e.diagram >> rs.by_name("456") & 1);
            }
    }
    EXPECT_EQ(good, 1);
}

TEST(Equivariance, RayGeneratorsAndConeImages) {
    std::mt19937_64 rng(12);
    for (auto s : {kD6, kE6, kE7}) {
        const auto& f = fans(s);
        const RComplex& R = *f.R;
        std::set<std::vector<int>> cones(f.F.cones.begin(), f.F.cones.end());
        const std::size_t stride = std::max<std::size_t>(1, f.F.cones.size() / 2000);
        for (int k = 0; k < 100; ++k) {
            WeylElement w = f.rs->random_element(rng);
            IntMatrix wn = weyl_on_N(*f.lat, w);
            std::vector<int> vp(R.size());
            for (int v = 0; v < R.size(); ++v) {
                Mask img = f.rs->apply(w, R.vertices[v].theta);
                vp[v] = R.find(img);
                ASSERT_GE(vp[v], 0);
                ASSERT_EQ(mat_vec(wn, R.vertices[v].ray), R.vertices[vp[v]].ray) << system_name(s);
            }
            for (std::size_t c = rng() % stride; c < f.F.cones.size(); c += stride) {
                std::vector<int> img;
                for (int v : f.F.cones[c]) img.push_back(vp[v]);
                std::sort(img.begin(), img.end());
                ASSERT_TRUE(cones.count(img)) << system_name(s);
            }
        }
    }
}
