#include <gtest/gtest.h>

#include <set>

#include "adefans/subsys.hpp"

using namespace adefans;

namespace {

const RootSystem& e6() {
    static RootSystem rs = build_root_system({Family::E, 6});
    return rs;
}
const RootSystem& e7() {
    static RootSystem rs = build_root_system({Family::E, 7});
    return rs;
}

std::set<Mask> as_set(const std::vector<Mask>& v) { return {v.begin(), v.end()}; }

// A2 subsystems: closures of root pairs with nonzero pairing.
std::set<Mask> brute_a2(const RootSystem& rs) {
    std::set<Mask> out;
    for (int a = 0; a < rs.size(); ++a)
        for (int b = a + 1; b < rs.size(); ++b)
            if (rs.pairing[a][b] != 0) out.insert(closure(rs, (Mask(1) << a) | (Mask(1) << b)));
    return out;
}

// D4 subsystems: closures of four roots with 12 positive roots (no other rank-4 type has 12).
std::set<Mask> brute_d4(const RootSystem& rs) {
    std::set<Mask> out;
    const int n = rs.size();
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            for (int c = b + 1; c < n; ++c) {
                Mask abc = closure(rs, (Mask(1) << a) | (Mask(1) << b) | (Mask(1) << c));
                if (popcount(abc) > 6) continue;
                for (int d = c + 1; d < n; ++d) {
                    if (abc >> d & 1) continue;
                    Mask m = closure(rs, abc | (Mask(1) << d));
                    if (popcount(m) == 12) out.insert(m);
                }
            }
    return out;
}

}  // namespace

TEST(Subsystems, WholeSystemIsRecognized) {
    EXPECT_EQ(recognize_type(e6(), e6().all).str(), "E6");
    EXPECT_EQ(recognize_type(e7(), e7().all).str(), "E7");
    RootSystem d6 = build_root_system({Family::D, 6});
    EXPECT_EQ(recognize_type(d6, d6.all).str(), "D6");
}

TEST(Subsystems, TypeNamesNormalize) {
    EXPECT_EQ(SubsystemType::parse("A2^3").str(), "A2xA2xA2");
    EXPECT_EQ(SubsystemType::parse("D3xA1").str(), "A1xA3");
    EXPECT_EQ(SubsystemType::parse("D2").str(), "A1xA1");
    EXPECT_EQ(SubsystemType::parse("E5").str(), "D5");
    EXPECT_EQ(SubsystemType::parse("0").str(), "0");
}

TEST(Subsystems, A2EnumerationMatchesBruteForce) {
    for (const RootSystem* rs : {&e6(), &e7()}) {
        auto enumerated = as_set(enumerate_subsystems(*rs, SubsystemType::parse("A2")));
        EXPECT_EQ(enumerated, brute_a2(*rs));
    }
    EXPECT_EQ(brute_a2(e6()).size(), 120u);
    EXPECT_EQ(brute_a2(e7()).size(), 336u);
}

TEST(Subsystems, D4EnumerationMatchesBruteForce) {
    EXPECT_EQ(as_set(enumerate_subsystems(e6(), SubsystemType::parse("D4"))), brute_d4(e6()));
    EXPECT_EQ(brute_d4(e6()).size(), 45u);
    RootSystem d6 = build_root_system({Family::D, 6});
    EXPECT_EQ(as_set(enumerate_subsystems(d6, SubsystemType::parse("D4"))), brute_d4(d6));
    EXPECT_EQ(brute_d4(d6).size(), 15u);
}

TEST(Subsystems, E7D4CatalogMatchesClosedForm) {
    auto cat = d4_catalog(e7());
    ASSERT_EQ(cat.size(), 315u);
    std::set<Mask> from_names;
    std::map<std::string, int> per_family;
    for (const auto& d : e7_d4_families()) {
        Mask m = 0;
        for (const auto& f : d.fourtuples) {
            Mask q = names_mask(e7(), {f.begin(), f.end()});
            EXPECT_EQ(popcount(q), 4);
            m |= q;
        }
        from_names.insert(m);
        ++per_family[d.family];
    }
    std::set<Mask> enumerated;
    for (const auto& d : cat) enumerated.insert(d.roots);
    EXPECT_EQ(from_names, enumerated);
    EXPECT_EQ(per_family["ijkl,a"], 105);
    EXPECT_EQ(per_family["ij,kl,mn"], 105);
    EXPECT_EQ(per_family["ab,cd"], 105);
}

TEST(Subsystems, D4FourtuplesPartitionIntoOrthogonalSets) {
    for (const auto& d : d4_catalog(e7())) {
        EXPECT_EQ(d.fourtuples[0] | d.fourtuples[1] | d.fourtuples[2], d.roots);
        for (Mask f : d.fourtuples) {
            ASSERT_EQ(popcount(f), 4);
            for_each_bit(f, [&](int a) { EXPECT_EQ(f & ~(Mask(1) << a) & ~e7().orth[a], Mask(0)); });
        }
    }
}

TEST(Subsystems, ProductTypesFromOrthogonalComponents) {
    // A2xA2xA2 in E6: triples of mutually orthogonal A2s
    const auto a2_set = brute_a2(e6());
    const std::vector<Mask> a2(a2_set.begin(), a2_set.end());
    std::set<Mask> triples;
    for (std::size_t i = 0; i < a2.size(); ++i)
        for (std::size_t j = i + 1; j < a2.size(); ++j)
            for (std::size_t k = j + 1; k < a2.size(); ++k)
                if (orthogonal(e6(), a2[i], a2[j]) && orthogonal(e6(), a2[i], a2[k]) && orthogonal(e6(), a2[j], a2[k]))
                    triples.insert(a2[i] | a2[j] | a2[k]);
    EXPECT_EQ(as_set(enumerate_subsystems(e6(), SubsystemType::parse("A2xA2xA2"))), triples);
    EXPECT_EQ(triples.size(), 40u);
    // A1xA1 in E7: orthogonal pairs
    EXPECT_EQ(enumerate_subsystems(e7(), SubsystemType::parse("A1xA1")).size(), orthogonal_root_sets(e7(), 2).size());
}

TEST(Subsystems, PerpendicularTypes) {
    EXPECT_EQ(recognize_type(e6(), perp(e6(), 1)).str(), "A5");
    EXPECT_EQ(recognize_type(e7(), perp(e7(), 1)).str(), "D6");
    Mask a2 = *brute_a2(e7()).begin();
    EXPECT_EQ(recognize_type(e7(), perp(e7(), a2)).str(), "A5");
    Mask a2e6 = *brute_a2(e6()).begin();
    EXPECT_EQ(recognize_type(e6(), perp(e6(), a2e6)).str(), "A2xA2");
}

TEST(Subsystems, E7A5ClassesSplit) {
    std::size_t minus = 0, plus = 0;
    for (Mask m : enumerate_subsystems(e7(), SubsystemType::parse("A5"))) {
        auto l = class_label(e7(), m);
        minus += l == "A5-";
        plus += l == "A5+";
    }
    EXPECT_EQ(minus, 336u);
    EXPECT_EQ(plus, 1008u);
}

TEST(Subsystems, EnumerationIsWeylInvariant) {
    std::mt19937_64 rng(5);
    for (const char* t : {"A3xA3", "A7", "D4", "A2xA1"}) {
        auto list = enumerate_subsystems(e7(), SubsystemType::parse(t));
        auto set = as_set(list);
        ASSERT_EQ(set.size(), list.size());
        for (int k = 0; k < 100; ++k) {
            WeylElement w = e7().random_element(rng);
            for (Mask m : list) ASSERT_TRUE(set.count(e7().apply(w, m))) << t;
        }
    }
}

TEST(Subsystems, ATypeCoordinatesAreConsistent) {
    for (Mask m : enumerate_subsystems(e7(), SubsystemType::parse("A4"))) {
        auto c = a_type_coordinates(e7(), m);
        ASSERT_EQ(c.size(), 10u);
        // e_i - e_j and e_j - e_k pair to 1 when they share an index in the middle
        for (auto& [a, p] : c)
            for (auto& [b, q] : c) {
                if (a == b) continue;
                int shared = (p.first == q.first) + (p.second == q.second) - (p.first == q.second) - (p.second == q.first);
                // pairing with a negative-definite form: -(e_i-e_j).(e_k-e_l)
                EXPECT_EQ(e7().pairing[a][b], -shared) << e7().name(a) << " " << e7().name(b);
            }
        break;
    }
}

TEST(FanoOracle, IsotropicSubspaceCountsMatchClosedForms) {
    // maximal isotropic subspaces of a 2m-dimensional symplectic space over F_2: prod (2^i + 1)
    EXPECT_EQ(isotropic_subspace_count(2, 2), 15u);
    EXPECT_EQ(isotropic_subspace_count(3, 3), 135u);
    // every nonzero vector is isotropic
    EXPECT_EQ(isotropic_subspace_count(3, 1), 63u);
}

TEST(FanoOracle, SevenOrthogonalRootsInE7) {
    EXPECT_EQ(orthogonal_root_sets(e7(), 7).size(), isotropic_subspace_count(3, 3));
    EXPECT_TRUE(orthogonal_root_sets(e7(), 8).empty());
    EXPECT_EQ(orthogonal_root_sets(e7(), 1).size(), 63u);
}
