#include <gtest/gtest.h>

#include "adefans/units_eval.hpp"

using namespace adefans;

namespace {

const RootSystem& sys(SystemSpec s) {
    static std::map<std::string, std::unique_ptr<RootSystem>> cache;
    auto& p = cache[system_name(s)];
    if (!p) p = std::make_unique<RootSystem>(build_root_system(s));
    return *p;
}

const RootSystem& e6() { return sys({Family::E, 6}); }
const RootSystem& e7() { return sys({Family::E, 7}); }
const RootSystem& d6() { return sys({Family::D, 6}); }

ConfigPoint point(std::initializer_list<int> v) {
    ConfigPoint x;
    for (int c : v) x.push_back(c);
    return x;
}

// Points (t, t^3) on the cuspidal cubic: the 3x3 determinant factors as a Vandermonde product times t1+t2+t3.
Rational det_factored(const ConfigPoint& q, int a, int b, int c) {
    return (q[a] - q[b]) * (q[b] - q[c]) * (q[c] - q[a]) * (q[a] + q[b] + q[c]);
}

IntVec unit_of(const RootSystem& rs, std::initializer_list<std::pair<const char*, int>> terms) {
    IntVec m(rs.size(), 0);
    for (auto [n, c] : terms) m[rs.by_name(n)] += c;
    return m;
}

}  // namespace

TEST(Evaluation, RootValuesInConfigurationCoordinates) {
    Evaluator ev(e7());
    ConfigPoint x = point({1, 2, 3, 5, 7, 11, 13});
    ASSERT_TRUE(ev.admissible(x));
    // e_i - e_j evaluates to q_i - q_j up to sign, h - e_i - e_j - e_k to q_i + q_j + q_k
    EXPECT_EQ(abs(ev.root_value(e7().by_name("12"), x)), Rational(1));
    EXPECT_EQ(abs(ev.root_value(e7().by_name("47"), x)), Rational(8));
    EXPECT_EQ(ev.root_value(e7().by_name("123"), x), Rational(6));
    EXPECT_EQ(ev.root_value(e7().by_name("567"), x), Rational(31));
    // 2h - sum of the six e_i other than e_7
    EXPECT_EQ(ev.root_value(e7().by_name("7"), x), Rational(29));
    Evaluator dv(d6());
    ConfigPoint y = point({1, 2, 4, 8, 16, 32});
    for (int r = 0; r < d6().size(); ++r) {
        Rational want = 0;
        for (int i = 0; i < 6; ++i) want += d6().roots[r][i] * y[i];
        EXPECT_EQ(dv.root_value(r, y), want);
    }
}

TEST(Evaluation, UnitsAreMultiplicative) {
    Evaluator ev(e6());
    std::mt19937_64 rng(2);
    auto cat = d4_catalog(e6());
    for (int t = 0; t < 20; ++t) {
        ConfigPoint x = ev.random_point(rng);
        EXPECT_EQ(ev.evaluate(IntVec(e6().size(), 0), x), Rational(1));
        IntVec u = d4_unit(e6(), cat[t % cat.size()], 0, 1);
        IntVec v = d4_unit(e6(), cat[(7 * t + 3) % cat.size()], 2, 0);
        EXPECT_EQ(ev.evaluate(add(u, v), x), ev.evaluate(u, x) * ev.evaluate(v, x));
        EXPECT_EQ(ev.evaluate(scale(u, -1), x) * ev.evaluate(u, x), Rational(1));
    }
    ConfigPoint x = point({1, 2, 3, 5, 7, 11});
    IntVec m = unit_of(e6(), {{"123", 1}, {"12", -2}});
    EXPECT_EQ(ev.evaluate(m, x), Rational(6));
}

TEST(Evaluation, NonAdmissiblePointsRaise) {
    Evaluator ev(e6());
    ConfigPoint x = point({1, 1, 3, 5, 7, 11});
    EXPECT_FALSE(ev.admissible(x));
    EXPECT_EQ(ev.offending_root(x), e6().by_name("12"));
    EXPECT_THROW(ev.root_value(e6().by_name("12"), x), DomainError);
    EXPECT_THROW(ev.evaluate(unit_of(e6(), {{"12", 1}}), x), DomainError);
    // q1 + q2 + q3 = 0
    EXPECT_FALSE(ev.admissible(point({1, 2, -3, 5, 7, 11})));
    EXPECT_THROW(ev.evaluate(IntVec(5, 0), point({1, 2, 3, 5, 7, 11})), std::invalid_argument);
    EXPECT_THROW(ev.root_value(0, point({1, 2, 3})), std::invalid_argument);
    EXPECT_THROW(Evaluator(build_root_system({Family::A, 4})), std::invalid_argument);
}

TEST(Evaluation, CuspidalCrossRatioMatchesFactoredDeterminants) {
    Evaluator ev(e7());
    ConfigPoint x = point({1, 2, 3, 5, 7, 11, 13});
    auto r = cross_ratio_pullback_check(ev, 0, 1, 2, 3, 4, x);
    EXPECT_TRUE(r.equal);
    Rational direct = det_factored(x, 0, 1, 4) * det_factored(x, 2, 3, 4) / (det_factored(x, 0, 2, 4) * det_factored(x, 1, 3, 4));
    EXPECT_EQ(r.determinant_ratio, direct);
    EXPECT_EQ(r.root_product, direct);
    std::mt19937_64 rng(9);
    for (const RootSystem* rs : {&e6(), &e7()}) {
        Evaluator e(*rs);
        for (int t = 0; t < 100; ++t) {
            std::vector<int> p(rs->rank());
            std::iota(p.begin(), p.end(), 0);
            std::shuffle(p.begin(), p.end(), rng);
            std::sort(p.begin(), p.begin() + 4);
            ConfigPoint y = e.random_point(rng);
            auto c = cross_ratio_pullback_check(e, p[0], p[1], p[2], p[3], p[4], y);
            ASSERT_TRUE(c.equal);
            EXPECT_EQ(c.determinant_ratio, det_factored(y, p[0], p[1], p[4]) * det_factored(y, p[2], p[3], p[4]) /
                                               (det_factored(y, p[0], p[2], p[4]) * det_factored(y, p[1], p[3], p[4])));
            // swapping a<->b and c<->d leaves the ratio unchanged
            EXPECT_EQ(cusp_cross_ratio(y, p[1], p[0], p[3], p[2], p[4]), c.determinant_ratio);
        }
    }
}

TEST(Evaluation, CuspidalUnitIsAD4Unit) {
    auto cat = d4_catalog(e7());
    IntVec u = cusp_unit(e7(), 0, 1, 2, 3, 4);
    EXPECT_EQ(std::count_if(u.begin(), u.end(), [](auto c) { return c != 0; }), 8);
    bool found = false;
    for (const auto& d : cat)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (i != j && d4_unit(e7(), d, i, j) == u) found = true;
    EXPECT_TRUE(found);
    EXPECT_THROW(cusp_unit(e7(), 1, 0, 2, 3, 4), std::invalid_argument);
    EXPECT_THROW(cusp_unit(e7(), 0, 1, 2, 3, 3), std::invalid_argument);
    EXPECT_THROW(cusp_unit(d6(), 0, 1, 2, 3, 4), std::invalid_argument);
}

TEST(Evaluation, ForgetfulCrossRatio) {
    Evaluator ev(d6());
    std::mt19937_64 rng(4);
    for (int t = 0; t < 100; ++t) {
        std::vector<int> p(6);
        std::iota(p.begin(), p.end(), 0);
        std::shuffle(p.begin(), p.end(), rng);
        std::sort(p.begin(), p.begin() + 4);
        ConfigPoint x = ev.random_point(rng);
        Rational lhs = forgetful_cross_ratio(x, p[0], p[1], p[2], p[3]);
        EXPECT_EQ(ev.evaluate(forgetful_unit(d6(), p[0], p[1], p[2], p[3]), x), lhs);
        EXPECT_EQ(forgetful_cross_ratio(x, p[1], p[0], p[3], p[2]), lhs);
    }
    ConfigPoint x = point({1, 2, 3, 5, 7, 11});
    // (1-4)(9-25) / ((1-9)(4-25))
    EXPECT_EQ(forgetful_cross_ratio(x, 0, 1, 2, 3), Rational(48) / Rational(168));
    EXPECT_THROW(forgetful_unit(e6(), 0, 1, 2, 3), std::invalid_argument);
    EXPECT_THROW(forgetful_unit(d6(), 1, 0, 2, 3), std::invalid_argument);
}

TEST(Evaluation, WeylActionChangesUnitsByAConstant) {
    std::mt19937_64 rng(21);
    for (const RootSystem* rs : {&d6(), &e6(), &e7()}) {
        Evaluator ev(*rs);
        auto cat = d4_catalog(*rs);
        std::vector<ConfigPoint> pts;
        for (int i = 0; i < 10; ++i) pts.push_back(ev.random_point(rng));
        auto id = weyl_ratio_check(ev, d4_unit(*rs, cat[0], 0, 1), rs->identity(), pts);
        EXPECT_TRUE(id.constant);
        EXPECT_EQ(id.value, Rational(1));
        for (int t = 0; t < 20; ++t) {
            WeylElement w = rs->random_element(rng);
            auto r = weyl_ratio_check(ev, d4_unit(*rs, cat[rng() % cat.size()], 1, 2), w, pts);
            EXPECT_TRUE(r.constant) << system_name(rs->spec);
            EXPECT_EQ(r.value * r.value, Rational(1));
        }
    }
}

TEST(Evaluation, WeylActionOnPointsIsAnAction) {
    Evaluator ev(e6());
    std::mt19937_64 rng(8);
    ConfigPoint x = ev.random_point(rng);
    EXPECT_EQ(ev.act_inverse(e6().identity(), x), x);
    for (int g = 0; g < e6().rank(); ++g) EXPECT_EQ(ev.act_inverse(e6().from_word({g, g}), x), x);
}
