#pragma once
// Named verification checks over one root system, with shared lazily built state.

#include <atomic>
#include <chrono>
#include <mutex>
#include <numeric>
#include <optional>
#include <thread>

#include "io.hpp"
#include "relations.hpp"
#include "units_eval.hpp"

namespace adefans::verify {

using json = nlohmann::json;

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

enum class Status { Pass, Fail, Skipped };

inline std::string status_name(Status s) {
    switch (s) {
        case Status::Pass: return "pass";
        case Status::Fail: return "fail";
        case Status::Skipped: return "skipped";
    }
    return "?";
}

struct CheckRecord {
    std::string id;
    std::string claim;
    Status status = Status::Skipped;
    json details = json::object();
    json witnesses = json::array();  // non-empty on failure
    std::int64_t elapsed_ms = 0;
};

struct Options {
    SystemSpec system{Family::E, 6};
    std::optional<SystemSpec> to;
    bool exhaustive = false;
    std::uint64_t seed = 1;
    unsigned jobs = 1;
    FanSystem::SimplexCache cache;
};

inline const std::vector<std::string>& check_names() {
    static const std::vector<std::string> names = {
        "rank-table",     "table1-relations", "messy-surjectivity", "strict-simplicial", "fan-pairwise",
        "intersection-fan", "convex-disjoint", "dual-basis",        "ray-images",        "flatness",
        "refinement",     "eckhart",          "eval-identities",    "fano"};
    return names;
}

inline std::string canonical_check(const std::string& name) {
    if (name == "table1") return "table1-relations";
    for (const auto& n : check_names())
        if (n == name) return n;
    throw UsageError("unknown check '" + name + "'");
}

// rk M for the systems carrying fans.
inline std::optional<int> expected_unit_rank(SystemSpec s) {
    if (s.family == Family::D && s.rank >= 4) return s.rank * (s.rank - 3) / 2;
    if (s == SystemSpec{Family::E, 6}) return 15;
    if (s == SystemSpec{Family::E, 7}) return 35;
    return std::nullopt;
}

// Zero images among the rays of the source fan, where the count is a known constant.
inline std::optional<std::size_t> expected_zero_rays(SystemSpec from, SystemSpec to) {
    if (from == SystemSpec{Family::E, 6} && to == SystemSpec{Family::D, 5}) return 16;
    if (from == SystemSpec{Family::E, 7} && to == SystemSpec{Family::E, 6}) return 27;
    return std::nullopt;
}

// Everything the fiber fan of E7 over the refinement of F(E6) produces.
struct FiberRun {
    FanSystem e6;
    MapContext map;
    Refinement refinement;
    std::unique_ptr<FiberContext> ctx;
    FiberFanReport report;
    MinimalityReport minimality;
};

class Session {
public:
    explicit Session(Options o) : opt_(std::move(o)) {
        if (!supports_fans(opt_.system))
            throw UsageError("system " + system_name(opt_.system) + " has no fans (its unit lattice is trivial or unsupported)");
        if (opt_.to && !supported_map(opt_.system, *opt_.to))
            throw UsageError("unsupported map " + system_name(opt_.system) + " -> " + system_name(*opt_.to));
    }

    const Options& options() const { return opt_; }

    const FanSystem& system() const {
        std::call_once(sys_once_, [&] { sys_ = FanSystem::make(opt_.system, opt_.cache); });
        return sys_;
    }

    // Root system and lattice alone, without the ray complex.
    const NLattice& lattice() const {
        std::call_once(lat_once_, [&] {
            lat_rs_ = std::make_unique<RootSystem>(build_root_system(opt_.system));
            lat_ = std::make_unique<NLattice>(*lat_rs_);
        });
        return *lat_;
    }

    const std::vector<D4Record>& d4s() const {
        std::call_once(d4_once_, [&] { d4s_ = d4_catalog(*lattice().rs); });
        return d4s_;
    }

    const UnitTable& units() const {
        std::call_once(units_once_, [&] { units_ = build_units(*system().R); });
        return units_;
    }

    const IntersectionReport& intersection() const {
        std::call_once(inter_once_, [&] { inter_ = intersection_fan_certificate(*system().R, units(), opt_.exhaustive); });
        return inter_;
    }

    const MapContext& map() const {
        if (!opt_.to) throw UsageError("this check needs --to");
        std::call_once(map_once_, [&] {
            target_ = FanSystem::make(*opt_.to, opt_.cache);
            map_ = make_map(system(), target_);
            locator_ = std::make_unique<ConeLocator>(target_.F);
            locator_->warm();
            images_ = ray_image_table(map_, *locator_);
        });
        return map_;
    }

    const ConeLocator& target_locator() const {
        map();
        return *locator_;
    }

    const std::vector<RayImage>& ray_images() const {
        map();
        return images_;
    }

    // E7 only.
    const FiberRun& fiber() const {
        std::call_once(fiber_once_, [&] {
            auto run = std::make_unique<FiberRun>();
            run->e6 = FanSystem::make({Family::E, 6}, opt_.cache);
            run->map = make_map(system(), run->e6);
            run->refinement = refine_E6(run->e6);
            run->ctx = std::make_unique<FiberContext>(run->map, run->refinement);
            run->report = fiber_fan_E7(*run->ctx);
            run->minimality = refinement_minimality(*run->ctx, run->report);
            fiber_ = std::move(run);
        });
        return *fiber_;
    }

private:
    Options opt_;
    mutable std::once_flag lat_once_, d4_once_, sys_once_, units_once_, inter_once_, map_once_, fiber_once_;
    mutable std::unique_ptr<RootSystem> lat_rs_;
    mutable std::unique_ptr<NLattice> lat_;
    mutable std::vector<D4Record> d4s_;
    mutable FanSystem sys_, target_;
    mutable UnitTable units_;
    mutable IntersectionReport inter_;
    mutable MapContext map_;
    mutable std::unique_ptr<ConeLocator> locator_;
    mutable std::vector<RayImage> images_;
    mutable std::unique_ptr<FiberRun> fiber_;
};

namespace detail {

inline bool is_e(const Session& s) { return s.options().system.family == Family::E; }
inline bool is_e7(const Session& s) { return s.options().system == SystemSpec{Family::E, 7}; }

inline void verdict(CheckRecord& r, bool ok, json witness = nullptr) {
    r.status = ok ? Status::Pass : Status::Fail;
    if (!ok) r.witnesses.push_back(witness.is_null() ? r.details : witness);
}

inline void skip(CheckRecord& r, const std::string& why) {
    r.status = Status::Skipped;
    r.details["reason"] = why;
}

inline std::string big_string(const BigInt& x) { return x.str(); }

inline void rank_table(const Session& s, CheckRecord& r) {
    r.claim = "rk M equals the number of three-legged positive roots; phi is injective with torsion-free cokernel";
    const NLattice& lat = s.lattice();
    const RootSystem& rs = *lat.rs;
    const std::size_t q = lat.phi.empty() ? 0 : lat.phi[0].size();
    auto div = phi_divisors(lat);
    bool torsion_free = std::all_of(div.begin(), div.end(), [](const BigInt& d) { return d == 1; });
    bool injective = div.size() == q;
    bool psi_phi = true;
    for (int k = 0; k < lat.rank() && psi_phi; ++k)
        for (std::size_t j = 0; j < q && psi_phi; ++j) {
            std::int64_t acc = 0;
            for (int a = 0; a < rs.size(); ++a) acc += lat.psi_matrix[k][a] * lat.phi[a][j];
            psi_phi = acc == 0;
        }
    const int positive = rs.size();
    const int rank_n = positive - static_cast<int>(div.size());
    const int t = static_cast<int>(rs.three_legged_roots().size());
    auto expected = expected_unit_rank(s.options().system);
    r.details = {{"positive_roots", positive}, {"phi_columns", q},       {"phi_rank", div.size()},
                 {"rank_N", rank_n},           {"three_legged", t},       {"expected", expected ? *expected : -1},
                 {"phi_injective", injective}, {"torsion_free", torsion_free}, {"psi_phi_zero", psi_phi}};
    verdict(r, expected && rank_n == t && t == *expected && lat.rank() == t && injective && torsion_free && psi_phi);
}

inline void table1(const Session& s, CheckRecord& r) {
    r.claim = "psi-relations hold for every subsystem of each listed class, and psi of the listed classes is divisible";
    const NLattice& lat = s.lattice();
    bool ok = true;
    json rows = json::array();
    if (is_e(s)) {
        for (const auto& x : check_psi_relations(lat)) {
            rows.push_back({{"class", x.row->theta},
                            {"perp", x.row->perp},
                            {"relation", x.row->text},
                            {"instances", x.instances},
                            {"perp_mismatch", x.perp_mismatch},
                            {"envelope_mismatch", x.envelope_mismatch},
                            {"failures", x.failures}});
            if (!x.ok()) {
                ok = false;
                r.witnesses.push_back(rows.back());
            }
        }
    } else {
        for (const auto& x : check_dn_relations(lat)) {
            rows.push_back({{"k", x.k},
                            {"relation", "psi(D_I) = psi(D_I^c) = 2 psi(A_{k-1})"},
                            {"instances", x.instances},
                            {"perp_failures", x.perp_failures},
                            {"a_failures", x.a_failures}});
            if (!x.ok()) {
                ok = false;
                r.witnesses.push_back(rows.back());
            }
        }
    }
    json divs = json::array();
    for (const auto& d : check_divisibility(lat)) {
        divs.push_back({{"class", d.row.theta}, {"divisor", d.row.divisor}, {"instances", d.instances}, {"m_gamma", d.m_gamma}});
        if (!d.ok()) {
            ok = false;
            r.witnesses.push_back(divs.back());
        }
    }
    r.details = {{"relations", rows}, {"divisibility", divs}};
    r.status = ok && !rows.empty() ? Status::Pass : Status::Fail;
    if (rows.empty()) r.witnesses.push_back({{"reason", "no relation rows for this system"}});
}

inline void messy(const Session& s, CheckRecord& r) {
    r.claim = "the D4 units span M, so N embeds into the product of the N(D4)";
    const NLattice& lat = s.lattice();
    const auto& cat = s.d4s();
    auto span = d4_unit_span(lat, cat);
    const int rk = lat.rank();
    r.details = {{"d4_subsystems", cat.size()},
                 {"generators", span.generators},
                 {"span_rank", span.rank},
                 {"rank_M", rk},
                 {"index", big_string(span.index)},
                 {"kernel_rank", rk - static_cast<int>(span.rank)}};
    verdict(r, static_cast<int>(span.rank) == rk && span.index == 1);
}

inline void strict_simplicial(const Session& s, CheckRecord& r) {
    r.claim = "every cone of F and every maximal cone of G is generated by part of a lattice basis";
    const FanSystem& f = s.system();
    auto fr = strictly_simplicial(f.F);
    const bool extended = is_e7(s);
    json g;
    bool g_ok;
    if (!is_e(s) || s.options().exhaustive) {
        auto gr = strictly_simplicial(build_G(*f.R, extended));
        g = {{"cones", gr.cones}, {"strict", gr.strict}, {"method", "unimodularity"}};
        g_ok = gr.ok();
    } else {
        auto gr = certify_g_cones(*f.R, s.units(), extended);
        g = {{"cones", gr.cones}, {"certified", gr.certified}, {"method", "dual basis of D4 units"}};
        g_ok = gr.ok();
    }
    r.details = {{"F", {{"cones", fr.cones}, {"strict", fr.strict}}}, {"G", g}, {"G_extended", extended}};
    json w = json::array();
    for (std::size_t i = 0; i < fr.failures.size() && i < 5; ++i) w.push_back(f.F.cones[fr.failures[i]]);
    verdict(r, fr.ok() && g_ok, {{"F_failures", w}, {"G", g}});
}

inline void fan_pairwise_check(const Session& s, CheckRecord& r) {
    r.claim = "any two maximal cones of F meet in a common face";
    const Fan& F = s.system().F;
    // the E7 fan has too many cone pairs for a full sweep by default
    const std::size_t sample = is_e7(s) && !s.options().exhaustive ? 20000 : 0;
    auto rep = fan_pairwise(F, sample, s.options().seed);
    r.details = {{"cones", F.cones.size()}, {"pairs", rep.pairs}, {"lp_solves", rep.lp_solves},
                 {"sampled", sample > 0},      {"seed", s.options().seed}, {"bad", rep.bad.size()}};
    json w = json::array();
    for (std::size_t i = 0; i < rep.bad.size() && i < 5; ++i)
        w.push_back({F.cones[rep.bad[i].first], F.cones[rep.bad[i].second]});
    verdict(r, rep.ok(), w);
}

inline json intersection_json(const IntersectionReport& x) {
    return {{"simplices", x.simplices}, {"orbits", x.orbits}, {"exhaustive", x.exhaustive},
            {"convex_failures", x.convex_fail}, {"span_failures", x.span_fail}};
}

inline void intersection_fan(const Session& s, CheckRecord& r) {
    r.claim = "F is the intersection of the pullbacks of the D4 fans: faces project into D4 cones and annihilators are spanned by D4 units";
    const auto& x = s.intersection();
    r.details = intersection_json(x);
    verdict(r, x.ok() && x.simplices > 0);
}

inline void convex_disjoint(const Session& s, CheckRecord& r) {
    r.claim = "every cone of F projects into a single cone of each D4 fan";
    const auto& x = s.intersection();
    r.details = intersection_json(x);
    verdict(r, x.convex_fail == 0 && x.simplices > 0);
}

inline void dual_basis(const Session& s, CheckRecord& r) {
    r.claim = "each maximal cone of G has a dual basis of D4 units, unique on the representative cones";
    const FanSystem& f = s.system();
    const std::size_t unique_checks = 4;
    auto rep = certify_g_cones(*f.R, s.units(), is_e7(s), unique_checks);
    const std::size_t want_unique = is_e(s) ? std::min(unique_checks, rep.cones) : rep.cones;
    r.details = {{"cones", rep.cones}, {"certified", rep.certified}, {"unique", rep.unique}, {"unique_required", want_unique},
                 {"extended", is_e7(s)}};
    verdict(r, rep.ok() && rep.cones > 0 && rep.unique == want_unique);
}

inline void ray_images(const Session& s, CheckRecord& r) {
    r.claim = "every ray of the source fan maps as its case predicts";
    const auto& m = s.map();
    const auto& images = s.ray_images();
    std::map<std::string, std::size_t> by_rule, by_kind;
    std::map<std::string, std::set<std::string>> rules_of_type;
    std::size_t zero = 0;
    bool ok = true;
    for (const auto& x : images) {
        ++by_rule[x.rule];
        ++by_kind[image_kind_name(x.kind)];
        rules_of_type[m.from->F.labels[x.ray].type].insert(x.rule);
        if (x.kind == ImageKind::Zero) ++zero;
        if (!x.matches || x.kind == ImageKind::Outside) {
            ok = false;
            if (r.witnesses.size() < 5) r.witnesses.push_back(io::ray_image_json(m, x));
        }
    }
    json types = json::object();
    for (auto& [t, rules] : rules_of_type) types[t] = rules;
    r.details = {{"rays", images.size()}, {"zero_rays", zero}, {"by_rule", by_rule}, {"by_kind", by_kind}, {"rules_by_type", types}};
    auto want = expected_zero_rays(s.options().system, *s.options().to);
    if (want) {
        r.details["expected_zero_rays"] = *want;
        if (zero != *want) {
            ok = false;
            r.witnesses.push_back({{"zero_rays", zero}, {"expected", *want}});
        }
    }
    if (is_e7(s) && *s.options().to == SystemSpec{Family::E, 6}) {
        auto w = find_bisector_witness(m, images);
        r.details["bisector_witness"] = w ? json{{"cone", m.from->F.cones[w->cone]},
                                                 {"bisector_ray", w->bisector_ray},
                                                 {"pair", {w->pair.first, w->pair.second}},
                                                 {"a1_images", w->a1_images}}
                                          : json(nullptr);
        if (!w) {
            ok = false;
            r.witnesses.push_back({{"reason", "no cone maps onto half of a cone"}});
        }
    }
    r.status = ok ? Status::Pass : Status::Fail;
}

inline void flatness(const Session& s, CheckRecord& r) {
    const SystemSpec from = s.options().system, to = *s.options().to;
    // the only supported map expected to fail is E7 -> E6, where A3xA3 rays hit bisectors
    const bool expect_flat = !(from == SystemSpec{Family::E, 7} && to == SystemSpec{Family::E, 6});
    r.claim = expect_flat ? "the map of fans is flat with reduced fibres"
                          : "the map of fans is not flat, exactly because of A3xA3 rays mapping to bisectors";
    const auto& m = s.map();
    auto rep = flatness_check(m.proj, m.from->F, s.target_locator());
    r.details = io::flatness_json(rep);
    r.details["expected_flat"] = expect_flat;
    if (expect_flat) {
        verdict(r, rep.flat && rep.reduced && rep.map_of_fans);
        return;
    }
    bool only_a3 = !rep.bad_rays.empty();
    for (int v : rep.bad_rays) only_a3 &= m.from->F.labels[v].type == "A3xA3" && s.ray_images()[v].kind == ImageKind::Interior;
    r.details["bad_rays_all_A3xA3_bisectors"] = only_a3;
    verdict(r, !rep.flat && rep.map_of_fans && rep.bad_cones.empty() && only_a3 && rep.nonreduced_rays.empty());
}

inline void refinement(const Session& s, CheckRecord& r) {
    const SystemSpec sys = s.options().system;
    if (sys == SystemSpec{Family::E, 6}) {
        r.claim = "the refinement of F(E6) is strictly simplicial and fills each cone exactly";
        auto ref = refine_E6(s.system());
        r.details = {{"rays", ref.fan.rays.size()}, {"added_rays", ref.added_rays}, {"cones", ref.fan.cones.size()},
                     {"strictly_simplicial", ref.simplicial}, {"volume_exact", ref.volume_ok}};
        verdict(r, ref.simplicial && ref.volume_ok);
        return;
    }
    if (!is_e7(s)) {
        skip(r, "refinement is defined for E6 and E7");
        return;
    }
    r.claim = "the fiber fan of E7 over the refinement of F(E6) is flat with reduced fibres, and the refinement is minimal";
    const FiberRun& run = s.fiber();
    const auto& fr = run.report;
    const auto& mr = run.minimality;
    r.details = {{"refinement", {{"rays", run.refinement.fan.rays.size()}, {"added_rays", run.refinement.added_rays},
                                 {"cones", run.refinement.fan.cones.size()}, {"strictly_simplicial", run.refinement.simplicial},
                                 {"volume_exact", run.refinement.volume_ok}}},
                 {"fiber_fan", {{"sigmas", fr.sigmas}, {"subdivided", fr.subdivided}, {"cells", fr.cells},
                                {"simplicial_cells", fr.simplicial_cells}, {"strict_cells", fr.strict_cells},
                                {"rays", fr.rays}, {"added_rays", fr.added_rays}, {"volume_failures", fr.volume_failures},
                                {"support_failures", fr.support_failures}, {"bad_rays", fr.bad_rays},
                                {"nonreduced_rays", fr.nonreduced_rays}, {"bad_cells", fr.bad_cells},
                                {"flat", fr.flat()}, {"reduced", fr.reduced()}}},
                 {"minimality", {{"coarse_cones", mr.coarse_cones}, {"witnessed_cones", mr.witnessed_cones},
                                 {"forced_rays", mr.forced_rays}, {"added_rays", mr.added_rays}, {"missing", mr.missing.size()},
                                 {"minimal", mr.minimal()}}}};
    verdict(r, run.refinement.simplicial && run.refinement.volume_ok && fr.ok() && mr.minimal());
}

inline void eckhart(const Session& s, CheckRecord& r) {
    if (!is_e7(s)) {
        skip(r, "horizontal rays are defined for E7 over E6");
        return;
    }
    r.claim = "A1 rays outside E6 map to zero, stay in every cell, and span cones exactly in pairwise orthogonal triples";
    const FiberRun& run = s.fiber();
    const auto& fr = run.report;
    const RootSystem& rs = *s.system().rs;
    const Fan& F = s.system().F;
    // independent count: A1 rays outside the E6 image, and their pairwise orthogonal triples
    const Mask e6 = run.map.emb.image_mask();
    std::vector<int> outside;
    for (std::size_t v = 0; v < F.rays.size(); ++v)
        if (F.labels[v].type == "A1" && !(F.labels[v].theta & e6)) outside.push_back(static_cast<int>(v));
    std::set<std::vector<int>> triples;
    for (std::size_t i = 0; i < outside.size(); ++i)
        for (std::size_t j = i + 1; j < outside.size(); ++j)
            for (std::size_t k = j + 1; k < outside.size(); ++k) {
                Mask a = F.labels[outside[i]].theta, b = F.labels[outside[j]].theta, c = F.labels[outside[k]].theta;
                if (orthogonal(rs, a, b) && orthogonal(rs, a, c) && orthogonal(rs, b, c))
                    triples.insert({outside[i], outside[j], outside[k]});
            }
    r.details = {{"horizontal_rays", fr.horizontal_rays},     {"A1_outside_E6", outside.size()},
                 {"sigmas", fr.sigmas},                       {"sigmas_keeping_horizontal", fr.horizontal_in_all_cells},
                 {"triples_in_cones", fr.eckhart_triples.size()}, {"orthogonal_triples", triples.size()},
                 {"nonorthogonal_triples", fr.eckhart_nonorthogonal}};
    verdict(r, fr.horizontal_rays == outside.size() && fr.horizontal_in_all_cells == fr.sigmas &&
                   fr.eckhart_triples == triples && fr.eckhart_nonorthogonal == 0);
}

inline bool unit_in_catalog(const RootSystem& rs, const std::vector<D4Record>& cat, const IntVec& u) {
    for (const auto& d : cat)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (i != j && d4_unit(rs, d, i, j) == u) return true;
    return false;
}

inline void eval_identities(const Session& s, CheckRecord& r) {
    r.claim = "cross-ratios of the configuration equal exact products of root values, and units are Weyl equivariant up to a constant";
    const RootSystem& rs = *s.lattice().rs;
    const auto& cat = s.d4s();
    Evaluator ev(rs);
    std::mt19937_64 rng(s.options().seed);
    const int choices = 10, points = 100, weyl = 20, weyl_points = 20;
    std::size_t identity_ok = 0, identity_total = 0, symmetric_ok = 0, catalog_ok = 0;
    json bad = json::array();
    const int n = rs.rank();
    for (int c = 0; c < choices; ++c) {
        std::vector<int> p(n);
        std::iota(p.begin(), p.end(), 0);
        std::shuffle(p.begin(), p.end(), rng);
        std::sort(p.begin(), p.begin() + 4);
        IntVec unit = is_e(s) ? cusp_unit(rs, p[0], p[1], p[2], p[3], p[4]) : forgetful_unit(rs, p[0], p[1], p[2], p[3]);
        if (unit_in_catalog(rs, cat, unit)) ++catalog_ok;
        for (int k = 0; k < points; ++k) {
            ConfigPoint x = ev.random_point(rng);
            ++identity_total;
            Rational lhs, rhs, swapped;
            if (is_e(s)) {
                auto chk = cross_ratio_pullback_check(ev, p[0], p[1], p[2], p[3], p[4], x);
                lhs = chk.determinant_ratio;
                rhs = chk.root_product;
                swapped = cusp_cross_ratio(x, p[1], p[0], p[3], p[2], p[4]);
            } else {
                lhs = forgetful_cross_ratio(x, p[0], p[1], p[2], p[3]);
                rhs = ev.evaluate(unit, x);
                swapped = forgetful_cross_ratio(x, p[1], p[0], p[3], p[2]);
            }
            if (lhs == rhs) ++identity_ok;
            else if (bad.size() < 5) bad.push_back({{"indices", p}, {"lhs", rational_string(lhs)}, {"rhs", rational_string(rhs)}});
            if (swapped == lhs) ++symmetric_ok;
        }
    }
    std::size_t weyl_constant = 0;
    json constants = json::array();
    for (int k = 0; k < weyl; ++k) {
        WeylElement w = rs.random_element(rng);
        const auto& d = cat[rng() % cat.size()];
        std::vector<ConfigPoint> pts;
        for (int i = 0; i < weyl_points; ++i) pts.push_back(ev.random_point(rng));
        auto rep = weyl_ratio_check(ev, d4_unit(rs, d, 0, 1), w, pts);
        if (rep.constant) ++weyl_constant;
        constants.push_back(rep.constant ? json(rational_string(rep.value)) : json(nullptr));
    }
    r.details = {{"identity", is_e(s) ? "cuspidal cubic determinant ratio" : "forgetful cross-ratio"},
                 {"index_choices", choices},
                 {"points", identity_total},
                 {"equal", identity_ok},
                 {"swap_invariant", symmetric_ok},
                 {"units_in_D4_catalog", catalog_ok},
                 {"weyl_elements", weyl},
                 {"weyl_constant", weyl_constant},
                 {"weyl_constants", constants},
                 {"seed", s.options().seed}};
    verdict(r,
            identity_ok == identity_total && symmetric_ok == identity_total && catalog_ok == static_cast<std::size_t>(choices) &&
                weyl_constant == static_cast<std::size_t>(weyl),
            bad);
}

inline void fano(const Session& s, CheckRecord& r) {
    if (!is_e7(s)) {
        skip(r, "seven pairwise orthogonal roots exist only in E7");
        return;
    }
    r.claim = "no cone of F(E7) has seven A1 rays; the seven-sets match the maximal isotropic subspaces of F_2^6";
    const FanSystem& f = s.system();
    std::size_t max_a1 = 0;
    for (const auto& c : f.F.cones) {
        std::size_t a1 = 0;
        for (int v : c) a1 += f.F.labels[v].type == "A1";
        max_a1 = std::max(max_a1, a1);
    }
    auto sevens = orthogonal_root_sets(*f.rs, 7).size();
    auto isotropic = isotropic_subspace_count(3, 3);
    r.details = {{"max_A1_rays_in_a_cone", max_a1}, {"orthogonal_7_sets", sevens}, {"isotropic_3_spaces", isotropic}};
    verdict(r, max_a1 < 7 && sevens == isotropic);
}

}  // namespace detail

inline CheckRecord run_check(const Session& s, const std::string& name) {
    CheckRecord r;
    r.id = canonical_check(name);
    auto t0 = std::chrono::steady_clock::now();
    using Fn = void (*)(const Session&, CheckRecord&);
    static const std::map<std::string, Fn> table = {
        {"rank-table", detail::rank_table},         {"table1-relations", detail::table1},
        {"messy-surjectivity", detail::messy},      {"strict-simplicial", detail::strict_simplicial},
        {"fan-pairwise", detail::fan_pairwise_check}, {"intersection-fan", detail::intersection_fan},
        {"convex-disjoint", detail::convex_disjoint}, {"dual-basis", detail::dual_basis},
        {"ray-images", detail::ray_images},         {"flatness", detail::flatness},
        {"refinement", detail::refinement},         {"eckhart", detail::eckhart},
        {"eval-identities", detail::eval_identities}, {"fano", detail::fano}};
    table.at(r.id)(s, r);
    r.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

// Runs the checks on up to `jobs` threads; records come back in request order.
inline std::vector<CheckRecord> run_checks(const Session& s, const std::vector<std::string>& names) {
    if (names.empty()) throw UsageError("no checks requested");
    std::vector<std::string> ids;
    for (const auto& n : names) ids.push_back(canonical_check(n));
    for (const auto& id : ids)
        if ((id == "ray-images" || id == "flatness") && !s.options().to) throw UsageError("check " + id + " needs --to");
    std::vector<CheckRecord> out(ids.size());
    std::vector<std::exception_ptr> errors(ids.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < ids.size();) {
            try {
                out[i] = run_check(s, ids[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned jobs = std::max(1u, std::min<unsigned>(s.options().jobs, static_cast<unsigned>(ids.size())));
    std::vector<std::thread> pool;
    for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

inline json record_json(const CheckRecord& r) {
    return {{"id", r.id},           {"claim", r.claim},         {"status", status_name(r.status)},
            {"details", r.details}, {"witnesses", r.witnesses}, {"elapsed_ms", r.elapsed_ms}};
}

inline json report_json(const Session& s, const std::vector<CheckRecord>& records) {
    json checks = json::array();
    bool all = true;
    for (const auto& r : records) {
        checks.push_back(record_json(r));
        all &= r.status != Status::Fail;
    }
    json j = {{"schema_version", io::kSchemaVersion},
              {"system", system_name(s.options().system)},
              {"exhaustive", s.options().exhaustive},
              {"seed", s.options().seed},
              {"checks", checks},
              {"passed", all}};
    if (s.options().to) j["to"] = system_name(*s.options().to);
    return j;
}

}  // namespace adefans::verify
