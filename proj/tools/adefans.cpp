// Command line front end: build, verify, map, refine, eval, catalog.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "adefans/adefans.hpp"

namespace {

using namespace adefans;
using json = nlohmann::json;
using verify::UsageError;

constexpr int kExitOk = 0, kExitFail = 1, kExitUsage = 2;

SystemSpec fan_system(const std::string& name) {
    SystemSpec s;
    try {
        s = parse_system(name);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (!supports_fans(s)) throw UsageError("system " + name + " carries no fans (supported: D4..D8, E6, E7)");
    return s;
}

FanSystem::SimplexCache cache_from_env() {
    const char* dir = std::getenv("FANS_CACHE_DIR");
    if (!dir || !*dir) return {};
    std::filesystem::path p(dir);
    return {[p](const RComplex& R) { return io::load_cached_simplices(p, R); },
            [p](const RComplex& R) {
                try {
                    io::store_cached_simplices(p, R);
                } catch (const std::exception& e) {
                    std::cerr << "warning: cache not written: " << e.what() << "\n";
                }
            }};
}

FanSystem make_system(SystemSpec s) { return FanSystem::make(s, cache_from_env()); }

void write_text(const std::string& out, const std::string& text) {
    if (out.empty() || out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) throw UsageError("cannot write " + out);
    f << text;
}

std::map<std::string, std::string> provenance(const std::string& verb, const std::string& construction) {
    return {{"tool", "adefans"}, {"command", verb}, {"construction", construction}};
}

// ---------------------------------------------------------------- build

int cmd_build(const std::string& system, const std::string& target, const std::string& out) {
    const SystemSpec spec = fan_system(system);
    if (target != "R" && target != "F" && target != "G" && target != "Ftilde")
        throw UsageError("unknown target " + target + " (use R, F, G or Ftilde)");
    if (target == "Ftilde" && spec.family != Family::E) throw UsageError("Ftilde is defined for E6 and E7");
    FanSystem f = make_system(spec);
    const bool e7 = spec == SystemSpec{Family::E, 7};
    if (target == "R") {
        write_text(out, io::dump(io::complex_json(*f.R)));
        return kExitOk;
    }
    if (target == "F") {
        write_text(out, io::dump(io::fan_json({f.F, provenance("build", "F")}, *f.rs)));
        return kExitOk;
    }
    if (target == "G") {
        Fan g = build_G(*f.R, e7);
        write_text(out, io::dump(io::fan_json({g, provenance("build", g.construction)}, *f.rs)));
        return kExitOk;
    }
    if (!e7) {
        Refinement r = refine_E6(f);
        if (!r.simplicial || !r.volume_ok) {
            std::cerr << "refinement failed its own checks\n";
            return kExitFail;
        }
        write_text(out, io::dump(io::fan_json({r.fan, provenance("build", "Ftilde")}, *f.rs)));
        return kExitOk;
    }
    // the fiber fan of E7 has millions of cells and is streamed
    FanSystem e6 = make_system({Family::E, 6});
    MapContext m = make_map(f, e6);
    Refinement r = refine_E6(e6);
    FiberContext ctx(m, r);
    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!out.empty() && out != "-") {
        file.open(out, std::ios::binary);
        if (!file) throw UsageError("cannot write " + out);
        os = &file;
    }
    io::FiberFanWriter writer(*os, *f.rs, f.F, provenance("build", "Ftilde"));
    auto rep = fiber_fan_E7(ctx, [&](std::size_t s, const FiberCell& c) { writer(s, c); });
    writer.finish();
    if (!rep.ok()) {
        std::cerr << "fiber fan failed its own checks\n";
        return kExitFail;
    }
    return kExitOk;
}

// ---------------------------------------------------------------- verify

// A fan document given to verify must be valid and equal to the fan rebuilt here.
verify::CheckRecord check_document(const std::string& path, const verify::Session& s) {
    verify::CheckRecord r;
    r.id = "document";
    r.claim = "the document parses, is valid, and equals the fan rebuilt from the system";
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read " + path);
    io::FanDocument doc;
    try {
        doc = io::fan_from_json(json::parse(in));
    } catch (const std::exception& e) {
        r.status = verify::Status::Fail;
        r.witnesses.push_back({{"error", e.what()}});
        return r;
    }
    if (doc.fan.system != s.options().system) throw UsageError("document is for " + system_name(doc.fan.system));
    const FanSystem& f = s.system();
    std::optional<Fan> rebuilt;
    const std::string& c = doc.fan.construction;
    if (c == "F") rebuilt = f.F;
    else if (c == "G" || c == "G'") rebuilt = build_G(*f.R, c == "G'");
    else if (c == "Ftilde" && f.rs->spec == SystemSpec{Family::E, 6}) rebuilt = refine_E6(f).fan;
    r.details = {{"path", path}, {"construction", c}, {"rays", doc.fan.rays.size()}, {"cones", doc.fan.cones.size()}};
    if (!rebuilt) {
        r.status = verify::Status::Skipped;
        r.details["reason"] = "no in-memory rebuild for this construction";
        return r;
    }
    bool same = *rebuilt == doc.fan;
    r.status = same ? verify::Status::Pass : verify::Status::Fail;
    if (!same) r.witnesses.push_back({{"reason", "document differs from the rebuilt fan"}});
    return r;
}

int cmd_verify(const std::string& system, const std::vector<std::string>& checks, const std::string& to, bool exhaustive,
               std::uint64_t seed, unsigned jobs, const std::vector<std::string>& documents, const std::string& out) {
    if (checks.empty() && documents.empty()) throw UsageError("no checks requested");
    verify::Options o;
    o.system = fan_system(system);
    if (!to.empty()) o.to = fan_system(to);
    o.exhaustive = exhaustive;
    o.seed = seed;
    o.jobs = jobs;
    o.cache = cache_from_env();
    verify::Session s(o);
    std::vector<verify::CheckRecord> records;
    for (const auto& d : documents) records.push_back(check_document(d, s));
    if (!checks.empty()) {
        auto more = verify::run_checks(s, checks);
        records.insert(records.end(), more.begin(), more.end());
    }
    bool failed = false;
    for (const auto& r : records) {
        std::string tag = r.status == verify::Status::Pass ? "PASS" : r.status == verify::Status::Fail ? "FAIL" : "SKIP";
        std::cerr << tag << " " << r.id << " (" << r.elapsed_ms << " ms)";
        if (r.status == verify::Status::Fail && !failed) {
            std::cerr << "  <- first failure: " << r.witnesses.dump().substr(0, 400);
            failed = true;
        }
        std::cerr << "\n";
    }
    write_text(out, io::dump(verify::report_json(s, records)));
    return failed ? kExitFail : kExitOk;
}

// ---------------------------------------------------------------- map

int cmd_map(const std::string& from, const std::string& to, const std::string& out) {
    const SystemSpec a = fan_system(from), b = fan_system(to);
    if (!supported_map(a, b)) throw UsageError("unsupported map " + from + " -> " + to);
    FanSystem src = make_system(a), dst = make_system(b);
    MapContext m = make_map(src, dst);
    ConeLocator loc(dst.F);
    auto images = ray_image_table(m, loc);
    auto flat = flatness_check(m.proj, src.F, loc);
    json rays = json::array();
    std::size_t zero = 0, mismatched = 0;
    for (const auto& r : images) {
        rays.push_back(io::ray_image_json(m, r));
        zero += r.kind == ImageKind::Zero;
        mismatched += !r.matches;
    }
    std::string verdict = flat.flat && flat.reduced ? "FLAT+REDUCED" : flat.flat ? "FLAT" : "NOT FLAT";
    json doc = {{"schema_version", io::kSchemaVersion},
                {"from", system_name(a)},
                {"to", system_name(b)},
                {"rays", rays},
                {"zero_rays", zero},
                {"mismatched_predictions", mismatched},
                {"flatness", io::flatness_json(flat)},
                {"verdict", verdict}};
    write_text(out, io::dump(doc));
    std::cerr << system_name(a) << " -> " << system_name(b) << ": " << images.size() << " rays, " << zero << " zero, "
              << verdict << "\n";
    return mismatched ? kExitFail : kExitOk;
}

// ---------------------------------------------------------------- refine

int cmd_refine(const std::string& system, const std::string& out) {
    verify::Options o;
    o.system = fan_system(system);
    if (o.system.family != Family::E) throw UsageError("refine is defined for E6 and E7");
    o.cache = cache_from_env();
    verify::Session s(o);
    auto r = verify::run_check(s, "refinement");
    write_text(out, io::dump(verify::record_json(r)));
    return r.status == verify::Status::Fail ? kExitFail : kExitOk;
}

// ---------------------------------------------------------------- eval

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream in(s);
    for (std::string part; std::getline(in, part, sep);)
        if (!part.empty()) out.push_back(part);
    return out;
}

std::vector<int> parse_indices(const std::string& s, std::size_t count, int n) {
    std::vector<int> idx;
    for (const auto& p : split(s, ',')) {
        int i;
        try {
            i = std::stoi(p);
        } catch (...) {
            throw UsageError("bad index " + p);
        }
        if (i < 1 || i > n) throw UsageError("index " + p + " out of range 1.." + std::to_string(n));
        idx.push_back(i - 1);
    }
    if (idx.size() != count) throw UsageError("expected " + std::to_string(count) + " indices");
    return idx;
}

int cmd_eval(const std::string& system, const std::string& point, const std::string& unit, const std::string& cusp,
             const std::string& forgetful, const std::string& out) {
    const SystemSpec spec = fan_system(system);
    RootSystem rs = build_root_system(spec);
    Evaluator ev(rs);
    ConfigPoint x;
    try {
        for (const auto& c : split(point, ',')) x.push_back(parse_rational(c));
    } catch (const std::exception& e) {
        throw UsageError(std::string("bad point: ") + e.what());
    }
    if (static_cast<int>(x.size()) != ev.coords())
        throw UsageError("point needs " + std::to_string(ev.coords()) + " coordinates");
    int bad = ev.offending_root(x);
    if (bad >= 0) throw UsageError("point is not admissible: root " + rs.name(bad) + " vanishes");
    const int modes = !unit.empty() + !cusp.empty() + !forgetful.empty();
    if (modes != 1) throw UsageError("give exactly one of --unit, --cusp, --forgetful");
    json doc = {{"system", system_name(spec)}};
    json pt = json::array();
    for (auto& c : x) pt.push_back(rational_string(c));
    doc["point"] = pt;
    if (!unit.empty()) {
        IntVec m(rs.size(), 0);
        for (const auto& term : split(unit, ',')) {
            auto colon = term.find(':');
            if (colon == std::string::npos) throw UsageError("unit terms look like name:coefficient");
            int r;
            std::int64_t c;
            try {
                r = rs.by_name(term.substr(0, colon));
                c = std::stoll(term.substr(colon + 1));
            } catch (const std::exception& e) {
                throw UsageError(std::string("bad unit term ") + term + ": " + e.what());
            }
            m[r] += c;
        }
        NLattice lat(rs);
        if (!lat.in_M(m)) throw UsageError("exponent vector is not a unit (not in M)");
        doc["value"] = rational_string(ev.evaluate(m, x));
    } else if (!cusp.empty()) {
        if (spec.family != Family::E) throw UsageError("--cusp needs E6 or E7");
        auto i = parse_indices(cusp, 5, rs.rank());
        std::vector<int> first(i.begin(), i.begin() + 4);
        if (!std::is_sorted(first.begin(), first.end()))
            throw UsageError("the first four indices must increase");
        std::vector<int> all = i;
        std::sort(all.begin(), all.end());
        if (std::adjacent_find(all.begin(), all.end()) != all.end()) throw UsageError("indices must be distinct");
        auto chk = cross_ratio_pullback_check(ev, i[0], i[1], i[2], i[3], i[4], x);
        doc["determinant_ratio"] = rational_string(chk.determinant_ratio);
        doc["root_product"] = rational_string(chk.root_product);
        doc["equal"] = chk.equal;
        write_text(out, io::dump(doc));
        return chk.equal ? kExitOk : kExitFail;
    } else {
        if (spec.family != Family::D) throw UsageError("--forgetful needs D_n");
        auto i = parse_indices(forgetful, 4, rs.rank());
        if (!(i[0] < i[1] && i[1] < i[2] && i[2] < i[3])) throw UsageError("indices must increase");
        Rational lhs = forgetful_cross_ratio(x, i[0], i[1], i[2], i[3]);
        Rational rhs = ev.evaluate(forgetful_unit(rs, i[0], i[1], i[2], i[3]), x);
        doc["cross_ratio"] = rational_string(lhs);
        doc["root_product"] = rational_string(rhs);
        doc["equal"] = lhs == rhs;
        write_text(out, io::dump(doc));
        return lhs == rhs ? kExitOk : kExitFail;
    }
    write_text(out, io::dump(doc));
    return kExitOk;
}

// ---------------------------------------------------------------- catalog

int cmd_catalog(const std::string& system, const std::string& kind, const std::string& out) {
    const SystemSpec spec = fan_system(system);
    RootSystem rs = build_root_system(spec);
    json doc = {{"schema_version", io::kSchemaVersion}, {"system", io::system_json(rs)}, {"kind", kind}};
    json items = json::array();
    if (kind == "roots") {
        NLattice lat(rs);
        for (int r = 0; r < rs.size(); ++r)
            items.push_back({{"index", r}, {"name", rs.name(r)}, {"vector", rs.roots[r]}, {"three_legged", rs.three_legged(r)},
                             {"psi", lat.psi_root(r)}});
    } else if (kind == "d4") {
        for (const auto& d : d4_catalog(rs)) {
            json f = json::array();
            for (Mask m : d.fourtuples) f.push_back({{"roots", io::mask_json(m)}, {"names", mask_names(rs, m)}});
            items.push_back({{"roots", io::mask_json(d.roots)}, {"fourtuples", f}});
        }
    } else if (kind == "rays") {
        NLattice lat(rs);
        RComplex R = build_R(rs, lat);
        for (const auto& v : R.vertices) {
            json e = {{"roots", io::mask_json(v.theta)}, {"names", mask_names(rs, v.theta)}, {"type", v.type}, {"ray", v.ray}};
            items.push_back(e);
        }
    } else {
        throw UsageError("unknown catalog kind " + kind + " (use roots, d4 or rays)");
    }
    doc["items"] = items;
    doc["count"] = items.size();
    write_text(out, io::dump(doc));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Toric fans of ADE root systems: build, verify and evaluate"};
    app.require_subcommand(1);
    std::string system, target = "F", to, out, from, point, unit, cusp, forgetful, kind = "roots";
    std::vector<std::string> checks, documents;
    bool exhaustive = false;
    std::uint64_t seed = 1;
    unsigned jobs = 1;

    auto* build = app.add_subcommand("build", "Write the complex R or a fan as JSON");
    build->add_option("--system", system, "D4..D8, E6 or E7")->required();
    build->add_option("--target", target, "R, F, G or Ftilde");
    build->add_option("--out", out, "Output path (default stdout)");

    auto* ver = app.add_subcommand("verify", "Run named checks; exit 0 iff none fails");
    ver->add_option("--system", system, "D4..D8, E6 or E7")->required();
    ver->add_option("--check", checks, "Check name (repeatable)");
    ver->add_option("--to", to, "Target system for ray-images and flatness");
    ver->add_option("--fan", documents, "Fan document to validate against the rebuilt fan (repeatable)");
    ver->add_flag("--exhaustive", exhaustive, "Examine every simplex / every cone pair instead of orbit representatives or samples");
    ver->add_option("--seed", seed, "Seed for random sampling");
    ver->add_option("--jobs", jobs, "Checks run concurrently")->check(CLI::PositiveNumber);
    ver->add_option("--out", out, "Report path (default stdout)");

    auto* map = app.add_subcommand("map", "Ray images and flatness of the projection between fans");
    map->add_option("--from", from, "Source system")->required();
    map->add_option("--to", to, "Target system")->required();
    map->add_option("--out", out, "Output path (default stdout)");

    auto* refine = app.add_subcommand("refine", "Refinement of F(E6) and, for E7, the fiber fan over it");
    refine->add_option("--system", system, "E6 or E7")->required();
    refine->add_option("--out", out, "Output path (default stdout)");

    auto* eval = app.add_subcommand("eval", "Evaluate a unit exactly at a configuration point");
    eval->add_option("--system", system, "D4..D8, E6 or E7")->required();
    eval->add_option("--point", point, "Comma separated rationals, e.g. 1,2,3/2,5,7,11")->required();
    eval->add_option("--unit", unit, "Exponents as rootname:coefficient,...");
    eval->add_option("--cusp", cusp, "Five 1-based indices a,b,c,d,e with a<b<c<d");
    eval->add_option("--forgetful", forgetful, "Four increasing 1-based indices");
    eval->add_option("--out", out, "Output path (default stdout)");

    auto* cat = app.add_subcommand("catalog", "List roots, D4 subsystems or ray subsystems");
    cat->add_option("--system", system, "D4..D8, E6 or E7")->required();
    cat->add_option("--kind", kind, "roots, d4 or rays");
    cat->add_option("--out", out, "Output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }
    try {
        if (*build) return cmd_build(system, target, out);
        if (*ver) return cmd_verify(system, checks, to, exhaustive, seed, jobs, documents, out);
        if (*map) return cmd_map(from, to, out);
        if (*refine) return cmd_refine(system, out);
        if (*eval) return cmd_eval(system, point, unit, cusp, forgetful, out);
        if (*cat) return cmd_catalog(system, kind, out);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal failure: " << e.what() << "\n";
        return kExitFail;
    }
    return kExitUsage;
}
