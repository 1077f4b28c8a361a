#pragma once
// JSON documents for fans, complexes and reports. Keys are sorted and every number is an integer,
// so equal inputs give byte-identical output.

#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <string>

#include <json.hpp>

#include "fanmaps.hpp"

namespace adefans::io {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

struct FanDocument {
    Fan fan;
    std::map<std::string, std::string> provenance;
    bool operator==(const FanDocument&) const = default;
};

inline std::string dump(const json& j) { return j.dump(1) + "\n"; }

inline json mask_json(Mask m) {
    json a = json::array();
    for_each_bit(m, [&](int r) { a.push_back(r); });
    return a;
}

inline Mask mask_from_json(const json& a, int roots) {
    Mask m = 0;
    for (const auto& x : a) {
        int r = x.get<int>();
        if (r < 0 || r >= roots) throw std::invalid_argument("root index out of range");
        m |= Mask(1) << r;
    }
    return m;
}

inline json system_json(const RootSystem& rs) {
    json roots = json::array();
    for (const auto& r : rs.roots) roots.push_back(r);
    return {{"name", system_name(rs.spec)}, {"rank", rs.rank()}, {"positive_roots", roots}};
}

inline json label_json(const RootSystem& rs, const RayLabel& l) {
    json j = {{"roots", mask_json(l.theta)}, {"type", l.type}, {"parts", l.parts}};
    if (l.theta) j["names"] = mask_names(rs, l.theta);
    return j;
}

inline json fan_json(const FanDocument& doc, const RootSystem& rs) {
    const Fan& f = doc.fan;
    if (f.system != rs.spec) throw std::invalid_argument("fan and root system disagree");
    json rays = json::array();
    for (std::size_t i = 0; i < f.rays.size(); ++i)
        rays.push_back({{"vector", f.rays[i]}, {"label", label_json(rs, f.labels[i])}});
    json facets = json::array();
    for (std::size_t c = 0; c < f.facets.size(); ++c)
        if (!f.facets[c].empty()) facets.push_back({{"cone", c}, {"normals", f.facets[c]}});
    json j = {{"schema_version", kSchemaVersion},
              {"system", system_json(rs)},
              {"lattice_rank", f.lattice_rank},
              {"construction", f.construction},
              {"provenance", doc.provenance},
              {"rays", rays},
              {"cones", f.cones}};
    if (!facets.empty()) j["facets"] = facets;
    return j;
}

// Parses and validates a fan document: schema, root list, primitive rays, cone indices.
inline FanDocument fan_from_json(const json& j) {
    if (j.at("schema_version").get<int>() != kSchemaVersion) throw std::invalid_argument("unsupported schema version");
    FanDocument doc;
    Fan& f = doc.fan;
    f.system = parse_system(j.at("system").at("name").get<std::string>());
    RootSystem rs = build_root_system(f.system);
    std::vector<IntVec> roots;
    for (const auto& r : j.at("system").at("positive_roots")) roots.push_back(r.get<IntVec>());
    if (roots != rs.roots) throw std::invalid_argument("root list differs from the canonical order");
    f.lattice_rank = j.at("lattice_rank").get<int>();
    f.construction = j.at("construction").get<std::string>();
    doc.provenance = j.at("provenance").get<std::map<std::string, std::string>>();
    for (const auto& r : j.at("rays")) {
        IntVec v = r.at("vector").get<IntVec>();
        if (static_cast<int>(v.size()) != f.lattice_rank) throw std::invalid_argument("ray of wrong length");
        if (content(v) != 1) throw std::invalid_argument("ray is not primitive");
        const auto& l = r.at("label");
        f.rays.push_back(v);
        f.labels.push_back({mask_from_json(l.at("roots"), rs.size()), l.at("type").get<std::string>(),
                            l.at("parts").get<std::vector<int>>()});
    }
    for (const auto& c : j.at("cones")) {
        auto cone = c.get<std::vector<int>>();
        for (int r : cone)
            if (r < 0 || r >= static_cast<int>(f.rays.size())) throw std::invalid_argument("cone index out of range");
        f.cones.push_back(cone);
    }
    f.facets.assign(f.cones.size(), {});
    if (j.contains("facets"))
        for (const auto& e : j.at("facets")) {
            auto c = e.at("cone").get<std::size_t>();
            if (c >= f.cones.size()) throw std::invalid_argument("facet entry out of range");
            f.facets[c] = e.at("normals").get<IntMatrix>();
        }
    return doc;
}

inline json complex_json(const RComplex& R) {
    json verts = json::array();
    for (const auto& v : R.vertices) {
        json e = {{"roots", mask_json(v.theta)}, {"type", v.type}, {"ray", v.ray}};
        if (R.rs->spec.family == Family::D) e["bipartition"] = v.bipartition;
        verts.push_back(e);
    }
    return {{"schema_version", kSchemaVersion},
            {"system", system_json(*R.rs)},
            {"construction", "R"},
            {"vertices", verts},
            {"maximal_simplices", R.maximal_simplices()}};
}

// ---------------------------------------------------------------- cache of maximal simplices

inline std::filesystem::path cache_file(const std::filesystem::path& dir, const RComplex& R) {
    return dir / ("R_" + system_name(R.rs->spec) + "_v" + std::to_string(kSchemaVersion) + ".json");
}

// Loads cached maximal simplices if the vertex list matches; every simplex is re-checked.
inline bool load_cached_simplices(const std::filesystem::path& dir, const RComplex& R) {
    std::ifstream in(cache_file(dir, R));
    if (!in) return false;
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.contains("vertices") || !j.contains("maximal_simplices")) return false;
    std::vector<Mask> masks;
    for (const auto& v : R.vertices) masks.push_back(v.theta);
    if (j.at("vertices").get<std::vector<Mask>>() != masks) return false;
    return R.adopt_maximal_simplices(j.at("maximal_simplices").get<std::vector<std::vector<int>>>());
}

inline void store_cached_simplices(const std::filesystem::path& dir, const RComplex& R) {
    std::filesystem::create_directories(dir);
    std::vector<Mask> masks;
    for (const auto& v : R.vertices) masks.push_back(v.theta);
    json j = {{"vertices", masks}, {"maximal_simplices", R.maximal_simplices()}};
    auto tmp = cache_file(dir, R);
    tmp += ".tmp";
    {
        std::ofstream out(tmp);
        out << j.dump();
    }
    std::filesystem::rename(tmp, cache_file(dir, R));
}

// ---------------------------------------------------------------- reports

inline json ray_image_json(const MapContext& m, const RayImage& r) {
    const Fan& from = m.from->F;
    json coeffs = json::array();
    for (std::size_t k = 0; k < r.coeffs.size(); ++k)
        coeffs.push_back({{"ray", r.target[k]}, {"coefficient", rational_string(r.coeffs[k])}});
    return {{"ray", r.ray},
            {"type", from.labels[r.ray].type},
            {"roots", mask_json(from.labels[r.ray].theta)},
            {"image", r.image},
            {"kind", image_kind_name(r.kind)},
            {"target", r.target},
            {"coefficients", coeffs},
            {"rule", r.rule},
            {"matches_prediction", r.matches},
            {"reduced", r.reduced()}};
}

inline json flatness_json(const FlatnessReport& f) {
    return {{"map_of_fans", f.map_of_fans}, {"flat", f.flat},       {"reduced", f.reduced},
            {"rays", f.rays},               {"cones", f.cones},     {"bad_rays", f.bad_rays},
            {"nonreduced_rays", f.nonreduced_rays}, {"bad_cones", f.bad_cones}};
}

// Streams the fiber fan of E7 as a fan document. Cells are written as they are produced and
// the rays, which are few, are written at the end; keys come out in sorted order.
class FiberFanWriter {
public:
    FiberFanWriter(std::ostream& out, const RootSystem& rs, const Fan& coarse, std::map<std::string, std::string> prov)
        : out_(out), rs_(rs), coarse_(coarse), prov_(std::move(prov)) {
        out_ << "{\n \"cones\": [";
    }

    void operator()(std::size_t, const FiberCell& cell) {
        std::vector<int> ids;
        for (std::size_t i = 0; i < cell.rays.size(); ++i) {
            auto [it, fresh] = ids_.try_emplace(cell.keys[i], static_cast<int>(rays_.size()));
            if (fresh) {
                rays_.push_back(cell.rays[i]);
                keys_.push_back(cell.keys[i]);
            }
            ids.push_back(it->second);
        }
        std::sort(ids.begin(), ids.end());
        out_ << (first_ ? "\n  " : ",\n  ") << json(ids).dump();
        first_ = false;
        ++cells_;
    }

    void finish() {
        out_ << (first_ ? "]" : "\n ]") << ",\n \"construction\": \"Ftilde\",\n \"lattice_rank\": "
             << coarse_.lattice_rank << ",\n";
        out_ << " \"provenance\": " << json(prov_).dump() << ",\n \"rays\": [";
        for (std::size_t i = 0; i < rays_.size(); ++i) {
            RayLabel l;
            const auto& key = keys_[i];
            if (key.size() == 1 && key[0].second == 1) {
                l = coarse_.labels[key[0].first];
            } else {
                l.type = "fiber";
                for (auto& [r, c] : key) l.parts.push_back(r);
            }
            json e = {{"vector", rays_[i]}, {"label", label_json(rs_, l)}};
            out_ << (i ? ",\n  " : "\n  ") << e.dump();
        }
        out_ << (rays_.empty() ? "]" : "\n ]") << ",\n \"schema_version\": " << kSchemaVersion
             << ",\n \"system\": " << system_json(rs_).dump() << "\n}\n";
    }

    std::size_t cells() const { return cells_; }
    std::size_t rays() const { return rays_.size(); }

private:
    std::ostream& out_;
    const RootSystem& rs_;
    const Fan& coarse_;
    std::map<std::string, std::string> prov_;
    std::map<std::vector<std::pair<int, std::int64_t>>, int> ids_;
    std::vector<IntVec> rays_;
    std::vector<std::vector<std::pair<int, std::int64_t>>> keys_;
    bool first_ = true;
    std::size_t cells_ = 0;
};

}  // namespace adefans::io
