#pragma once

#include "fancore.hpp"

#include <functional>
#include <memory>
#include <unordered_set>

namespace adefans {

// A root system together with its lattice, ray complex and fan F.
struct FanSystem {
    std::unique_ptr<RootSystem> rs;
    std::unique_ptr<NLattice> lat;
    std::unique_ptr<RComplex> R;
    Fan F;

    // Optional store for the maximal simplices of R, which dominate the build time for E7.
    struct SimplexCache {
        std::function<bool(const RComplex&)> load;
        std::function<void(const RComplex&)> store;
    };

    static FanSystem make(SystemSpec s, const SimplexCache& cache = {}) {
        FanSystem f;
        f.rs = std::make_unique<RootSystem>(build_root_system(s));
        f.lat = std::make_unique<NLattice>(*f.rs);
        f.R = std::make_unique<RComplex>(build_R(*f.rs, *f.lat));
        bool loaded = cache.load && cache.load(*f.R);
        f.F = build_F(*f.R);
        if (!loaded && cache.store) cache.store(*f.R);
        return f;
    }
};

// Supported inclusions: D_n in D_{n+1}, D5 = E5 in E6, E6 in E7, and the identity.
inline bool supported_map(SystemSpec from, SystemSpec to) {
    if (!supports_fans(from)) return false;
    if (from == to) return true;
    if (from.family == Family::D && to.family == Family::D) return to.rank + 1 == from.rank && to.rank >= 4;
    if (from == SystemSpec{Family::E, 6}) return to == SystemSpec{Family::D, 5};
    if (from == SystemSpec{Family::E, 7}) return to == SystemSpec{Family::E, 6};
    return false;
}

// Lookup of rays and cones in a fan, and exact location of vectors in its cones.
class ConeLocator {
public:
    explicit ConeLocator(const Fan& f) : fan_(&f), cones_of_ray_(f.rays.size()) {
        for (std::size_t r = 0; r < f.rays.size(); ++r) ray_index_[f.rays[r]] = static_cast<int>(r);
        for (std::size_t c = 0; c < f.cones.size(); ++c)
            for (int r : f.cones[c]) cones_of_ray_[r].push_back(static_cast<int>(c));
    }

    const Fan& fan() const { return *fan_; }

    // Builds the per-cone solvers now; afterwards the locator is safe to share across threads.
    void warm() const {
        if (solvers_.empty()) prepare();
    }

    // Ray with the given primitive generator, or -1.
    int ray_of(const IntVec& v) const {
        auto it = ray_index_.find(v);
        return it == ray_index_.end() ? -1 : it->second;
    }

    // A maximal cone containing all the listed rays, or -1.
    int common_cone(const std::vector<int>& rays) const {
        if (rays.empty()) return fan_->cones.empty() ? -1 : 0;
        int best = rays[0];
        for (int r : rays)
            if (cones_of_ray_[r].size() < cones_of_ray_[best].size()) best = r;
        for (int c : cones_of_ray_[best]) {
            const auto& cone = fan_->cones[c];
            bool all = true;
            for (int r : rays)
                if (!std::binary_search(cone.begin(), cone.end(), r)) all = false;
            if (all) return c;
        }
        return -1;
    }

    struct Location {
        bool found = false;
        std::vector<int> rays;          // support: rays with positive coefficient
        std::vector<Rational> coeffs;   // v = sum coeffs[k] * rays[k]
    };

    // Smallest cone containing v in its relative interior (v = 0 gives the empty support).
    Location locate(const IntVec& v) const {
        Location loc;
        if (is_zero(v)) {
            loc.found = true;
            return loc;
        }
        IntVec p = primitive(v);
        if (int r = ray_of(p); r >= 0) {
            loc.found = true;
            loc.rays = {r};
            loc.coeffs = {Rational(content(v))};
            return loc;
        }
        if (solvers_.empty()) prepare();
        for (std::size_t c = 0; c < fan_->cones.size(); ++c) {
            const auto& cone = fan_->cones[c];
            const auto& sv = solvers_[c];
            const std::size_t k = cone.size();
            // det * x = adj * v restricted to the pivot coordinates
            IntVec x(k, 0);
            bool nonneg = true;
            for (std::size_t i = 0; i < k && nonneg; ++i) {
                for (std::size_t j = 0; j < k; ++j) x[i] += sv.adj[i][j] * v[sv.rows[j]];
                if (x[i] * sv.det < 0) nonneg = false;
            }
            if (!nonneg) continue;
            IntVec check(v.size(), 0);
            for (std::size_t i = 0; i < k; ++i) check = add(check, scale(fan_->rays[cone[i]], x[i]));
            if (check != scale(v, sv.det)) continue;
            loc.found = true;
            for (std::size_t i = 0; i < k; ++i)
                if (x[i] != 0) {
                    loc.rays.push_back(cone[i]);
                    loc.coeffs.push_back(Rational(x[i]) / sv.det);
                }
            return loc;
        }
        return loc;
    }

private:
    // Pivot coordinates where the cone's generators are independent, with the adjugate of
    // that square block.
    struct Solver {
        std::vector<std::size_t> rows;
        IntMatrix adj;
        std::int64_t det = 1;
    };

    void prepare() const {
        for (const auto& cone : fan_->cones) {
            IntMatrix g = fan_->generators(cone);
            Solver sv;
            const std::size_t k = g.size(), n = k ? g[0].size() : 0;
            for (std::size_t c = 0; c < n && sv.rows.size() < k; ++c) {
                sv.rows.push_back(c);
                IntMatrix trial(k, IntVec());
                for (std::size_t i = 0; i < k; ++i)
                    for (auto r : sv.rows) trial[i].push_back(g[i][r]);
                if (exact_rank(transpose(trial)) < sv.rows.size()) sv.rows.pop_back();
            }
            if (sv.rows.size() != k) throw std::logic_error("cone generators are dependent");
            IntMatrix sq(k, IntVec(k));  // sq[j][i] = g[i][rows[j]], so sq * x = v[rows]
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < k; ++j) sq[j][i] = g[i][sv.rows[j]];
            sv.det = to_i64(determinant(sq));
            auto inv = rational_inverse(sq);
            sv.adj.assign(k, IntVec(k));
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < k; ++j) {
                    Rational a = (*inv)[i][j] * sv.det;
                    sv.adj[i][j] = to_i64(boost::multiprecision::numerator(a));
                }
            solvers_.push_back(std::move(sv));
        }
    }

    const Fan* fan_;
    mutable std::vector<Solver> solvers_;
    std::unordered_map<IntVec, int, IntVecHash> ray_index_;
    std::vector<std::vector<int>> cones_of_ray_;
};

// ---------------------------------------------------------------- ray images

enum class ImageKind { Zero, Ray, Interior, Outside };

inline std::string image_kind_name(ImageKind k) {
    switch (k) {
        case ImageKind::Zero: return "zero";
        case ImageKind::Ray: return "ray";
        case ImageKind::Interior: return "interior";
        case ImageKind::Outside: return "outside";
    }
    return "?";
}

struct RayImage {
    int ray = -1;
    IntVec image;                   // pi(first lattice point)
    ImageKind kind = ImageKind::Zero;
    std::vector<int> target;        // target rays spanning the smallest cone containing the image
    std::vector<Rational> coeffs;   // image = sum coeffs[k] * target generator k
    std::string rule;               // which case of the image formulas applies
    std::vector<std::pair<int, int>> predicted;  // (target ray, multiplicity) from the rule
    bool matches = false;           // predicted combination equals the computed image

    bool reduced() const { return kind == ImageKind::Zero || (kind == ImageKind::Ray && coeffs[0] == 1); }
};

struct MapContext {
    const FanSystem* from = nullptr;
    const FanSystem* to = nullptr;
    Embedding emb;
    Projection proj;
};

inline MapContext make_map(const FanSystem& from, const FanSystem& to) {
    if (!supported_map(from.rs->spec, to.rs->spec))
        throw std::invalid_argument("unsupported map " + system_name(from.rs->spec) + " -> " + system_name(to.rs->spec));
    MapContext m;
    m.from = &from;
    m.to = &to;
    m.emb = standard_embedding(*to.rs, *from.rs);
    m.proj = make_projection(m.emb, *from.lat, *to.lat);
    if (!projection_commutes(m.proj)) throw std::logic_error("projection does not commute with psi");
    return m;
}

namespace detail {

inline std::uint32_t normalize_bipartition(std::uint32_t I, int n) {
    std::uint32_t comp = ((1u << n) - 1) & ~I;
    int a = std::popcount(I), b = std::popcount(comp);
    if (a != b) return a < b ? I : comp;
    return (I & 1) ? I : comp;
}

// Rule-based image of a ray: list of (target vertex, multiplicity) and the rule name.
inline std::pair<std::string, std::vector<std::pair<int, int>>> predict_image(const MapContext& m, int v) {
    const RootSystem& rs = *m.from->rs;
    const RVertex& vx = m.from->R->vertices[v];
    const RComplex& tR = *m.to->R;
    auto target = [&](Mask amb) {
        int t = tR.find(m.emb.pull(amb));
        if (t < 0) throw std::logic_error("predicted image is not a target ray");
        return t;
    };
    if (m.from->rs->spec == m.to->rs->spec) return {"identity", {{v, 1}}};
    if (rs.spec.family == Family::D) {
        const int n = m.to->rs->spec.rank;
        const std::uint32_t low = (1u << n) - 1;
        std::uint32_t I = vx.bipartition & low, J = ~vx.bipartition & low;
        if (std::popcount(I) > 1 && std::popcount(J) > 1) {
            std::uint32_t b = normalize_bipartition(I, n);
            for (int t = 0; t < tR.size(); ++t)
                if (tR.vertices[t].bipartition == b) return {"both sides keep two indices", {{t, 1}}};
            throw std::logic_error("restricted bipartition is not a target ray");
        }
        return {"one side keeps at most one index", {}};
    }
    const Mask inter = vx.theta & m.emb.image_mask();
    const std::string it = inter ? recognize_type(rs, inter).str() : "0";
    auto a1_parts = [&](Mask x) {
        std::vector<Mask> out;
        for (Mask c : irreducible_components(rs, x))
            if (popcount(c) == 1) out.push_back(c);
        return out;
    };
    if (rs.spec == SystemSpec{Family::E, 6}) {
        // E5 = D5: an A1 or A1xA1 inside D5 determines the D2 it spans with its orthogonal partner
        auto d2_of = [&](Mask a1) {
            Mask rest = perp(rs, a1) & m.emb.image_mask();
            for (Mask c : irreducible_components(rs, rest))
                if (popcount(c) == 1) return a1 | c;
            throw std::logic_error("no orthogonal A1 partner in D5");
        };
        if (vx.type == "A1") {
            if (!inter) return {"A1 outside E5", {}};
            return {"A1 inside E5", {{target(d2_of(inter)), 1}}};
        }
        if (vx.type == "A2xA2xA2" && it == "A1xA1xA2") {
            auto a1 = a1_parts(inter);
            return {"A2xA2xA2 meets E5 in A2xD2", {{target(a1[0] | a1[1]), 1}}};
        }
    }
    if (rs.spec == SystemSpec{Family::E, 7}) {
        if (vx.type == "A1") {
            if (!inter) return {"A1 outside E6", {}};
            return {"A1 inside E6", {{target(inter), 1}}};
        }
        if (vx.type == "A2") {
            if (it == "A1") return {"A2 meets E6 in A1", {{target(inter), 1}}};
            if (it == "A2") return {"A2 inside E6", {{target(inter | (perp(rs, inter) & m.emb.image_mask())), 1}}};
        }
        if (vx.type == "A3xA3") {
            if (it == "A2xA2")
                return {"A3xA3 meets E6 in A2xA2", {{target(inter | (perp(rs, inter) & m.emb.image_mask())), 1}}};
            if (it == "A1xA1xA3") {
                auto a1 = a1_parts(inter);
                return {"A3xA3 meets E6 in A3xA1xA1", {{target(a1[0]), 1}, {target(a1[1]), 1}}};
            }
        }
        if (vx.type == "A7" && it == "A1xA5") return {"A7 meets E6 in A1xA5", {{target(a1_parts(inter)[0]), 1}}};
    }
    throw std::logic_error("ray " + vx.type + " meeting the subsystem in " + it + " matches no image rule");
}

}  // namespace detail

// Classification of pi(zeta) for every ray of the source fan F, against the target fan F'.
inline std::vector<RayImage> ray_image_table(const MapContext& m, const ConeLocator& target) {
    std::vector<RayImage> out;
    const Fan& F = m.from->F;
    for (int v = 0; v < static_cast<int>(F.rays.size()); ++v) {
        RayImage r;
        r.ray = v;
        r.image = m.proj(F.rays[v]);
        auto loc = target.locate(r.image);
        if (!loc.found) r.kind = ImageKind::Outside;
        else if (loc.rays.empty()) r.kind = ImageKind::Zero;
        else r.kind = loc.rays.size() == 1 ? ImageKind::Ray : ImageKind::Interior;
        r.target = loc.rays;
        r.coeffs = loc.coeffs;
        auto [rule, pred] = detail::predict_image(m, v);
        r.rule = rule;
        r.predicted = pred;
        IntVec sum(m.to->lat->rank(), 0);
        for (auto [t, k] : pred) sum = add(sum, scale(m.to->F.rays[t], k));
        r.matches = sum == r.image;
        out.push_back(std::move(r));
    }
    return out;
}

// A cone of F(E7) whose image has three A1 rays and the bisector of an A1 pair of which only
// one member is an image ray: the image is half of a cone of F(E6), so the map is not flat.
struct BisectorWitness {
    std::size_t cone = 0;
    int bisector_ray = -1;          // ray of F(E7) mapped to the bisector
    std::pair<int, int> pair;       // the two A1 rays of F(E6) it bisects
    std::vector<int> a1_images;     // the three A1 rays of F(E6) in the image
};

inline std::optional<BisectorWitness> find_bisector_witness(const MapContext& m, const std::vector<RayImage>& images) {
    const Fan& F = m.from->F;
    const Fan& T = m.to->F;
    for (std::size_t c = 0; c < F.cones.size(); ++c) {
        std::vector<int> rays;
        std::vector<std::pair<int, int>> bis;
        int bis_ray = -1;
        bool usable = true;
        for (int v : F.cones[c]) {
            const RayImage& r = images[v];
            if (r.kind == ImageKind::Zero) continue;
            if (r.kind == ImageKind::Ray) rays.push_back(r.target[0]);
            else if (r.kind == ImageKind::Interior && r.target.size() == 2) {
                bis.push_back({r.target[0], r.target[1]});
                bis_ray = v;
            } else usable = false;
        }
        std::sort(rays.begin(), rays.end());
        rays.erase(std::unique(rays.begin(), rays.end()), rays.end());
        if (!usable || bis.size() != 1 || rays.size() != 3) continue;
        auto [a, b] = bis[0];
        bool has_a = std::binary_search(rays.begin(), rays.end(), a);
        bool has_b = std::binary_search(rays.begin(), rays.end(), b);
        if (has_a == has_b) continue;
        bool all_a1 = T.labels[a].type == "A1" && T.labels[b].type == "A1";
        for (int r : rays) all_a1 &= T.labels[r].type == "A1";
        if (!all_a1) continue;
        IntMatrix gens;
        for (int r : rays) gens.push_back(T.rays[r]);
        gens.push_back(m.proj(F.rays[bis_ray]));
        if (exact_rank(gens) != 4) continue;
        return BisectorWitness{c, bis_ray, {a, b}, rays};
    }
    return std::nullopt;
}

// ---------------------------------------------------------------- flatness

struct FlatnessReport {
    bool map_of_fans = true;  // every cone lands inside a cone of the target
    bool flat = true;         // every ray maps to a ray or 0 and every cone onto a cone
    bool reduced = true;      // additionally first lattice points map to first lattice points or 0
    std::size_t rays = 0, cones = 0;
    std::vector<int> bad_rays;          // rays not mapping to a ray or 0
    std::vector<int> nonreduced_rays;   // rays mapping to a multiple of a first lattice point
    std::vector<std::size_t> bad_cones; // cones whose image is not inside a target cone
};

// Flatness and reducedness in the sense of the toric criterion: the target must be strictly
// simplicial; then every ray mapping to a ray or 0 and every cone's image rays lying in one
// target cone means each cone maps onto a cone.
inline FlatnessReport flatness_check(const Projection& p, const Fan& from, const ConeLocator& target) {
    FlatnessReport rep;
    rep.rays = from.rays.size();
    rep.cones = from.cones.size();
    std::vector<int> image_ray(from.rays.size(), -1);  // -1 zero, -2 not a ray
    std::vector<std::vector<int>> image_support(from.rays.size());
    for (std::size_t v = 0; v < from.rays.size(); ++v) {
        IntVec w = p(from.rays[v]);
        if (is_zero(w)) continue;
        int r = target.ray_of(primitive(w));
        if (r >= 0) {
            image_ray[v] = r;
            image_support[v] = {r};
            if (content(w) != 1) {
                rep.reduced = false;
                rep.nonreduced_rays.push_back(static_cast<int>(v));
            }
            continue;
        }
        image_ray[v] = -2;
        rep.flat = rep.reduced = false;
        rep.bad_rays.push_back(static_cast<int>(v));
        auto loc = target.locate(w);
        if (!loc.found) rep.map_of_fans = false;
        image_support[v] = loc.rays;
    }
    for (std::size_t c = 0; c < from.cones.size(); ++c) {
        std::vector<int> img;
        for (int v : from.cones[c]) img.insert(img.end(), image_support[v].begin(), image_support[v].end());
        std::sort(img.begin(), img.end());
        img.erase(std::unique(img.begin(), img.end()), img.end());
        if (target.common_cone(img) < 0) {
            rep.map_of_fans = rep.flat = rep.reduced = false;
            rep.bad_cones.push_back(c);
        }
    }
    return rep;
}

// ---------------------------------------------------------------- cones in local coordinates

// Exact fraction with a positive denominator, kept reduced.
struct Fraction {
    BigInt num = 0, den = 1;

    Fraction& operator+=(const Fraction& o) {
        num = num * o.den + o.num * den;
        den *= o.den;
        BigInt g = boost::multiprecision::gcd(num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
        return *this;
    }
    bool operator==(const Fraction& o) const { return num * o.den == o.num * den; }
    std::string str() const { return den == 1 ? num.str() : num.str() + "/" + den.str(); }
};

// A polyhedral cone {x in R^d : x >= 0, A x >= 0} given by extreme rays and facet normals.
struct LocalCone {
    int dim = 0;                    // ambient dimension d
    IntMatrix rays;                 // primitive extreme rays
    IntMatrix inequalities;         // x >= 0 followed by the extra inequalities
    std::vector<std::uint64_t> tight;  // per ray: inequalities vanishing on it

    bool full_dimensional() const { return exact_rank(rays) == static_cast<std::size_t>(dim); }

    // Inward facet normals of a full-dimensional cone: one inequality per distinct facet.
    IntMatrix facets() const {
        IntMatrix out;
        std::set<std::vector<int>> seen;
        for (std::size_t t = 0; t < inequalities.size(); ++t) {
            std::vector<int> on;
            IntMatrix sub;
            for (std::size_t r = 0; r < rays.size(); ++r)
                if (tight[r] >> t & 1) {
                    on.push_back(static_cast<int>(r));
                    sub.push_back(rays[r]);
                }
            if (exact_rank(sub) + 1 != static_cast<std::size_t>(dim)) continue;
            if (seen.insert(on).second) out.push_back(primitive(inequalities[t]));
        }
        return out;
    }
};

namespace detail {

inline std::int64_t dot128(const IntVec& a, const IntVec& b) {
    __int128 s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<__int128>(a[i]) * b[i];
    if (s > INT64_MAX || s < INT64_MIN) throw std::overflow_error("inner product overflow");
    return static_cast<std::int64_t>(s);
}

}  // namespace detail

// Double description: start from the orthant and add one inequality at a time, creating a new
// ray for each adjacent pair on opposite sides. Adjacency is tested combinatorially.
inline LocalCone orthant_cut(const IntMatrix& extra, int d) {
    if (d + extra.size() > 64) throw std::invalid_argument("too many inequalities");
    IntMatrix ineq;
    for (int i = 0; i < d; ++i) {
        IntVec e(d, 0);
        e[i] = 1;
        ineq.push_back(e);
    }
    for (auto& h : extra) ineq.push_back(h);
    LocalCone c;
    c.dim = d;
    for (int i = 0; i < d; ++i) {
        c.rays.push_back(ineq[i]);
        std::uint64_t z = 0;
        for (int j = 0; j < d; ++j)
            if (j != i) z |= std::uint64_t(1) << j;
        c.tight.push_back(z);
    }
    for (std::size_t t = d; t < ineq.size(); ++t) {
        const IntVec& h = ineq[t];
        std::vector<std::int64_t> val(c.rays.size());
        for (std::size_t r = 0; r < c.rays.size(); ++r) val[r] = detail::dot128(h, c.rays[r]);
        IntMatrix rays;
        std::vector<std::uint64_t> tight;
        for (std::size_t r = 0; r < c.rays.size(); ++r) {
            if (val[r] < 0) continue;
            rays.push_back(c.rays[r]);
            tight.push_back(c.tight[r] | (val[r] == 0 ? std::uint64_t(1) << t : 0));
        }
        for (std::size_t p = 0; p < c.rays.size(); ++p) {
            if (val[p] <= 0) continue;
            for (std::size_t n = 0; n < c.rays.size(); ++n) {
                if (val[n] >= 0) continue;
                std::uint64_t common = c.tight[p] & c.tight[n];
                if (std::popcount(common) < d - 2) continue;
                bool adjacent = true;
                for (std::size_t r = 0; r < c.rays.size() && adjacent; ++r)
                    if (r != p && r != n && (c.tight[r] & common) == common) adjacent = false;
                if (!adjacent) continue;
                IntVec v(d);
                for (int i = 0; i < d; ++i) {
                    __int128 x = static_cast<__int128>(val[p]) * c.rays[n][i] - static_cast<__int128>(val[n]) * c.rays[p][i];
                    if (x > INT64_MAX || x < INT64_MIN) throw std::overflow_error("ray overflow");
                    v[i] = static_cast<std::int64_t>(x);
                }
                rays.push_back(primitive(v));
                tight.push_back(common | std::uint64_t(1) << t);
            }
        }
        c.rays = std::move(rays);
        c.tight = std::move(tight);
    }
    c.inequalities = std::move(ineq);
    return c;
}

// Pulling triangulation of a full-dimensional local cone; simplices as ray index lists.
inline std::vector<std::vector<int>> pulling_triangulation(const LocalCone& c) {
    std::vector<std::vector<int>> out;
    const int ni = 64;
    std::function<void(const std::vector<int>&, int, std::vector<int>&)> rec = [&](const std::vector<int>& face, int f,
                                                                                  std::vector<int>& apex) {
        if (static_cast<int>(face.size()) == f) {
            std::vector<int> s = apex;
            s.insert(s.end(), face.begin(), face.end());
            std::sort(s.begin(), s.end());
            out.push_back(s);
            return;
        }
        const int v0 = face[0];
        std::set<std::vector<int>> facets;
        for (int t = 0; t < ni; ++t) {
            if (c.tight[v0] >> t & 1) continue;
            std::vector<int> sub;
            IntMatrix g;
            for (int r : face)
                if (c.tight[r] >> t & 1) {
                    sub.push_back(r);
                    g.push_back(c.rays[r]);
                }
            if (sub.empty() || static_cast<int>(exact_rank(g)) != f - 1) continue;
            facets.insert(sub);
        }
        apex.push_back(v0);
        for (auto& sub : facets) rec(sub, f - 1, apex);
        apex.pop_back();
    };
    std::vector<int> all(c.rays.size());
    for (std::size_t r = 0; r < all.size(); ++r) all[r] = static_cast<int>(r);
    std::vector<int> apex;
    rec(all, c.dim, apex);
    return out;
}

// Normalized solid angle of a simplicial cone inside the orthant: |det| / prod(sum of coords).
// The orthant itself has measure 1.
inline Fraction simplex_measure(const IntMatrix& rays) {
    Fraction f;
    f.num = abs(determinant(rays));
    for (auto& r : rays) {
        std::int64_t s = 0;
        for (auto x : r) s += x;
        f.den *= s;
    }
    BigInt g = boost::multiprecision::gcd(f.num, f.den);
    if (g > 1) {
        f.num /= g;
        f.den /= g;
    }
    return f;
}

inline Fraction cone_measure(const LocalCone& c) {
    Fraction total;
    if (static_cast<int>(c.rays.size()) == c.dim) return simplex_measure(c.rays);
    for (auto& s : pulling_triangulation(c)) {
        IntMatrix g;
        for (int r : s) g.push_back(c.rays[r]);
        total += simplex_measure(g);
    }
    return total;
}

// ---------------------------------------------------------------- refinement of F(E6)

struct Refinement {
    Fan fan;                                       // rays carry the coarse rays they sum in `parts`
    std::map<std::vector<int>, int> ray_of_parts;  // sorted coarse ray set -> refined ray
    std::size_t added_rays = 0;
    bool simplicial = false;                       // every cone strictly simplicial
    bool volume_ok = false;                        // chambers of each coarse cone fill it exactly
};

// Barycentric subdivision of the A1 face of every maximal cone; remaining rays are kept.
inline Refinement refine_E6(const FanSystem& e6) {
    Refinement r;
    const Fan& F = e6.F;
    Fan& f = r.fan;
    f.system = F.system;
    f.lattice_rank = F.lattice_rank;
    f.construction = "Ftilde";
    auto ray_for = [&](std::vector<int> parts) {
        std::sort(parts.begin(), parts.end());
        auto it = r.ray_of_parts.find(parts);
        if (it != r.ray_of_parts.end()) return it->second;
        IntVec v(F.lattice_rank, 0);
        for (int p : parts) v = add(v, F.rays[p]);
        int id = static_cast<int>(f.rays.size());
        f.rays.push_back(primitive(v));
        RayLabel lab;
        if (parts.size() == 1) lab = F.labels[parts[0]];
        else lab.type = "barycenter";
        lab.parts = parts;
        f.labels.push_back(lab);
        r.ray_of_parts[parts] = id;
        if (parts.size() > 1) ++r.added_rays;
        return id;
    };
    for (std::size_t v = 0; v < F.rays.size(); ++v) ray_for({static_cast<int>(v)});
    r.volume_ok = true;
    for (const auto& tau : F.cones) {
        std::vector<int> a1, rest;
        for (int v : tau) (F.labels[v].type == "A1" ? a1 : rest).push_back(v);
        std::vector<int> perm = a1;
        Fraction total;
        do {
            std::vector<int> cone = rest, prefix;
            IntMatrix local;  // chain rays in the coordinates of tau's A1 face
            for (int v : perm) {
                prefix.push_back(v);
                cone.push_back(ray_for(prefix));
                IntVec x(a1.size(), 0);
                for (int u : prefix) x[std::find(a1.begin(), a1.end(), u) - a1.begin()] = 1;
                local.push_back(x);
            }
            std::sort(cone.begin(), cone.end());
            f.cones.push_back(cone);
            if (!local.empty()) total += simplex_measure(local);
        } while (std::next_permutation(perm.begin(), perm.end()));
        if (!a1.empty() && !(total == Fraction{1, 1})) r.volume_ok = false;
    }
    std::sort(f.cones.begin(), f.cones.end());
    f.cones.erase(std::unique(f.cones.begin(), f.cones.end()), f.cones.end());
    f.facets.assign(f.cones.size(), {});
    r.simplicial = strictly_simplicial(f).ok();
    return r;
}

// ---------------------------------------------------------------- fiber fan over the refinement

// One cell pi^{-1}(gamma) cap sigma, in the coordinates of sigma's rays and in N.
struct FiberCell {
    LocalCone local;
    std::vector<IntVec> rays;   // primitive generators in N
    std::vector<std::vector<std::pair<int, std::int64_t>>> keys;  // rays as combinations of sigma's rays
};

struct FiberFanReport {
    std::size_t sigmas = 0;
    std::size_t subdivided = 0;         // sigmas cut into more than one cell
    std::size_t cells = 0;
    std::size_t simplicial_cells = 0;   // as many rays as the dimension
    std::size_t strict_cells = 0;       // simplicial with unimodular generators
    std::size_t max_rays = 0;
    std::size_t rays = 0;               // distinct rays of the fiber fan
    std::size_t added_rays = 0;         // rays that are not rays of the coarse fan
    std::size_t volume_failures = 0;    // sigmas whose cells do not add up to sigma
    std::size_t support_failures = 0;   // sigmas whose image leaves every target cone
    std::size_t bad_rays = 0;           // rays not mapping to a refined ray or 0
    std::size_t nonreduced_rays = 0;    // rays mapping to a multiple of a first lattice point
    std::size_t bad_cells = 0;          // cells whose image is not a cone of the refinement
    std::size_t horizontal_rays = 0;    // rays with zero image
    std::size_t horizontal_in_all_cells = 0;  // sigmas where every cell keeps sigma's horizontal rays
    std::set<std::vector<int>> eckhart_triples;  // horizontal ray triples spanning a cone
    std::size_t eckhart_nonorthogonal = 0;
    // minimality of the refinement: image generator sets of the sigmas, by refined ray ids
    std::unordered_set<std::vector<int>, IntVecHash> image_sets;

    bool flat() const { return bad_rays == 0 && bad_cells == 0 && support_failures == 0; }
    bool reduced() const { return flat() && nonreduced_rays == 0; }
    bool ok() const { return reduced() && volume_failures == 0; }
};

struct FiberContext {
    const MapContext* map = nullptr;     // E7 -> E6
    const Refinement* refined = nullptr; // refinement of F(E6)
    std::vector<RayImage> images;        // pi of the rays of F(E7) located in F(E6)
    std::unique_ptr<ConeLocator> coarse, fine;

    FiberContext(const MapContext& m, const Refinement& r) : map(&m), refined(&r) {
        coarse = std::make_unique<ConeLocator>(m.to->F);
        fine = std::make_unique<ConeLocator>(r.fan);
        images = ray_image_table(m, *coarse);
    }
};

namespace detail {

// Image coordinates of sigma: for each coarse A1 ray hit, the coefficient vector over sigma's rays.
struct SigmaImage {
    std::vector<int> coarse_rays;      // every coarse ray hit
    std::vector<int> a1;               // coarse A1 rays hit, sorted
    IntMatrix a;                       // a[k][l]: coefficient of a1[k] in pi(ray l)
    bool supported = true;
};

inline SigmaImage sigma_image(const FiberContext& ctx, const std::vector<int>& sigma) {
    SigmaImage si;
    const Fan& E6 = ctx.map->to->F;
    std::map<int, IntVec> rows;
    for (std::size_t l = 0; l < sigma.size(); ++l) {
        const RayImage& im = ctx.images[sigma[l]];
        if (im.kind == ImageKind::Outside) {
            si.supported = false;
            continue;
        }
        for (std::size_t k = 0; k < im.target.size(); ++k) {
            int t = im.target[k];
            si.coarse_rays.push_back(t);
            if (E6.labels[t].type != "A1") continue;
            if (boost::multiprecision::denominator(im.coeffs[k]) != 1) si.supported = false;
            auto& row = rows.try_emplace(t, IntVec(sigma.size(), 0)).first->second;
            row[l] = to_i64(boost::multiprecision::numerator(im.coeffs[k]));
        }
    }
    std::sort(si.coarse_rays.begin(), si.coarse_rays.end());
    si.coarse_rays.erase(std::unique(si.coarse_rays.begin(), si.coarse_rays.end()), si.coarse_rays.end());
    if (ctx.coarse->common_cone(si.coarse_rays) < 0) si.supported = false;
    for (auto& [t, row] : rows) {
        si.a1.push_back(t);
        si.a.push_back(row);
    }
    return si;
}

}  // namespace detail

// Full-dimensional cells of sigma cut out by the chambers of the refinement, in sigma coordinates.
inline std::vector<LocalCone> fiber_cells_local(const detail::SigmaImage& si, int d) {
    std::vector<LocalCone> out;
    const std::size_t m = si.a1.size();
    if (m <= 1) {
        out.push_back(orthant_cut({}, d));
        return out;
    }
    // each A1 coordinate equal to a single coordinate of sigma: chambers pull back to chains
    std::vector<int> single(m, -1);
    std::vector<int> used(d, 0);
    bool simple = true;
    for (std::size_t k = 0; k < m && simple; ++k) {
        for (int l = 0; l < d; ++l) {
            if (si.a[k][l] == 0) continue;
            if (si.a[k][l] != 1 || single[k] >= 0 || used[l]) simple = false;
            single[k] = l;
            used[l] = 1;
        }
    }
    std::vector<int> order(m);
    for (std::size_t k = 0; k < m; ++k) order[k] = static_cast<int>(k);
    std::set<IntMatrix> seen;
    do {
        LocalCone c;
        if (simple) {
            c.dim = d;
            for (int l = 0; l < d; ++l)
                if (!used[l]) {
                    IntVec e(d, 0);
                    e[l] = 1;
                    c.rays.push_back(e);
                }
            IntVec partial(d, 0);
            for (int k : order) {
                partial[single[k]] = 1;
                c.rays.push_back(partial);
            }
        } else {
            IntMatrix ineq;
            for (std::size_t s = 0; s + 1 < m; ++s) ineq.push_back(sub(si.a[order[s]], si.a[order[s + 1]]));
            c = orthant_cut(ineq, d);
            if (!c.full_dimensional()) continue;
        }
        IntMatrix key = c.rays;
        std::sort(key.begin(), key.end());
        if (seen.insert(key).second) out.push_back(std::move(c));
    } while (std::next_permutation(order.begin(), order.end()));
    return out;
}

// Builds the cells pi^{-1}(gamma) cap sigma over every maximal cone sigma of F(E7) and checks
// them on the fly: exact volume bookkeeping per sigma, the toric flatness conditions against
// the refinement, horizontal rays and the cones they span. `visit` receives every cell.
inline FiberFanReport fiber_fan_E7(const FiberContext& ctx,
                                   const std::function<void(std::size_t, const FiberCell&)>& visit = {}) {
    FiberFanReport rep;
    const Fan& F = ctx.map->from->F;
    const RootSystem& rs = *ctx.map->from->rs;
    const Projection& pi = ctx.map->proj;
    // refined ray of the image of each fiber ray, -1 for zero, -2 when not a refined ray
    std::unordered_map<std::vector<std::int64_t>, int, IntVecHash> ray_info;
    std::vector<int> image_ray(F.rays.size(), -2);  // refined ray of pi(ray), -1 for zero
    for (std::size_t v = 0; v < F.rays.size(); ++v) {
        IntVec w = pi(F.rays[v]);
        if (is_zero(w)) {
            image_ray[v] = -1;
            ++rep.horizontal_rays;
        } else if (content(w) == 1) {
            image_ray[v] = ctx.fine->ray_of(w);
        }
    }
    for (std::size_t sidx = 0; sidx < F.cones.size(); ++sidx) {
        const auto& sigma = F.cones[sidx];
        const int d = static_cast<int>(sigma.size());
        ++rep.sigmas;
        auto si = detail::sigma_image(ctx, sigma);
        if (!si.supported) {
            ++rep.support_failures;
            continue;
        }
        // image generator set of sigma in the refinement (minimality witnesses)
        {
            std::vector<int> img;
            bool all_rays = true;
            for (int v : sigma) {
                if (image_ray[v] >= 0) img.push_back(image_ray[v]);
                else if (image_ray[v] == -2) all_rays = false;
            }
            std::sort(img.begin(), img.end());
            img.erase(std::unique(img.begin(), img.end()), img.end());
            if (all_rays) rep.image_sets.insert(img);
        }
        std::vector<int> horizontal;
        for (int l = 0; l < d; ++l)
            if (image_ray[sigma[l]] == -1) horizontal.push_back(l);
        auto cells = fiber_cells_local(si, d);
        if (cells.size() > 1) ++rep.subdivided;
        Fraction total;
        bool keeps_horizontal = true;
        for (auto& c : cells) {
            ++rep.cells;
            total += cone_measure(c);
            rep.max_rays = std::max(rep.max_rays, c.rays.size());
            std::vector<int> img;
            bool bad_image = false;
            for (auto& x : c.rays) {
                // canonical key: the combination of sigma's (sorted) rays, unique in a simplicial fan;
                // local rays are primitive, hence so are their images in N
                std::vector<std::int64_t> key;
                for (int l = 0; l < d; ++l)
                    if (x[l] != 0) {
                        key.push_back(sigma[l]);
                        key.push_back(x[l]);
                    }
                auto [it, fresh] = ray_info.try_emplace(key, -2);
                if (fresh) {
                    IntVec v(F.lattice_rank, 0);
                    for (int l = 0; l < d; ++l)
                        if (x[l] != 0) v = add(v, scale(F.rays[sigma[l]], x[l]));
                    IntVec w = pi(primitive(v));
                    if (key.size() > 2) ++rep.added_rays;
                    if (is_zero(w)) {
                        it->second = -1;
                    } else {
                        int t = ctx.fine->ray_of(primitive(w));
                        if (t < 0) ++rep.bad_rays;
                        else if (content(w) != 1) ++rep.nonreduced_rays;
                        it->second = t < 0 ? -2 : t;
                    }
                }
                if (it->second >= 0) img.push_back(it->second);
                else if (it->second == -2) bad_image = true;
            }
            if (c.rays.size() == static_cast<std::size_t>(d)) {
                ++rep.simplicial_cells;
                // sigma is part of a lattice basis, so unimodularity is read in its coordinates
                if (abs(determinant(c.rays)) == 1) ++rep.strict_cells;
            }
            std::sort(img.begin(), img.end());
            img.erase(std::unique(img.begin(), img.end()), img.end());
            if (bad_image || ctx.fine->common_cone(img) < 0) ++rep.bad_cells;
            for (int l : horizontal) {
                IntVec e(d, 0);
                e[l] = 1;
                if (std::find(c.rays.begin(), c.rays.end(), e) == c.rays.end()) keeps_horizontal = false;
            }
            if (visit) {
                FiberCell cell;
                cell.local = c;
                for (auto& x : c.rays) {
                    IntVec v(F.lattice_rank, 0);
                    std::vector<std::pair<int, std::int64_t>> key;
                    for (int l = 0; l < d; ++l)
                        if (x[l] != 0) {
                            v = add(v, scale(F.rays[sigma[l]], x[l]));
                            key.push_back({sigma[l], x[l]});
                        }
                    std::sort(key.begin(), key.end());
                    cell.rays.push_back(primitive(v));
                    cell.keys.push_back(std::move(key));
                }
                visit(sidx, cell);
            }
        }
        if (!(total == Fraction{1, 1})) ++rep.volume_failures;
        if (keeps_horizontal) ++rep.horizontal_in_all_cells;
        const std::size_t h = horizontal.size();
        for (std::size_t i = 0; i < h; ++i)
            for (std::size_t j = i + 1; j < h; ++j)
                for (std::size_t k = j + 1; k < h; ++k) {
                    std::vector<int> t{sigma[horizontal[i]], sigma[horizontal[j]], sigma[horizontal[k]]};
                    if (!rep.eckhart_triples.insert(t).second) continue;
                    Mask a = F.labels[t[0]].theta, b = F.labels[t[1]].theta, c = F.labels[t[2]].theta;
                    if (!orthogonal(rs, a, b) || !orthogonal(rs, a, c) || !orthogonal(rs, b, c)) ++rep.eckhart_nonorthogonal;
                }
    }
    rep.rays = ray_info.size();
    return rep;
}

struct MinimalityReport {
    std::size_t coarse_cones = 0;       // maximal cones of F(E6)
    std::size_t witnessed_cones = 0;    // every half-cone {a_i <= a_j} is the image of some sigma
    std::size_t forced_rays = 0;        // added rays forced by the witnessed half-cones
    std::size_t added_rays = 0;
    std::vector<std::vector<int>> missing;  // (coarse cone, i, j) without a witness
    bool minimal() const { return forced_rays == added_rays && missing.empty(); }
};

// Every half-cone {a_i <= a_j} of a maximal cone of F(E6) is the image of a cone of F(E7), so
// any refinement in which images of cones are unions of cones refines all chambers of the
// braid arrangements, whose rays are exactly the added barycenters.
inline MinimalityReport refinement_minimality(const FiberContext& ctx, const FiberFanReport& fr) {
    MinimalityReport rep;
    const Fan& F = ctx.map->to->F;
    const Refinement& r = *ctx.refined;
    rep.added_rays = r.added_rays;
    std::set<int> forced;
    for (std::size_t c = 0; c < F.cones.size(); ++c) {
        const auto& tau = F.cones[c];
        ++rep.coarse_cones;
        std::vector<int> a1;
        for (int v : tau)
            if (F.labels[v].type == "A1") a1.push_back(v);
        bool all = true;
        for (int i : a1)
            for (int j : a1) {
                if (i == j) continue;
                // half-cone where a_i <= a_j: rays b_{ij}, r_j and the other rays of tau
                std::vector<int> want;
                std::vector<int> ij{std::min(i, j), std::max(i, j)};
                want.push_back(r.ray_of_parts.at(ij));
                for (int v : tau)
                    if (v != i) want.push_back(r.ray_of_parts.at({v}));
                std::sort(want.begin(), want.end());
                if (!fr.image_sets.count(want)) {
                    all = false;
                    rep.missing.push_back({static_cast<int>(c), i, j});
                }
            }
        if (!all) continue;
        ++rep.witnessed_cones;
        // all chambers are intersections of witnessed half-cones, so all barycenters are forced
        for (std::uint32_t s = 1; s < (1u << a1.size()); ++s) {
            if (std::popcount(s) < 2) continue;
            std::vector<int> parts;
            for (std::size_t k = 0; k < a1.size(); ++k)
                if (s >> k & 1) parts.push_back(a1[k]);
            forced.insert(r.ray_of_parts.at(parts));
        }
    }
    rep.forced_rays = forced.size();
    return rep;
}

}  // namespace adefans
