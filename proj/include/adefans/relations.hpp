#pragma once
// Linear relations among psi-images of root subsystems, and their divisibility in N.

#include "rcomplex.hpp"

#include <map>

namespace adefans {

// One term c * psi(X) where X is the subsystem, its perp, the perp component of a given type,
// or the unique subsystem of a given type containing both.
struct PsiTerm {
    enum class Role { Theta, Perp, PerpPart, Envelope };
    std::int64_t coef;
    Role role;
    std::string type;  // PerpPart / Envelope only
};

struct PsiRelationRow {
    SystemSpec system;
    std::string theta;  // class label
    std::string perp;   // type of the perp
    std::string text;
    std::vector<PsiTerm> terms;  // sum is zero in N
};

inline const std::vector<PsiRelationRow>& psi_relation_table() {
    using R = PsiTerm::Role;
    static const std::vector<PsiRelationRow> rows = {
        {{Family::E, 6}, "A1", "A5", "psi(A5) = 3 psi(A1)", {{1, R::Perp, ""}, {-3, R::Theta, ""}}},
        {{Family::E, 6}, "A2", "A2xA2", "2 psi(A2) = psi(A2xA2)", {{2, R::Theta, ""}, {-1, R::Perp, ""}}},
        {{Family::E, 6}, "A3", "A1xA1", "psi(A3) = psi(A1xA1)", {{1, R::Theta, ""}, {-1, R::Perp, ""}}},
        {{Family::E, 6}, "A4", "A1", "psi(A4) = 2 psi(A1)", {{1, R::Theta, ""}, {-2, R::Perp, ""}}},
        {{Family::E, 6}, "A5", "A1", "psi(A5) = 3 psi(A1)", {{1, R::Theta, ""}, {-3, R::Perp, ""}}},
        {{Family::E, 6}, "D4", "0", "psi(D4) = 0", {{1, R::Theta, ""}}},
        {{Family::E, 6}, "D5", "0", "psi(D5) = 0", {{1, R::Theta, ""}}},
        {{Family::E, 7}, "A1", "D6", "psi(D6) = 3 psi(A1)", {{1, R::Perp, ""}, {-3, R::Theta, ""}}},
        {{Family::E, 7}, "A2", "A5", "psi(A5-) = 2 psi(A2)", {{1, R::Perp, ""}, {-2, R::Theta, ""}}},
        {{Family::E, 7}, "A3", "A1xA3", "psi(A3) = psi(A3')", {{1, R::Theta, ""}, {-1, R::PerpPart, "A3"}}},
        {{Family::E, 7}, "A5-", "A2", "psi(A5-) = 2 psi(A2)", {{1, R::Theta, ""}, {-2, R::Perp, ""}}},
        {{Family::E, 7}, "D4", "A1xA1xA1", "psi(D4) = psi(A1xA1xA1)", {{1, R::Theta, ""}, {-1, R::Perp, ""}}},
        {{Family::E, 7}, "D5", "A1", "psi(D5) = 2 psi(A1)", {{1, R::Theta, ""}, {-2, R::Perp, ""}}},
        {{Family::E, 7}, "D6", "A1", "psi(D6) = 3 psi(A1)", {{1, R::Theta, ""}, {-3, R::Perp, ""}}},
        {{Family::E, 7}, "E6", "0", "psi(E6) = 0", {{1, R::Theta, ""}}},
        {{Family::E, 7}, "A7", "0", "", {}},
        {{Family::E, 7}, "A4", "A2", "4 psi(A4) = 4 psi(A2) + psi(A7)",
         {{4, R::Theta, ""}, {-4, R::Perp, ""}, {-1, R::Envelope, "A7"}}},
        {{Family::E, 7}, "A5+", "A1", "2 psi(A5+) = 2 psi(A1) + psi(A7)",
         {{2, R::Theta, ""}, {-2, R::Perp, ""}, {-1, R::Envelope, "A7"}}},
        {{Family::E, 7}, "A6", "0", "4 psi(A6) = 3 psi(A7)", {{4, R::Theta, ""}, {-3, R::Envelope, "A7"}}},
    };
    return rows;
}

struct PsiRelationResult {
    const PsiRelationRow* row = nullptr;
    std::size_t instances = 0;
    std::size_t perp_mismatch = 0;
    std::size_t envelope_mismatch = 0;  // not exactly one enveloping subsystem
    std::size_t failures = 0;           // relation violated in N
    bool ok() const { return instances > 0 && perp_mismatch == 0 && envelope_mismatch == 0 && failures == 0; }
};

inline std::vector<Mask> subsystems_of_class(const RootSystem& rs, const std::string& label) {
    std::string type = label;
    if (!type.empty() && (type.back() == '+' || type.back() == '-')) type.pop_back();
    std::vector<Mask> out;
    for (Mask m : enumerate_subsystems(rs, SubsystemType::parse(type)))
        if (class_label(rs, m) == label) out.push_back(m);
    return out;
}

// Checks every subsystem of each listed class, not just a representative.
inline std::vector<PsiRelationResult> check_psi_relations(const NLattice& n) {
    const RootSystem& rs = *n.rs;
    std::vector<PsiRelationResult> out;
    std::map<std::string, std::vector<Mask>> envelopes;
    for (const auto& row : psi_relation_table()) {
        if (row.system != rs.spec) continue;
        PsiRelationResult res;
        res.row = &row;
        for (Mask theta : subsystems_of_class(rs, row.theta)) {
            ++res.instances;
            Mask p = perp(rs, theta);
            if (recognize_type(rs, p).str() != row.perp) ++res.perp_mismatch;
            IntVec sum(n.rank(), 0);
            bool usable = true;
            for (const auto& t : row.terms) {
                Mask x = 0;
                switch (t.role) {
                    case PsiTerm::Role::Theta: x = theta; break;
                    case PsiTerm::Role::Perp: x = p; break;
                    case PsiTerm::Role::PerpPart: {
                        std::vector<Mask> hits;
                        for (Mask c : irreducible_components(rs, p))
                            if (recognize_type(rs, c).str() == t.type) hits.push_back(c);
                        if (hits.size() != 1) usable = false;
                        else x = hits[0];
                        break;
                    }
                    case PsiTerm::Role::Envelope: {
                        auto& env = envelopes[t.type];
                        if (env.empty()) env = enumerate_subsystems(rs, SubsystemType::parse(t.type));
                        std::vector<Mask> hits;
                        for (Mask e : env)
                            if ((e & (theta | p)) == (theta | p)) hits.push_back(e);
                        if (hits.size() != 1) usable = false;
                        else x = hits[0];
                        break;
                    }
                }
                sum = add(sum, scale(n.psi(x), t.coef));
            }
            if (!usable) ++res.envelope_mismatch;
            else if (!is_zero(sum)) ++res.failures;
        }
        out.push_back(res);
    }
    return out;
}

// D_n: psi(D_I) = psi(D_{I^c}) = 2 psi(A) for every A_{|I|-1} inside D_I, over all index sets I.
struct DnRelationResult {
    int k = 0;
    std::size_t instances = 0;
    std::size_t perp_failures = 0;
    std::size_t a_failures = 0;
    bool ok() const { return instances > 0 && perp_failures == 0 && a_failures == 0; }
};

inline std::vector<DnRelationResult> check_dn_relations(const NLattice& n) {
    const RootSystem& rs = *n.rs;
    if (rs.spec.family != Family::D) throw std::invalid_argument("D_n relations need a D_n system");
    const int dim = rs.dim;
    std::vector<DnRelationResult> out;
    for (int k = 2; k <= dim - 2; ++k) {
        DnRelationResult r;
        r.k = k;
        for (std::uint32_t I = 0; I < (1u << dim); ++I) {
            if (std::popcount(I) != k) continue;
            ++r.instances;
            IntVec pd = n.psi(d_subsystem(rs, I));
            if (pd != n.psi(d_subsystem(rs, ((1u << dim) - 1) & ~I))) ++r.perp_failures;
            std::vector<int> idx;
            for (int i = 0; i < dim; ++i)
                if (I >> i & 1) idx.push_back(i);
            // A_{k-1} = {e_i - s_i s_j e_j}: one per sign pattern up to a global sign
            for (std::uint32_t s = 0; s < (1u << (k - 1)); ++s) {
                Mask a = 0;
                for (int x = 0; x < k; ++x)
                    for (int y = x + 1; y < k; ++y) {
                        int sx = x == 0 ? 1 : (s >> (x - 1) & 1 ? -1 : 1);
                        int sy = s >> (y - 1) & 1 ? -1 : 1;
                        IntVec v(dim, 0);
                        v[idx[x]] = 1;
                        v[idx[y]] = -sx * sy;
                        a |= Mask(1) << rs.find(v).first;
                    }
                if (scale(n.psi(a), 2) != pd) ++r.a_failures;
            }
        }
        out.push_back(r);
    }
    return out;
}

// Divisibility of psi(Theta) in N: every subsystem of the class has psi divisible by `divisor`.
struct DivisibilityRow {
    SystemSpec system;
    std::string theta;
    std::int64_t divisor;
};

inline std::vector<DivisibilityRow> divisibility_table() {
    std::vector<DivisibilityRow> rows = {
        {{Family::E, 6}, "A2xA2xA2", 3},
        {{Family::E, 7}, "A3xA3", 2},
        {{Family::E, 7}, "A7", 4},
    };
    for (int n = 4; n <= 8; ++n) {
        for (int k = 2; k <= n - 2; ++k) rows.push_back({{Family::D, n}, "D" + std::to_string(k), 2});
        if (n % 2 == 0) rows.push_back({{Family::D, n}, "D" + std::to_string(n / 2) + "xD" + std::to_string(n / 2), 4});
    }
    return rows;
}

struct DivisibilityResult {
    DivisibilityRow row;
    std::size_t instances = 0;
    std::int64_t m_gamma = 0;  // gcd of the contents over the class
    // m_gamma == 0 means every psi vanishes, which is divisible by anything
    bool ok() const { return instances > 0 && m_gamma % row.divisor == 0; }
};

inline std::vector<DivisibilityResult> check_divisibility(const NLattice& n) {
    const RootSystem& rs = *n.rs;
    std::vector<DivisibilityResult> out;
    for (const auto& row : divisibility_table()) {
        if (row.system != rs.spec) continue;
        DivisibilityResult r{row, 0, 0};
        std::vector<Mask> family;
        if (rs.spec.family == Family::D) {
            // D_I, and D_I x D_{I^c} for the half-and-half row
            const int dim = rs.dim;
            const bool pair = row.theta.find('x') != std::string::npos;
            const int k = pair ? dim / 2 : std::stoi(row.theta.substr(1));
            for (std::uint32_t I = 0; I < (1u << dim); ++I)
                if (std::popcount(I) == k)
                    family.push_back(pair ? d_subsystem(rs, I) | d_subsystem(rs, ((1u << dim) - 1) & ~I) : d_subsystem(rs, I));
        } else {
            family = subsystems_of_class(rs, row.theta);
        }
        for (Mask m : family) {
            ++r.instances;
            r.m_gamma = gcd64(r.m_gamma, content(n.psi(m)));
        }
        out.push_back(r);
    }
    return out;
}

}  // namespace adefans
