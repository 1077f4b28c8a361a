#pragma once

#include "integer.hpp"
#include "linalg.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <map>
#include <random>
#include <functional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace adefans {

enum class Family { A, D, E };

struct SystemSpec {
    Family family;
    int rank;
    bool operator==(const SystemSpec&) const = default;
};

inline std::string system_name(SystemSpec s) {
    const char* f = s.family == Family::A ? "A" : s.family == Family::D ? "D" : "E";
    return f + std::to_string(s.rank);
}

inline SystemSpec parse_system(const std::string& name) {
    if (name.size() < 2) throw std::invalid_argument("bad system name: " + name);
    Family f;
    switch (name[0]) {
        case 'A': f = Family::A; break;
        case 'D': f = Family::D; break;
        case 'E': f = Family::E; break;
        default: throw std::invalid_argument("bad system name: " + name);
    }
    int n = 0;
    try {
        std::size_t used = 0;
        n = std::stoi(name.substr(1), &used);
        if (used != name.size() - 1) throw std::invalid_argument("");
    } catch (...) {
        throw std::invalid_argument("bad system name: " + name);
    }
    return {f, n};
}

using Mask = std::uint64_t;

inline int popcount(Mask m) { return std::popcount(m); }

template <class F>
inline void for_each_bit(Mask m, F&& f) {
    while (m) {
        int i = std::countr_zero(m);
        f(i);
        m &= m - 1;
    }
}

// Signed permutation of the positive roots induced by a Weyl group element.
struct WeylElement {
    std::vector<int> perm;
    std::vector<std::int8_t> sign;
    std::vector<int> word;
};

class RootSystem {
public:
    SystemSpec spec;
    int dim = 0;              // ambient lattice dimension
    IntVec form;              // diagonal of the ambient pairing
    std::vector<IntVec> roots;  // positive roots in lexicographic order
    std::vector<int> simple;    // indices of the simple roots
    std::vector<IntVec> coeffs; // expansion in the simple roots
    std::vector<std::vector<int>> dynkin;  // adjacency among simple-root positions
    int triple_node = -1;       // position in `simple`, or -1
    Mask all = 0;

    std::vector<std::vector<std::int8_t>> pairing;
    std::vector<std::vector<int>> reflect;            // |s_r(root k)|
    std::vector<std::vector<std::int8_t>> reflect_sign;
    std::vector<Mask> orth;

    int size() const { return static_cast<int>(roots.size()); }

    std::int64_t pair(const IntVec& a, const IntVec& b) const {
        std::int64_t s = 0;
        for (int i = 0; i < dim; ++i) s += form[i] * a[i] * b[i];
        return s;
    }

    // Index of the positive root equal to +-v, with the sign; index -1 when v is not a root.
    std::pair<int, int> find(const IntVec& v) const {
        auto it = index_.find(v);
        if (it != index_.end()) return {it->second, 1};
        it = index_.find(scale(v, -1));
        if (it != index_.end()) return {it->second, -1};
        return {-1, 0};
    }

    IntVec reflect_vector(const IntVec& alpha, const IntVec& v) const {
        std::int64_t p = pair(alpha, v);
        IntVec r(v);
        for (int i = 0; i < dim; ++i) r[i] += p * alpha[i];
        return r;
    }

    IntMatrix reflection_matrix(int root) const {
        IntMatrix m(dim, IntVec(dim, 0));
        for (int j = 0; j < dim; ++j) {
            IntVec e(dim, 0);
            e[j] = 1;
            IntVec im = reflect_vector(roots[root], e);
            for (int i = 0; i < dim; ++i) m[i][j] = im[i];
        }
        return m;
    }

    std::vector<IntMatrix> weyl_generators() const {
        std::vector<IntMatrix> g;
        for (int s : simple) g.push_back(reflection_matrix(s));
        return g;
    }

    int rank() const { return spec.rank; }

    Mask support(int root) const {
        Mask m = 0;
        for (std::size_t i = 0; i < simple.size(); ++i)
            if (coeffs[root][i] != 0) m |= Mask(1) << i;
        return m;
    }

    bool three_legged(int root) const {
        if (triple_node < 0) return false;
        Mask s = support(root);
        if (!(s >> triple_node & 1)) return false;
        for (int nb : dynkin[triple_node])
            if (!(s >> nb & 1)) return false;
        return true;
    }

    std::vector<int> three_legged_roots() const {
        std::vector<int> r;
        for (int i = 0; i < size(); ++i)
            if (three_legged(i)) r.push_back(i);
        return r;
    }

    std::string name(int root) const;
    int by_name(const std::string& n) const;

    Mask apply(const WeylElement& w, Mask m) const {
        Mask r = 0;
        for_each_bit(m, [&](int i) { r |= Mask(1) << w.perm[i]; });
        return r;
    }

    // Image of a root subset under the simple reflection `gen`.
    Mask apply_simple(int gen, Mask m) const {
        Mask r = 0;
        const auto& row = reflect[simple[gen]];
        for_each_bit(m, [&](int i) { r |= Mask(1) << row[i]; });
        return r;
    }

    WeylElement identity() const {
        WeylElement w;
        w.perm.resize(size());
        w.sign.assign(size(), 1);
        for (int i = 0; i < size(); ++i) w.perm[i] = i;
        return w;
    }

    // w followed by the simple reflection `gen`.
    WeylElement then(const WeylElement& w, int gen) const {
        WeylElement r = w;
        const int s = simple[gen];
        for (int i = 0; i < size(); ++i) {
            r.perm[i] = reflect[s][w.perm[i]];
            r.sign[i] = static_cast<std::int8_t>(w.sign[i] * reflect_sign[s][w.perm[i]]);
        }
        r.word.push_back(gen);
        return r;
    }

    WeylElement from_word(const std::vector<int>& word) const {
        WeylElement w = identity();
        for (int g : word) w = then(w, g);
        return w;
    }

    WeylElement random_element(std::mt19937_64& rng, int length = 60) const {
        std::uniform_int_distribution<int> d(0, static_cast<int>(simple.size()) - 1);
        std::vector<int> word;
        for (int i = 0; i < length; ++i) word.push_back(d(rng));
        return from_word(word);
    }

    // Ambient matrix of a word of simple reflections (applied left to right).
    IntMatrix matrix_of(const std::vector<int>& word) const {
        IntMatrix m(dim, IntVec(dim, 0));
        for (int i = 0; i < dim; ++i) m[i][i] = 1;
        for (int g : word) {
            IntMatrix s = reflection_matrix(simple[g]);
            IntMatrix r(dim, IntVec(dim, 0));
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j)
                    for (int k = 0; k < dim; ++k) r[i][j] += s[i][k] * m[k][j];
            m = r;
        }
        return m;
    }

    void finalize();

private:
    std::unordered_map<IntVec, int, IntVecHash> index_;
};

namespace detail {

inline IntVec pic_vector(int n, int d, std::initializer_list<std::pair<int, int>> e) {
    IntVec v(n + 1, 0);
    v[0] = d;
    for (auto [i, c] : e) v[i] = c;
    return v;
}

}  // namespace detail

inline void RootSystem::finalize() {
    const int n = size();
    if (n > 64) throw std::invalid_argument("root system too large for 64-bit subsets");
    index_.clear();
    for (int i = 0; i < n; ++i) index_[roots[i]] = i;
    all = n == 64 ? ~Mask(0) : (Mask(1) << n) - 1;
    pairing.assign(n, std::vector<std::int8_t>(n));
    reflect.assign(n, std::vector<int>(n));
    reflect_sign.assign(n, std::vector<std::int8_t>(n));
    orth.assign(n, 0);
    for (int r = 0; r < n; ++r)
        for (int k = 0; k < n; ++k) {
            auto p = pair(roots[r], roots[k]);
            pairing[r][k] = static_cast<std::int8_t>(p);
            if (p == 0) orth[r] |= Mask(1) << k;
            auto [idx, sg] = find(reflect_vector(roots[r], roots[k]));
            reflect[r][k] = idx;
            reflect_sign[r][k] = static_cast<std::int8_t>(sg);
        }
    // simple-root coordinates via the Gram matrix of the simple roots
    const int rk = static_cast<int>(simple.size());
    IntMatrix gram(rk, IntVec(rk));
    for (int i = 0; i < rk; ++i)
        for (int j = 0; j < rk; ++j) gram[i][j] = pairing[simple[i]][simple[j]];
    auto inv = rational_inverse(gram);
    if (!inv) throw std::logic_error("degenerate simple roots");
    coeffs.assign(n, IntVec(rk, 0));
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < rk; ++i) {
            Rational c = 0;
            for (int j = 0; j < rk; ++j) c += (*inv)[i][j] * pairing[simple[j]][k];
            if (boost::multiprecision::denominator(c) != 1) throw std::logic_error("non-integral simple coordinates");
            coeffs[k][i] = to_i64(boost::multiprecision::numerator(c));
        }
    dynkin.assign(rk, {});
    triple_node = -1;
    for (int i = 0; i < rk; ++i) {
        for (int j = 0; j < rk; ++j)
            if (i != j && gram[i][j] != 0) dynkin[i].push_back(j);
        if (dynkin[i].size() == 3) triple_node = i;
    }
}

// Builds the root system from its simple roots by closing under simple reflections.
inline RootSystem build_from_simple(SystemSpec spec, int dim, IntVec form, const std::vector<IntVec>& simple_roots) {
    RootSystem rs;
    rs.spec = spec;
    rs.dim = dim;
    rs.form = std::move(form);
    std::set<IntVec> seen(simple_roots.begin(), simple_roots.end());
    std::deque<IntVec> queue(simple_roots.begin(), simple_roots.end());
    auto pair = [&](const IntVec& a, const IntVec& b) {
        std::int64_t s = 0;
        for (int i = 0; i < dim; ++i) s += rs.form[i] * a[i] * b[i];
        return s;
    };
    while (!queue.empty()) {
        IntVec v = queue.front();
        queue.pop_front();
        for (auto& a : simple_roots) {
            std::int64_t p = pair(a, v);
            IntVec w(v);
            for (int i = 0; i < dim; ++i) w[i] += p * a[i];
            if (seen.insert(w).second) queue.push_back(w);
        }
    }
    // positivity: all simple coordinates nonnegative
    const int rk = static_cast<int>(simple_roots.size());
    IntMatrix gram(rk, IntVec(rk));
    for (int i = 0; i < rk; ++i)
        for (int j = 0; j < rk; ++j) gram[i][j] = pair(simple_roots[i], simple_roots[j]);
    auto inv = rational_inverse(gram);
    for (auto& v : seen) {
        Rational first = 0;
        for (int i = 0; i < rk && first == 0; ++i) {
            Rational c = 0;
            for (int j = 0; j < rk; ++j) c += (*inv)[i][j] * pair(simple_roots[j], v);
            first = c;
        }
        if (first > 0) rs.roots.push_back(v);
    }
    std::sort(rs.roots.begin(), rs.roots.end());
    rs.finalize();
    for (auto& s : simple_roots) rs.simple.push_back(rs.find(s).first);
    rs.finalize();
    return rs;
}

// Supported: A_n (1..8), D_n (3..8), E_n (3..7).
inline RootSystem build_root_system(SystemSpec spec) {
    const int n = spec.rank;
    std::vector<IntVec> simple;
    switch (spec.family) {
        case Family::A: {
            if (n < 1 || n > 8) throw std::invalid_argument("unsupported system " + system_name(spec));
            for (int i = 0; i < n; ++i) {
                IntVec v(n + 1, 0);
                v[i] = 1;
                v[i + 1] = -1;
                simple.push_back(v);
            }
            return build_from_simple(spec, n + 1, IntVec(n + 1, -1), simple);
        }
        case Family::D: {
            if (n < 3 || n > 8) throw std::invalid_argument("unsupported system " + system_name(spec));
            for (int i = 0; i + 1 < n; ++i) {
                IntVec v(n, 0);
                v[i] = 1;
                v[i + 1] = -1;
                simple.push_back(v);
            }
            IntVec last(n, 0);
            last[n - 2] = 1;
            last[n - 1] = 1;
            simple.push_back(last);
            return build_from_simple(spec, n, IntVec(n, -1), simple);
        }
        case Family::E: {
            if (n < 3 || n > 7) throw std::invalid_argument("unsupported system " + system_name(spec));
            IntVec form(n + 1, -1);
            form[0] = 1;
            for (int i = 1; i < n; ++i) simple.push_back(detail::pic_vector(n, 0, {{i, 1}, {i + 1, -1}}));
            simple.push_back(detail::pic_vector(n, 1, {{1, -1}, {2, -1}, {3, -1}}));
            return build_from_simple(spec, n + 1, form, simple);
        }
    }
    throw std::invalid_argument("unsupported system");
}

inline std::string RootSystem::name(int root) const {
    const IntVec& v = roots[root];
    if (spec.family == Family::E) {
        std::string s;
        if (v[0] == 0) {
            for (int i = 1; i < dim; ++i)
                if (v[i] == 1) s += std::to_string(i);
            for (int i = 1; i < dim; ++i)
                if (v[i] == -1) s += std::to_string(i);
        } else if (v[0] == 1) {
            for (int i = 1; i < dim; ++i)
                if (v[i] == -1) s += std::to_string(i);
        } else {
            // 2h minus all but one exceptional class; named by the missing index in 1..7
            for (int i = 1; i <= 7; ++i)
                if (i >= dim || v[i] == 0) s += std::to_string(i);
        }
        return s;
    }
    std::string s;
    for (int i = 0; i < dim; ++i) {
        if (v[i] == 0) continue;
        if (!s.empty()) s += v[i] > 0 ? "+" : "-";
        else if (v[i] < 0) s += "-";
        s += "e" + std::to_string(i + 1);
    }
    return s;
}

inline int RootSystem::by_name(const std::string& n) const {
    for (int i = 0; i < size(); ++i)
        if (name(i) == n) return i;
    throw std::invalid_argument("no root named " + n + " in " + system_name(spec));
}

// Breadth-first Weyl orbit; `act(gen, x)` returns the image of x under a simple reflection.
template <class T, class Act, class Hash = std::hash<T>>
std::vector<T> weyl_orbit(const T& seed, int generators, Act act, std::size_t cap = 50'000'000) {
    std::unordered_set<T, Hash> seen{seed};
    std::vector<T> order{seed};
    for (std::size_t head = 0; head < order.size(); ++head) {
        for (int g = 0; g < generators; ++g) {
            T img = act(g, order[head]);
            if (seen.insert(img).second) {
                order.push_back(img);
                if (order.size() > cap) throw std::length_error("orbit exceeds cap");
            }
        }
    }
    std::sort(order.begin(), order.end());
    return order;
}

inline std::vector<Mask> mask_orbit(const RootSystem& rs, Mask seed) {
    return weyl_orbit<Mask>(seed, static_cast<int>(rs.simple.size()),
                            [&](int g, Mask m) { return rs.apply_simple(g, m); });
}

}  // namespace adefans
