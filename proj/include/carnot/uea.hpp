#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "carnot/lie_algebra.hpp"

namespace carnot {

// Sorted (non-decreasing) sequence of basis indices: a PBW basis monomial of
// the universal enveloping algebra, in the weight-major basis order.
struct PbwMonomial {
    std::vector<uint16_t> idx;

    bool operator==(const PbwMonomial& o) const { return idx == o.idx; }
    bool operator<(const PbwMonomial& o) const {
        if (idx.size() != o.idx.size()) return idx.size() < o.idx.size();
        return idx < o.idx;
    }
    int weighted_degree(const GradedLieAlgebra& g) const {
        int d = 0;
        for (uint16_t i : idx) d += g.weights[i];
        return d;
    }
};

// Exact element of the enveloping algebra in PBW normal form: a sparse map
// from sorted monomials to nonzero rationals.
struct UeaElement {
    std::map<PbwMonomial, Rat> terms;

    static UeaElement zero() { return {}; }
    static UeaElement unit() {
        UeaElement e;
        e.terms[PbwMonomial{}] = 1;
        return e;
    }
    static UeaElement basis(int i) {
        UeaElement e;
        e.terms[PbwMonomial{{static_cast<uint16_t>(i)}}] = 1;
        return e;
    }

    bool is_zero() const { return terms.empty(); }
    bool operator==(const UeaElement& o) const { return terms == o.terms; }

    UeaElement& add_term(const PbwMonomial& mono, const Rat& c) {
        auto it = terms.find(mono);
        if (it == terms.end()) {
            if (!rat_is_zero(c)) terms.emplace(mono, c);
        } else {
            it->second += c;
            if (rat_is_zero(it->second)) terms.erase(it);
        }
        return *this;
    }
    UeaElement operator+(const UeaElement& o) const {
        UeaElement s = *this;
        for (const auto& [mono, c] : o.terms) s.add_term(mono, c);
        return s;
    }
    UeaElement operator-(const UeaElement& o) const {
        UeaElement s = *this;
        for (const auto& [mono, c] : o.terms) s.add_term(mono, -c);
        return s;
    }
    UeaElement scaled(const Rat& c) const {
        UeaElement s;
        if (rat_is_zero(c)) return s;
        for (const auto& [mono, v] : terms) s.terms[mono] = v * c;
        return s;
    }
};

namespace detail {

struct VecHash {
    size_t operator()(const std::vector<uint16_t>& v) const {
        size_t h = 1469598103934665603ull;
        for (uint16_t x : v) {
            h ^= x;
            h *= 1099511628211ull;
        }
        return h;
    }
};

// Per-algebra memo of monomial-times-letter straightenings. The Korn
// pipeline replays the same adjacent swaps thousands of times.
struct PbwCache {
    std::mutex mu;
    std::unordered_map<std::vector<uint16_t>, UeaElement, VecHash> map;
};

inline PbwCache& pbw_cache(const GradedLieAlgebra& g) {
    std::lock_guard<std::mutex> lock(g.cache_mutex);
    if (!g.pbw_cache) g.pbw_cache = std::make_shared<PbwCache>();
    return *static_cast<PbwCache*>(g.pbw_cache.get());
}

inline UeaElement mono_times_letter(const GradedLieAlgebra& g, const PbwMonomial& mono, int letter);

inline UeaElement element_times_letter(const GradedLieAlgebra& g, const UeaElement& e, int letter) {
    UeaElement out;
    for (const auto& [mono, c] : e.terms) {
        UeaElement part = mono_times_letter(g, mono, letter);
        for (const auto& [m2, c2] : part.terms) out.add_term(m2, c * c2);
    }
    return out;
}

// Normal form of (sorted monomial) * X_letter. Rewrites X_b X_a ->
// X_a X_b + [X_b, X_a]; correction terms are strictly shorter, so the
// recursion terminates.
inline UeaElement mono_times_letter(const GradedLieAlgebra& g, const PbwMonomial& mono, int letter) {
    if (mono.idx.empty() || mono.idx.back() <= letter) {
        PbwMonomial out = mono;
        out.idx.push_back(static_cast<uint16_t>(letter));
        UeaElement e;
        e.terms[out] = 1;
        return e;
    }

    std::vector<uint16_t> key = mono.idx;
    key.push_back(static_cast<uint16_t>(letter));
    PbwCache& cache = pbw_cache(g);
    {
        std::lock_guard<std::mutex> lock(cache.mu);
        auto it = cache.map.find(key);
        if (it != cache.map.end()) return it->second;
    }

    const int b = mono.idx.back();
    PbwMonomial head = mono;
    head.idx.pop_back();

    UeaElement result = element_times_letter(g, mono_times_letter(g, head, letter), b);
    for (const auto& [k, c] : g.brackets[static_cast<size_t>(b)][static_cast<size_t>(letter)]) {
        UeaElement part = mono_times_letter(g, head, k);
        for (const auto& [m2, c2] : part.terms) result.add_term(m2, c * c2);
    }

    {
        std::lock_guard<std::mutex> lock(cache.mu);
        cache.map.emplace(std::move(key), result);
    }
    return result;
}

} // namespace detail

inline UeaElement multiply(const GradedLieAlgebra& g, const UeaElement& a, const UeaElement& b) {
    UeaElement out;
    for (const auto& [mb, cb] : b.terms)
        for (const auto& [ma, ca] : a.terms) {
            UeaElement acc;
            acc.terms[ma] = 1;
            for (uint16_t letter : mb.idx) acc = detail::element_times_letter(g, acc, letter);
            for (const auto& [mono, c] : acc.terms) out.add_term(mono, ca * cb * c);
        }
    return out;
}

// Product of generators (or any basis elements) in the given order, in
// normal form. Letters are 0-based basis indices.
inline UeaElement from_basis_word(const GradedLieAlgebra& g, const std::vector<int>& letters) {
    UeaElement acc = UeaElement::unit();
    for (int l : letters) {
        if (l < 0 || l >= g.dim) throw SpecError("word letter out of range");
        acc = detail::element_times_letter(g, acc, l);
    }
    return acc;
}

// X_gamma for a word over the generators {0..m-1}.
inline UeaElement from_word(const GradedLieAlgebra& g, const std::vector<uint8_t>& word) {
    UeaElement acc = UeaElement::unit();
    for (uint8_t l : word) {
        if (l >= g.m) throw SpecError("word letter out of range 1.." + std::to_string(g.m));
        acc = detail::element_times_letter(g, acc, l);
    }
    return acc;
}

// (X_gamma)^t = (-1)^k X_{gamma_k} ... X_{gamma_1}.
inline UeaElement transpose_word(const GradedLieAlgebra& g, const std::vector<uint8_t>& word) {
    std::vector<uint8_t> rev(word.rbegin(), word.rend());
    UeaElement e = from_word(g, rev);
    return (word.size() % 2 == 0) ? e : e.scaled(Rat(-1));
}

inline UeaElement lie_to_uea(const GradedLieAlgebra&, const std::vector<Rat>& coeffs) {
    UeaElement e;
    for (size_t k = 0; k < coeffs.size(); ++k)
        if (!rat_is_zero(coeffs[k])) e.add_term(PbwMonomial{{static_cast<uint16_t>(k)}}, coeffs[k]);
    return e;
}

// ad(X_l)^n (X_l2) as algebra coefficients.
inline std::vector<Rat> ad_power(const GradedLieAlgebra& g, int l, int l2, int n) {
    std::vector<Rat> v = basis_vector(g, l2);
    std::vector<Rat> xl = basis_vector(g, l);
    for (int i = 0; i < n; ++i) v = bracket(g, xl, v);
    return v;
}

// Both sides of X_l^s X_l2 = sum_j binom(s,j) ad(X_l)^{s-j}(X_l2) X_l^j, in
// normal form. They agree in every associative algebra; the pair is returned
// so tests and the CLI can display the comparison.
inline std::pair<UeaElement, UeaElement> ad_power_expand(const GradedLieAlgebra& g, int l, int l2, int s) {
    if (s < 1) throw SpecError("ad_power_expand needs s >= 1");
    std::vector<int> w(static_cast<size_t>(s), l);
    w.push_back(l2);
    UeaElement lhs = from_basis_word(g, w);

    UeaElement rhs;
    for (int j = 0; j <= s; ++j) {
        std::vector<Rat> ad = ad_power(g, l, l2, s - j);
        UeaElement factor = lie_to_uea(g, ad);
        if (factor.is_zero()) continue;
        UeaElement tail = from_basis_word(g, std::vector<int>(static_cast<size_t>(j), l));
        UeaElement prod = multiply(g, factor, tail);
        rhs = rhs + prod.scaled(Rat(int_binom(static_cast<unsigned long>(s), static_cast<unsigned long>(j))));
    }
    return {lhs, rhs};
}

// The factor C of eq. X_l^r X_l2 = C X_l, built from the binomial expansion:
// C = sum_{j=1}^r binom(r,j) ad(X_l)^{r-j}(X_l2) X_l^{j-1}. Membership in
// g_r + g_{r-1} X_l + ... + g_1 X_l^{r-1} and the reconstruction identity
// are both verified before returning.
inline UeaElement commutator_factor(const GradedLieAlgebra& g, int l, int l2) {
    const int r = g.step;
    UeaElement c;
    for (int j = 1; j <= r; ++j) {
        std::vector<Rat> ad = ad_power(g, l, l2, r - j);
        UeaElement factor = lie_to_uea(g, ad);
        if (factor.is_zero()) continue;
        UeaElement tail = from_basis_word(g, std::vector<int>(static_cast<size_t>(j - 1), l));
        c = c + multiply(g, factor, tail).scaled(Rat(int_binom(static_cast<unsigned long>(r), static_cast<unsigned long>(j))));
    }

    // reconstruction: X_l^r X_l2 == C X_l
    std::vector<int> w(static_cast<size_t>(r), l);
    w.push_back(l2);
    UeaElement lhs = from_basis_word(g, w);
    UeaElement rhs = multiply(g, c, UeaElement::basis(l));
    if (!(lhs == rhs))
        throw CertificateError("commutator_factor: reconstruction X_l^r X_l' = C X_l failed");

    // membership: C in span{ z X_l^s : weight(z) = r - s, s = 0..r-1 }
    std::vector<UeaElement> span;
    for (int s = 0; s < r; ++s)
        for (int z = 0; z < g.dim; ++z) {
            if (g.weights[static_cast<size_t>(z)] != r - s) continue;
            UeaElement cand = multiply(g, UeaElement::basis(z),
                                       from_basis_word(g, std::vector<int>(static_cast<size_t>(s), l)));
            span.push_back(cand);
        }
    std::map<PbwMonomial, int> row_of;
    for (const auto& e : span)
        for (const auto& [mono, v] : e.terms)
            if (!row_of.count(mono)) {
                int n = static_cast<int>(row_of.size());
                row_of[mono] = n;
            }
    for (const auto& [mono, v] : c.terms)
        if (!row_of.count(mono)) {
            std::ostringstream os;
            os << "commutator_factor: monomial outside membership span (";
            for (uint16_t i : mono.idx) os << " " << g.basis_names[i];
            os << " )";
            throw CertificateError(os.str());
        }
    RatMatrix mat(static_cast<int>(row_of.size()), static_cast<int>(span.size()));
    std::vector<Rat> rhsv(row_of.size());
    for (size_t k = 0; k < span.size(); ++k)
        for (const auto& [mono, v] : span[k].terms) mat.at(row_of[mono], static_cast<int>(k)) = v;
    for (const auto& [mono, v] : c.terms) rhsv[static_cast<size_t>(row_of[mono])] = v;
    if (!solve(mat, rhsv))
        throw CertificateError("commutator_factor: membership form violated");
    return c;
}

inline std::string to_string(const GradedLieAlgebra& g, const UeaElement& e) {
    if (e.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [mono, c] : e.terms) {
        if (!first) os << " + ";
        first = false;
        os << "(" << rat_str(c) << ")";
        size_t i = 0;
        while (i < mono.idx.size()) {
            size_t j = i;
            while (j < mono.idx.size() && mono.idx[j] == mono.idx[i]) ++j;
            os << " " << g.basis_names[mono.idx[i]];
            if (j - i > 1) os << "^" << (j - i);
            i = j;
        }
    }
    return os.str();
}

} // namespace carnot
