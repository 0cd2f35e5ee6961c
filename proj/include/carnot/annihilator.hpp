#pragma once

#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "carnot/symbol.hpp"
#include "carnot/tensor_words.hpp"

namespace carnot {

// ---------------------------------------------------------------------------
// Example operators
// ---------------------------------------------------------------------------

struct ExampleId {
    enum Kind { Gradient, Powers, Korn } kind = Gradient;
    int k = 1; // order parameter for Powers

    std::string str() const {
        switch (kind) {
            case Gradient: return "gradient";
            case Powers: return "powers:" + std::to_string(k);
            case Korn: return "korn";
        }
        return "?";
    }
};

inline ExampleId parse_example(const std::string& s) {
    if (s == "gradient") return {ExampleId::Gradient, 1};
    if (s == "korn") return {ExampleId::Korn, 1};
    if (s.rfind("powers:", 0) == 0) {
        int k = 0;
        try {
            k = std::stoi(s.substr(7));
        } catch (...) {
            throw SpecError("bad powers parameter in '" + s + "'");
        }
        if (k < 1) throw SpecError("powers(k) needs k >= 1");
        return {ExampleId::Powers, k};
    }
    throw SpecError("unknown example '" + s + "' (expected gradient, powers:K or korn)");
}

inline int pair_index(int i, int j, int m) { // i < j, lexicographic
    return i * m - i * (i + 1) / 2 + (j - i - 1);
}
inline int pair_count(int m) { return m * (m - 1) / 2; }
inline int sym_pair_index(int i, int j, int m) { // i <= j, lexicographic
    return i * m - i * (i - 1) / 2 + (j - i);
}
inline int sym_pair_count(int m) { return m * (m + 1) / 2; }

// The named example operator over the given algebra:
//   gradient:  A(D)u = sum_j X_j u e^j
//   powers(k): A(D)u = sum_j X_j^k u e^j
//   korn:      A(D)u = sum_{i<=j} (X_i u_j + X_j u_i) e^{ij}
inline OperatorMatrix example_operator(const ExampleId& id, const AlgebraPtr& alg) {
    const int m = alg->m;
    switch (id.kind) {
        case ExampleId::Gradient:
        case ExampleId::Powers: {
            const int k = (id.kind == ExampleId::Gradient) ? 1 : id.k;
            OperatorMatrix a(alg, 1, m, k);
            for (int j = 0; j < m; ++j) a.add_entry(Word::power(j, k), j, 0, Rat(1));
            return a;
        }
        case ExampleId::Korn: {
            if (m < 2) throw SpecError("korn needs dim g_1 >= 2");
            OperatorMatrix a(alg, m, sym_pair_count(m), 1);
            for (int i = 0; i < m; ++i)
                for (int j = i; j < m; ++j) {
                    const int row = sym_pair_index(i, j, m);
                    a.add_entry(Word{{static_cast<uint8_t>(i)}}, row, j, Rat(1));
                    a.add_entry(Word{{static_cast<uint8_t>(j)}}, row, i, Rat(1));
                }
            return a;
        }
    }
    throw SpecError("unreachable example kind");
}

// ---------------------------------------------------------------------------
// Certificates
// ---------------------------------------------------------------------------

struct AnnihilatorCertificate {
    OperatorMatrix L;
    OperatorMatrix A;
    std::vector<UeaElement> residual; // to_uea(L o A); all zero iff the composition vanishes
    CocancelingVerdict cocancel;      // of Sym(L)
    std::string provenance;

    bool residual_zero() const { return uea_matrix_is_zero(residual); }
    bool valid() const { return residual_zero() && cocancel.cocanceling; }
};

inline AnnihilatorCertificate make_certificate(const OperatorMatrix& l, const OperatorMatrix& a,
                                               std::string provenance) {
    AnnihilatorCertificate c;
    c.L = l;
    c.A = a;
    c.residual = to_uea_matrix(compose(l, a));
    c.cocancel = check_cocanceling(symmetrize(l));
    c.provenance = std::move(provenance);
    return c;
}

// Certificates are self-verifying: recompute everything from the stored L, A.
inline bool verify_certificate(const AnnihilatorCertificate& c) {
    AnnihilatorCertificate fresh = make_certificate(c.L, c.A, c.provenance);
    return fresh.residual_zero() == c.residual_zero() &&
           fresh.cocancel.cocanceling == c.cocancel.cocanceling && c.valid();
}

// ---------------------------------------------------------------------------
// Closed-form annihilators for the example operators
// ---------------------------------------------------------------------------

namespace detail {

inline UeaElement tensor_to_uea(const GradedLieAlgebra& g, const TensorPoly& p) {
    UeaElement e;
    for (const auto& [w, c] : p.terms) e = e + from_word(g, w).scaled(c);
    return e;
}

// Appends to n the terms sum_s prefix(s) (x) chain_s acting on one column,
// where chain_1 = seed and chain_{s+1} = [block, chain_s]. The chain stops at
// the first link whose enveloping-algebra image vanishes: zero propagates
// down the chain, and dropped links neither change the composition with A
// nor the (identically zero) symmetrized symbol.
inline void add_bracket_chain(OperatorMatrix& n, const GradedLieAlgebra& g, const TensorPoly& block,
                              const TensorPoly& seed, int nsteps,
                              const std::function<Word(int)>& prefix, int row, int col,
                              const Rat& scale) {
    TensorPoly chain = seed;
    for (int s = 1; s <= nsteps; ++s) {
        if (s > 1) chain = tensor_commutator(block, chain);
        if (tensor_to_uea(g, chain).is_zero()) break;
        const Word pre = prefix(s);
        for (const auto& [w, c] : chain.terms) {
            Word full = pre;
            full.letters.insert(full.letters.end(), w.begin(), w.end());
            n.add_entry(full, row, col, c * scale);
        }
    }
}

} // namespace detail

struct ClosedFormResult {
    OperatorMatrix A, L0, M, N, L;
    AnnihilatorCertificate cert;     // for L = M o L0 - N against A
    bool sym_N_zero = false;         // Sym(N)(D) = 0
    bool sym_M_full_rank_at_ones = false; // Sym(M)(1,..,1) injective
    bool l0_cocanceling = false;     // Sym(L0) cocanceling
    bool ml0_cocanceling = false;    // Sym(M o L0) cocanceling (the preserved property)

    bool all_checks() const {
        return cert.valid() && sym_N_zero && sym_M_full_rank_at_ones && l0_cocanceling &&
               ml0_cocanceling;
    }
};

// Builds L0, M, N in closed form, expanding every bracket
// into tensor words over the generators, and verifies the full certificate:
// (M o L0 - N) o A = 0 in the enveloping algebra, Sym(N) = 0, Sym(M) of full
// rank at (1,..,1), Sym(L0) cocanceling, and Sym(M o L0 - N) cocanceling.
inline ClosedFormResult closed_form_annihilator(const ExampleId& id, const AlgebraPtr& alg) {
    const int m = alg->m;
    const int r = alg->step;
    if (m < 2) throw SpecError("closed-form constructions need dim g_1 >= 2");

    ClosedFormResult out;
    out.A = example_operator(id, alg);
    const int np = pair_count(m);

    if (id.kind == ExampleId::Gradient || id.kind == ExampleId::Powers) {
        const int k = (id.kind == ExampleId::Gradient) ? 1 : id.k;
        const int dimE = m;
        // L0(D) f = sum_{i<j} (X_i^k f_j - X_j^k f_i) e^i ^ e^j
        out.L0 = OperatorMatrix(alg, dimE, np, k);
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) {
                out.L0.add_entry(Word::power(i, k), pair_index(i, j, m), j, Rat(1));
                out.L0.add_entry(Word::power(j, k), pair_index(i, j, m), i, Rat(-1));
            }
        // M(D) g = sum_{i<j} X_j^{k^2 r} g_ij e^i ^ e^j
        out.M = OperatorMatrix(alg, np, np, k * k * r);
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j)
                out.M.add_entry(Word::power(j, k * k * r), pair_index(i, j, m), pair_index(i, j, m), Rat(1));
        // N from X_j^{k^2 r} [X_i^k, X_j^k] = sum_s X_j^{k(kr-s)} C_s X_j^k
        out.N = OperatorMatrix(alg, dimE, np, k * (k * r + 1));
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) {
                TensorPoly xik = TensorPoly::word(Word::power(i, k).letters);
                TensorPoly xjk = TensorPoly::word(Word::power(j, k).letters);
                detail::add_bracket_chain(
                    out.N, *alg, xjk, tensor_commutator(xik, xjk), k * r,
                    [&](int s) { return Word::power(j, k * (k * r - s)); }, pair_index(i, j, m), j,
                    Rat(1));
            }
    } else {
        // Korn: L0(D) f = sum_{i<j} ((X_i^2 f_jj + X_j^2 f_ii)/2 - X_i X_j f_ij) e^i ^ e^j
        const int dimE = sym_pair_count(m);
        out.L0 = OperatorMatrix(alg, dimE, np, 2);
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) {
                const int p = pair_index(i, j, m);
                out.L0.add_entry(Word::power(i, 2), p, sym_pair_index(j, j, m), make_rat(1, 2));
                out.L0.add_entry(Word::power(j, 2), p, sym_pair_index(i, i, m), make_rat(1, 2));
                out.L0.add_entry(Word{{static_cast<uint8_t>(i), static_cast<uint8_t>(j)}}, p,
                                 sym_pair_index(i, j, m), Rat(-1));
            }
        const int big = r * (2 * r + 2);
        // M(D) g = sum_{i<j} X_i^{r(2r+2)} X_j^{2r} g_ij e^i ^ e^j
        out.M = OperatorMatrix(alg, np, np, big + 2 * r);
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j)
                out.M.add_entry(Word::power(i, big).concat(Word::power(j, 2 * r)), pair_index(i, j, m),
                                pair_index(i, j, m), Rat(1));
        out.N = OperatorMatrix(alg, dimE, np, big + 2 * r + 2);
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) {
                const int p = pair_index(i, j, m);
                TensorPoly xi = TensorPoly::letter(static_cast<uint8_t>(i));
                TensorPoly xj = TensorPoly::letter(static_cast<uint8_t>(j));
                // X_j^{2r} (X_i [X_i,X_j]) = sum_s X_j^{2r-s} D_s X_j
                detail::add_bracket_chain(
                    out.N, *alg, xj, xi * tensor_commutator(xi, xj), 2 * r,
                    [&](int s) { return Word::power(i, big).concat(Word::power(j, 2 * r - s)); }, p,
                    sym_pair_index(j, j, m), make_rat(1, 2));
                // X_i^{r(2r+2)} (X_j^{2r} [X_j^2, X_i]) = sum_s X_i^{r(2r+2)-s} E_s X_i
                TensorPoly seed2 =
                    TensorPoly::word(Word::power(j, 2 * r).letters) *
                    tensor_commutator(TensorPoly::word(Word::power(j, 2).letters), xi);
                detail::add_bracket_chain(
                    out.N, *alg, xi, seed2, big,
                    [&](int s) { return Word::power(i, big - s); }, p, sym_pair_index(i, i, m),
                    make_rat(1, 2));
            }
    }

    out.L = compose(out.M, out.L0) - out.N;
    out.cert = make_certificate(out.L, out.A, "closed_form(" + id.str() + ")");
    out.sym_N_zero = symmetrize(out.N).is_zero();
    std::vector<Rat> ones(static_cast<size_t>(m), Rat(1));
    out.sym_M_full_rank_at_ones = (symbol_rank_at(symmetrize(out.M), ones) == out.M.dim_in);
    out.l0_cocanceling = check_cocanceling(symmetrize(out.L0)).cocanceling;
    out.ml0_cocanceling = check_cocanceling(symmetrize(compose(out.M, out.L0))).cocanceling;

    if (!out.cert.residual_zero()) {
        for (size_t idx = 0; idx < out.cert.residual.size(); ++idx)
            if (!out.cert.residual[idx].is_zero())
                throw CertificateError("closed_form_annihilator(" + id.str() +
                                       "): nonzero residual entry (" +
                                       std::to_string(idx / out.A.dim_in + 1) + "," +
                                       std::to_string(idx % out.A.dim_in + 1) +
                                       ") = " + to_string(*alg, out.cert.residual[idx]));
    }
    if (!out.all_checks())
        throw CertificateError("closed_form_annihilator(" + id.str() + "): certificate check failed");
    return out;
}

// ---------------------------------------------------------------------------
// Generic linear solvers
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<Word> all_words(int m, int len, size_t guard = 65536) {
    size_t count = 1;
    for (int i = 0; i < len; ++i) {
        count *= static_cast<size_t>(m);
        if (count > guard) throw SpecError("word space m^len too large for a dense solve");
    }
    std::vector<Word> out;
    out.reserve(count);
    Word w;
    w.letters.assign(static_cast<size_t>(len), 0);
    while (true) {
        out.push_back(w);
        int pos = len - 1;
        while (pos >= 0 && w.letters[static_cast<size_t>(pos)] == m - 1) {
            w.letters[static_cast<size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
        w.letters[static_cast<size_t>(pos)]++;
    }
    return out;
}

// Rows of the linear system "L of this order annihilates A": one unknown per
// (word, input column), one equation per (A input column, PBW monomial).
struct AnnihilationSystem {
    std::vector<Word> words;
    int dim_e = 0; // unknowns = words.size() * dim_e
    RatMatrix mat; // rows: (v, monomial); cols: (word, e)
    std::map<PbwMonomial, int> mono_row; // per v block
    int n_monos = 0;

    int col_of(size_t word_idx, int e) const { return static_cast<int>(word_idx) * dim_e + e; }
};

inline AnnihilationSystem annihilation_system(const OperatorMatrix& a, int order) {
    AnnihilationSystem sys;
    sys.words = all_words(a.alg->m, order);
    sys.dim_e = a.dim_out;
    // normal forms of word * gamma for all words and all words gamma of A
    std::vector<std::vector<UeaElement>> nf(sys.words.size());
    for (size_t wi = 0; wi < sys.words.size(); ++wi)
        for (const auto& [ga, mat] : a.terms) {
            UeaElement e = from_word(*a.alg, sys.words[wi].concat(ga).letters);
            for (const auto& [mono, c] : e.terms)
                if (!sys.mono_row.count(mono)) {
                    int n = static_cast<int>(sys.mono_row.size());
                    sys.mono_row[mono] = n;
                }
            nf[wi].push_back(std::move(e));
        }
    sys.n_monos = static_cast<int>(sys.mono_row.size());
    sys.mat = RatMatrix(a.dim_in * sys.n_monos, static_cast<int>(sys.words.size()) * sys.dim_e);
    for (size_t wi = 0; wi < sys.words.size(); ++wi) {
        size_t ti = 0;
        for (const auto& [ga, mat] : a.terms) {
            const UeaElement& e = nf[wi][ti++];
            for (int v = 0; v < a.dim_in; ++v)
                for (int ecol = 0; ecol < sys.dim_e; ++ecol) {
                    const Rat& aval = mat.at(ecol, v);
                    if (rat_is_zero(aval)) continue;
                    for (const auto& [mono, c] : e.terms)
                        sys.mat.at(v * sys.n_monos + sys.mono_row.at(mono), sys.col_of(wi, ecol)) +=
                            aval * c;
                }
        }
    }
    return sys;
}

} // namespace detail

// Solves for N with order(N) = order(M) + order(L0), Sym(N)(D) = 0 and
// N o A = (M o L0) o A in the enveloping algebra. Prefers minimum-support
// solutions by greedily pinning unknowns to zero. Infeasibility at this
// order is a legitimate outcome, reported as nullopt.
inline std::optional<OperatorMatrix> solve_N(const OperatorMatrix& a, const OperatorMatrix& l0,
                                             const OperatorMatrix& m) {
    const int order = m.order + l0.order;
    const AlgebraPtr alg = a.alg;
    detail::AnnihilationSystem sys = detail::annihilation_system(a, order);

    // symmetry constraints: per multiset beta and column e, sum of N^w = 0
    std::map<MultiIndex, std::vector<size_t>> classes;
    for (size_t wi = 0; wi < sys.words.size(); ++wi)
        classes[word_multiset(sys.words[wi], alg->m)].push_back(wi);
    const int unknowns = sys.mat.cols();
    const int sym_rows = static_cast<int>(classes.size()) * sys.dim_e;
    RatMatrix full(sys.mat.rows() + sym_rows, unknowns);
    for (int r = 0; r < sys.mat.rows(); ++r)
        for (int c = 0; c < unknowns; ++c) full.at(r, c) = sys.mat.at(r, c);
    {
        int row = sys.mat.rows();
        for (const auto& [beta, members] : classes)
            for (int e = 0; e < sys.dim_e; ++e, ++row)
                for (size_t wi : members) full.at(row, sys.col_of(wi, e)) = 1;
    }

    // target per output row f of M o L0
    std::vector<UeaElement> target = to_uea_matrix(compose(compose(m, l0), a));
    const int dim_f = m.dim_out;
    OperatorMatrix n(alg, a.dim_out, dim_f, order);
    for (int f = 0; f < dim_f; ++f) {
        std::vector<Rat> rhs(static_cast<size_t>(full.rows()));
        for (int v = 0; v < a.dim_in; ++v) {
            const UeaElement& t = target[static_cast<size_t>(f) * a.dim_in + v];
            for (const auto& [mono, c] : t.terms) {
                auto it = sys.mono_row.find(mono);
                if (it == sys.mono_row.end()) return std::nullopt; // monomial unreachable at this order
                rhs[static_cast<size_t>(v * sys.n_monos + it->second)] = c;
            }
        }
        auto sol = solve(full, rhs);
        if (!sol) return std::nullopt;
        // greedy support minimization: try pinning each unknown to zero
        std::vector<int> pinned;
        RatMatrix work = full;
        for (int u = 0; u < unknowns; ++u) {
            if (rat_is_zero((*sol)[static_cast<size_t>(u)])) continue;
            RatMatrix trial(work.rows() + 1, unknowns);
            for (int r = 0; r < work.rows(); ++r)
                for (int c = 0; c < unknowns; ++c) trial.at(r, c) = work.at(r, c);
            trial.at(work.rows(), u) = 1;
            std::vector<Rat> trial_rhs = rhs;
            trial_rhs.push_back(Rat(0));
            auto better = solve(trial, trial_rhs);
            if (better) {
                work = std::move(trial);
                rhs = std::move(trial_rhs);
                sol = std::move(better);
                pinned.push_back(u);
            }
        }
        for (size_t wi = 0; wi < sys.words.size(); ++wi)
            for (int e = 0; e < sys.dim_e; ++e) {
                const Rat& c = (*sol)[static_cast<size_t>(sys.col_of(wi, e))];
                if (!rat_is_zero(c)) n.add_entry(sys.words[wi], f, e, c);
            }
    }
    return n;
}

struct FindResult {
    int solution_space_dim = 0;
    std::optional<AnnihilatorCertificate> certificate;
};

// Degree-bounded annihilator search: computes the rational solution space of
// L o A = 0 at the given order, then looks for a cocanceling member. Random
// combinations with coefficients in {-3..3} (cocancellation is generic), then
// a fallback enumeration of basis elements and pairwise sums.
inline FindResult find_annihilator(const OperatorMatrix& a, int order, int dim_f, uint64_t seed) {
    if (order < 1) throw SpecError("find_annihilator needs order >= 1");
    if (dim_f < 1) throw SpecError("find_annihilator needs dimF >= 1");
    const AlgebraPtr alg = a.alg;
    detail::AnnihilationSystem sys = detail::annihilation_system(a, order);
    RatMatrix basis = nullspace(sys.mat);

    FindResult out;
    out.solution_space_dim = basis.cols();
    if (basis.cols() == 0) return out;

    auto assemble = [&](const std::vector<std::vector<Rat>>& row_coeffs) {
        OperatorMatrix l(alg, a.dim_out, dim_f, order);
        for (int f = 0; f < dim_f; ++f)
            for (int b = 0; b < basis.cols(); ++b) {
                const Rat& cf = row_coeffs[static_cast<size_t>(f)][static_cast<size_t>(b)];
                if (rat_is_zero(cf)) continue;
                for (size_t wi = 0; wi < sys.words.size(); ++wi)
                    for (int e = 0; e < sys.dim_e; ++e) {
                        const Rat& c = basis.at(sys.col_of(wi, e), b);
                        if (!rat_is_zero(c)) l.add_entry(sys.words[wi], f, e, c * cf);
                    }
            }
        return l;
    };
    auto try_candidate = [&](const OperatorMatrix& l) -> bool {
        if (l.is_zero()) return false;
        AnnihilatorCertificate cert =
            make_certificate(l, a, "searched(order " + std::to_string(order) + ", seed " +
                                       std::to_string(seed) + ")");
        if (!cert.residual_zero())
            throw CertificateError("find_annihilator: solution-space member fails L o A = 0");
        if (!cert.cocancel.cocanceling) return false;
        out.certificate = std::move(cert);
        return true;
    };

    RatSampler sampler(seed);
    for (int draw = 0; draw < 128; ++draw) {
        std::vector<std::vector<Rat>> coeffs(static_cast<size_t>(dim_f),
                                             std::vector<Rat>(static_cast<size_t>(basis.cols())));
        for (auto& row : coeffs)
            for (auto& c : row) c = Rat(sampler.int_in(-3, 3));
        if (try_candidate(assemble(coeffs))) return out;
    }
    // fallback: single basis elements, then pairwise sums, rows filled cyclically
    std::vector<std::vector<Rat>> singles;
    for (int b = 0; b < basis.cols(); ++b) {
        std::vector<Rat> v(static_cast<size_t>(basis.cols()));
        v[static_cast<size_t>(b)] = 1;
        singles.push_back(v);
    }
    for (int b1 = 0; b1 < basis.cols(); ++b1)
        for (int b2 = b1 + 1; b2 < basis.cols(); ++b2) {
            std::vector<Rat> v(static_cast<size_t>(basis.cols()));
            v[static_cast<size_t>(b1)] = 1;
            v[static_cast<size_t>(b2)] = 1;
            singles.push_back(v);
        }
    for (size_t start = 0; start < singles.size(); ++start) {
        std::vector<std::vector<Rat>> coeffs;
        for (int f = 0; f < dim_f; ++f) coeffs.push_back(singles[(start + static_cast<size_t>(f)) % singles.size()]);
        if (try_candidate(assemble(coeffs))) return out;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Korn reduction identities (the maximal-hypoellipticity reductions)
// ---------------------------------------------------------------------------

struct KornReductionEntry {
    std::string label;
    bool ok = false;
};

struct KornReductionReport {
    int k = 0; // 2r
    std::vector<KornReductionEntry> entries;
    bool all_ok = true;

    void add(std::string label, bool ok) {
        entries.push_back({std::move(label), ok});
        all_ok = all_ok && ok;
    }
};

namespace detail {

// Solve X_l^r C = C~ X_l^r for C~ in g_r + g_{r-1} X_l + ... + g_1 X_l^{r-1}.
inline std::optional<UeaElement> solve_swap_factor(const GradedLieAlgebra& g, int l,
                                                   const UeaElement& target) {
    const int r = g.step;
    std::vector<UeaElement> cands_elem, cands_rhs;
    for (int s = 0; s < r; ++s)
        for (int z = 0; z < g.dim; ++z) {
            if (g.weights[static_cast<size_t>(z)] != r - s) continue;
            std::vector<int> w;
            w.push_back(z);
            for (int t = 0; t < s; ++t) w.push_back(l);
            cands_elem.push_back(from_basis_word(g, w));
            for (int t = 0; t < r; ++t) w.push_back(l);
            cands_rhs.push_back(from_basis_word(g, w));
        }
    std::map<PbwMonomial, int> rows;
    auto touch = [&](const UeaElement& e) {
        for (const auto& [mono, c] : e.terms)
            if (!rows.count(mono)) {
                int n = static_cast<int>(rows.size());
                rows[mono] = n;
            }
    };
    for (const auto& e : cands_rhs) touch(e);
    touch(target);
    RatMatrix mat(static_cast<int>(rows.size()), static_cast<int>(cands_rhs.size()));
    std::vector<Rat> rhs(rows.size());
    for (size_t k = 0; k < cands_rhs.size(); ++k)
        for (const auto& [mono, c] : cands_rhs[k].terms) mat.at(rows[mono], static_cast<int>(k)) = c;
    for (const auto& [mono, c] : target.terms) rhs[static_cast<size_t>(rows[mono])] = c;
    auto sol = solve(mat, rhs);
    if (!sol) return std::nullopt;
    UeaElement out;
    for (size_t k = 0; k < cands_elem.size(); ++k)
        out = out + cands_elem[k].scaled((*sol)[k]);
    return out;
}

} // namespace detail

// Verifies, in the enveloping algebra with k = 2r, the three case identities
// of the Korn reduction for every admissible (i, j, l):
//   case 1 (l=j):  X_j^{2r} X_i = X_j^r C_{j,i} X_j
//   case 2 (l=i):  X_i^{2r} X_j = X_i^r C_{i,j} X_i
//   case 3 (else): X_l^{2r} X_i = X_l^r C_{l,i} X_l  and
//                  X_l^r C_{l,i} X_j = C~_{l,i} C_{l,j} X_l
// where the swap factor C~ with X_l^r C_{l,i} = C~_{l,i} X_l^r is found by
// linear algebra over the membership space. m = 2 has no case 3.
inline KornReductionReport korn_reduction_check(const AlgebraPtr& alg) {
    const GradedLieAlgebra& g = *alg;
    if (g.m < 2) throw SpecError("korn reduction needs dim g_1 >= 2");
    const int r = g.step;
    KornReductionReport rep;
    rep.k = 2 * r;

    auto xpow = [&](int l, int n) { return from_basis_word(g, std::vector<int>(static_cast<size_t>(n), l)); };
    auto label = [](const std::string& kind, int i, int j, int l) {
        std::ostringstream os;
        os << kind << " i=" << i + 1 << " j=" << j + 1;
        if (l >= 0) os << " l=" << l + 1;
        return os.str();
    };

    for (int i = 0; i < g.m; ++i)
        for (int j = i + 1; j < g.m; ++j) {
            {
                UeaElement cji = commutator_factor(g, j, i);
                UeaElement lhs = multiply(g, xpow(j, 2 * r), UeaElement::basis(i));
                UeaElement rhs = multiply(g, multiply(g, xpow(j, r), cji), UeaElement::basis(j));
                rep.add(label("case1", i, j, -1), lhs == rhs);
            }
            {
                UeaElement cij = commutator_factor(g, i, j);
                UeaElement lhs = multiply(g, xpow(i, 2 * r), UeaElement::basis(j));
                UeaElement rhs = multiply(g, multiply(g, xpow(i, r), cij), UeaElement::basis(i));
                rep.add(label("case2", i, j, -1), lhs == rhs);
            }
            for (int l = 0; l < g.m; ++l) {
                if (l == i || l == j) continue;
                UeaElement cli = commutator_factor(g, l, i);
                UeaElement clj = commutator_factor(g, l, j);
                UeaElement swap_target = multiply(g, xpow(l, r), cli);
                auto ctilde = detail::solve_swap_factor(g, l, swap_target);
                if (!ctilde) {
                    rep.add(label("case3-swap", i, j, l), false);
                    continue;
                }
                rep.add(label("case3-swap", i, j, l),
                        multiply(g, *ctilde, xpow(l, r)) == swap_target);
                UeaElement lhs1 = multiply(g, xpow(l, 2 * r), UeaElement::basis(i));
                UeaElement rhs1 = multiply(g, multiply(g, xpow(l, r), cli), UeaElement::basis(l));
                rep.add(label("case3-uj", i, j, l), lhs1 == rhs1);
                UeaElement lhs2 = multiply(g, multiply(g, xpow(l, r), cli), UeaElement::basis(j));
                UeaElement rhs2 = multiply(g, multiply(g, *ctilde, clj), UeaElement::basis(l));
                rep.add(label("case3-ul", i, j, l), lhs2 == rhs2);
            }
        }
    return rep;
}

} // namespace carnot
