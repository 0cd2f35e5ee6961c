#pragma once

#include <map>
#include <sstream>
#include <vector>

#include "carnot/linalg.hpp"
#include "carnot/uea.hpp"

namespace carnot {

// A word gamma over the generators {0..m-1}; X_gamma = X_{g1} ... X_{gk}.
struct Word {
    std::vector<uint8_t> letters;

    bool operator==(const Word& o) const { return letters == o.letters; }
    bool operator<(const Word& o) const {
        if (letters.size() != o.letters.size()) return letters.size() < o.letters.size();
        return letters < o.letters;
    }
    size_t size() const { return letters.size(); }

    Word concat(const Word& o) const {
        Word w = *this;
        w.letters.insert(w.letters.end(), o.letters.begin(), o.letters.end());
        return w;
    }
    Word reversed() const { return Word{{letters.rbegin(), letters.rend()}}; }

    static Word power(int letter, int n) {
        return Word{std::vector<uint8_t>(static_cast<size_t>(n), static_cast<uint8_t>(letter))};
    }
};

// Matrix-valued homogeneous operator sum_gamma A^gamma X_gamma of fixed
// order, mapping V = R^dim_in to E = R^dim_out. Sparse over words; words of
// the wrong length or letters outside the generators are rejected.
struct OperatorMatrix {
    AlgebraPtr alg;
    int dim_in = 1;
    int dim_out = 1;
    int order = 0;
    std::map<Word, RatMatrix> terms;

    OperatorMatrix() = default;
    OperatorMatrix(AlgebraPtr a, int din, int dout, int k)
        : alg(std::move(a)), dim_in(din), dim_out(dout), order(k) {}

    void add_term(const Word& w, const RatMatrix& mat) {
        if (static_cast<int>(w.size()) != order)
            throw SpecError("operator word length " + std::to_string(w.size()) +
                            " does not match order " + std::to_string(order));
        for (uint8_t l : w.letters)
            if (l >= alg->m)
                throw SpecError("operator word letter " + std::to_string(l + 1) + " outside 1.." +
                                std::to_string(alg->m));
        if (mat.rows() != dim_out || mat.cols() != dim_in)
            throw SpecError("operator coefficient matrix has wrong shape");
        auto it = terms.find(w);
        if (it == terms.end()) {
            if (!mat.is_zero()) terms.emplace(w, mat);
        } else {
            RatMatrix s = it->second + mat;
            if (s.is_zero())
                terms.erase(it);
            else
                it->second = std::move(s);
        }
    }

    void add_entry(const Word& w, int row, int col, const Rat& c) {
        RatMatrix mat(dim_out, dim_in);
        mat.at(row, col) = c;
        add_term(w, mat);
    }

    bool is_zero() const { return terms.empty(); }

    OperatorMatrix operator-(const OperatorMatrix& o) const {
        OperatorMatrix d = *this;
        for (const auto& [w, mat] : o.terms) d.add_term(w, -mat);
        return d;
    }
    OperatorMatrix operator+(const OperatorMatrix& o) const {
        OperatorMatrix s = *this;
        for (const auto& [w, mat] : o.terms) s.add_term(w, mat);
        return s;
    }
    OperatorMatrix scaled(const Rat& c) const {
        OperatorMatrix s(alg, dim_in, dim_out, order);
        for (const auto& [w, mat] : terms) s.add_term(w, mat.scaled(c));
        return s;
    }
};

// Word-concatenation composition L(D) A(D); order adds.
inline OperatorMatrix compose(const OperatorMatrix& l, const OperatorMatrix& a) {
    if (l.alg.get() != a.alg.get()) throw SpecError("compose: operators live on different algebras");
    if (l.dim_in != a.dim_out)
        throw SpecError("compose: inner dimensions mismatch (" + std::to_string(l.dim_in) +
                        " vs " + std::to_string(a.dim_out) + ")");
    OperatorMatrix out(l.alg, a.dim_in, l.dim_out, l.order + a.order);
    for (const auto& [wl, ml] : l.terms)
        for (const auto& [wa, ma] : a.terms) out.add_term(wl.concat(wa), ml * ma);
    return out;
}

// A^t(D) = sum (A^gamma)^t X_gamma^t with X_gamma^t = (-1)^k X_reverse(gamma).
inline OperatorMatrix formal_transpose(const OperatorMatrix& a) {
    OperatorMatrix out(a.alg, a.dim_out, a.dim_in, a.order);
    const Rat sign = (a.order % 2 == 0) ? Rat(1) : Rat(-1);
    for (const auto& [w, mat] : a.terms) out.add_term(w.reversed(), mat.transpose().scaled(sign));
    return out;
}

// Entries of the operator as enveloping-algebra elements in normal form;
// equality of operators is decided here, never at the tensor level.
inline std::vector<UeaElement> to_uea_matrix(const OperatorMatrix& a) {
    std::vector<UeaElement> out(static_cast<size_t>(a.dim_out) * a.dim_in);
    for (const auto& [w, mat] : a.terms) {
        UeaElement e = from_word(*a.alg, w.letters);
        for (int r = 0; r < a.dim_out; ++r)
            for (int c = 0; c < a.dim_in; ++c) {
                if (rat_is_zero(mat.at(r, c))) continue;
                out[static_cast<size_t>(r) * a.dim_in + c] =
                    out[static_cast<size_t>(r) * a.dim_in + c] + e.scaled(mat.at(r, c));
            }
    }
    return out;
}

inline bool uea_matrix_is_zero(const std::vector<UeaElement>& m) {
    for (const auto& e : m)
        if (!e.is_zero()) return false;
    return true;
}

inline bool is_identically_zero(const OperatorMatrix& a) {
    return uea_matrix_is_zero(to_uea_matrix(a));
}

inline std::string to_string(const OperatorMatrix& a) {
    std::ostringstream os;
    os << "order " << a.order << ", " << a.dim_in << " -> " << a.dim_out << ", " << a.terms.size()
       << " words";
    return os.str();
}

} // namespace carnot
