#pragma once

#include "hermsig/matrix.hpp"

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

namespace hermsig {

/// One value of a total signature, indexed by ordering.
struct SignatureEntry {
    Ordering ordering;
    int value = 0;
    friend bool operator==(const SignatureEntry& a, const SignatureEntry& b)
    {
        return a.ordering == b.ordering && a.value == b.value;
    }
};
using SignatureTable = std::vector<SignatureEntry>;

inline bool all_zero(const SignatureTable& t)
{
    return std::all_of(t.begin(), t.end(), [](const SignatureEntry& e) { return e.value == 0; });
}

/// Diagonal quadratic form <d1, ..., dk> with nonzero entries; the empty
/// form is the zero form.
class QuadraticForm {
public:
    QuadraticForm(FieldPtr field, std::vector<FieldElement> entries = {})
        : field_(std::move(field)), entries_(std::move(entries))
    {
        for (const auto& e : entries_) {
            if (!e.field()->same_as(*field_)) throw FieldMismatch();
            if (e.is_zero()) throw Error("quadratic form entries must be nonzero");
        }
    }

    const FieldPtr& field() const { return field_; }
    const std::vector<FieldElement>& entries() const { return entries_; }
    std::size_t rank() const { return entries_.size(); }

    std::string to_string() const
    {
        std::string s = "<";
        for (std::size_t i = 0; i < entries_.size(); ++i) s += (i ? ", " : "") + entries_[i].to_string();
        return s + ">";
    }

    friend bool operator==(const QuadraticForm& a, const QuadraticForm& b) { return a.entries_ == b.entries_; }

private:
    FieldPtr field_;
    std::vector<FieldElement> entries_;
};

/// Symmetric Gram matrix over F.
class GramQuadraticForm {
public:
    GramQuadraticForm(FieldPtr field, Matrix<FieldElement> m) : field_(std::move(field)), m_(std::move(m))
    {
        if (m_.rows() != m_.cols()) throw ShapeMismatch("Gram matrix must be square");
        for (std::size_t i = 0; i < m_.rows(); ++i)
            for (std::size_t j = i + 1; j < m_.cols(); ++j)
                if (!(m_(i, j) == m_(j, i)))
                    throw Error("Gram matrix is not symmetric at (" + std::to_string(i) + ", " +
                                std::to_string(j) + ")");
    }

    static GramQuadraticForm from_diagonal(const QuadraticForm& q)
    {
        const FieldElement zero(q.field(), 0);
        Matrix<FieldElement> m(q.rank(), q.rank(), zero);
        for (std::size_t i = 0; i < q.rank(); ++i) m(i, i) = q.entries()[i];
        return GramQuadraticForm(q.field(), std::move(m));
    }

    const FieldPtr& field() const { return field_; }
    const Matrix<FieldElement>& matrix() const { return m_; }
    std::size_t dimension() const { return m_.rows(); }

private:
    FieldPtr field_;
    Matrix<FieldElement> m_;
};

/// Nondegenerate diagonal part, radical dimension, and the congruence
/// witness S with S^T G S = diag(form, 0, ..., 0).
struct Diagonalization {
    QuadraticForm form;
    std::size_t radical = 0;
    Matrix<FieldElement> transform;
};

inline Diagonalization diagonalize(const GramQuadraticForm& g, bool with_transform = true)
{
    auto c = congruence_diagonalize(g.matrix(), with_transform);
    return {QuadraticForm(g.field(), std::move(c.diagonal)), c.radical, std::move(c.transform)};
}

inline int signature_q(const QuadraticForm& q, const Ordering& p)
{
    if (!q.field()->same_as(p.field())) throw FieldMismatch();
    int s = 0;
    for (const auto& d : q.entries()) s += sign_at(d, p);
    return s;
}

inline SignatureTable total_signature(const QuadraticForm& q)
{
    SignatureTable t;
    for (const auto& p : q.field()->orderings()) t.push_back({p, signature_q(q, p)});
    return t;
}

/// Signature of a symmetric matrix at every ordering (radical ignored).
inline SignatureTable total_signature(const GramQuadraticForm& g)
{
    return total_signature(diagonalize(g, false).form);
}

/// Positive (negative) semidefiniteness at P for orientation +1 (-1).
inline bool is_semidefinite(const GramQuadraticForm& g, const Ordering& p, int orientation = 1)
{
    const auto diag = diagonalize(g, false);
    for (const auto& d : diag.form.entries())
        if (orientation * sign_at(d, p) < 0) return false;
    return true;
}

/// Pfister form <<b1, ..., bt>> = <1, b1> x ... x <1, bt>; entry s is the
/// product of the b_j whose bit j is set in s.
inline QuadraticForm pfister(const FieldPtr& f, const std::vector<FieldElement>& slots)
{
    std::vector<FieldElement> entries{FieldElement(f, 1)};
    for (const auto& b : slots) {
        if (b.is_zero()) throw Error("Pfister slot must be nonzero");
        const std::size_t half = entries.size();
        for (std::size_t s = 0; s < half; ++s) entries.push_back(entries[s] * b);
    }
    return QuadraticForm(f, std::move(entries));
}

/// Orderings at which every b_j is positive.
inline std::vector<Ordering> harrison_set(const FieldPtr& f, const std::vector<FieldElement>& slots)
{
    for (const auto& b : slots)
        if (b.is_zero()) throw Error("Harrison set slot must be nonzero");
    std::vector<Ordering> out;
    for (const auto& p : f->orderings()) {
        bool in = std::all_of(slots.begin(), slots.end(), [&](const FieldElement& b) { return sign_at(b, p) > 0; });
        if (in) out.push_back(p);
    }
    return out;
}

/// Torsion iff the total signature vanishes (local-global principle).
inline bool torsion_test_q(const QuadraticForm& q) { return all_zero(total_signature(q)); }

namespace detail {
/// Appends entries, cancelling an entry against an earlier -entry.
inline void append_cancelling(std::vector<FieldElement>& out, const FieldElement& e)
{
    const FieldElement neg = -e;
    auto it = std::find(out.begin(), out.end(), neg);
    if (it != out.end()) out.erase(it);
    else out.push_back(e);
}
}  // namespace detail

inline QuadraticForm witt_sum(const QuadraticForm& a, const QuadraticForm& b)
{
    if (!a.field()->same_as(*b.field())) throw FieldMismatch();
    std::vector<FieldElement> out;
    for (const auto& e : a.entries()) detail::append_cancelling(out, e);
    for (const auto& e : b.entries()) detail::append_cancelling(out, e);
    return QuadraticForm(a.field(), std::move(out));
}

inline QuadraticForm witt_tensor(const QuadraticForm& a, const QuadraticForm& b)
{
    if (!a.field()->same_as(*b.field())) throw FieldMismatch();
    std::vector<FieldElement> out;
    for (const auto& x : a.entries())
        for (const auto& y : b.entries()) detail::append_cancelling(out, x * y);
    return QuadraticForm(a.field(), std::move(out));
}

inline QuadraticForm negate(const QuadraticForm& q)
{
    std::vector<FieldElement> out;
    for (const auto& e : q.entries()) out.push_back(-e);
    return QuadraticForm(q.field(), std::move(out));
}

/// Embeds a rational into any field.
inline FieldElement embed(const Rational& r, const FieldPtr& f) { return FieldElement(f, r); }

/// Scharlau transfer along Tr_{L/Q}: the Gram matrix over Q of
/// (x, y) -> Tr(d x y) on each diagonal slot, in the power basis of L.
inline GramQuadraticForm transfer(const QuadraticForm& q, const FieldPtr& base)
{
    if (base->degree() != 1) throw Error("transfer: only the base field Q is supported");
    const FieldPtr& l = q.field();
    const int d = l->degree();
    const FieldElement zero(base, 0);
    Matrix<FieldElement> m(q.rank() * d, q.rank() * d, zero);
    const FieldElement x = FieldElement::generator(l);
    std::vector<FieldElement> powers{FieldElement(l, 1)};
    for (int k = 1; k < 2 * d - 1; ++k) powers.push_back(powers.back() * x);
    for (std::size_t s = 0; s < q.rank(); ++s)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                m(s * d + i, s * d + j) = FieldElement(base, (q.entries()[s] * powers[i + j]).trace());
    return GramQuadraticForm(base, std::move(m));
}

/// Congruence S^T G S.
inline Matrix<FieldElement> congruent(const Matrix<FieldElement>& g, const Matrix<FieldElement>& s)
{
    return adjoint(s) * g * s;
}

}  // namespace hermsig
