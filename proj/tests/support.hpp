#pragma once

#include "hermsig/hermsig.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace testing_support {

using namespace hermsig;

inline FieldPtr rationals() { return NumberField::rationals(); }

/// Q[x]/(x^2 - d).
inline FieldPtr quadratic_field(long d) { return NumberField::create(Polynomial({Rational(-d), 0, 1})); }

inline FieldElement el(const FieldPtr& f, std::vector<Rational> coeffs) { return FieldElement(f, Polynomial(std::move(coeffs))); }
inline FieldElement el(const FieldPtr& f, long v) { return FieldElement(f, v); }

/// The ordering at which x has the given sign. Orderings are sorted by
/// root, so labels alone do not say which sign x takes.
inline Ordering ordering_where_generator(const FieldPtr& f, int s)
{
    const FieldElement x = FieldElement::generator(f);
    for (const auto& p : f->orderings())
        if (sign_at(x, p) == s) return p;
    throw Error("no such ordering");
}

/// Floating-point value of an element at a real root; used only as an
/// independent oracle away from zero.
inline double approx(const FieldElement& a, double root)
{
    double v = 0, pw = 1;
    for (const auto& c : a.coeffs()) {
        v += c.get_d() * pw;
        pw *= root;
    }
    return v;
}

inline std::vector<FieldElement> diag_entries(const FieldPtr& f, std::initializer_list<long> xs)
{
    std::vector<FieldElement> out;
    for (long x : xs) out.emplace_back(f, x);
    return out;
}

inline QuadraticForm qf(const FieldPtr& f, std::initializer_list<long> xs) { return QuadraticForm(f, diag_entries(f, xs)); }

inline HermitianForm hf(const AlgebraPtr& a, std::initializer_list<long> xs)
{
    std::vector<AlgebraElement> entries;
    for (long x : xs) entries.push_back(a->diag_scalar(a->scalar(x)));
    return HermitianForm::diagonal(a, entries);
}

inline Rational rational_part(const FieldElement& x)
{
    if (!x.is_rational()) throw Error("characteristic polynomial left Q");
    return x.rational_part();
}

inline Rational rational_part(const Scalar& x)
{
    for (int s = 1; s < x.dim(); ++s)
        if (!x[s].is_zero()) throw Error("characteristic polynomial is not real");
    return rational_part(x[0]);
}

/// Positive and negative eigenvalue counts of a symmetric (or hermitian, over
/// F(sqrt delta) with delta < 0) matrix from its exact characteristic
/// polynomial: Faddeev-LeVerrier, then Descartes' rule of signs, which is
/// exact when every root is real.
template <class T>
std::pair<int, int> descartes_counts(const Matrix<T>& g)
{
    const std::size_t n = g.rows();
    if (n == 0) return {0, 0};
    const T zero = scalar_traits<T>::zero_like(g(0, 0));
    const T one = scalar_traits<T>::one_like(g(0, 0));
    // p(t) = t^n + c[n-1] t^(n-1) + ... + c[0].
    std::vector<T> c(n + 1, zero);
    c[n] = one;
    Matrix<T> m(n, n, zero);
    for (std::size_t k = 1; k <= n; ++k) {
        Matrix<T> gm = g * m;
        for (std::size_t i = 0; i < n; ++i) gm(i, i) += c[n - k + 1];
        m = gm;
        const Matrix<T> next = g * m;
        T tr = zero;
        for (std::size_t i = 0; i < n; ++i) tr += next(i, i);
        c[n - k] = scalar_traits<T>::scale(Rational(-1, static_cast<long>(k)), tr);
    }
    std::vector<Rational> coeffs;
    for (const auto& x : c) coeffs.push_back(rational_part(x));
    auto variations = [](const std::vector<Rational>& v) {
        int count = 0, last = 0;
        for (const auto& x : v) {
            const int s = sgn(x);
            if (s == 0) continue;
            if (last != 0 && s != last) ++count;
            last = s;
        }
        return count;
    };
    std::vector<Rational> flipped = coeffs;
    for (std::size_t i = 1; i < flipped.size(); i += 2) flipped[i] = -flipped[i];
    return {variations(coeffs), variations(flipped)};
}

template <class T>
int descartes_signature(const Matrix<T>& g)
{
    const auto [pos, neg] = descartes_counts(g);
    return pos - neg;
}

/// Morita oracle through the explicit splitting of (1, b)_F: the Gram of h
/// maps blockwise into M_2(F), and J^{-1} Phi(G) with J = [[0, 1], [-1, 0]]
/// is symmetric for the skew family (its signature is the oracle value) and
/// alternating for the symplectic family (oracle value 0). Returns nullopt
/// when the expected symmetry fails.
inline std::optional<int> split_oracle(const HermitianForm& h, const Ordering& p)
{
    const Algebra& alg = *h.algebra();
    const FieldPtr& f = alg.field();
    const auto phi = split_isomorphism(h.gram());
    const std::size_t m = phi.rows();
    Matrix<FieldElement> jinv(m, m, FieldElement(f, 0));
    for (std::size_t b = 0; b < m; b += 2) {
        jinv(b, b + 1) = FieldElement(f, -1);
        jinv(b + 1, b) = FieldElement(f, 1);
    }
    const auto mm = jinv * phi;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            if (alg.family() == Family::QuatSkew && !(mm(i, j) == mm(j, i))) return std::nullopt;
            if (alg.family() == Family::QuatSymp && !(mm(i, j) == -mm(j, i))) return std::nullopt;
        }
    if (alg.family() == Family::QuatSymp) return 0;
    return signature_q(diagonalize(GramQuadraticForm(f, mm), false).form, p);
}

/// Sylvester count oracle over Q for SplitOrth and for Unitary with
/// delta < 0, from the characteristic polynomial of the Gram itself.
inline int sylvester_oracle(const HermitianForm& h)
{
    const auto& g = h.gram();
    if (h.algebra()->family() == Family::Unitary) return descartes_signature(g);
    Matrix<FieldElement> m(g.rows(), g.cols(), FieldElement(h.algebra()->field(), 0));
    for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) m(i, j) = g(i, j)[0];
    return descartes_signature(m);
}

}  // namespace testing_support
