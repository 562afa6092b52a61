#pragma once

#include "hermsig/number_field.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace hermsig {

/// Operations the congruence machinery needs from a coefficient type.
/// Specialized for FieldElement here and for algebra scalars in algebra.hpp.
template <class T>
struct scalar_traits;

template <>
struct scalar_traits<FieldElement> {
    static FieldElement conj(const FieldElement& x) { return x; }
    static bool is_zero(const FieldElement& x) { return x.is_zero(); }
    static bool is_invertible(const FieldElement& x) { return !x.is_zero(); }
    static FieldElement inverse(const FieldElement& x) { return x.inverse(); }
    static FieldElement zero_like(const FieldElement& x) { return x.zero(); }
    static FieldElement one_like(const FieldElement& x) { return x.one(); }
    static FieldElement scale(const Rational& r, const FieldElement& x) { return r * x; }
    static std::vector<FieldElement> basis_like(const FieldElement& x) { return {x.one()}; }
    static void add_mul(FieldElement& acc, const FieldElement& x, const FieldElement& y, bool subtract = false)
    {
        acc.add_mul(x, y, subtract);
    }
};

/// Dense row-major matrix over a coefficient type without a default zero;
/// the zero element is supplied by the caller since it carries field context.
template <class T>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, const T& fill) : r_(rows), c_(cols), d_(rows * cols, fill) {}

    static Matrix identity(std::size_t n, const T& zero, const T& one)
    {
        Matrix m(n, n, zero);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = one;
        return m;
    }

    std::size_t rows() const { return r_; }
    std::size_t cols() const { return c_; }
    bool empty() const { return d_.empty(); }
    T& operator()(std::size_t i, std::size_t j) { return d_[i * c_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return d_[i * c_ + j]; }

    friend bool operator==(const Matrix& a, const Matrix& b)
    {
        return a.r_ == b.r_ && a.c_ == b.c_ && a.d_ == b.d_;
    }

private:
    std::size_t r_ = 0, c_ = 0;
    std::vector<T> d_;
};

struct ShapeMismatch : Error {
    using Error::Error;
};

template <class T>
Matrix<T> operator*(const Matrix<T>& a, const Matrix<T>& b)
{
    if (a.cols() != b.rows()) throw ShapeMismatch("matrix product: inner dimensions differ");
    if (a.rows() == 0 || b.cols() == 0) return Matrix<T>(a.rows(), b.cols(), T{});
    const T zero = scalar_traits<T>::zero_like(a(0, 0));
    Matrix<T> r(a.rows(), b.cols(), zero);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            if (scalar_traits<T>::is_zero(a(i, k))) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) scalar_traits<T>::add_mul(r(i, j), a(i, k), b(k, j));
        }
    return r;
}

template <class T>
Matrix<T> operator+(const Matrix<T>& a, const Matrix<T>& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeMismatch("matrix sum: shapes differ");
    Matrix<T> r = a;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) += b(i, j);
    return r;
}

template <class T>
Matrix<T> operator-(const Matrix<T>& a)
{
    Matrix<T> r = a;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = -a(i, j);
    return r;
}

template <class T>
Matrix<T> operator-(const Matrix<T>& a, const Matrix<T>& b)
{
    return a + (-b);
}

/// Conjugate transpose with respect to the coefficient involution.
template <class T>
Matrix<T> adjoint(const Matrix<T>& a)
{
    if (a.empty()) return Matrix<T>(a.cols(), a.rows(), T{});
    Matrix<T> r(a.cols(), a.rows(), a(0, 0));
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(j, i) = scalar_traits<T>::conj(a(i, j));
    return r;
}

template <class T>
bool is_zero_matrix(const Matrix<T>& a)
{
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (!scalar_traits<T>::is_zero(a(i, j))) return false;
    return true;
}

/// Block-diagonal sum.
template <class T>
Matrix<T> direct_sum(const Matrix<T>& a, const Matrix<T>& b, const T& zero)
{
    Matrix<T> r(a.rows() + b.rows(), a.cols() + b.cols(), zero);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j);
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) r(a.rows() + i, a.cols() + j) = b(i, j);
    return r;
}

/// Result of a congruence diagonalization: transform^* G transform equals
/// diag(diagonal, 0, ..., 0) with `radical` trailing zeros.
template <class T>
struct Congruence {
    std::vector<T> diagonal;
    std::size_t radical = 0;
    Matrix<T> transform;
};

/// Raised when every candidate pivot is a nonzero zero divisor; only possible
/// over split quaternion coefficients.
struct NonInvertiblePivot : Error {
    NonInvertiblePivot() : Error("no invertible pivot: coefficient ring is not a division ring here") {}
};

/// Symmetric (eps = +1) or skew (eps = -1) congruence reduction of an
/// eps-hermitian matrix. Pivot rule: first invertible diagonal entry; if the
/// diagonal has none but the block is nonzero, replace e_j by e_j + e_l*lambda
/// for the first off-diagonal pair and the first lambda in (1/2)*basis that
/// yields an invertible value. Over a field with a hyperbolic block
/// [[0, c], [c, 0]] this produces the pivot c, followed by -c.
template <class T>
Congruence<T> congruence_diagonalize(const Matrix<T>& g, bool track_transform = true)
{
    using tr = scalar_traits<T>;
    const std::size_t n = g.rows();
    Congruence<T> out;
    if (n == 0) return out;
    const T zero = tr::zero_like(g(0, 0));
    const T one = tr::one_like(g(0, 0));
    Matrix<T> m = g;
    Matrix<T> t = track_transform ? Matrix<T>::identity(n, zero, one) : Matrix<T>();

    auto swap_index = [&](std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t k = 0; k < n; ++k) std::swap(m(a, k), m(b, k));
        for (std::size_t k = 0; k < n; ++k) std::swap(m(k, a), m(k, b));
        if (track_transform)
            for (std::size_t k = 0; k < n; ++k) std::swap(t(k, a), t(k, b));
    };
    // e_j <- e_j + e_l * lambda
    auto add_multiple = [&](std::size_t j, std::size_t l, const T& lambda) {
        for (std::size_t k = 0; k < n; ++k) m(k, j) += m(k, l) * lambda;
        const T lc = tr::conj(lambda);
        for (std::size_t k = 0; k < n; ++k) m(j, k) += lc * m(l, k);
        if (track_transform)
            for (std::size_t k = 0; k < n; ++k) t(k, j) += t(k, l) * lambda;
    };

    std::size_t i = 0;
    for (; i < n; ++i) {
        std::size_t piv = n;
        for (std::size_t j = i; j < n; ++j)
            if (tr::is_invertible(m(j, j))) {
                piv = j;
                break;
            }
        if (piv == n) {
            bool any_nonzero = false;
            bool fixed = false;
            const auto lambdas = tr::basis_like(g(0, 0));
            for (std::size_t j = i; j < n && !fixed; ++j)
                for (std::size_t l = i; l < n && !fixed; ++l) {
                    if (l == j || tr::is_zero(m(j, l))) continue;
                    any_nonzero = true;
                    for (const auto& base : lambdas) {
                        T lambda = tr::scale(Rational(1, 2), base);
                        T v = m(j, j) + m(j, l) * lambda + tr::conj(lambda) * m(l, j) +
                              tr::conj(lambda) * m(l, l) * lambda;
                        if (tr::is_invertible(v)) {
                            add_multiple(j, l, lambda);
                            piv = j;
                            fixed = true;
                            break;
                        }
                    }
                }
            if (!fixed) {
                for (std::size_t j = i; j < n; ++j)
                    if (!tr::is_zero(m(j, j))) any_nonzero = true;
                if (any_nonzero) throw NonInvertiblePivot();
                break;  // remaining block is zero
            }
        }
        swap_index(i, piv);
        const T pinv = tr::inverse(m(i, i));
        for (std::size_t r = i + 1; r < n; ++r) {
            if (tr::is_zero(m(i, r))) continue;
            const T f = pinv * m(i, r);
            const T fc = tr::conj(f);
            for (std::size_t k = 0; k < n; ++k)
                if (!tr::is_zero(m(k, i))) tr::add_mul(m(k, r), m(k, i), f, true);
            for (std::size_t k = 0; k < n; ++k)
                if (!tr::is_zero(m(i, k))) tr::add_mul(m(r, k), fc, m(i, k), true);
            if (track_transform)
                for (std::size_t k = 0; k < n; ++k)
                    if (!tr::is_zero(t(k, i))) tr::add_mul(t(k, r), t(k, i), f, true);
        }
        out.diagonal.push_back(m(i, i));
    }
    out.radical = n - out.diagonal.size();
    if (track_transform) out.transform = std::move(t);
    return out;
}

}  // namespace hermsig
