#pragma once

#include "hermsig/matrix.hpp"

#include <array>
#include <memory>
#include <string>
#include <vector>

namespace hermsig {

/// Coefficient ring R of a catalogue algebra M_n(R): F itself (dim 1),
/// K = F(sqrt(delta)) (dim 2, stored as the quaternion-like pair (a = delta)),
/// or the quaternion algebra (a, b)_F (dim 4).
struct ScalarRing {
    FieldPtr field;
    int dim = 1;
    FieldElement a, b;
    FieldElement ab;  // a * b, cached for products

    bool same_as(const ScalarRing& o) const
    {
        return this == &o ||
               (dim == o.dim && field->same_as(*o.field) && (dim < 2 || a == o.a) && (dim < 4 || b == o.b));
    }
};
using RingPtr = std::shared_ptr<const ScalarRing>;

struct RingMismatch : Error {
    RingMismatch() : Error("coefficient ring mismatch") {}
};

/// Element w + x i + y j + z k of R; only the first `dim` coordinates are used.
class Scalar {
public:
    Scalar() = default;
    Scalar(RingPtr r, FieldElement w) : r_(std::move(r))
    {
        const FieldElement z = w.zero();
        c_ = {w, z, z, z};
    }
    Scalar(RingPtr r, std::array<FieldElement, 4> c) : r_(std::move(r)), c_(std::move(c))
    {
        for (int s = r_->dim; s < 4; ++s)
            if (!c_[s].is_zero()) throw Error("coordinate outside the coefficient ring");
    }

    static Scalar basis(const RingPtr& r, int s)
    {
        const FieldElement z(r->field, 0);
        std::array<FieldElement, 4> c{z, z, z, z};
        c[s] = FieldElement(r->field, 1);
        return Scalar(r, c);
    }

    const RingPtr& ring() const { return r_; }
    int dim() const { return r_->dim; }
    const FieldElement& operator[](int s) const { return c_[s]; }
    const std::array<FieldElement, 4>& coords() const { return c_; }

    bool is_zero() const
    {
        for (int s = 0; s < r_->dim; ++s)
            if (!c_[s].is_zero()) return false;
        return true;
    }
    /// True when the element lies in F.
    bool is_central_scalar() const
    {
        for (int s = 1; s < r_->dim; ++s)
            if (!c_[s].is_zero()) return false;
        return true;
    }

    Scalar conj() const
    {
        Scalar r = *this;
        for (int s = 1; s < r_->dim; ++s) r.c_[s] = -r.c_[s];
        return r;
    }
    /// Reduced trace down to F (w for F, 2w otherwise).
    FieldElement trd() const { return r_->dim == 1 ? c_[0] : c_[0] + c_[0]; }
    /// q * conj(q); for dim 1 this is w^2.
    FieldElement nrd() const
    {
        const auto& [w, x, y, z] = c_;
        switch (r_->dim) {
        case 1: return w * w;
        case 2: return w * w - r_->a * x * x;
        default: return w * w - r_->a * x * x - r_->b * y * y + r_->a * r_->b * z * z;
        }
    }
    bool is_invertible() const { return r_->dim == 1 ? !c_[0].is_zero() : !nrd().is_zero(); }
    Scalar inverse() const
    {
        if (r_->dim == 1) return Scalar(r_, c_[0].inverse());
        const FieldElement n = nrd();
        if (n.is_zero()) throw DivisionByZero();
        return conj().scaled(n.inverse());
    }
    Scalar scaled(const FieldElement& f) const
    {
        Scalar r = *this;
        for (int s = 0; s < r_->dim; ++s) r.c_[s] = c_[s] * f;
        return r;
    }

    Scalar& operator+=(const Scalar& q)
    {
        check(*this, q);
        for (int s = 0; s < r_->dim; ++s) c_[s] += q.c_[s];
        return *this;
    }
    Scalar& operator-=(const Scalar& q)
    {
        check(*this, q);
        for (int s = 0; s < r_->dim; ++s) c_[s] -= q.c_[s];
        return *this;
    }
    friend Scalar operator+(Scalar p, const Scalar& q) { return p += q; }
    friend Scalar operator-(Scalar p, const Scalar& q) { return p -= q; }
    friend Scalar operator-(Scalar p)
    {
        for (int s = 0; s < p.r_->dim; ++s) p.c_[s] = -std::move(p.c_[s]);
        return p;
    }
    friend Scalar operator*(const Scalar& p, const Scalar& q)
    {
        check(p, q);
        const auto& [w1, x1, y1, z1] = p.c_;
        const auto& [w2, x2, y2, z2] = q.c_;
        const FieldElement& a = p.r_->a;
        const FieldElement& b = p.r_->b;
        Scalar r;
        r.r_ = p.r_;
        const FieldElement zero(a.field(), 0);
        switch (p.r_->dim) {
        case 1:
            r.c_[0] = w1 * w2;
            for (int s = 1; s < 4; ++s) r.c_[s] = zero;
            break;
        case 2:
            r.c_[0] = w1 * w2;
            r.c_[0].add_mul(a, x1, x2);
            r.c_[1] = w1 * x2;
            r.c_[1].add_mul(x1, w2);
            r.c_[2] = zero;
            r.c_[3] = zero;
            break;
        default: {
            for (auto& c : r.c_) c = zero;
            r.c_[0].add_mul(w1, w2).add_mul(a, x1, x2).add_mul(b, y1, y2).add_mul(p.r_->ab, z1, z2, true);
            r.c_[1].add_mul(w1, x2).add_mul(x1, w2).add_mul(b, y1, z2, true).add_mul(b, z1, y2);
            r.c_[2].add_mul(w1, y2).add_mul(y1, w2).add_mul(a, x1, z2).add_mul(a, z1, x2, true);
            r.c_[3].add_mul(w1, z2).add_mul(z1, w2).add_mul(x1, y2).add_mul(y1, x2, true);
        }
        }
        return r;
    }

    friend bool operator==(const Scalar& p, const Scalar& q)
    {
        if (!p.r_ || !q.r_) return p.r_ == q.r_;
        if (p.r_->dim != q.r_->dim) return false;
        for (int s = 0; s < p.r_->dim; ++s)
            if (!(p.c_[s] == q.c_[s])) return false;
        return true;
    }

    std::string to_string() const
    {
        if (r_->dim == 1) return c_[0].to_string();
        std::string s = "[";
        for (int i = 0; i < r_->dim; ++i) s += (i ? ", " : "") + c_[i].to_string();
        return s + "]";
    }

private:
    static void check(const Scalar& p, const Scalar& q)
    {
        if (p.r_ != q.r_ && !p.r_->same_as(*q.r_)) throw RingMismatch();
    }

    RingPtr r_;
    std::array<FieldElement, 4> c_;
};

/// The quaternion type of the catalogue is the dim-4 case of Scalar.
using Quaternion = Scalar;

template <>
struct scalar_traits<Scalar> {
    static Scalar conj(const Scalar& x) { return x.conj(); }
    static bool is_zero(const Scalar& x) { return x.is_zero(); }
    static bool is_invertible(const Scalar& x) { return x.is_invertible(); }
    static Scalar inverse(const Scalar& x) { return x.inverse(); }
    static Scalar zero_like(const Scalar& x) { return Scalar(x.ring(), FieldElement(x.ring()->field, 0)); }
    static Scalar one_like(const Scalar& x) { return Scalar(x.ring(), FieldElement(x.ring()->field, 1)); }
    static Scalar scale(const Rational& r, const Scalar& x) { return x.scaled(FieldElement(x.ring()->field, r)); }
    static std::vector<Scalar> basis_like(const Scalar& x)
    {
        std::vector<Scalar> out;
        for (int s = 0; s < x.dim(); ++s) out.push_back(Scalar::basis(x.ring(), s));
        return out;
    }
    static void add_mul(Scalar& acc, const Scalar& x, const Scalar& y, bool subtract = false)
    {
        if (subtract) acc -= x * y;
        else acc += x * y;
    }
};

/// n x n matrix over the coefficient ring.
using AlgebraElement = Matrix<Scalar>;

enum class Family { SplitOrth, Unitary, QuatSymp, QuatSkew };
enum class InvolutionType { Orthogonal, Unitary, Symplectic };

inline std::string to_string(Family f)
{
    switch (f) {
    case Family::SplitOrth: return "SplitOrth";
    case Family::Unitary: return "Unitary";
    case Family::QuatSymp: return "QuatSymp";
    default: return "QuatSkew";
    }
}
inline std::string to_string(InvolutionType t)
{
    switch (t) {
    case InvolutionType::Orthogonal: return "orthogonal";
    case InvolutionType::Unitary: return "unitary";
    default: return "symplectic";
    }
}

class Algebra;
using AlgebraPtr = std::shared_ptr<const Algebra>;

struct AlgebraMismatch : Error {
    AlgebraMismatch() : Error("algebra mismatch") {}
};

/// Catalogue algebra with involution. QuatSkew carries skew-hermitian forms
/// over (M_n((a,b)_F), conjugate-transpose), standing for the orthogonal
/// involutions Int(u) o conj after scaling by a pure quaternion u.
class Algebra {
public:
    static AlgebraPtr split_orth(FieldPtr f, int n) { return make(Family::SplitOrth, std::move(f), n, {}, {}); }
    static AlgebraPtr unitary(const FieldElement& delta, int n)
    {
        if (delta.is_zero()) throw Error("unitary: delta must be nonzero");
        auto sq = is_square(delta);
        if (!sq) throw Error("unitary: cannot certify that delta = " + delta.to_string() + " is a nonsquare");
        if (*sq) throw Error("unitary: delta = " + delta.to_string() + " is a square in F");
        return make(Family::Unitary, delta.field(), n, delta, FieldElement(delta.field(), 1));
    }
    static AlgebraPtr quat_symp(const FieldElement& a, const FieldElement& b, int n)
    {
        return make_quat(Family::QuatSymp, a, b, n);
    }
    static AlgebraPtr quat_skew(const FieldElement& a, const FieldElement& b, int n)
    {
        return make_quat(Family::QuatSkew, a, b, n);
    }

    Family family() const { return family_; }
    const FieldPtr& field() const { return ring_->field; }
    const RingPtr& ring() const { return ring_; }
    int n() const { return n_; }
    /// Coefficient ring dimension over F (1, 2 or 4).
    int r() const { return ring_->dim; }
    int dim() const { return n_ * n_ * ring_->dim; }
    const FieldElement& a() const { return ring_->a; }
    const FieldElement& b() const { return ring_->b; }
    const FieldElement& delta() const { return ring_->a; }
    /// +1 for hermitian Gram matrices, -1 for the skew-hermitian family.
    int epsilon() const { return family_ == Family::QuatSkew ? -1 : 1; }
    InvolutionType type() const
    {
        switch (family_) {
        case Family::Unitary: return InvolutionType::Unitary;
        case Family::QuatSymp: return InvolutionType::Symplectic;
        default: return InvolutionType::Orthogonal;
        }
    }

    bool is_nil(const Ordering& p) const
    {
        switch (family_) {
        case Family::SplitOrth: return false;
        case Family::Unitary: return sign_at(ring_->a, p) > 0;
        case Family::QuatSymp: return sign_at(ring_->a, p) > 0 || sign_at(ring_->b, p) > 0;
        default: return sign_at(ring_->a, p) < 0 && sign_at(ring_->b, p) < 0;
        }
    }
    std::vector<Ordering> nil_orderings() const
    {
        std::vector<Ordering> out;
        for (const auto& p : field()->orderings())
            if (is_nil(p)) out.push_back(p);
        return out;
    }
    /// Non-nil orderings.
    std::vector<Ordering> tilde_orderings() const
    {
        std::vector<Ordering> out;
        for (const auto& p : field()->orderings())
            if (!is_nil(p)) out.push_back(p);
        return out;
    }
    /// Matrix size of A tensored with the real closure at a non-nil P.
    int n_p() const { return family_ == Family::QuatSkew ? 2 * n_ : n_; }

    /// Same family and parameters, matrix degree m.
    AlgebraPtr with_degree(int m) const { return make_shared_ring(family_, ring_, m); }

    /// Base change of an algebra over Q to the field L.
    AlgebraPtr over(const FieldPtr& l) const
    {
        if (field()->degree() != 1) throw Error("base change: only algebras over Q can be extended");
        const FieldElement a(l, ring_->a.rational_part()), b(l, ring_->b.rational_part());
        switch (family_) {
        case Family::SplitOrth: return split_orth(l, n_);
        case Family::Unitary: return unitary(a, n_);
        case Family::QuatSymp: return quat_symp(a, b, n_);
        default: return quat_skew(a, b, n_);
        }
    }

    bool same_as(const Algebra& o) const
    {
        return this == &o || (family_ == o.family_ && n_ == o.n_ && ring_->same_as(*o.ring_));
    }

    std::string to_string() const
    {
        std::string s = hermsig::to_string(family_) + "(";
        if (family_ == Family::Unitary) s += ring_->a.to_string() + ", ";
        if (r() == 4) s += ring_->a.to_string() + ", " + ring_->b.to_string() + ", ";
        return s + std::to_string(n_) + ")";
    }

    // Element constructors.
    Scalar scalar(const FieldElement& f) const { return Scalar(ring_, f); }
    Scalar scalar(long v) const { return Scalar(ring_, FieldElement(field(), v)); }
    Scalar unit(int s) const { return Scalar::basis(ring_, s); }
    AlgebraElement zero() const { return AlgebraElement(n_, n_, scalar(0)); }
    AlgebraElement one() const { return AlgebraElement::identity(n_, scalar(0), scalar(1)); }
    AlgebraElement diag_scalar(const Scalar& s) const { return AlgebraElement::identity(n_, scalar(0), s); }

private:
    static AlgebraPtr make(Family fam, FieldPtr f, int n, FieldElement a, FieldElement b)
    {
        auto ring = std::make_shared<ScalarRing>();
        ring->field = f;
        ring->dim = fam == Family::SplitOrth ? 1 : fam == Family::Unitary ? 2 : 4;
        ring->a = a.field() ? a : FieldElement(f, 1);
        ring->b = b.field() ? b : FieldElement(f, 1);
        ring->ab = ring->a * ring->b;
        return make_shared_ring(fam, ring, n);
    }
    static AlgebraPtr make_quat(Family fam, const FieldElement& a, const FieldElement& b, int n)
    {
        if (a.is_zero() || b.is_zero()) throw Error("quaternion parameters must be nonzero");
        if (!a.field()->same_as(*b.field())) throw FieldMismatch();
        return make(fam, a.field(), n, a, b);
    }
    static AlgebraPtr make_shared_ring(Family fam, RingPtr ring, int n)
    {
        if (n < 1) throw Error("matrix degree must be at least 1");
        auto alg = std::shared_ptr<Algebra>(new Algebra());
        alg->family_ = fam;
        alg->ring_ = std::move(ring);
        alg->n_ = n;
        return alg;
    }

    Algebra() = default;
    Family family_ = Family::SplitOrth;
    RingPtr ring_;
    int n_ = 1;
};

namespace detail {

/// Kernel basis of a rational matrix, one vector per free column in order.
inline std::vector<std::vector<Rational>> rational_kernel(std::vector<std::vector<Rational>> rows, std::size_t ncols)
{
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < ncols && r < rows.size(); ++c) {
        std::size_t p = r;
        while (p < rows.size() && rows[p][c] == 0) ++p;
        if (p == rows.size()) continue;
        std::swap(rows[r], rows[p]);
        const Rational inv = 1 / rows[r][c];
        for (auto& v : rows[r]) v *= inv;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == r || rows[i][c] == 0) continue;
            const Rational f = rows[i][c];
            for (std::size_t k = 0; k < ncols; ++k) rows[i][k] -= f * rows[r][k];
        }
        pivots.push_back(c);
        ++r;
    }
    std::vector<std::vector<Rational>> basis;
    std::size_t pi = 0;
    for (std::size_t c = 0; c < ncols; ++c) {
        if (pi < pivots.size() && pivots[pi] == c) {
            ++pi;
            continue;
        }
        std::vector<Rational> v(ncols);
        v[c] = 1;
        for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -rows[i][c];
        basis.push_back(std::move(v));
    }
    return basis;
}

}  // namespace detail

/// F-basis of {x : conj(x)^T = eps x}, obtained as the kernel of
/// x -> conj(x)^T - eps x in the standard basis E_pq * e_s (p, q, s order).
inline std::vector<AlgebraElement> sym_basis(const Algebra& alg)
{
    const int n = alg.n(), r = alg.r(), eps = alg.epsilon();
    const std::size_t nv = static_cast<std::size_t>(n) * n * r;
    auto idx = [&](int p, int q, int s) { return (static_cast<std::size_t>(p) * n + q) * r + s; };
    std::vector<std::vector<Rational>> rows;
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
            for (int s = 0; s < r; ++s) {
                std::vector<Rational> row(nv);
                row[idx(q, p, s)] += s == 0 ? 1 : -1;
                row[idx(p, q, s)] -= eps;
                rows.push_back(std::move(row));
            }
    std::vector<AlgebraElement> out;
    for (const auto& v : detail::rational_kernel(std::move(rows), nv)) {
        AlgebraElement x = alg.zero();
        for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q) {
                std::array<FieldElement, 4> c;
                for (int s = 0; s < 4; ++s) c[s] = FieldElement(alg.field(), s < r ? v[idx(p, q, s)] : Rational(0));
                x(p, q) = Scalar(alg.ring(), c);
            }
        out.push_back(std::move(x));
    }
    return out;
}

/// Symmetry test conj(x)^T = eps x.
inline bool is_symmetric(const Algebra& alg, const Matrix<Scalar>& x)
{
    const Matrix<Scalar> adj = adjoint(x);
    if (alg.epsilon() == 1) return adj == x;
    return adj == -x;
}

/// Image of w + x i + y j + z k in M_2(F) for (1, b)_F:
/// i -> diag(1, -1), j -> [[0, b], [1, 0]].
inline Matrix<FieldElement> split_image(const Scalar& q)
{
    if (q.dim() != 4) throw Error("split isomorphism needs a quaternion coefficient ring");
    if (!(q.ring()->a == FieldElement(q.ring()->field, 1))) throw Error("split isomorphism requires a = 1");
    const FieldElement& b = q.ring()->b;
    const auto& [w, x, y, z] = q.coords();
    Matrix<FieldElement> m(2, 2, w.zero());
    m(0, 0) = w + x;
    m(0, 1) = b * (y + z);
    m(1, 0) = y - z;
    m(1, 1) = w - x;
    return m;
}

/// Blockwise split image of a matrix over (1, b)_F.
inline Matrix<FieldElement> split_isomorphism(const Matrix<Scalar>& g)
{
    if (g.rows() == 0) return {};
    const FieldElement zero(g(0, 0).ring()->field, 0);
    Matrix<FieldElement> out(2 * g.rows(), 2 * g.cols(), zero);
    for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) {
            auto m = split_image(g(i, j));
            for (int u = 0; u < 2; ++u)
                for (int v = 0; v < 2; ++v) out(2 * i + u, 2 * j + v) = m(u, v);
        }
    return out;
}

/// Determinant over a field by elimination.
inline FieldElement determinant(Matrix<FieldElement> m)
{
    const std::size_t n = m.rows();
    if (n == 0) return {};
    FieldElement det = m(0, 0).one();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && m(p, c).is_zero()) ++p;
        if (p == n) return m(0, 0).zero();
        if (p != c) {
            for (std::size_t k = 0; k < n; ++k) std::swap(m(p, k), m(c, k));
            det = -det;
        }
        det *= m(c, c);
        const FieldElement inv = m(c, c).inverse();
        for (std::size_t r = c + 1; r < n; ++r) {
            if (m(r, c).is_zero()) continue;
            const FieldElement f = m(r, c) * inv;
            for (std::size_t k = c; k < n; ++k) m(r, k) -= f * m(c, k);
        }
    }
    return det;
}

/// Matrix of left multiplication by x on A, over F, in the standard basis.
inline Matrix<FieldElement> left_regular(const Algebra& alg, const AlgebraElement& x)
{
    const int n = alg.n(), r = alg.r();
    const std::size_t d = alg.dim();
    Matrix<FieldElement> m(d, d, FieldElement(alg.field(), 0));
    std::size_t col = 0;
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
            for (int s = 0; s < r; ++s, ++col) {
                AlgebraElement e = alg.zero();
                e(p, q) = alg.unit(s);
                const AlgebraElement y = x * e;
                std::size_t row = 0;
                for (int p2 = 0; p2 < n; ++p2)
                    for (int q2 = 0; q2 < n; ++q2)
                        for (int s2 = 0; s2 < r; ++s2, ++row) m(row, col) = y(p2, q2)[s2];
            }
    return m;
}

/// Invertibility in A via the determinant of the left regular representation.
inline bool is_invertible(const Algebra& alg, const AlgebraElement& x)
{
    if (alg.n() == 1) return x(0, 0).is_invertible();
    return !determinant(left_regular(alg, x)).is_zero();
}

}  // namespace hermsig
