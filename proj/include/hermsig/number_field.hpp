#pragma once

#include "hermsig/polynomial.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace hermsig {

class NumberField;
class FieldElement;
using FieldPtr = std::shared_ptr<const NumberField>;

struct FieldMismatch : Error {
    FieldMismatch() : Error("operands belong to different fields") {}
};

/// An ordering of a number field, realized as an isolating interval (lo, hi)
/// for one real root of the minimal polynomial. Endpoints are dyadic and are
/// never roots. A second, much narrower enclosure is kept for sign
/// evaluation so that callers rarely need to refine further.
class Ordering {
public:
    const NumberField& field() const { return *field_; }
    std::size_t index() const { return index_; }
    const Rational& lo() const { return lo_; }
    const Rational& hi() const { return hi_; }
    Rational midpoint() const { return (lo_ + hi_) / 2; }
    /// Set when the root is rational (always the case over Q itself).
    const std::optional<Rational>& exact_root() const { return exact_; }

    /// Label used in reports, "P1", "P2", ...
    std::string id() const { return "P" + std::to_string(index_ + 1); }

    friend bool operator==(const Ordering& a, const Ordering& b)
    {
        return a.field_ == b.field_ && a.index_ == b.index_;
    }

private:
    friend class NumberField;
    friend int sign_at(const FieldElement& a, const Ordering& p);

    const NumberField* field_ = nullptr;
    std::size_t index_ = 0;
    Rational lo_, hi_;
    Rational fine_lo_, fine_hi_;
    std::optional<Rational> exact_;
};

/// Real number field Q[x]/(m) for a monic squarefree m. Immutable; create
/// through NumberField::create so that elements can share ownership.
class NumberField {
public:
    static FieldPtr create(const Polynomial& min_poly, std::string var = "x");
    static FieldPtr rationals()
    {
        static const FieldPtr q = create(Polynomial({0, 1}));
        return q;
    }

    const Polynomial& min_poly() const { return m_; }
    int degree() const { return m_.degree(); }
    const std::string& var() const { return var_; }
    const SturmChain& sturm() const { return sturm_; }
    const std::vector<Ordering>& orderings() const { return orderings_; }

    /// Two fields are interchangeable when they share the defining polynomial.
    bool same_as(const NumberField& other) const { return this == &other || m_ == other.m_; }

    /// Trace of x^k for k < degree, cached.
    const std::vector<Rational>& power_traces() const { return traces_; }

private:
    NumberField() = default;
    void isolate_roots();

    Polynomial m_;
    std::string var_;
    SturmChain sturm_;
    std::vector<Ordering> orderings_;
    std::vector<Rational> traces_;
};

/// Element of a number field in the power basis of the generator.
class FieldElement {
public:
    FieldElement() = default;
    FieldElement(FieldPtr f, const Rational& r) : f_(std::move(f)), c_(f_->degree())
    {
        c_[0] = r;
    }
    FieldElement(FieldPtr f, long r) : FieldElement(std::move(f), Rational(r)) {}
    /// Arbitrary-length representative, reduced modulo the minimal polynomial.
    FieldElement(FieldPtr f, const Polynomial& rep) : f_(std::move(f)), c_(f_->degree())
    {
        Polynomial r = rep.degree() >= f_->degree() ? rep % f_->min_poly() : rep;
        for (int i = 0; i <= r.degree(); ++i) c_[i] = r.coeff(i);
    }

    static FieldElement generator(const FieldPtr& f)
    {
        return FieldElement(f, Polynomial({0, 1}));
    }

    const FieldPtr& field() const { return f_; }
    const std::vector<Rational>& coeffs() const { return c_; }
    Polynomial as_polynomial() const { return Polynomial(c_); }

    bool is_zero() const
    {
        for (const auto& x : c_)
            if (x != 0) return false;
        return true;
    }
    bool is_rational() const
    {
        for (std::size_t i = 1; i < c_.size(); ++i)
            if (c_[i] != 0) return false;
        return true;
    }
    const Rational& rational_part() const { return c_[0]; }

    FieldElement zero() const { return FieldElement(f_, Rational(0)); }
    FieldElement one() const { return FieldElement(f_, Rational(1)); }

    FieldElement& operator+=(const FieldElement& b)
    {
        check(*this, b);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += b.c_[i];
        return *this;
    }
    FieldElement& operator-=(const FieldElement& b)
    {
        check(*this, b);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= b.c_[i];
        return *this;
    }
    FieldElement& operator*=(const FieldElement& b)
    {
        check(*this, b);
        const std::size_t d = c_.size();
        if (d == 1) {
            c_[0] *= b.c_[0];
            return *this;
        }
        std::vector<Rational> prod(2 * d - 1);
        for (std::size_t i = 0; i < d; ++i) {
            if (c_[i] == 0) continue;
            for (std::size_t j = 0; j < d; ++j)
                if (b.c_[j] != 0) prod[i + j] += c_[i] * b.c_[j];
        }
        const auto& m = f_->min_poly().coeffs();
        for (std::size_t k = 2 * d - 2; k >= d; --k) {
            if (prod[k] == 0) continue;
            const Rational t = prod[k];
            for (std::size_t i = 0; i < d; ++i) prod[k - d + i] -= t * m[i];
        }
        prod.resize(d);
        c_ = std::move(prod);
        return *this;
    }

    /// this += x * y, or this -= x * y, without intermediate elements.
    FieldElement& add_mul(const FieldElement& x, const FieldElement& y, bool subtract = false)
    {
        check(*this, x);
        check(x, y);
        if (c_.size() == 1) {
            if (subtract) c_[0] -= x.c_[0] * y.c_[0];
            else c_[0] += x.c_[0] * y.c_[0];
            return *this;
        }
        return subtract ? *this -= x * y : *this += x * y;
    }
    FieldElement& add_mul(const FieldElement& k, const FieldElement& x, const FieldElement& y, bool subtract = false)
    {
        if (c_.size() == 1) {
            check(*this, k);
            check(x, y);
            if (x.c_[0] == 0 || y.c_[0] == 0) return *this;
            const Rational t = x.c_[0] * y.c_[0];
            if (subtract) c_[0] -= k.c_[0] * t;
            else c_[0] += k.c_[0] * t;
            return *this;
        }
        return add_mul(k, x * y, subtract);
    }

    // By-value left operands let chained temporaries be reused in place.
    friend FieldElement operator+(FieldElement a, const FieldElement& b) { return a += b; }
    friend FieldElement operator-(FieldElement a, const FieldElement& b) { return a -= b; }
    friend FieldElement operator*(FieldElement a, const FieldElement& b) { return a *= b; }
    friend FieldElement operator-(FieldElement a)
    {
        for (auto& x : a.c_) x = -x;
        return a;
    }
    friend FieldElement operator*(const Rational& s, FieldElement a)
    {
        for (auto& x : a.c_) x *= s;
        return a;
    }
    FieldElement inverse() const
    {
        if (is_zero()) throw DivisionByZero();
        if (c_.size() == 1) return FieldElement(f_, Rational(1 / c_[0]));
        auto [g, s, t] = xgcd(as_polynomial(), f_->min_poly());
        if (g.degree() != 0) throw DivisionByZero();
        return FieldElement(f_, s);
    }
    friend FieldElement operator/(const FieldElement& a, const FieldElement& b) { return a * b.inverse(); }


    FieldElement pow(unsigned k) const
    {
        FieldElement r = one(), base = *this;
        while (k) {
            if (k & 1) r *= base;
            base *= base;
            k >>= 1;
        }
        return r;
    }

    friend bool operator==(const FieldElement& a, const FieldElement& b)
    {
        return a.c_ == b.c_ && (a.f_ == b.f_ || (a.f_ && b.f_ && a.f_->same_as(*b.f_)));
    }

    /// Trace down to Q.
    Rational trace() const
    {
        Rational t = 0;
        const auto& tr = f_->power_traces();
        for (std::size_t i = 0; i < c_.size(); ++i) t += c_[i] * tr[i];
        return t;
    }

    std::string to_string() const { return as_polynomial().to_string(f_->var()); }

private:
    static void check(const FieldElement& a, const FieldElement& b)
    {
        if (a.f_ != b.f_ && !a.f_->same_as(*b.f_)) throw FieldMismatch();
    }

    FieldPtr f_;
    std::vector<Rational> c_;
};

/// Evaluates a rational polynomial at a field element.
inline FieldElement poly_eval(const Polynomial& p, const FieldElement& a)
{
    FieldElement acc = a.zero();
    for (int k = p.degree(); k >= 0; --k) acc = acc * a + FieldElement(a.field(), p.coeff(k));
    return acc;
}

/// Sign of a at the ordering P: decided exactly. Zero is detected by the gcd
/// of the representative with the minimal polynomial, never by refinement.
inline int sign_at(const FieldElement& a, const Ordering& p)
{
    if (!a.field()->same_as(p.field())) throw FieldMismatch();
    if (a.is_zero()) return 0;
    if (a.is_rational()) return sign(a.rational_part());
    Polynomial rep = a.as_polynomial();
    if (p.exact_) return sign(rep(*p.exact_));
    const Polynomial& m = p.field().min_poly();
    Polynomial g = gcd(rep, m);
    if (g.degree() >= 1 && SturmChain(g).count_roots(p.fine_lo_, p.fine_hi_) > 0) return 0;
    Rational lo = p.fine_lo_, hi = p.fine_hi_;
    int slo = sign(m(lo));
    while (true) {
        int s = interval_sign(rep, lo, hi);
        if (s != 0) return s;
        Rational mid = (lo + hi) / 2;
        int sm = sign(m(mid));
        if (sm == 0) return sign(rep(mid));
        if (sm == slo) lo = mid;
        else hi = mid;
    }
}

inline FieldPtr NumberField::create(const Polynomial& min_poly, std::string var)
{
    if (min_poly.degree() < 1) throw Error("minimal polynomial must have degree >= 1");
    if (!is_squarefree(min_poly)) throw Error("minimal polynomial " + min_poly.to_string(var) + " is not squarefree");
    auto f = std::shared_ptr<NumberField>(new NumberField());
    f->m_ = min_poly.monic();
    f->var_ = std::move(var);
    f->sturm_ = SturmChain(f->m_);
    f->isolate_roots();
    const int d = f->degree();
    f->traces_.assign(d, Rational(0));
    FieldPtr cf = f;
    // Tr(x^k) is the trace of multiplication by x^k in the power basis.
    FieldElement xk = FieldElement(cf, Rational(1));
    const FieldElement x = FieldElement::generator(cf);
    for (int k = 0; k < d; ++k) {
        Rational t = 0;
        FieldElement col = xk;
        for (int j = 0; j < d; ++j) {
            t += col.coeffs()[j];
            col *= x;
        }
        f->traces_[k] = t;
        xk *= x;
    }
    return cf;
}

inline void NumberField::isolate_roots()
{
    const Rational b = cauchy_bound(m_);
    std::vector<std::pair<Rational, Rational>> found;
    std::vector<std::pair<Rational, Rational>> stack{{-b, b}};
    // Depth-first, left half first, so intervals come out in increasing order.
    while (!stack.empty()) {
        auto [lo, hi] = stack.back();
        stack.pop_back();
        int n = sturm_.count_roots(lo, hi);
        if (n == 0) continue;
        if (n == 1) {
            found.emplace_back(lo, hi);
            continue;
        }
        Rational mid = (lo + hi) / 2;
        while (m_(mid) == 0) mid = (mid + hi) / 2;
        stack.emplace_back(mid, hi);
        stack.emplace_back(lo, mid);
    }
    for (std::size_t i = 0; i < found.size(); ++i) {
        Ordering o;
        o.field_ = this;
        o.index_ = i;
        o.lo_ = found[i].first;
        o.hi_ = found[i].second;
        Rational lo = o.lo_, hi = o.hi_;
        int slo = sign(m_(lo));
        const Rational width = Rational(1, 1ul << 30) * Rational(1, 1ul << 30);
        while (hi - lo > width) {
            Rational mid = (lo + hi) / 2;
            int sm = sign(m_(mid));
            if (sm == 0) {
                o.exact_ = mid;
                lo = (lo + mid) / 2;
                hi = (mid + hi) / 2;
                break;
            }
            if (sm == slo) lo = mid;
            else hi = mid;
        }
        if (m_.degree() == 1) o.exact_ = -m_.coeff(0);
        o.fine_lo_ = lo;
        o.fine_hi_ = hi;
        orderings_.push_back(std::move(o));
    }
}

/// The finite space of orderings X_F, sorted by isolating interval.
inline std::vector<Ordering> enumerate_orderings(const NumberField& f) { return f.orderings(); }

/// Norm down to Q, as the determinant of the multiplication map.
inline Rational norm(const FieldElement& a)
{
    const int d = a.field()->degree();
    if (d == 1) return a.rational_part();
    std::vector<std::vector<Rational>> mat(d, std::vector<Rational>(d));
    FieldElement col = a;
    const FieldElement x = FieldElement::generator(a.field());
    for (int j = 0; j < d; ++j) {
        for (int i = 0; i < d; ++i) mat[i][j] = col.coeffs()[i];
        col *= x;
    }
    Rational det = 1;
    for (int c = 0; c < d; ++c) {
        int piv = -1;
        for (int r = c; r < d; ++r)
            if (mat[r][c] != 0) {
                piv = r;
                break;
            }
        if (piv < 0) return 0;
        if (piv != c) {
            std::swap(mat[piv], mat[c]);
            det = -det;
        }
        det *= mat[c][c];
        for (int r = c + 1; r < d; ++r) {
            if (mat[r][c] == 0) continue;
            Rational f = mat[r][c] / mat[c][c];
            for (int k = c; k < d; ++k) mat[r][k] -= f * mat[c][k];
        }
    }
    return det;
}

/// Decides whether a is a square in its field. Exact for degree <= 2; in
/// higher degree a negative sign at some ordering or a non-square norm
/// proves non-squareness, otherwise the answer is unknown (nullopt).
inline std::optional<bool> is_square(const FieldElement& a)
{
    if (a.is_zero()) return true;
    for (const auto& p : a.field()->orderings())
        if (sign_at(a, p) < 0) return false;
    // N(c^2) = N(c)^2.
    if (!is_rational_square(norm(a))) return false;
    const int d = a.field()->degree();
    if (d == 1) return is_rational_square(a.rational_part());
    if (d == 2) {
        // (p + q x)^2 with x^2 = -m1 x - m0.
        const auto& m = a.field()->min_poly();
        FieldPtr f = a.field();
        auto try_candidate = [&](const Rational& p, const Rational& q) {
            FieldElement c(f, Polynomial({p, q}));
            return c * c == a;
        };
        // Shift to x = y - m1/2 so that y^2 = D.
        Rational shift = m.coeff(1) / 2;
        Rational disc = shift * shift - m.coeff(0);
        // a = A + B y with y = x + shift
        Rational B = a.coeffs()[1];
        Rational A = a.coeffs()[0] - B * shift;
        // (s + t y)^2 = s^2 + t^2 D + 2 s t y
        std::vector<std::pair<Rational, Rational>> st;
        if (B == 0) {
            if (is_rational_square(A)) st.emplace_back(rational_sqrt(A), 0);
            if (is_rational_square(A / disc)) st.emplace_back(0, rational_sqrt(A / disc));
        } else {
            // s = B / (2t): B^2 / (4 t^2) + t^2 D = A  ->  4 D T^2 - 4 A T + B^2 = 0, T = t^2
            Rational qa = 4 * disc, qb = -4 * A, qc = B * B;
            Rational dd = qb * qb - 4 * qa * qc;
            if (is_rational_square(dd)) {
                Rational r = rational_sqrt(dd);
                for (Rational T : {Rational((-qb + r) / (2 * qa)), Rational((-qb - r) / (2 * qa))}) {
                    if (T > 0 && is_rational_square(T)) {
                        Rational t = rational_sqrt(T);
                        st.emplace_back(B / (2 * t), t);
                    }
                }
            }
        }
        for (auto& [s, t] : st)
            if (try_candidate(s + t * shift, t)) return true;
        return false;
    }
    return std::nullopt;
}

}  // namespace hermsig
