#pragma once

#include "hermsig/rational.hpp"

#include <algorithm>
#include <cstddef>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace hermsig {

/// Dense univariate polynomial over the rationals, constant term first.
/// The coefficient vector never carries trailing zeros; the zero polynomial
/// has no coefficients and degree -1.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }
    Polynomial(std::initializer_list<Rational> coeffs) : c_(coeffs) { trim(); }

    static Polynomial constant(const Rational& r) { return Polynomial({r}); }
    static Polynomial monomial(const Rational& r, std::size_t deg)
    {
        std::vector<Rational> c(deg + 1);
        c[deg] = r;
        return Polynomial(std::move(c));
    }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    const std::vector<Rational>& coeffs() const { return c_; }
    Rational coeff(std::size_t i) const { return i < c_.size() ? c_[i] : Rational(0); }
    const Rational& leading() const { return c_.back(); }

    Rational operator()(const Rational& x) const
    {
        Rational acc = 0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
        return acc;
    }

    Polynomial derivative() const
    {
        if (c_.size() <= 1) return {};
        std::vector<Rational> d(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<long>(i);
        return Polynomial(std::move(d));
    }

    Polynomial monic() const
    {
        if (is_zero()) return {};
        Polynomial r = *this;
        Rational lc = leading();
        for (auto& x : r.c_) x /= lc;
        return r;
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b)
    {
        std::vector<Rational> c(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.coeff(i) + b.coeff(i);
        return Polynomial(std::move(c));
    }
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b)
    {
        std::vector<Rational> c(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.coeff(i) - b.coeff(i);
        return Polynomial(std::move(c));
    }
    friend Polynomial operator-(const Polynomial& a)
    {
        Polynomial r = a;
        for (auto& x : r.c_) x = -x;
        return r;
    }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b)
    {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<Rational> c(a.c_.size() + b.c_.size() - 1);
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            if (a.c_[i] == 0) continue;
            for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
        }
        return Polynomial(std::move(c));
    }
    friend Polynomial operator*(const Rational& s, const Polynomial& a)
    {
        if (s == 0) return {};
        Polynomial r = a;
        for (auto& x : r.c_) x *= s;
        return r;
    }
    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.c_ == b.c_; }

    /// Euclidean division; returns (quotient, remainder).
    friend std::pair<Polynomial, Polynomial> divmod(const Polynomial& a, const Polynomial& b)
    {
        if (b.is_zero()) throw DivisionByZero();
        if (a.degree() < b.degree()) return {{}, a};
        std::vector<Rational> r = a.c_;
        std::vector<Rational> q(a.c_.size() - b.c_.size() + 1);
        const Rational& lb = b.leading();
        for (int k = a.degree() - b.degree(); k >= 0; --k) {
            Rational f = r[k + b.degree()] / lb;
            q[k] = f;
            if (f == 0) continue;
            for (int j = 0; j <= b.degree(); ++j) r[k + j] -= f * b.c_[j];
        }
        return {Polynomial(std::move(q)), Polynomial(std::move(r))};
    }
    friend Polynomial operator%(const Polynomial& a, const Polynomial& b) { return divmod(a, b).second; }

    std::string to_string(const std::string& var = "x") const;

private:
    void trim()
    {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }

    std::vector<Rational> c_;
};

/// Monic greatest common divisor (zero if both arguments are zero).
inline Polynomial gcd(Polynomial a, Polynomial b)
{
    while (!b.is_zero()) {
        Polynomial r = a % b;
        a = std::move(b);
        b = std::move(r);
    }
    return a.monic();
}

/// Extended gcd: returns (g, s, t) with s*a + t*b = g and g monic.
inline std::tuple<Polynomial, Polynomial, Polynomial> xgcd(const Polynomial& a, const Polynomial& b)
{
    Polynomial r0 = a, r1 = b;
    Polynomial s0 = Polynomial::constant(1), s1;
    Polynomial t0, t1 = Polynomial::constant(1);
    while (!r1.is_zero()) {
        auto [q, r] = divmod(r0, r1);
        r0 = std::move(r1);
        r1 = std::move(r);
        Polynomial s2 = s0 - q * s1;
        s0 = std::move(s1);
        s1 = std::move(s2);
        Polynomial t2 = t0 - q * t1;
        t0 = std::move(t1);
        t1 = std::move(t2);
    }
    if (r0.is_zero()) return {r0, s0, t0};
    Rational inv = 1 / r0.leading();
    return {inv * r0, inv * s0, inv * t0};
}

inline bool is_squarefree(const Polynomial& p)
{
    if (p.degree() <= 0) return true;
    return gcd(p, p.derivative()).degree() == 0;
}

/// Coefficients of p(c + t) as a polynomial in t (Taylor shift).
inline Polynomial taylor_shift(const Polynomial& p, const Rational& c)
{
    std::vector<Rational> a = p.coeffs();
    const int n = static_cast<int>(a.size());
    for (int i = 0; i < n; ++i)
        for (int j = n - 2; j >= i; --j) a[j] += c * a[j + 1];
    return Polynomial(std::move(a));
}

/// Sign of p on the closed interval [lo, hi], or 0 when the Taylor enclosure
/// around the midpoint cannot exclude zero.
inline int interval_sign(const Polynomial& p, const Rational& lo, const Rational& hi)
{
    if (p.is_zero()) return 0;
    Rational mid = (lo + hi) / 2;
    Rational rad = (hi - lo) / 2;
    Polynomial t = taylor_shift(p, mid);
    Rational bound = 0;
    Rational power = rad;
    for (int k = 1; k <= t.degree(); ++k) {
        bound += abs(t.coeff(k)) * power;
        power *= rad;
    }
    Rational centre = t.coeff(0);
    if (abs(centre) > bound) return sign(centre);
    return 0;
}

inline std::string Polynomial::to_string(const std::string& var) const
{
    if (is_zero()) return "0";
    std::string out;
    for (int k = degree(); k >= 0; --k) {
        const Rational& a = c_[k];
        if (a == 0) continue;
        Rational mag = abs(a);
        if (out.empty()) {
            if (a < 0) out += "-";
        } else {
            out += a < 0 ? " - " : " + ";
        }
        bool unit = mag == 1 && k > 0;
        if (!unit) out += hermsig::to_string(mag);
        if (k > 0) {
            if (!unit) out += "*";
            out += var;
            if (k > 1) out += "^" + std::to_string(k);
        }
    }
    return out;
}

/// Sturm chain p, p', -rem(p, p'), ... of a squarefree polynomial.
class SturmChain {
public:
    SturmChain() = default;
    explicit SturmChain(const Polynomial& p)
    {
        if (p.is_zero()) return;
        chain_.push_back(p);
        Polynomial d = p.derivative();
        if (d.is_zero()) return;
        chain_.push_back(d);
        while (true) {
            Polynomial r = -(chain_[chain_.size() - 2] % chain_.back());
            if (r.is_zero()) break;
            chain_.push_back(std::move(r));
        }
    }

    int variations(const Rational& x) const
    {
        int count = 0;
        int last = 0;
        for (const auto& q : chain_) {
            int s = sign(q(x));
            if (s == 0) continue;
            if (last != 0 && s != last) ++count;
            last = s;
        }
        return count;
    }

    /// Number of distinct roots in (lo, hi]; exact when p(lo) != 0.
    int count_roots(const Rational& lo, const Rational& hi) const
    {
        return variations(lo) - variations(hi);
    }

    const std::vector<Polynomial>& polys() const { return chain_; }

private:
    std::vector<Polynomial> chain_;
};

/// Power of two strictly larger than every root modulus (Cauchy bound).
inline Rational cauchy_bound(const Polynomial& p)
{
    Rational m = 0;
    for (int i = 0; i < p.degree(); ++i) m = std::max(m, Rational(abs(p.coeff(i) / p.leading())));
    Rational bound = 1 + m;
    Rational b = 1;
    while (b <= bound) b *= 2;
    return b;
}

}  // namespace hermsig
