#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <string_view>

namespace hermsig {

/// Exact rational scalar. GMP keeps mpq_class values canonical after every
/// arithmetic operation; make_rational() canonicalizes hand-built values.
using Rational = mpq_class;
using Integer = mpz_class;

/// Base class of every error raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DivisionByZero : Error {
    DivisionByZero() : Error("division by zero") {}
};

inline Rational make_rational(const Integer& num, const Integer& den)
{
    if (den == 0) throw DivisionByZero();
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline int sign(const Rational& r) { return sgn(r); }

/// Formats as "p" or "p/q".
inline std::string to_string(const Rational& r)
{
    return r.get_str();
}

/// Parses "p", "p/q", or an exact decimal such as "-1.25". Throws Error on
/// malformed input.
inline Rational parse_rational(std::string_view text)
{
    std::string s(text);
    auto bad = [&] { return Error("malformed rational '" + s + "'"); };
    if (s.empty()) throw bad();
    auto slash = s.find('/');
    auto is_int = [](std::string_view t) {
        if (!t.empty() && (t[0] == '-' || t[0] == '+')) t.remove_prefix(1);
        if (t.empty()) return false;
        for (char c : t)
            if (c < '0' || c > '9') return false;
        return true;
    };
    auto to_int = [](std::string_view t) {
        if (!t.empty() && t[0] == '+') t.remove_prefix(1);
        return Integer(std::string(t));
    };
    if (slash != std::string::npos) {
        auto num = std::string_view(s).substr(0, slash);
        auto den = std::string_view(s).substr(slash + 1);
        if (!is_int(num) || !is_int(den)) throw bad();
        return make_rational(to_int(num), to_int(den));
    }
    auto dot = s.find('.');
    if (dot == std::string::npos) {
        if (!is_int(s)) throw bad();
        return Rational(to_int(s));
    }
    std::string whole = s.substr(0, dot);
    std::string frac = s.substr(dot + 1);
    bool neg = !whole.empty() && whole[0] == '-';
    if (!whole.empty() && (whole[0] == '-' || whole[0] == '+')) whole.erase(0, 1);
    if (whole.empty()) whole = "0";
    if (frac.empty() || !is_int(whole) || !is_int(frac) || frac[0] == '-' || frac[0] == '+')
        throw bad();
    Integer den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
    Rational r = make_rational(Integer(whole) * den + Integer(frac), den);
    return neg ? Rational(-r) : r;
}

/// Floor of the square root of a nonnegative integer.
inline Integer isqrt(const Integer& n)
{
    Integer r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    return r;
}

inline bool is_perfect_square(const Integer& n)
{
    return n >= 0 && mpz_perfect_square_p(n.get_mpz_t()) != 0;
}

inline bool is_rational_square(const Rational& r)
{
    return r >= 0 && is_perfect_square(r.get_num()) && is_perfect_square(r.get_den());
}

inline Rational rational_sqrt(const Rational& r)
{
    return make_rational(isqrt(r.get_num()), isqrt(r.get_den()));
}

}  // namespace hermsig
