#pragma once

#include "hermsig/rational.hpp"

#include <array>

namespace hermsig {

/// Writes a nonnegative integer as a sum of four squares by descending search
/// on the two largest terms; the last two come from a two-square scan.
inline std::array<Integer, 4> four_squares(const Integer& n)
{
    if (n < 0) throw Error("four_squares: negative input");
    auto two_squares = [](const Integer& m, Integer& c, Integer& d) {
        for (Integer x = isqrt(m); 2 * x * x >= m; --x) {
            Integer rest = m - x * x;
            if (is_perfect_square(rest)) {
                c = x;
                d = isqrt(rest);
                return true;
            }
        }
        return m == 0 ? (c = 0, d = 0, true) : false;
    };
    for (Integer a = isqrt(n); a >= 0; --a) {
        Integer r1 = n - a * a;
        for (Integer b = isqrt(r1); b >= 0; --b) {
            Integer c, d;
            if (two_squares(r1 - b * b, c, d)) return {a, b, c, d};
        }
    }
    throw Error("four_squares: search exhausted");  // unreachable by Lagrange
}

/// Rational r > 0 as c1^2 + c2^2 + c3^2 + c4^2: write r = (p q) / q^2 and
/// decompose the integer p q.
inline std::array<Rational, 4> four_square_decomposition(const Rational& r)
{
    if (r <= 0) throw Error("four_square_decomposition: input must be positive");
    Rational c = r;
    c.canonicalize();
    const Integer p = c.get_num(), q = c.get_den();
    auto s = four_squares(p * q);
    std::array<Rational, 4> out;
    for (int i = 0; i < 4; ++i) out[i] = make_rational(s[i], q);
    return out;
}

}  // namespace hermsig
