#pragma once

#include "hermsig/hermitian.hpp"

#include <cstdint>
#include <random>

namespace hermsig {

/// Seeded generator. Draws use plain modulo reduction so that sequences are
/// identical across standard libraries (distributions are not portable).
class Rng {
public:
    explicit Rng(std::uint64_t seed = 1) : g_(seed) {}

    /// Uniform-ish integer in [lo, hi].
    long integer(long lo, long hi)
    {
        const auto span = static_cast<std::uint64_t>(hi - lo + 1);
        return lo + static_cast<long>(g_() % span);
    }
    bool coin() { return g_() & 1; }

    /// Nonzero integer in [-h, h].
    long nonzero(long h)
    {
        long v = integer(-h, h - 1);
        return v >= 0 ? v + 1 : v;
    }

    Rational rational(long h) { return Rational(integer(-h, h), integer(1, h)); }

    FieldElement element(const FieldPtr& f, long h)
    {
        std::vector<Rational> c;
        for (int i = 0; i < f->degree(); ++i) c.push_back(Rational(integer(-h, h)));
        return FieldElement(f, Polynomial(c));
    }
    FieldElement nonzero_element(const FieldPtr& f, long h)
    {
        while (true) {
            FieldElement e = element(f, h);
            if (!e.is_zero()) return e;
        }
    }

    Scalar scalar(const Algebra& alg, long h)
    {
        std::array<FieldElement, 4> c;
        for (int s = 0; s < 4; ++s) c[s] = s < alg.r() ? element(alg.field(), h) : FieldElement(alg.field(), 0);
        return Scalar(alg.ring(), c);
    }

    AlgebraElement algebra_element(const Algebra& alg, long h)
    {
        AlgebraElement x = alg.zero();
        for (int p = 0; p < alg.n(); ++p)
            for (int q = 0; q < alg.n(); ++q) x(p, q) = scalar(alg, h);
        return x;
    }

    /// Random combination of the symmetric basis.
    AlgebraElement symmetric(const Algebra& alg, const std::vector<AlgebraElement>& basis, long h)
    {
        AlgebraElement x = alg.zero();
        for (const auto& b : basis) {
            const FieldElement c = element(alg.field(), h);
            if (c.is_zero()) continue;
            for (int p = 0; p < alg.n(); ++p)
                for (int q = 0; q < alg.n(); ++q) x(p, q) += b(p, q).scaled(c);
        }
        return x;
    }

    AlgebraElement invertible_symmetric(const Algebra& alg, const std::vector<AlgebraElement>& basis, long h)
    {
        while (true) {
            AlgebraElement x = symmetric(alg, basis, h);
            if (is_invertible(alg, x)) return x;
        }
    }

    /// Diagonal form of rank in [1, max_rank] with invertible symmetric entries.
    HermitianForm form(const AlgebraPtr& alg, const std::vector<AlgebraElement>& basis, std::size_t max_rank, long h)
    {
        const std::size_t k = static_cast<std::size_t>(integer(1, static_cast<long>(max_rank)));
        std::vector<AlgebraElement> entries;
        for (std::size_t i = 0; i < k; ++i) entries.push_back(invertible_symmetric(*alg, basis, h));
        return HermitianForm::diagonal(alg, entries);
    }

    QuadraticForm quadratic(const FieldPtr& f, std::size_t max_rank, long h)
    {
        const std::size_t k = static_cast<std::size_t>(integer(1, static_cast<long>(max_rank)));
        std::vector<FieldElement> e;
        for (std::size_t i = 0; i < k; ++i) e.push_back(nonzero_element(f, h));
        return QuadraticForm(f, e);
    }

    std::mt19937_64& engine() { return g_; }

private:
    std::mt19937_64 g_;
};

}  // namespace hermsig
