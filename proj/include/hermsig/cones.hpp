#pragma once

#include "hermsig/random.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hermsig {

/// Positive cone over a non-nil ordering P with orientation +1 or -1,
/// relative to a reference form: the +1 cone holds the elements whose
/// rank-one signature is maximal for sign^eta_P.
struct PositiveCone {
    AlgebraPtr algebra;
    Ordering ordering;
    int orientation = 1;
    int eta_sign = 1;

    std::string id() const { return ordering.id() + (orientation > 0 ? "+" : "-"); }
    /// Sign applied to raw (unnormalized) rank-one signatures.
    int effective() const { return orientation * eta_sign; }

    friend bool operator==(const PositiveCone& a, const PositiveCone& b)
    {
        return a.ordering == b.ordering && a.orientation == b.orientation;
    }
};

inline PositiveCone make_cone(const AlgebraPtr& alg, const Ordering& p, int orientation, const ReferenceForm& eta)
{
    if (alg->is_nil(p)) throw Error("no positive cone over the nil ordering " + p.id());
    return PositiveCone{alg, p, orientation, eta.sign_at(p)};
}

/// Maximal raw rank-one signature at non-nil orderings: n_P for every family.
inline int max_rank_one_signature(const Algebra& alg) { return alg.n_p(); }

namespace detail {

/// -1, 0 or +1: class of a rank-one form <d> over the coefficient ring
/// (d = conj(d) for eps = +1, d pure for the skew family) at a cone.
inline int entry_class(const AlgebraPtr& alg, const Scalar& d, const PositiveCone& c)
{
    if (alg->epsilon() == 1) return c.effective() * sign_at(d[0], c.ordering);
    const AlgebraPtr a1 = alg->with_degree(1);
    AlgebraElement m(1, 1, d);
    const int raw = raw_signature(rank_one(a1, m), c.ordering);
    return c.effective() * raw / 2;
}

}  // namespace detail

/// Outcome of a membership test; for non-members, a column x with
/// sigma(x)^T a x outside the cone (when the diagonalization supplied one).
struct Membership {
    bool member = true;
    std::vector<Scalar> witness;
    std::optional<Scalar> value;
};

/// Membership via the twisted trace form of <a>: a is in the cone iff that
/// quadratic form is semidefinite with the cone's effective sign at P.
inline bool cone_membership_trace(const AlgebraElement& a, const PositiveCone& c)
{
    const AlgebraPtr& alg = c.algebra;
    if (!is_symmetric(*alg, a)) throw Error("cone membership: element is not symmetric");
    const HermitianForm h = rank_one(alg, a);
    return is_semidefinite(collapsed_trace_form(h, twist_at(*alg, c.ordering)), c.ordering, c.effective());
}

/// Membership by hermitian congruence diagonalization over the coefficient
/// ring; falls back to the trace form when no invertible pivot exists.
inline Membership cone_membership_detail(const AlgebraElement& a, const PositiveCone& c)
{
    const AlgebraPtr& alg = c.algebra;
    if (!is_symmetric(*alg, a)) throw Error("cone membership: element is not symmetric");
    Membership out;
    if (is_zero_matrix(a)) return out;
    Congruence<Scalar> cong;
    try {
        cong = congruence_diagonalize(a, true);
    } catch (const NonInvertiblePivot&) {
        out.member = cone_membership_trace(a, c);
        return out;
    }
    for (std::size_t i = 0; i < cong.diagonal.size(); ++i) {
        const Scalar& d = cong.diagonal[i];
        const int cls = detail::entry_class(alg, d, c);
        const bool ok = alg->epsilon() == 1 ? cls >= 0 : cls > 0;
        if (!ok) {
            out.member = false;
            for (std::size_t r = 0; r < a.rows(); ++r) out.witness.push_back(cong.transform(r, i));
            out.value = d;
            return out;
        }
    }
    return out;
}

inline bool cone_membership(const AlgebraElement& a, const PositiveCone& c)
{
    return cone_membership_detail(a, c).member;
}

/// |signature of <a>| maximal with positive sign; vacuous at nil orderings.
inline bool eta_maximal(const AlgebraElement& a, const Ordering& p, const ReferenceForm& eta)
{
    const AlgebraPtr& alg = eta.eta.algebra();
    if (!is_symmetric(*alg, a)) throw Error("eta_maximal: element is not symmetric");
    if (!is_invertible(*alg, a)) throw Error("eta_maximal: element is not invertible");
    if (alg->is_nil(p)) return true;
    return signature(rank_one(alg, a), p, eta) == max_rank_one_signature(*alg);
}

/// Two cones (orientation +1 then -1) per non-nil ordering.
inline std::vector<PositiveCone> enumerate_positive_cones(const AlgebraPtr& alg, const ReferenceForm& eta)
{
    std::vector<PositiveCone> out;
    for (const auto& p : alg->tilde_orderings()) {
        out.push_back(make_cone(alg, p, 1, eta));
        out.push_back(make_cone(alg, p, -1, eta));
    }
    return out;
}

inline bool formally_real(const Algebra& alg) { return !alg.tilde_orderings().empty(); }

/// <1> for hermitian families; <i^{-1}> with twist i for the skew family,
/// whose trace form is T for the involution Int(i) o conj-transpose.
inline HermitianForm unit_form(const AlgebraPtr& alg)
{
    if (alg->epsilon() == 1) return rank_one(alg, alg->one());
    return rank_one(alg, alg->diag_scalar(alg->unit(1).inverse()));
}

struct PositivitySets {
    std::vector<Ordering> x_sigma;
    std::vector<Ordering> tilde;
    bool ps_prime = false;       // (PS') holds iff X_sigma equals the non-nil orderings
    bool ps_sufficient = false;  // the same equality suffices for (PS)
};

inline PositivitySets positivity_sets(const AlgebraPtr& alg)
{
    PositivitySets out;
    const GramQuadraticForm t = trace_form(unit_form(alg), default_twist(*alg));
    const auto d = diagonalize(t, false);
    for (const auto& p : alg->field()->orderings()) {
        bool psd = true;
        for (const auto& e : d.form.entries())
            if (sign_at(e, p) < 0) psd = false;
        if (psd) out.x_sigma.push_back(p);
    }
    out.tilde = alg->tilde_orderings();
    out.ps_prime = out.x_sigma == out.tilde;
    out.ps_sufficient = out.ps_prime;
    return out;
}

/// A candidate cone given by a membership predicate and a member sampler.
struct CandidateSet {
    std::function<bool(const AlgebraElement&)> contains;
    std::function<AlgebraElement(Rng&)> sample;
};

struct AxiomFailure {
    std::string axiom;
    std::string detail;
};

/// Sampled check of (P1)-(P5) for a candidate over P; lists every axiom that
/// failed with its first counterexample. Empty means pass.
inline std::vector<AxiomFailure> prepositive_axiom_check(const AlgebraPtr& alg, const CandidateSet& s, const Ordering& p,
                                                         Rng& rng, int trials = 40)
{
    std::vector<AxiomFailure> out;
    auto fail = [&](const std::string& ax, const std::string& d) {
        for (const auto& f : out)
            if (f.axiom == ax) return;
        out.push_back({ax, d});
    };
    std::vector<AlgebraElement> members;
    for (int i = 0; i < trials; ++i) {
        AlgebraElement m = s.sample(rng);
        if (s.contains(m)) members.push_back(std::move(m));
    }
    if (members.empty()) {
        fail("P1", "no sampled element lies in the set");
        return out;
    }
    for (int i = 0; i < trials; ++i) {
        const auto& m1 = members[rng.integer(0, members.size() - 1)];
        const auto& m2 = members[rng.integer(0, members.size() - 1)];
        if (!s.contains(m1 + m2)) fail("P2", "sum of two members is not a member");
        const AlgebraElement x = rng.algebra_element(*alg, 3);
        if (!s.contains(adjoint(x) * m1 * x)) fail("P3", "sigma(x) m x is not a member");
    }
    // P4: the weights stabilizing the set are exactly the elements >= 0 at P.
    for (int i = 0; i < trials; ++i) {
        const FieldElement u = rng.nonzero_element(alg->field(), 5);
        bool stable = true;
        for (const auto& m : members) {
            AlgebraElement um = m;
            for (std::size_t r = 0; r < um.rows(); ++r)
                for (std::size_t c = 0; c < um.cols(); ++c) um(r, c) = um(r, c).scaled(u);
            if (!s.contains(um)) {
                stable = false;
                break;
            }
        }
        if (stable != (sign_at(u, p) > 0)) fail("P4", "weight " + u.to_string() + " breaks the stabilizer ordering");
    }
    for (const auto& m : members)
        if (!is_zero_matrix(m) && s.contains(-m)) fail("P5", "a nonzero member has its negative in the set");
    return out;
}

/// Member sampler for a cone: sums of sigma(x) g x for a fixed invertible
/// member g (found by a small search), which makes samples land in the cone.
inline std::function<AlgebraElement(Rng&)> cone_sampler(const PositiveCone& c)
{
    const AlgebraPtr alg = c.algebra;
    const auto basis = sym_basis(*alg);
    std::optional<AlgebraElement> g;
    detail::for_each_small_vector(basis.size(), 2, [&](const std::vector<int>& v) {
        AlgebraElement x = detail::combine(*alg, basis, v);
        if (is_invertible(*alg, x) && cone_membership(x, c)) {
            g = std::move(x);
            return true;
        }
        return false;
    });
    if (!g) throw SearchExhausted("no invertible member found for cone " + c.id());
    return [alg, g = *g](Rng& rng) {
        AlgebraElement sum = alg->zero();
        const long terms = rng.integer(1, 3);
        for (long t = 0; t < terms; ++t) {
            const AlgebraElement x = rng.algebra_element(*alg, 3);
            sum = sum + adjoint(x) * g * x;
        }
        return sum;
    };
}

/// Sylvester-type decomposition n_P^2 x <1> (x) h = <a_1..a_r> perp <b_1..b_s>
/// with t = 1, for forms over the coefficient ring (n = 1).
struct Decomposition {
    int t = 1;
    std::vector<FieldElement> weights;
    std::vector<Scalar> positive;
    std::vector<Scalar> negative;
    int n_p = 1;
    int sign() const
    {
        const int num = static_cast<int>(positive.size()) - static_cast<int>(negative.size());
        if (num % (n_p * t) != 0) throw Error("decomposition counts are not divisible by n_P t");
        return num / (n_p * t);
    }
};

namespace detail {

/// For a pure d with <d> of signature 0 at the cone: 2 x <d> = <p> perp <q>
/// with p and q on opposite sides. Uses v1 = e1 + e2 y, v2 = e2 with
/// y = 2^k y0: at P, <d + conj(y) d y> reads as M + s^2 Y0^T M Y0, which is
/// definite for a suitable rank-one Y0 once s is large, so y0 ranges over
/// small elements (zero divisors first) and s over powers of two.
inline std::pair<Scalar, Scalar> split_isotropic_pair(const AlgebraPtr& a1, const Scalar& d, const PositiveCone& c)
{
    std::vector<Scalar> seeds, others;
    for_each_small_vector(4, 2, [&](const std::vector<int>& v) {
        std::array<FieldElement, 4> co;
        for (int s = 0; s < 4; ++s) co[s] = FieldElement(a1->field(), v[s]);
        Scalar y(a1->ring(), co);
        (y.nrd().is_zero() ? seeds : others).push_back(std::move(y));
        return false;
    });
    seeds.insert(seeds.end(), others.begin(), others.end());
    const Matrix<Scalar> g = Matrix<Scalar>::identity(2, a1->scalar(0), d);
    for (int k = 0; k <= 12; ++k) {
        const FieldElement s(a1->field(), Rational(mpz_class(1) << k));
        for (const auto& y0 : seeds) {
            const Scalar y = y0.scaled(s);
            const Scalar p = d + y.conj() * d * y;
            if (!p.is_invertible()) continue;
            const int cls = entry_class(a1, p, c);
            if (cls == 0) continue;
            Matrix<Scalar> basis = Matrix<Scalar>::identity(2, a1->scalar(0), a1->scalar(1));
            basis(1, 0) = y;
            const auto cong = congruence_diagonalize(adjoint(basis) * g * basis, false);
            if (cong.diagonal.size() != 2) continue;
            const Scalar& q = cong.diagonal[1];
            if (entry_class(a1, q, c) != -cls) continue;
            return cls > 0 ? std::make_pair(p, q) : std::make_pair(q, p);
        }
    }
    throw SearchExhausted("no splitting vector for an isotropic rank-one form");
}

}  // namespace detail

inline Decomposition sylvester_decompose(const HermitianForm& h, const PositiveCone& c)
{
    const AlgebraPtr& alg = h.algebra();
    if (alg->n() != 1) throw Error("decomposition needs a form over the coefficient ring; collapse it first");
    Congruence<Scalar> cong;
    try {
        cong = congruence_diagonalize(h.gram(), false);
    } catch (const NonInvertiblePivot&) {
        throw Error("non-division scope violation: no invertible pivot in the Gram matrix");
    }
    Decomposition out;
    out.weights = {FieldElement(alg->field(), 1)};
    out.n_p = alg->n_p();
    const int copies = out.n_p * out.n_p;
    for (const auto& d : cong.diagonal) {
        const int cls = detail::entry_class(alg, d, c);
        if (cls > 0) {
            out.positive.insert(out.positive.end(), copies, d);
        } else if (cls < 0) {
            out.negative.insert(out.negative.end(), copies, d);
        } else {
            if (alg->epsilon() == 1) throw Error("diagonal entry lies on neither side of the cone");
            const auto [p, q] = detail::split_isotropic_pair(alg, d, c);
            if (detail::entry_class(alg, q, c) != -1) throw Error("complement of a cone element is not opposite");
            out.positive.insert(out.positive.end(), copies / 2, p);
            out.negative.insert(out.negative.end(), copies / 2, q);
        }
    }
    return out;
}

}  // namespace hermsig
