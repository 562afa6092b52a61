#pragma once

#include "hermsig/sos.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hermsig {

// ---------------------------------------------------------------------------
// Prime ideal pairs (I, N) of the W(F)-module W(A, sigma)
// ---------------------------------------------------------------------------

/// Submodule N of W(A, sigma) given by generators. When closed_under_if is
/// set, N also holds I(F) W(A, sigma); membership is then decided through the
/// rank parity W(A, sigma) -> Z/2, whose kernel contains I(F) W(A, sigma).
/// Without closure, N is read as the listed classes plus the zero class,
/// compared through signature tables and rank parity.
struct WittSubmodule {
    std::vector<HermitianForm> generators;
    bool closed_under_if = true;
};

struct PrimeIdealPair {
    enum class Kind { SignatureKernel, ModPKernel, Fundamental } kind = Kind::SignatureKernel;
    ReferenceForm eta;
    std::optional<Ordering> ordering;
    long p = 0;
    WittSubmodule n;

    static PrimeIdealPair signature_kernel(const ReferenceForm& eta, const Ordering& o)
    {
        PrimeIdealPair r{Kind::SignatureKernel, eta, o, 0, {}};
        r.check();
        return r;
    }
    static PrimeIdealPair mod_p_kernel(const ReferenceForm& eta, const Ordering& o, long p)
    {
        PrimeIdealPair r{Kind::ModPKernel, eta, o, p, {}};
        r.check();
        return r;
    }
    static PrimeIdealPair fundamental(const ReferenceForm& eta, WittSubmodule n)
    {
        PrimeIdealPair r{Kind::Fundamental, eta, std::nullopt, 0, std::move(n)};
        r.check();
        return r;
    }

    const AlgebraPtr& algebra() const { return eta.eta.algebra(); }

    void check() const
    {
        if (kind == Kind::ModPKernel) {
            if (p < 3 || p % 2 == 0) throw Error("ideal pair needs an odd prime, got " + std::to_string(p));
            for (long d = 3; d * d <= p; d += 2)
                if (p % d == 0) throw Error("ideal pair needs an odd prime, got " + std::to_string(p));
        }
        if (kind != Kind::Fundamental) {
            if (!ordering) throw Error("ideal pair needs an ordering");
            if (algebra()->is_nil(*ordering)) throw Error("ideal pair needs a non-nil ordering, got " + ordering->id());
        } else {
            for (const auto& g : n.generators) {
                check_reference(g, eta);
                if (n.closed_under_if && g.rank() % 2 == 1)
                    throw Error("submodule with an odd-rank generator is not proper");
            }
        }
    }

    std::string to_string() const
    {
        switch (kind) {
        case Kind::SignatureKernel: return "ker sign at " + ordering->id();
        case Kind::ModPKernel: return "ker sign mod " + std::to_string(p) + " at " + ordering->id();
        default: return "(I(F), N) with " + std::to_string(n.generators.size()) + " generators";
        }
    }
};

namespace detail {

inline bool zero_mod(long v, long p) { return p == 0 ? v == 0 : v % p == 0; }

inline bool in_submodule(const HermitianForm& h, const PrimeIdealPair& pair)
{
    const WittSubmodule& n = pair.n;
    if (n.closed_under_if) return h.rank() % 2 == 0;
    auto invariants = [&](const HermitianForm& f) {
        std::vector<int> v{static_cast<int>(f.rank() % 2)};
        for (const auto& e : signature_table(f, pair.eta)) v.push_back(e.value);
        return v;
    };
    const auto target = invariants(h);
    if (std::all_of(target.begin(), target.end(), [](int v) { return v == 0; })) return true;
    for (const auto& g : n.generators)
        if (invariants(g) == target) return true;
    return false;
}

}  // namespace detail

/// (q in I, h in N).
inline std::pair<bool, bool> ideal_membership(const QuadraticForm& q, const HermitianForm& h, const PrimeIdealPair& pair)
{
    pair.check();
    check_reference(h, pair.eta);
    if (pair.kind == PrimeIdealPair::Kind::Fundamental)
        return {q.rank() % 2 == 0, detail::in_submodule(h, pair)};
    return {detail::zero_mod(signature_q(q, *pair.ordering), pair.p),
            detail::zero_mod(signature(h, *pair.ordering, pair.eta), pair.p)};
}

struct PrimeViolation {
    enum class Kind { NotPrime, NotSubmodule } kind = Kind::NotPrime;
    QuadraticForm q;
    HermitianForm h;
    std::size_t trial = 0;
};

struct PrimeSampleResult {
    bool pass = true;
    std::size_t trials = 0;
    std::optional<PrimeViolation> counterexample;
};

/// Random (q, h): q in I must force q h in N, and q h in N must force q in I
/// or h in N. Reports the first violation.
inline PrimeSampleResult prime_property_sample(const PrimeIdealPair& pair, std::size_t trials, Rng& rng)
{
    const AlgebraPtr& alg = pair.algebra();
    const auto basis = sym_basis(*alg);
    PrimeSampleResult out;
    for (std::size_t t = 0; t < trials; ++t) {
        const QuadraticForm q = rng.quadratic(alg->field(), 4, 3);
        const HermitianForm h = rng.form(alg, basis, 2, 2);
        const HermitianForm qh = scale_by_quadratic(q, h);
        const auto [q_in, h_in] = ideal_membership(q, h, pair);
        const bool qh_in = ideal_membership(q, qh, pair).second;
        ++out.trials;
        std::optional<PrimeViolation::Kind> bad;
        if (q_in && !qh_in) bad = PrimeViolation::Kind::NotSubmodule;
        else if (qh_in && !q_in && !h_in) bad = PrimeViolation::Kind::NotPrime;
        if (bad) {
            out.pass = false;
            out.counterexample = PrimeViolation{*bad, q, h, t};
            return out;
        }
    }
    return out;
}

namespace detail {

/// Powers 1, theta, .., theta^(d-1) of the field generator, then theta - c
/// for the upper endpoint c of each isolating interval but the last: theta - c
/// is <= 0 at that ordering and > 0 at every later one, so any two orderings
/// differ in sign on one of them.
inline std::vector<FieldElement> separating_scalars(const FieldPtr& f)
{
    const FieldElement theta(f, Polynomial(std::vector<Rational>{0, 1}));
    std::vector<FieldElement> out;
    FieldElement c(f, 1);
    for (int j = 0; j < f->degree(); ++j, c = c * theta) out.push_back(c);
    const auto& os = f->orderings();
    for (std::size_t i = 0; i + 1 < os.size(); ++i) {
        const FieldElement s = theta - FieldElement(f, os[i].hi());
        if (!s.is_zero()) out.push_back(s);
    }
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Signature morphism pairs (sign_P, sign_P^eta)
// ---------------------------------------------------------------------------

struct SignatureMorphismPair {
    Ordering ordering;
    ReferenceForm eta;
    bool trivial = false;  // sign_P^eta vanishes identically iff P is nil

    int on_quadratic(const QuadraticForm& q) const { return signature_q(q, ordering); }
    int on_hermitian(const HermitianForm& h) const { return signature(h, ordering, eta); }
};

inline SignatureMorphismPair morphism_pair(const Ordering& p, const ReferenceForm& eta)
{
    return SignatureMorphismPair{p, eta, eta.eta.algebra()->is_nil(p)};
}

struct Separation {
    bool equivalent = false;
    std::optional<HermitianForm> witness;     // sign at P differs from sign at Q
    std::optional<QuadraticForm> q_witness;  // used when both hermitian parts are trivial
    int at_p = 0, at_q = 0;
    bool trivial_p = false, trivial_q = false;
};

/// Rank-one forms <c s> with s from the symmetric basis combinations and c
/// from the separating scalars, first one separating P from Q.
inline Separation morphism_distinctness(const Ordering& p, const Ordering& q, const ReferenceForm& eta, int bound = 2)
{
    const AlgebraPtr& alg = eta.eta.algebra();
    Separation out;
    out.trivial_p = alg->is_nil(p);
    out.trivial_q = alg->is_nil(q);
    if (p == q) {
        out.equivalent = true;
        return out;
    }
    const FieldPtr& f = alg->field();
    if (out.trivial_p && out.trivial_q) {
        for (const FieldElement& s : detail::separating_scalars(f)) {
            const QuadraticForm w(f, {s});
            if (signature_q(w, p) != signature_q(w, q)) {
                out.q_witness = w;
                out.at_p = signature_q(w, p);
                out.at_q = signature_q(w, q);
                return out;
            }
        }
        throw SearchExhausted("no separating quadratic form within bound");
    }
    const auto basis = sym_basis(*alg);
    const std::vector<FieldElement> scalars = detail::separating_scalars(f);
    detail::for_each_small_vector(basis.size(), bound, [&](const std::vector<int>& v) {
        const AlgebraElement s = detail::combine(*alg, basis, v);
        for (const auto& k : scalars) {
            const AlgebraElement x = scaled(s, k);
            if (!is_invertible(*alg, x)) continue;
            const HermitianForm h = rank_one(alg, x);
            const int a = signature(h, p, eta), b = signature(h, q, eta);
            if (a != b) {
                out.witness = h;
                out.at_p = a;
                out.at_q = b;
                return true;
            }
        }
        return false;
    });
    if (!out.witness) throw SearchExhausted("no separating form within bound " + std::to_string(bound));
    return out;
}

// ---------------------------------------------------------------------------
// The finite space of positive cones
// ---------------------------------------------------------------------------

using ConeSet = std::uint64_t;

/// Cones of (A, sigma) with the subbasic sets H_sigma(a) of a finite family
/// of symmetric generators, computed once at construction.
class ConeSpace {
public:
    /// Generators: combinations of the symmetric basis with coefficients in
    /// {-bound..bound} (at most `cap` of them), each scaled by the separating
    /// scalars of the field.
    ConeSpace(const AlgebraPtr& alg, const ReferenceForm& eta, int bound = 1, std::size_t cap = 120)
        : alg_(alg), eta_(eta), cones_(enumerate_positive_cones(alg, eta))
    {
        if (cones_.size() > 64) throw Error("cone space too large");
        const auto basis = sym_basis(*alg);
        const FieldPtr& f = alg->field();
        std::vector<AlgebraElement> combos;
        detail::for_each_small_vector(basis.size(), bound, [&](const std::vector<int>& v) {
            combos.push_back(detail::combine(*alg, basis, v));
            return combos.size() >= cap;
        });
        for (const auto& c : detail::separating_scalars(f))
            for (const auto& s : combos) add_generator(scaled(s, c));
    }

    const AlgebraPtr& algebra() const { return alg_; }
    const ReferenceForm& reference() const { return eta_; }
    const std::vector<PositiveCone>& cones() const { return cones_; }
    std::size_t size() const { return cones_.size(); }
    ConeSet all() const { return size() == 64 ? ~ConeSet(0) : (ConeSet(1) << size()) - 1; }

    const std::vector<AlgebraElement>& generators() const { return generators_; }
    const std::vector<ConeSet>& subbasis() const { return subbasis_; }
    const std::vector<bool>& invertible() const { return invertible_; }

    /// H_sigma(a) for a single symmetric a.
    ConeSet h_sigma(const AlgebraElement& a) const
    {
        ConeSet s = 0;
        for (std::size_t i = 0; i < cones_.size(); ++i)
            if (cone_membership(a, cones_[i])) s |= ConeSet(1) << i;
        return s;
    }

    /// H_sigma(a_1..a_k); the whole space for k = 0.
    ConeSet basic_open(const std::vector<AlgebraElement>& as) const
    {
        ConeSet s = all();
        for (const auto& a : as) {
            if (!is_symmetric(*alg_, a)) throw Error("basic open: element is not symmetric");
            s &= h_sigma(a);
        }
        return s;
    }

    std::vector<std::string> ids(ConeSet s) const
    {
        std::vector<std::string> out;
        for (std::size_t i = 0; i < cones_.size(); ++i)
            if (s >> i & 1) out.push_back(cones_[i].id());
        return out;
    }

    /// Smallest open set around each point for the topology generated by the
    /// subbasic sets (restricted to invertible generators if asked).
    std::vector<ConeSet> minimal_neighborhoods(bool invertible_only = false) const
    {
        std::vector<ConeSet> out(size(), all());
        for (std::size_t g = 0; g < subbasis_.size(); ++g) {
            if (invertible_only && !invertible_[g]) continue;
            for (std::size_t i = 0; i < size(); ++i)
                if (subbasis_[g] >> i & 1) out[i] &= subbasis_[g];
        }
        return out;
    }

    static bool is_open(ConeSet s, const std::vector<ConeSet>& mins)
    {
        for (std::size_t i = 0; i < mins.size(); ++i)
            if ((s >> i & 1) && (mins[i] & ~s)) return false;
        return true;
    }

private:
    void add_generator(AlgebraElement a)
    {
        invertible_.push_back(is_invertible(*alg_, a));
        subbasis_.push_back(h_sigma(a));
        generators_.push_back(std::move(a));
    }

    AlgebraPtr alg_;
    ReferenceForm eta_;
    std::vector<PositiveCone> cones_;
    std::vector<AlgebraElement> generators_;
    std::vector<ConeSet> subbasis_;
    std::vector<bool> invertible_;
};

/// The topologies generated by all sampled H_sigma(a) and by those with a
/// invertible coincide; on a finite space, iff the minimal neighborhoods do.
inline bool topology_compare(const ConeSpace& s)
{
    return s.minimal_neighborhoods(false) == s.minimal_neighborhoods(true);
}

/// Distinct points have distinct minimal neighborhoods.
inline bool is_t0(const ConeSpace& s)
{
    const auto mins = s.minimal_neighborhoods();
    for (std::size_t i = 0; i < mins.size(); ++i)
        for (std::size_t j = i + 1; j < mins.size(); ++j)
            if (mins[i] == mins[j]) return false;
    return true;
}

/// The sampled generators suffice: every H_sigma(a_1..a_k) built from the
/// given tuples is open in the topology they generate.
inline bool subbasis_adequate(const ConeSpace& s, const std::vector<std::vector<AlgebraElement>>& tuples)
{
    const auto mins = s.minimal_neighborhoods();
    for (const auto& t : tuples)
        if (!ConeSpace::is_open(s.basic_open(t), mins)) return false;
    return true;
}

/// Every point is itself a basic open set, so every open set is a union of
/// singletons realized by tuples of generators.
inline bool is_discrete(const ConeSpace& s)
{
    const auto mins = s.minimal_neighborhoods();
    for (std::size_t i = 0; i < mins.size(); ++i)
        if (mins[i] != ConeSet(1) << i) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Morita compatibility of cone spaces
// ---------------------------------------------------------------------------

struct MoritaConeMap {
    /// match[i] is the index in the coefficient-ring space of the cone matched
    /// to cone i of the matrix algebra.
    std::vector<std::size_t> match;
    bool bijective = false;
    bool orientation_preserved = false;
    bool round_trip = false;  // PSD_n(Tr_n(C)) = C on sampled members
    bool continuous = false;  // subbasic opens pull back to opens
    bool open = false;        // and push forward to opens
    bool homeomorphism() const { return bijective && round_trip && continuous && open; }
};

namespace detail {

inline Scalar matrix_trace(const AlgebraElement& m)
{
    Scalar t = m(0, 0);
    for (std::size_t i = 1; i < m.rows(); ++i) t += m(i, i);
    return t;
}

/// Membership of M in PSD_n(C): every congruence pivot of M over the
/// coefficient ring lies in the cone C of that ring.
inline bool in_psd_n(const AlgebraElement& m, const PositiveCone& c)
{
    if (is_zero_matrix(m)) return true;
    try {
        const auto cong = congruence_diagonalize(m, false);
        for (const auto& d : cong.diagonal)
            if (!cone_membership(AlgebraElement(1, 1, d), c)) return false;
        return true;
    } catch (const NonInvertiblePivot&) {
        return false;
    }
}

}  // namespace detail

/// Cones of (M_n(D), conj-transpose) against those of (D, conj) with the
/// transported reference form. Both sides share the ordering; the orientation
/// is matched through the trace.
inline MoritaConeMap morita_cone_maps(const AlgebraPtr& alg, const ReferenceForm& eta, Rng& rng, std::size_t samples = 8)
{
    MoritaConeMap out;
    const ConeSpace big(alg, eta);
    if (alg->n() == 1) {
        for (std::size_t i = 0; i < big.size(); ++i) out.match.push_back(i);
        out.bijective = out.orientation_preserved = out.round_trip = out.continuous = out.open = true;
        return out;
    }
    const AlgebraPtr a1 = alg->with_degree(1);
    const ReferenceForm eta1 = morita_collapse(eta);
    const ConeSpace small(a1, eta1);
    if (big.size() != small.size()) return out;
    out.round_trip = true;
    out.orientation_preserved = true;
    std::vector<bool> hit(small.size(), false);
    for (std::size_t i = 0; i < big.size(); ++i) {
        const PositiveCone& c = big.cones()[i];
        const auto sample = cone_sampler(c);
        std::vector<AlgebraElement> members;
        for (std::size_t k = 0; k < samples; ++k) members.push_back(sample(rng));
        std::optional<std::size_t> j;
        for (std::size_t t = 0; t < small.size(); ++t) {
            if (!(small.cones()[t].ordering == c.ordering)) continue;
            bool all = true;
            for (const auto& m : members)
                if (!cone_membership(AlgebraElement(1, 1, detail::matrix_trace(m)), small.cones()[t])) all = false;
            if (all && !is_zero_matrix(members.front())) {
                j = t;
                break;
            }
        }
        if (!j || hit[*j]) return out;
        hit[*j] = true;
        out.match.push_back(*j);
        const PositiveCone& d = small.cones()[*j];
        if (d.orientation != c.orientation) out.orientation_preserved = false;
        for (const auto& m : members)
            if (!detail::in_psd_n(m, d)) out.round_trip = false;
        // Elements of PSD_n(D-cone): sigma(X)^T diag(d_i) X with d_i in the cone.
        const auto small_sample = cone_sampler(d);
        for (std::size_t k = 0; k < samples; ++k) {
            AlgebraElement diag = alg->zero();
            for (int p = 0; p < alg->n(); ++p) diag(p, p) = small_sample(rng)(0, 0);
            const AlgebraElement x = rng.algebra_element(*alg, 2);
            if (!cone_membership(adjoint(x) * diag * x, c)) out.round_trip = false;
        }
    }
    out.bijective = true;
    auto image = [&](ConeSet s, bool forward) {
        ConeSet r = 0;
        for (std::size_t i = 0; i < out.match.size(); ++i) {
            const std::size_t from = forward ? i : out.match[i], to = forward ? out.match[i] : i;
            if (s >> from & 1) r |= ConeSet(1) << to;
        }
        return r;
    };
    const auto big_mins = big.minimal_neighborhoods(), small_mins = small.minimal_neighborhoods();
    out.continuous = std::all_of(small.subbasis().begin(), small.subbasis().end(),
                                 [&](ConeSet u) { return ConeSpace::is_open(image(u, false), big_mins); });
    out.open = std::all_of(big.subbasis().begin(), big.subbasis().end(),
                           [&](ConeSet u) { return ConeSpace::is_open(image(u, true), small_mins); });
    return out;
}

}  // namespace hermsig
