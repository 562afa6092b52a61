#include "support.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <set>

using namespace hermsig;
using namespace testing_support;

namespace {

AlgebraPtr hamilton(const FieldPtr& f, int n = 1) { return Algebra::quat_symp(el(f, -1), el(f, -1), n); }

FieldPtr three_orderings() { return NumberField::create(Polynomial({1, -3, 0, 1})); }

std::vector<AlgebraPtr> catalogue(const FieldPtr& f, int n)
{
    if (f->degree() == 1)
        return {Algebra::split_orth(f, n), Algebra::unitary(el(f, -1), n), hamilton(f, n),
                Algebra::quat_skew(el(f, 1), el(f, 3), n)};
    const auto x = FieldElement::generator(f);
    return {Algebra::split_orth(f, n), Algebra::unitary(el(f, -1), n), Algebra::quat_symp(el(f, -1), x, n),
            Algebra::quat_skew(el(f, -1), x, n)};
}

HermitianForm scalar_form(const AlgebraPtr& a, const FieldElement& c)
{
    return HermitianForm::diagonal(a, {a->diag_scalar(a->scalar(c))});
}

/// Topology on {0..n-1} generated by a family of sets: close under finite
/// intersections, then under unions.
std::set<ConeSet> generated_topology(std::size_t n, const std::vector<ConeSet>& family)
{
    const ConeSet all = n == 64 ? ~ConeSet(0) : (ConeSet(1) << n) - 1;
    std::set<ConeSet> basis{all};
    for (const ConeSet s : family) {
        std::set<ConeSet> next = basis;
        for (const ConeSet b : basis) next.insert(b & s);
        basis = std::move(next);
    }
    std::set<ConeSet> top{0};
    for (const ConeSet b : basis) {
        std::set<ConeSet> next = top;
        for (const ConeSet t : top) next.insert(t | b);
        top = std::move(next);
    }
    return top;
}

}  // namespace

TEST(IdealMembership, DocumentedValues)
{
    const auto q = rationals();
    const auto h = hamilton(q);
    const auto eta = reference_form(h);
    const auto& p = q->orderings()[0];
    const auto sk = PrimeIdealPair::signature_kernel(eta, p);
    EXPECT_EQ(ideal_membership(qf(q, {1, -1}), hf(h, {3, -5}), sk), std::make_pair(true, true));
    EXPECT_EQ(ideal_membership(qf(q, {1}), hf(h, {1}), sk), std::make_pair(false, false));

    const auto mod3 = PrimeIdealPair::mod_p_kernel(eta, p, 3);
    EXPECT_TRUE(ideal_membership(qf(q, {1, 1, 1}), hf(h, {1}), mod3).first);
    EXPECT_FALSE(ideal_membership(qf(q, {1, 1}), hf(h, {1}), mod3).first);
    EXPECT_TRUE(ideal_membership(qf(q, {1}), hf(h, {1, 1, 1}), mod3).second);

    EXPECT_THROW(PrimeIdealPair::mod_p_kernel(eta, p, 2), Error);
    EXPECT_THROW(PrimeIdealPair::mod_p_kernel(eta, p, 9), Error);
    EXPECT_NO_THROW(PrimeIdealPair::mod_p_kernel(eta, p, 7));
}

TEST(IdealMembership, NonNilOrderingRequired)
{
    const auto f = quadratic_field(2);
    const auto a = Algebra::quat_symp(el(f, -1), FieldElement::generator(f), 1);
    const auto eta = reference_form(a);
    EXPECT_THROW(PrimeIdealPair::signature_kernel(eta, ordering_where_generator(f, 1)), Error);
    EXPECT_NO_THROW(PrimeIdealPair::signature_kernel(eta, ordering_where_generator(f, -1)));
}

TEST(IdealMembership, FundamentalKindUsesRankParity)
{
    const auto q = rationals();
    const auto h = hamilton(q);
    const auto eta = reference_form(h);
    const auto pair = PrimeIdealPair::fundamental(eta, WittSubmodule{{hf(h, {1, 1})}, true});
    EXPECT_EQ(ideal_membership(qf(q, {1, 2}), hf(h, {1, 1}), pair), std::make_pair(true, true));
    EXPECT_EQ(ideal_membership(qf(q, {1}), hf(h, {1}), pair), std::make_pair(false, false));
    EXPECT_THROW(PrimeIdealPair::fundamental(eta, WittSubmodule{{hf(h, {1})}, true}), Error);
}

TEST(IdealMembership, SignatureKernelMatchesDiagonalCount)
{
    // Over M_1(Q) a diagonal form's signature is the number of positive
    // entries minus the number of negative ones.
    const auto q = rationals();
    const auto a = Algebra::split_orth(q, 1);
    const auto eta = reference_form(a);
    const auto& p = q->orderings()[0];
    const auto sk = PrimeIdealPair::signature_kernel(eta, p);
    const auto m5 = PrimeIdealPair::mod_p_kernel(eta, p, 5);
    Rng rng(3);
    for (int t = 0; t < 60; ++t) {
        const long r = rng.integer(0, 7);
        std::vector<AlgebraElement> es;
        int count = 0;
        for (long i = 0; i < r; ++i) {
            const long v = rng.coin() ? rng.integer(1, 9) : -rng.integer(1, 9);
            count += v > 0 ? 1 : -1;
            es.push_back(a->diag_scalar(a->scalar(v)));
        }
        const HermitianForm h = HermitianForm::diagonal(a, es);
        EXPECT_EQ(ideal_membership(QuadraticForm(q), h, sk).second, count == 0);
        EXPECT_EQ(ideal_membership(QuadraticForm(q), h, m5).second, count % 5 == 0);
    }
}

TEST(PrimeProperty, KernelPairsPassOnCatalogue)
{
    for (const auto& f : {rationals(), quadratic_field(2)}) {
        Rng rng(41);
        for (const auto& a : catalogue(f, 1)) {
            const auto eta = reference_form(a);
            for (const auto& p : a->tilde_orderings()) {
                const auto r = prime_property_sample(PrimeIdealPair::signature_kernel(eta, p), 30, rng);
                EXPECT_TRUE(r.pass) << a->to_string();
                EXPECT_EQ(r.trials, 30u);
                for (long prime : {3L, 5L})
                    EXPECT_TRUE(prime_property_sample(PrimeIdealPair::mod_p_kernel(eta, p, prime), 30, rng).pass)
                        << a->to_string() << " mod " << prime;
            }
        }
    }
}

TEST(PrimeProperty, FundamentalPairPasses)
{
    const auto q = rationals();
    const auto h = hamilton(q);
    const auto eta = reference_form(h);
    Rng rng(8);
    EXPECT_TRUE(prime_property_sample(PrimeIdealPair::fundamental(eta, WittSubmodule{{}, true}), 60, rng).pass);
}

TEST(PrimeProperty, SubmoduleWithoutClosureIsCaught)
{
    // N = {0, [<1,1,1,1>]} lacks I(F) W: <1,1> is in I(F) but <1,1> <1> is not in N.
    const auto q = rationals();
    const auto h = hamilton(q);
    const auto eta = reference_form(h);
    const auto pair = PrimeIdealPair::fundamental(eta, WittSubmodule{{hf(h, {1, 1, 1, 1})}, false});
    EXPECT_FALSE(ideal_membership(qf(q, {1, 1}), scale_by_quadratic(qf(q, {1, 1}), hf(h, {1})), pair).second);
    Rng rng(5);
    const auto r = prime_property_sample(pair, 200, rng);
    ASSERT_FALSE(r.pass);
    ASSERT_TRUE(r.counterexample.has_value());
    const auto& c = *r.counterexample;
    const auto [q_in, h_in] = ideal_membership(c.q, c.h, pair);
    const bool qh_in = ideal_membership(c.q, scale_by_quadratic(c.q, c.h), pair).second;
    EXPECT_TRUE((q_in && !qh_in) || (qh_in && !q_in && !h_in));
}

TEST(MorphismDistinctness, DocumentedValues)
{
    const auto f = quadratic_field(2);
    const auto a = hamilton(f);
    const auto eta = reference_form(a);
    const auto p1 = f->orderings()[0], p2 = f->orderings()[1];
    const auto root = scalar_form(a, FieldElement::generator(f));
    EXPECT_EQ(std::abs(signature(root, p1, eta)), 1);
    EXPECT_EQ(signature(root, p1, eta), -signature(root, p2, eta));

    const auto sep = morphism_distinctness(p1, p2, eta);
    EXPECT_FALSE(sep.equivalent);
    ASSERT_TRUE(sep.witness.has_value());
    EXPECT_NE(signature(*sep.witness, p1, eta), signature(*sep.witness, p2, eta));
    EXPECT_EQ(sep.at_p, signature(*sep.witness, p1, eta));
    EXPECT_TRUE(morphism_distinctness(p1, p1, eta).equivalent);
}

TEST(MorphismDistinctness, NilOrderingGivesTrivialMorphism)
{
    const auto f = quadratic_field(2);
    const auto a = Algebra::quat_symp(el(f, -1), FieldElement::generator(f), 1);
    const auto eta = reference_form(a);
    const auto nil = ordering_where_generator(f, 1), other = ordering_where_generator(f, -1);
    const auto m = morphism_pair(nil, eta);
    EXPECT_TRUE(m.trivial);
    EXPECT_FALSE(morphism_pair(other, eta).trivial);
    Rng rng(2);
    const auto basis = sym_basis(*a);
    for (int t = 0; t < 30; ++t) EXPECT_EQ(m.on_hermitian(rng.form(a, basis, 3, 3)), 0);
    const auto sep = morphism_distinctness(nil, other, eta);
    EXPECT_TRUE(sep.trivial_p);
    EXPECT_FALSE(sep.trivial_q);
    ASSERT_TRUE(sep.witness.has_value());
    EXPECT_EQ(sep.at_p, 0);
    EXPECT_NE(sep.at_q, 0);
}

TEST(MorphismDistinctness, EveryPairOfDistinctOrderingsSeparates)
{
    for (const auto& f : {quadratic_field(2), quadratic_field(3), three_orderings()})
        for (const auto& a : catalogue(f, 1)) {
            const auto eta = reference_form(a);
            const auto& os = f->orderings();
            for (std::size_t i = 0; i < os.size(); ++i)
                for (std::size_t j = 0; j < os.size(); ++j) {
                    const auto sep = morphism_distinctness(os[i], os[j], eta);
                    EXPECT_EQ(sep.equivalent, i == j);
                    if (i == j) continue;
                    if (sep.witness) {
                        EXPECT_NE(signature(*sep.witness, os[i], eta), signature(*sep.witness, os[j], eta));
                    } else {
                        ASSERT_TRUE(sep.q_witness.has_value());
                        EXPECT_TRUE(a->is_nil(os[i]) && a->is_nil(os[j]));
                        EXPECT_NE(signature_q(*sep.q_witness, os[i]), signature_q(*sep.q_witness, os[j]));
                    }
                }
        }
}

TEST(ConeSpace, SingleGeneratorSetsNeedNotBeSingletons)
{
    // Over Q(sqrt 2) a nonzero scalar lies in exactly one cone per ordering,
    // so H(a) has two points while H(1, sqrt 2) has one.
    const auto f = quadratic_field(2);
    const auto a = Algebra::split_orth(f, 1);
    const ConeSpace s(a, reference_form(a));
    ASSERT_EQ(s.size(), 4u);
    const auto root = a->diag_scalar(a->scalar(FieldElement::generator(f)));
    EXPECT_EQ(std::popcount(s.basic_open({root})), 2);
    EXPECT_EQ(std::popcount(s.basic_open({a->one(), root})), 1);
    for (const ConeSet h : s.subbasis()) EXPECT_NE(std::popcount(h), 1);
}

TEST(ConeSpace, DocumentedValues)
{
    const auto q = rationals();
    const auto a = hamilton(q);
    const ConeSpace s(a, reference_form(a));
    ASSERT_EQ(s.size(), 2u);
    EXPECT_EQ(s.ids(s.basic_open({a->one()})), std::vector<std::string>{"P1+"});
    EXPECT_EQ(s.basic_open({}), s.all());
    EXPECT_EQ(s.basic_open({a->one(), -a->one()}), ConeSet(0));
    EXPECT_THROW(s.basic_open({a->diag_scalar(a->unit(1))}), Error);
}

TEST(ConeSpace, SizeIsTwiceNonNilOrderings)
{
    for (const auto& f : {rationals(), quadratic_field(2), three_orderings()})
        for (int n : {1, 2})
            for (const auto& a : catalogue(f, n)) {
                const ConeSpace s(a, reference_form(a));
                EXPECT_EQ(s.size(), 2 * a->tilde_orderings().size()) << a->to_string();
            }
}

TEST(ConeSpace, TopologiesAgreeAgainstBruteForceClosure)
{
    for (const auto& f : {rationals(), quadratic_field(2), three_orderings()})
        for (const auto& a : catalogue(f, 1)) {
            const ConeSpace s(a, reference_form(a));
            std::vector<ConeSet> inv;
            for (std::size_t g = 0; g < s.subbasis().size(); ++g)
                if (s.invertible()[g]) inv.push_back(s.subbasis()[g]);
            const auto full = generated_topology(s.size(), s.subbasis());
            const auto restricted = generated_topology(s.size(), inv);
            EXPECT_EQ(full, restricted) << a->to_string();
            EXPECT_TRUE(topology_compare(s)) << a->to_string();
            for (ConeSet u = 0; u <= s.all(); ++u)
                EXPECT_EQ(ConeSpace::is_open(u, s.minimal_neighborhoods()), full.count(u) == 1);
            EXPECT_TRUE(is_t0(s)) << a->to_string();
        }
}

TEST(ConeSpace, BasicOpensAreUnionsOfRealizedSingletons)
{
    for (const auto& f : {rationals(), quadratic_field(2)}) {
        Rng rng(14);
        for (const auto& a : catalogue(f, 1)) {
            const ConeSpace s(a, reference_form(a));
            const auto basis = sym_basis(*a);
            std::vector<std::vector<AlgebraElement>> tuples{{}};
            for (int t = 0; t < 20; ++t) {
                std::vector<AlgebraElement> tuple;
                const long k = rng.integer(1, 3);
                for (long i = 0; i < k; ++i) tuple.push_back(rng.symmetric(*a, basis, 2));
                tuples.push_back(std::move(tuple));
            }
            EXPECT_TRUE(subbasis_adequate(s, tuples)) << a->to_string();
            EXPECT_TRUE(is_discrete(s)) << a->to_string();
            for (std::size_t i = 0; i < s.size(); ++i) {
                ConeSet point = s.all();
                for (const ConeSet h : s.subbasis())
                    if (h >> i & 1) point &= h;
                EXPECT_EQ(point, ConeSet(1) << i);
            }
        }
    }
}

TEST(MoritaConeMaps, DocumentedValues)
{
    const auto q = rationals();
    Rng rng(4);
    const auto a1 = hamilton(q, 1);
    const auto id = morita_cone_maps(a1, reference_form(a1), rng);
    EXPECT_EQ(id.match, (std::vector<std::size_t>{0, 1}));
    EXPECT_TRUE(id.homeomorphism());

    const auto a2 = hamilton(q, 2);
    const auto m = morita_cone_maps(a2, reference_form(a2), rng);
    EXPECT_EQ(m.match.size(), 2u);
    EXPECT_TRUE(m.homeomorphism());
    EXPECT_TRUE(m.orientation_preserved);

    const auto nil = Algebra::quat_symp(el(q, 1), el(q, 1), 2);
    const auto e = morita_cone_maps(nil, reference_form(nil), rng);
    EXPECT_TRUE(e.match.empty());
    EXPECT_TRUE(e.homeomorphism());
}

TEST(MoritaConeMaps, HomeomorphismOnCatalogue)
{
    for (const auto& f : {rationals(), quadratic_field(2)}) {
        Rng rng(21);
        for (const auto& a : catalogue(f, 2)) {
            const auto m = morita_cone_maps(a, reference_form(a), rng, 5);
            EXPECT_TRUE(m.homeomorphism()) << a->to_string();
            EXPECT_EQ(m.match.size(), 2 * a->tilde_orderings().size());
            std::set<std::size_t> distinct(m.match.begin(), m.match.end());
            EXPECT_EQ(distinct.size(), m.match.size());
        }
    }
}
