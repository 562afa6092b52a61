#pragma once

#include "hermsig/algebra.hpp"
#include "hermsig/quadforms.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hermsig {

/// eps-hermitian form over M_n(R). The k x k Gram matrix over A is stored as
/// the nk x nk matrix over R it reads as blockwise, so Morita collapse and
/// expansion are reinterpretations of the same data.
class HermitianForm {
public:
    HermitianForm(AlgebraPtr alg, Matrix<Scalar> gram) : alg_(std::move(alg)), g_(std::move(gram))
    {
        const std::size_t n = alg_->n();
        if (g_.rows() != g_.cols() || g_.rows() % n != 0)
            throw ShapeMismatch("Gram matrix size must be a multiple of the matrix degree " + std::to_string(n));
        for (std::size_t i = 0; i < g_.rows(); ++i)
            for (std::size_t j = 0; j < g_.cols(); ++j)
                if (!g_(i, j).ring()->same_as(*alg_->ring())) throw RingMismatch();
        const int eps = alg_->epsilon();
        for (std::size_t i = 0; i < g_.rows(); ++i)
            for (std::size_t j = i; j < g_.cols(); ++j) {
                const Scalar c = g_(j, i).conj();
                if (!(eps == 1 ? c == g_(i, j) : c == -g_(i, j)))
                    throw Error(std::string("Gram matrix is not ") + (eps == 1 ? "hermitian" : "skew-hermitian") +
                                " at entry (" + std::to_string(i / n) + ", " + std::to_string(j / n) + ")" +
                                (n > 1 ? " position (" + std::to_string(i % n) + ", " + std::to_string(j % n) + ")"
                                       : std::string()));
            }
    }

    static HermitianForm zero_form(AlgebraPtr alg) { return HermitianForm(std::move(alg), Matrix<Scalar>()); }

    static HermitianForm from_blocks(AlgebraPtr alg, const std::vector<std::vector<AlgebraElement>>& blocks)
    {
        const std::size_t k = blocks.size(), n = alg->n();
        Matrix<Scalar> g(k * n, k * n, alg->scalar(0));
        for (std::size_t i = 0; i < k; ++i) {
            if (blocks[i].size() != k) throw ShapeMismatch("Gram matrix must be square");
            for (std::size_t j = 0; j < k; ++j) {
                const auto& b = blocks[i][j];
                if (b.rows() != n || b.cols() != n) throw ShapeMismatch("Gram entry has the wrong size");
                for (std::size_t p = 0; p < n; ++p)
                    for (std::size_t q = 0; q < n; ++q) g(i * n + p, j * n + q) = b(p, q);
            }
        }
        return HermitianForm(std::move(alg), std::move(g));
    }

    static HermitianForm diagonal(AlgebraPtr alg, const std::vector<AlgebraElement>& entries)
    {
        std::vector<std::vector<AlgebraElement>> blocks(entries.size(), std::vector<AlgebraElement>(entries.size(), alg->zero()));
        for (std::size_t i = 0; i < entries.size(); ++i) blocks[i][i] = entries[i];
        return from_blocks(std::move(alg), blocks);
    }

    /// <c1, ..., ck> with scalar entries placed as c * I_n.
    static HermitianForm diagonal(AlgebraPtr alg, const std::vector<Scalar>& entries)
    {
        std::vector<AlgebraElement> e;
        for (const auto& c : entries) e.push_back(alg->diag_scalar(c));
        return diagonal(std::move(alg), e);
    }

    const AlgebraPtr& algebra() const { return alg_; }
    const Matrix<Scalar>& gram() const { return g_; }
    std::size_t rank() const { return g_.rows() / alg_->n(); }

    AlgebraElement block(std::size_t i, std::size_t j) const
    {
        const std::size_t n = alg_->n();
        AlgebraElement b(n, n, alg_->scalar(0));
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = 0; q < n; ++q) b(p, q) = g_(i * n + p, j * n + q);
        return b;
    }

    friend bool operator==(const HermitianForm& a, const HermitianForm& b)
    {
        return a.alg_->same_as(*b.alg_) && a.g_ == b.g_;
    }

private:
    AlgebraPtr alg_;
    Matrix<Scalar> g_;
};

/// Twist used by default in the trace form: 1, or i for the skew family
/// (Trd vanishes on skew elements, so an untwisted trace form is zero).
inline Scalar default_twist(const Algebra& alg)
{
    return alg.family() == Family::QuatSkew ? alg.unit(1) : alg.scalar(1);
}

/// Twist at P: for the skew family a pure quaternion u with u^2 negative at P
/// (i if a < 0, else j if b < 0, else k), which makes Int(u) o conj positive.
inline Scalar twist_at(const Algebra& alg, const Ordering& p)
{
    if (alg.family() != Family::QuatSkew) return alg.scalar(1);
    if (sign_at(alg.a(), p) < 0) return alg.unit(1);
    if (sign_at(alg.b(), p) < 0) return alg.unit(2);
    return alg.unit(3);
}

/// Trace form of the nk x nk Gram over R, reading it as an F-form on R^{nk}:
/// entry ((i,s), (i',s')) = Trd_R(u conj(e_s) G_{ii'} e_{s'}). The trace form
/// of h on A^k is n orthogonal copies of this one.
inline GramQuadraticForm collapsed_trace_form(const HermitianForm& h, const Scalar& u)
{
    const Algebra& alg = *h.algebra();
    const std::size_t big = h.gram().rows();
    const int r = alg.r();
    // Trd_R(x e_t) = c lambda_t x_t: only the real part of x e_t survives,
    // with lambda = (1, a, b, -ab) and c = 1 over F, 2 otherwise.
    const FieldElement one(alg.field(), 1);
    const std::array<FieldElement, 4> lambda{one, r > 1 ? alg.a() : one, r > 2 ? alg.b() : one,
                                             r > 2 ? -(alg.a() * alg.b()) : one};
    const Rational c = r == 1 ? 1 : 2;
    std::vector<Scalar> basis_conj_u;
    for (int s = 0; s < r; ++s) basis_conj_u.push_back(u * alg.unit(s).conj());
    const FieldElement zero(alg.field(), 0);
    Matrix<FieldElement> m(big * r, big * r, zero);
    for (std::size_t i = 0; i < big; ++i)
        for (std::size_t j = 0; j < big; ++j) {
            const Scalar& g = h.gram()(i, j);
            if (g.is_zero()) continue;
            for (int s = 0; s < r; ++s) {
                const Scalar left = basis_conj_u[s] * g;
                for (int t = 0; t < r; ++t)
                    if (!left[t].is_zero()) m(i * r + s, j * r + t) = c * (lambda[t] * left[t]);
            }
        }
    return GramQuadraticForm(alg.field(), std::move(m));
}

/// T_h(x, y) = Trd_A(u sigma(x)^T G y) on A^k, in the standard basis
/// e_i (x) E_pq (x) e_s, computed from the definition.
inline GramQuadraticForm trace_form(const HermitianForm& h, const Scalar& u)
{
    const Algebra& alg = *h.algebra();
    const std::size_t n = alg.n(), k = h.rank();
    const int r = alg.r();
    struct Vec {
        std::size_t slot;
        AlgebraElement x;
    };
    std::vector<Vec> basis;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = 0; q < n; ++q)
                for (int s = 0; s < r; ++s) {
                    AlgebraElement x = alg.zero();
                    x(p, q) = alg.unit(s);
                    basis.push_back({i, std::move(x)});
                }
    const AlgebraElement ud = alg.diag_scalar(u);
    const FieldElement zero(alg.field(), 0);
    Matrix<FieldElement> m(basis.size(), basis.size(), zero);
    for (std::size_t a = 0; a < basis.size(); ++a) {
        const AlgebraElement left = ud * adjoint(basis[a].x);
        for (std::size_t b = 0; b < basis.size(); ++b) {
            const AlgebraElement prod = left * h.block(basis[a].slot, basis[b].slot) * basis[b].x;
            FieldElement t = zero;
            for (std::size_t d = 0; d < n; ++d) t += prod(d, d).trd();
            m(a, b) = t;
        }
    }
    return GramQuadraticForm(alg.field(), std::move(m));
}

inline GramQuadraticForm trace_form(const HermitianForm& h) { return trace_form(h, default_twist(*h.algebra())); }

namespace detail {

/// Diagonal form congruent to the collapsed trace form. A hermitian
/// congruence G -> S* G S over the coefficient ring induces an F-congruence
/// of the collapsed trace form, so the rank-one pieces <d_i> of a
/// diagonalization can be traced separately; without invertible pivots the
/// whole collapsed form is diagonalized.
inline QuadraticForm diagonal_trace_form(const HermitianForm& h, const Scalar& u)
{
    const AlgebraPtr a1 = h.algebra()->with_degree(1);
    Congruence<Scalar> cong;
    try {
        cong = congruence_diagonalize(h.gram(), false);
    } catch (const NonInvertiblePivot&) {
        return diagonalize(collapsed_trace_form(h, u), false).form;
    }
    std::vector<FieldElement> out;
    for (const auto& d : cong.diagonal) {
        if (d.is_zero()) continue;
        const HermitianForm piece(a1, Matrix<Scalar>(1, 1, d));
        const auto d1 = diagonalize(collapsed_trace_form(piece, u), false);
        for (const auto& e : d1.form.entries()) out.push_back(e);
    }
    return QuadraticForm(h.algebra()->field(), out);
}

}  // namespace detail

/// Signature at P of the trace form on A^k.
inline int trace_signature(const HermitianForm& h, const Ordering& p, const Scalar& u)
{
    return h.algebra()->n() * signature_q(detail::diagonal_trace_form(h, u), p);
}

/// Same value from the full collapsed trace form, without the congruence step.
inline int trace_signature_full(const HermitianForm& h, const Ordering& p, const Scalar& u)
{
    const auto d = diagonalize(collapsed_trace_form(h, u), false);
    return h.algebra()->n() * signature_q(d.form, p);
}

/// s_P(h) = sig(T_h) * n_P / dim_F A, evaluated even at nil orderings.
inline int raw_signature_formula(const HermitianForm& h, const Ordering& p)
{
    const Algebra& alg = *h.algebra();
    const long num = static_cast<long>(trace_signature(h, p, twist_at(alg, p))) * alg.n_p();
    if (num % alg.dim() != 0)
        throw Error("trace-form signature " + std::to_string(num / alg.n_p()) + " is not divisible by dim A / n_P for " +
                    alg.to_string());
    return static_cast<int>(num / alg.dim());
}

inline int raw_signature(const HermitianForm& h, const Ordering& p)
{
    if (h.algebra()->is_nil(p)) return 0;
    return raw_signature_formula(h, p);
}

/// Raw signatures at every ordering of F, diagonalizing once per twist.
inline std::vector<int> raw_signature_table(const HermitianForm& h)
{
    const Algebra& alg = *h.algebra();
    const auto& ords = alg.field()->orderings();
    std::vector<int> out(ords.size(), 0);
    std::map<int, QuadraticForm> by_twist;
    for (std::size_t i = 0; i < ords.size(); ++i) {
        if (alg.is_nil(ords[i])) continue;
        const Scalar u = twist_at(alg, ords[i]);
        int key = 0;
        for (int s = 0; s < 4; ++s)
            if (!u[s].is_zero()) key = s;
        auto it = by_twist.find(key);
        if (it == by_twist.end())
            it = by_twist.emplace(key, detail::diagonal_trace_form(h, u)).first;
        const long num = static_cast<long>(alg.n()) * signature_q(it->second, ords[i]) * alg.n_p();
        if (num % alg.dim() != 0)
            throw Error("trace-form signature is not divisible by dim A / n_P for " + alg.to_string());
        out[i] = static_cast<int>(num / alg.dim());
    }
    return out;
}

/// Hermitian form with s_P nonzero on every non-nil ordering, and its table.
struct ReferenceForm {
    HermitianForm eta;
    SignatureTable certificate;

    /// Sign of s_P(eta); 0 at nil orderings.
    int sign_at(const Ordering& p) const
    {
        for (const auto& e : certificate)
            if (e.ordering == p) return e.value > 0 ? 1 : -1;
        return 0;
    }
};

struct SearchExhausted : Error {
    using Error::Error;
};

namespace detail {

/// Coefficient vectors over {-bound..bound}, ordered by support size, then
/// support positions, then values in the order 1, -1, 2, -2, ...
template <class Visit>
bool for_each_small_vector(std::size_t dim, int bound, Visit&& visit)
{
    std::vector<int> values;
    for (int v = 1; v <= bound; ++v) {
        values.push_back(v);
        values.push_back(-v);
    }
    std::vector<int> coeffs(dim, 0);
    for (std::size_t support = 1; support <= dim; ++support) {
        std::vector<std::size_t> pos(support);
        for (std::size_t i = 0; i < support; ++i) pos[i] = i;
        while (true) {
            std::vector<std::size_t> vi(support, 0);
            while (true) {
                std::fill(coeffs.begin(), coeffs.end(), 0);
                for (std::size_t i = 0; i < support; ++i) coeffs[pos[i]] = values[vi[i]];
                if (visit(coeffs)) return true;
                std::size_t d = support;
                while (d > 0 && ++vi[d - 1] == values.size()) vi[--d] = 0;
                if (d == 0) break;
            }
            std::size_t i = support;
            while (i > 0 && pos[i - 1] == dim - support + i - 1) --i;
            if (i == 0) break;
            ++pos[i - 1];
            for (std::size_t j = i; j < support; ++j) pos[j] = pos[j - 1] + 1;
        }
    }
    return false;
}

inline AlgebraElement combine(const Algebra& alg, const std::vector<AlgebraElement>& basis, const std::vector<int>& c)
{
    AlgebraElement x = alg.zero();
    for (std::size_t i = 0; i < basis.size(); ++i)
        if (c[i] != 0) {
            const FieldElement f(alg.field(), c[i]);
            for (std::size_t p = 0; p < x.rows(); ++p)
                for (std::size_t q = 0; q < x.cols(); ++q) x(p, q) += basis[i](p, q).scaled(f);
        }
    return x;
}

}  // namespace detail

inline HermitianForm rank_one(const AlgebraPtr& alg, const AlgebraElement& a)
{
    return HermitianForm::diagonal(alg, std::vector<AlgebraElement>{a});
}

/// First candidate with nonzero raw signature on every non-nil ordering:
/// <1> for hermitian families, then <s> for s a combination of the
/// symmetric basis with coefficients in {-bound..bound}.
inline ReferenceForm reference_form(const AlgebraPtr& alg, int bound = 2)
{
    const auto tilde = alg->tilde_orderings();
    std::optional<ReferenceForm> found;
    auto accept = [&](const AlgebraElement& s) {
        if (!is_invertible(*alg, s)) return false;
        HermitianForm eta = rank_one(alg, s);
        const auto raw = raw_signature_table(eta);
        SignatureTable cert;
        for (const auto& p : tilde) {
            if (raw[p.index()] == 0) return false;
            cert.push_back({p, raw[p.index()]});
        }
        found = ReferenceForm{std::move(eta), std::move(cert)};
        return true;
    };
    if (alg->epsilon() == 1 && accept(alg->one())) return *found;
    const auto basis = sym_basis(*alg);
    detail::for_each_small_vector(basis.size(), bound, [&](const std::vector<int>& c) {
        return accept(detail::combine(*alg, basis, c));
    });
    if (!found) throw SearchExhausted("no reference form found within bound " + std::to_string(bound));
    return *found;
}

inline void check_reference(const HermitianForm& h, const ReferenceForm& eta)
{
    if (!h.algebra()->same_as(*eta.eta.algebra())) throw Error("reference form belongs to a different algebra");
}

/// sign_P^eta h = sgn(s_P(eta)) s_P(h); 0 at nil orderings.
inline int signature(const HermitianForm& h, const Ordering& p, const ReferenceForm& eta)
{
    check_reference(h, eta);
    const int e = eta.sign_at(p);
    return e == 0 ? 0 : e * raw_signature(h, p);
}

inline SignatureTable signature_table(const HermitianForm& h, const ReferenceForm& eta)
{
    check_reference(h, eta);
    const auto raw = raw_signature_table(h);
    SignatureTable out;
    for (const auto& p : h.algebra()->field()->orderings()) out.push_back({p, eta.sign_at(p) * raw[p.index()]});
    return out;
}

inline bool torsion_test_h(const HermitianForm& h, const ReferenceForm& eta)
{
    return all_zero(signature_table(h, eta));
}

// Witt-level operations.

inline HermitianForm perp(const HermitianForm& a, const HermitianForm& b)
{
    if (!a.algebra()->same_as(*b.algebra())) throw AlgebraMismatch();
    return HermitianForm(a.algebra(), direct_sum(a.gram(), b.gram(), a.algebra()->scalar(0)));
}

inline HermitianForm negate(const HermitianForm& h) { return HermitianForm(h.algebra(), -h.gram()); }

/// q * h = perp over the entries d of q of d h.
inline HermitianForm scale_by_quadratic(const QuadraticForm& q, const HermitianForm& h)
{
    if (!q.field()->same_as(*h.algebra()->field())) throw FieldMismatch();
    HermitianForm out = HermitianForm::zero_form(h.algebra());
    for (const auto& d : q.entries()) {
        Matrix<Scalar> g = h.gram();
        for (std::size_t i = 0; i < g.rows(); ++i)
            for (std::size_t j = 0; j < g.cols(); ++j) g(i, j) = g(i, j).scaled(d);
        out = perp(out, HermitianForm(h.algebra(), std::move(g)));
    }
    return out;
}

/// Hyperbolic companion h perp -h.
inline HermitianForm hyperbolic(const HermitianForm& h) { return perp(h, negate(h)); }

/// Reread a form over M_n(R) as a form over R.
inline HermitianForm morita_collapse(const HermitianForm& h)
{
    return HermitianForm(h.algebra()->with_degree(1), h.gram());
}

/// Reread a form over R as a form over M_n(R); the rank must be divisible by n.
inline HermitianForm morita_expand(const HermitianForm& h, int n)
{
    if (h.algebra()->n() != 1) throw Error("morita_expand needs a form over the coefficient ring");
    return HermitianForm(h.algebra()->with_degree(n), h.gram());
}

inline ReferenceForm morita_collapse(const ReferenceForm& eta)
{
    HermitianForm c = morita_collapse(eta.eta);
    const auto raw = raw_signature_table(c);
    SignatureTable cert;
    for (const auto& e : eta.certificate) cert.push_back({e.ordering, raw[e.ordering.index()]});
    return ReferenceForm{std::move(c), std::move(cert)};
}

/// Base change of a form over A/Q to A tensor L.
inline HermitianForm going_up(const HermitianForm& h, const FieldPtr& l)
{
    const AlgebraPtr al = h.algebra()->over(l);
    Matrix<Scalar> g(h.gram().rows(), h.gram().cols(), al->scalar(0));
    for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) {
            std::array<FieldElement, 4> c;
            for (int s = 0; s < 4; ++s) c[s] = FieldElement(l, h.gram()(i, j)[s].rational_part());
            g(i, j) = Scalar(al->ring(), c);
        }
    return HermitianForm(al, std::move(g));
}

inline ReferenceForm going_up(const ReferenceForm& eta, const FieldPtr& l)
{
    HermitianForm e = going_up(eta.eta, l);
    const auto raw = raw_signature_table(e);
    SignatureTable cert;
    for (const auto& q : e.algebra()->tilde_orderings()) cert.push_back({q, raw[q.index()]});
    return ReferenceForm{std::move(e), std::move(cert)};
}

/// Hermitian Scharlau transfer along Tr_{L/Q}: (A tensor L)^k is A^{kd} via
/// the power basis theta^j of L, with entries Tr(theta^{j+j'} G_{ii'}).
inline HermitianForm hermitian_transfer(const HermitianForm& h, const AlgebraPtr& base)
{
    const FieldPtr& l = h.algebra()->field();
    if (base->field()->degree() != 1) throw Error("transfer: only the base field Q is supported");
    const std::size_t d = l->degree(), big = h.gram().rows();
    const FieldElement theta = FieldElement::generator(l);
    std::vector<FieldElement> powers{FieldElement(l, 1)};
    for (std::size_t t = 1; t + 1 < 2 * d; ++t) powers.push_back(powers.back() * theta);
    const std::size_t n = base->n();
    // Blocks are ordered (slot i, power j), keeping each n x n block contiguous.
    Matrix<Scalar> g(big * d, big * d, base->scalar(0));
    for (std::size_t i = 0; i < big; ++i)
        for (std::size_t ip = 0; ip < big; ++ip)
            for (std::size_t j = 0; j < d; ++j)
                for (std::size_t jp = 0; jp < d; ++jp) {
                    std::array<FieldElement, 4> c;
                    for (int s = 0; s < 4; ++s)
                        c[s] = FieldElement(base->field(), (powers[j + jp] * h.gram()(i, ip)[s]).trace());
                    const std::size_t row = ((i / n) * d + j) * n + i % n;
                    const std::size_t col = ((ip / n) * d + jp) * n + ip % n;
                    g(row, col) = Scalar(base->ring(), c);
                }
    return HermitianForm(base, std::move(g));
}

struct KnebuschResult {
    int transfer_side = 0;
    int sum_side = 0;
    bool holds() const { return transfer_side == sum_side; }
};

/// Both sides of sign_P^eta(Tr* h) = sum over Q of sign_Q^{eta (x) L} h, for
/// A over Q (eta given over A) and h over A tensor L.
inline KnebuschResult knebusch_check(const HermitianForm& h, const ReferenceForm& eta)
{
    const AlgebraPtr& base = eta.eta.algebra();
    if (!base->over(h.algebra()->field())->same_as(*h.algebra()))
        throw Error("knebusch_check: form is not over the base change of the reference algebra");
    const Ordering& p = base->field()->orderings().at(0);
    KnebuschResult r;
    r.transfer_side = signature(hermitian_transfer(h, base), p, eta);
    const ReferenceForm eta_l = going_up(eta, h.algebra()->field());
    for (const auto& e : signature_table(h, eta_l)) r.sum_side += e.value;
    return r;
}

}  // namespace hermsig
