#pragma once

#include "hermsig/cones.hpp"
#include "hermsig/four_squares.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace hermsig {

/// One summand weight * sigma(x) * g_slot * x of a certificate, where g_slot is
/// the diagonal generator beta_{slot mod 2^t} * a of k x <<b_1..b_t>> <a>.
struct CertificateTerm {
    FieldElement weight;
    AlgebraElement x;
    std::size_t slot = 0;
};

struct SquareCertificate {
    std::vector<CertificateTerm> terms;
    std::size_t k = 1;
};

/// Element a and Pfister slots b_1..b_t defining the target form.
struct SosParameters {
    AlgebraElement a;
    std::vector<FieldElement> b;
};

struct SearchBounds {
    int height = 3;
    int terms = 6;
};

/// Inverse over the coefficient ring by Gauss-Jordan with invertible pivots.
inline Matrix<Scalar> inverse(const Matrix<Scalar>& m)
{
    const std::size_t n = m.rows();
    if (n != m.cols()) throw ShapeMismatch("inverse of a non-square matrix");
    if (n == 0) return m;
    const Scalar zero = scalar_traits<Scalar>::zero_like(m(0, 0)), one = scalar_traits<Scalar>::one_like(m(0, 0));
    Matrix<Scalar> a = m, r = Matrix<Scalar>::identity(n, zero, one);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && !a(p, c).is_invertible()) ++p;
        if (p == n) throw NonInvertiblePivot();
        for (std::size_t k = 0; k < n; ++k) {
            std::swap(a(p, k), a(c, k));
            std::swap(r(p, k), r(c, k));
        }
        const Scalar inv = a(c, c).inverse();
        for (std::size_t k = 0; k < n; ++k) {
            a(c, k) = inv * a(c, k);
            r(c, k) = inv * r(c, k);
        }
        for (std::size_t row = 0; row < n; ++row) {
            if (row == c || a(row, c).is_zero()) continue;
            const Scalar f = a(row, c);
            for (std::size_t k = 0; k < n; ++k) {
                a(row, k) -= f * a(c, k);
                r(row, k) -= f * r(c, k);
            }
        }
    }
    return r;
}

/// Subset products of the slots, indexed by bitmask.
inline std::vector<FieldElement> pfister_products(const FieldPtr& f, const std::vector<FieldElement>& b)
{
    return pfister(f, b).entries();
}

inline AlgebraElement scaled(const AlgebraElement& x, const FieldElement& c)
{
    AlgebraElement r = x;
    for (std::size_t i = 0; i < r.rows(); ++i)
        for (std::size_t j = 0; j < r.cols(); ++j) r(i, j) = r(i, j).scaled(c);
    return r;
}

/// Exact check of u = sum weight * sigma(x) g_slot x with distinct slots
/// below k 2^t and weights positive on H(b_1..b_t).
inline bool verify_certificate(const AlgebraPtr& alg, const AlgebraElement& u, const SosParameters& params,
                               const SquareCertificate& cert, std::string* reason = nullptr)
{
    auto reject = [&](const std::string& why) {
        if (reason) *reason = why;
        return false;
    };
    const std::size_t n = alg->n();
    if (u.rows() != n || u.cols() != n || params.a.rows() != n || params.a.cols() != n)
        return reject("shape mismatch between u, a and the algebra");
    const auto betas = pfister_products(alg->field(), params.b);
    const auto y = harrison_set(alg->field(), params.b);
    std::set<std::size_t> used;
    AlgebraElement sum = alg->zero();
    for (std::size_t i = 0; i < cert.terms.size(); ++i) {
        const auto& t = cert.terms[i];
        const std::string at = "term " + std::to_string(i) + ": ";
        if (t.x.rows() != n || t.x.cols() != n) return reject(at + "shape mismatch");
        if (t.slot >= cert.k * betas.size()) return reject(at + "slot out of range");
        if (!used.insert(t.slot).second) return reject(at + "slot used twice");
        if (t.weight.is_zero()) return reject(at + "zero weight");
        for (const auto& p : y)
            if (sign_at(t.weight, p) <= 0) return reject(at + "weight not positive at " + p.id());
        const AlgebraElement g = scaled(params.a, betas[t.slot % betas.size()]);
        sum = sum + scaled(adjoint(t.x) * g * t.x, t.weight);
    }
    if (!(sum == u)) return reject("evaluation differs from u");
    return true;
}

struct Refutation {
    Ordering ordering;
    int orientation = 1;
    std::vector<Scalar> witness;
    std::optional<Scalar> value;
};

struct SosResult {
    enum class Kind { Certificate, Refuted, Unknown } kind = Kind::Unknown;
    std::optional<SquareCertificate> certificate;
    std::optional<Refutation> refutation;
    std::string note;
};

namespace detail {

/// v = sum of beta_mask c^2, terms listed as (mask, c). Bounded search over c
/// with power-basis coordinates in [-h, h], at most two searched terms, with
/// a positive rational remainder finished by four squares.
inline std::optional<std::vector<std::pair<std::size_t, FieldElement>>> represent_scalar(
    const FieldElement& v, const std::vector<FieldElement>& betas, const std::vector<Ordering>& y, int height,
    int budget, int depth = 2)
{
    using Terms = std::vector<std::pair<std::size_t, FieldElement>>;
    if (v.is_zero()) return Terms{};
    if (v.is_rational() && v.rational_part() > 0) {
        Terms t;
        for (const auto& c : four_square_decomposition(v.rational_part()))
            if (c != 0) t.emplace_back(0, FieldElement(v.field(), c));
        if (static_cast<int>(t.size()) <= budget) return t;
    }
    if (budget <= 0 || depth <= 0) return std::nullopt;
    const FieldPtr& f = v.field();
    std::optional<Terms> found;
    for_each_small_vector(f->degree(), height, [&](const std::vector<int>& co) {
        std::vector<Rational> q(co.begin(), co.end());
        const FieldElement c(f, Polynomial(q));
        const FieldElement c2 = c * c;
        for (std::size_t m = 0; m < betas.size(); ++m) {
            const FieldElement r = v - betas[m] * c2;
            bool ok = true;
            for (const auto& p : y)
                if (sign_at(r, p) < 0) ok = false;
            if (!ok) continue;
            auto rest = represent_scalar(r, betas, y, height, budget - 1, depth - 1);
            if (rest) {
                rest->insert(rest->begin(), {m, c});
                found = std::move(rest);
                return true;
            }
        }
        return false;
    });
    return found;
}

}  // namespace detail

/// Sums-of-hermitian-squares search for u in D(k x <<b>> <a>). Gate: u must
/// lie, at every non-nil P in H(b), in the cone containing a; a failure is a
/// refutation. Then u = T^{-*} diag(d) T^{-1} and a = S^{-*} diag(alpha) S^{-1}
/// reduce the problem to representing scalars, which is exact and always
/// succeeds for rational pivots (four squares).
inline SosResult find_sos_certificate(const AlgebraPtr& alg, const AlgebraElement& u, const SosParameters& params,
                                      const ReferenceForm& eta, SearchBounds bounds = {})
{
    SosResult res;
    if (!is_symmetric(*alg, u) || !is_symmetric(*alg, params.a)) throw Error("sos: u and a must be symmetric");
    if (!is_invertible(*alg, params.a)) throw Error("sos: a must be invertible");
    const auto y = harrison_set(alg->field(), params.b);
    for (const auto& p : y) {
        if (alg->is_nil(p)) continue;
        int orient = 0;
        for (int o : {1, -1})
            if (cone_membership(params.a, make_cone(alg, p, o, eta))) {
                orient = o;
                break;
            }
        if (orient == 0) throw Error("sos: a is not maximal at " + p.id());
        const auto m = cone_membership_detail(u, make_cone(alg, p, orient, eta));
        if (!m.member) {
            res.kind = SosResult::Kind::Refuted;
            res.refutation = Refutation{p, orient, m.witness, m.value};
            return res;
        }
    }

    const auto betas = pfister_products(alg->field(), params.b);
    SquareCertificate cert;
    std::vector<std::size_t> next_copy(betas.size(), 0);
    auto add_term = [&](std::size_t mask, AlgebraElement x) {
        const std::size_t slot = next_copy[mask]++ * betas.size() + mask;
        cert.k = std::max(cert.k, slot / betas.size() + 1);
        cert.terms.push_back({FieldElement(alg->field(), 1), std::move(x), slot});
    };
    try {
        const auto ca = congruence_diagonalize(params.a, true);
        const Scalar alpha = ca.diagonal.at(0);
        const auto cu = congruence_diagonalize(u, true);
        const Matrix<Scalar> tinv = inverse(cu.transform);
        const std::size_t n = alg->n();
        for (std::size_t i = 0; i < cu.diagonal.size(); ++i) {
            const Scalar& d = cu.diagonal[i];
            // sigma(y) alpha y = lambda d with lambda in F; then d = lambda^{-1} (...)
            std::optional<std::pair<Scalar, FieldElement>> yl;
            if (alg->epsilon() == 1) {
                yl = std::make_pair(alg->scalar(1), alpha[0] * d[0].inverse());
            } else {
                detail::for_each_small_vector(4, bounds.height, [&](const std::vector<int>& v) {
                    std::array<FieldElement, 4> co;
                    for (int s = 0; s < 4; ++s) co[s] = FieldElement(alg->field(), v[s]);
                    const Scalar yy(alg->ring(), co);
                    const Scalar val = yy.conj() * alpha * yy;
                    const Scalar ratio = val * d.inverse();
                    if (val.is_zero() || !ratio.is_central_scalar()) return false;
                    yl = std::make_pair(yy, ratio[0]);
                    return true;
                });
            }
            if (!yl) {
                res.note = "no vector carries a to a multiple of a pivot within the height bound";
                return res;
            }
            const FieldElement v = yl->second.inverse();
            auto rep = detail::represent_scalar(v, betas, y, bounds.height, bounds.terms);
            if (!rep) {
                res.note = "pivot " + d.to_string() + " has no bounded Pfister-weighted square representation";
                return res;
            }
            for (const auto& [mask, c] : *rep) {
                AlgebraElement row = alg->zero();
                for (std::size_t q = 0; q < n; ++q) row(0, q) = (yl->first * tinv(i, q)).scaled(c);
                add_term(mask, ca.transform * row);
            }
        }
    } catch (const NonInvertiblePivot&) {
        res.note = "no invertible pivot over the coefficient ring";
        return res;
    }
    std::string why;
    if (!verify_certificate(alg, u, params, cert, &why)) throw Error("sos: constructed certificate fails: " + why);
    res.kind = SosResult::Kind::Certificate;
    res.certificate = std::move(cert);
    return res;
}

}  // namespace hermsig
