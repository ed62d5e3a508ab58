#pragma once

// Certification of unambiguous unitary maps (UUM) and unambiguous unitary
// quantum channels (UUQC).
//
// Layout. An operator Omega maps H_1 (x) H_e1 -> H_2 (x) H_e2, system leg
// slowest. The system subspaces H_1^s, H_2^s are given as isometries V1, V2
// (ambient x d). Omega is a UUM mimicking U with probability p iff
//
//     (V2^dagger (x) I) Omega (V1 (x) I) = U (x) Theta,   p = Tr(Theta Theta^dagger)
//
// with U a d x d unitary in subspace coordinates. The restricted operator is
// factored through its operator-Schmidt decomposition; a product exists iff
// every operator-Schmidt value after the first vanishes.
//
// The environment input of a channel is fed the unnormalized identity I_e1,
// so a Kraus element U (x) Theta contributes p = Tr(Theta^dagger Theta).
// The single-state probability reads M_psi = Omega (|psi> (x) I_e1) and
// traces M_psi M_psi^dagger over e2 after projecting the system leg.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "uuqc/channels.hpp"
#include "uuqc/linalg.hpp"
#include "uuqc/random.hpp"
#include "uuqc/subspace.hpp"

namespace uuqc {

/// Dimensions of the environment input (e1) and output (e2) legs.
struct EnvDims {
    std::size_t in = 1;
    std::size_t out = 1;
};

struct UumCertificate {
    bool is_uum = false;
    std::size_t dim = 0;
    /// sigma_1^2 / d from the dominant operator-Schmidt term. Equals Tr(Theta Theta^dagger) when is_uum.
    double probability = 0.0;
    /// ||V2^dagger Omega V1||_F^2 / d, the input-averaged success weight. Equals `probability` for a UUM.
    double weight = 0.0;
    Matrix unitary;     // d x d, dominant entry real positive
    Matrix env_factor;  // Theta, env_out x env_in
    double residual = 0.0;
    double unitarity_defect = 0.0;  // ||U^dagger U - I||_F
    double leading_value = 0.0;     // sigma_1
    double second_value = 0.0;      // sigma_2 (0 when the spectrum has one value)
    std::string reason;

    /// V2 U V1^dagger, the unitary as an operator between the ambient spaces.
    Matrix ambient_unitary(const SubspaceIsometry &v1, const SubspaceIsometry &v2) const {
        return v2.columns() * unitary * v1.columns().adjoint();
    }
};

namespace detail {

inline void check_layout(const Matrix &omega, const SubspaceIsometry &v1, const SubspaceIsometry &v2,
                         const EnvDims &env) {
    if (env.in == 0 || env.out == 0) {
        throw DimensionError("environment dimensions must be positive");
    }
    if (v1.sub_dim() != v2.sub_dim()) {
        throw DimensionError("input and output subspaces differ in dimension (" + std::to_string(v1.sub_dim()) +
                             " vs " + std::to_string(v2.sub_dim()) + ")");
    }
    if (omega.cols() != as_index(v1.ambient_dim() * env.in)) {
        throw DimensionError("operator has " + std::to_string(omega.cols()) + " columns, expected " +
                             std::to_string(v1.ambient_dim() * env.in) + " (system_in * env_in)");
    }
    if (omega.rows() != as_index(v2.ambient_dim() * env.out)) {
        throw DimensionError("operator has " + std::to_string(omega.rows()) + " rows, expected " +
                             std::to_string(v2.ambient_dim() * env.out) + " (system_out * env_out)");
    }
}

inline Matrix composite_basis(const std::vector<Matrix> &legs, std::size_t dim, double tol) {
    if (legs.empty()) {
        return identity(dim);
    }
    Matrix b = Matrix::Ones(1, 1);
    for (const auto &leg : legs) {
        if (leg.rows() != leg.cols() || frobenius(leg.adjoint() * leg - identity(leg.rows())) > tol) {
            throw InvalidArgument("environment leg basis is not a unitary matrix");
        }
        b = tensor_product(b, leg);
    }
    if (b.rows() != as_index(dim)) {
        throw DimensionError("environment leg bases multiply to dimension " + std::to_string(b.rows()) +
                             ", expected " + std::to_string(dim));
    }
    return b;
}

}  // namespace detail

/// (V2^dagger (x) I_e2) Omega (V1 (x) I_e1): the operator seen between the two subspaces.
inline Matrix restrict_to_subspaces(const Matrix &omega, const SubspaceIsometry &v1, const SubspaceIsometry &v2,
                                    const EnvDims &env) {
    detail::check_layout(omega, v1, v2, env);
    return tensor_product(v2.columns().adjoint(), identity(env.out)) * omega *
           tensor_product(v1.columns(), identity(env.in));
}

inline UumCertificate certify_uum(const Matrix &omega, const SubspaceIsometry &v1, const SubspaceIsometry &v2,
                                  const EnvDims &env, double tol = kDefaultTolerance) {
    const Matrix m = restrict_to_subspaces(omega, v1, v2, env);
    const std::size_t d = v1.sub_dim();
    const double dd = static_cast<double>(d);
    const FactoredPair fp = factor_as_tensor(m, d, env.out, d, env.in);

    UumCertificate c;
    c.dim = d;
    c.residual = fp.residual;
    c.leading_value = fp.schmidt_values(0);
    c.second_value = fp.schmidt_values.size() > 1 ? fp.schmidt_values(1) : 0.0;
    c.probability = c.leading_value * c.leading_value / dd;
    c.weight = m.squaredNorm() / dd;

    // sys_factor has unit Frobenius norm, so a unitary U has U = sqrt(d) * A.
    c.unitary = std::sqrt(dd) * fp.sys_factor;
    c.env_factor = fp.env_factor / std::sqrt(dd);
    const Complex phase = fix_global_phase(c.unitary);
    c.env_factor *= std::conj(phase);
    c.unitarity_defect = frobenius(c.unitary.adjoint() * c.unitary - identity(d));

    if (!(c.probability > tol)) {
        c.reason = "no support on the chosen subspaces";
    } else if (!(c.residual <= tol)) {
        c.reason = "operator is not a product across the system/environment cut";
    } else if (!(c.unitarity_defect <= tol)) {
        c.reason = "system factor is not proportional to a unitary";
    } else {
        c.is_uum = true;
    }
    return c;
}

/// p(psi) for one input |psi> given in subspace coordinates (a d x 1 ket):
/// the trace of P2 Tr_e2{M_psi M_psi^dagger} P2 with M_psi = Omega(V1 psi (x) I_e1).
inline double probability_of_state(const Matrix &omega, const SubspaceIsometry &v1, const SubspaceIsometry &v2,
                                   const EnvDims &env, const Matrix &psi) {
    detail::check_layout(omega, v1, v2, env);
    if (psi.rows() != as_index(v1.sub_dim()) || psi.cols() != 1) {
        throw DimensionError("probability_of_state: state must be a ket of the subspace dimension");
    }
    const Matrix m_psi =
        tensor_product(v2.projector(), identity(env.out)) * omega * tensor_product(v1.columns() * psi, identity(env.in));
    const Matrix reduced = partial_trace(m_psi * m_psi.adjoint(), {v2.ambient_dim(), env.out}, {0});
    return reduced.trace().real() / psi.squaredNorm();
}

struct ProbabilityProfile {
    std::vector<double> samples;
    double min = 0.0;
    double max = 0.0;
    double spread() const { return max - min; }
};

/// p(psi) over Haar-random inputs in H_1^s. A UUM gives a constant profile.
inline ProbabilityProfile probability_profile(const Matrix &omega, const SubspaceIsometry &v1,
                                              const SubspaceIsometry &v2, const EnvDims &env, std::size_t samples,
                                              std::uint64_t seed) {
    detail::check_layout(omega, v1, v2, env);
    Rng rng(seed);
    ProbabilityProfile prof;
    prof.samples.reserve(samples);
    for (std::size_t s = 0; s < samples; ++s) {
        prof.samples.push_back(probability_of_state(omega, v1, v2, env, random_ket(v1.sub_dim(), rng)));
    }
    if (!prof.samples.empty()) {
        auto [lo, hi] = std::minmax_element(prof.samples.begin(), prof.samples.end());
        prof.min = *lo;
        prof.max = *hi;
    }
    return prof;
}

/// V2^dagger Tr_e2{ E(V1 rho V1^dagger (x) env_state) } V2 for rho given in
/// subspace coordinates. Without `env_state` the environment input is the
/// unnormalized identity.
inline Matrix evaluate_on_subspace(const KrausChannel &ch, const SubspaceIsometry &v1, const SubspaceIsometry &v2,
                                   const EnvDims &env, const Matrix &rho,
                                   const std::optional<Matrix> &env_state = std::nullopt) {
    if (ch.in_dim() != v1.ambient_dim() * env.in || ch.out_dim() != v2.ambient_dim() * env.out) {
        throw DimensionError("channel dimensions do not match system (x) environment layout");
    }
    if (rho.rows() != as_index(v1.sub_dim()) || rho.cols() != as_index(v1.sub_dim())) {
        throw DimensionError("evaluate_on_subspace: state must be d x d in subspace coordinates");
    }
    Matrix sigma = env_state ? *env_state : identity(env.in);
    if (sigma.rows() != as_index(env.in) || sigma.cols() != as_index(env.in)) {
        throw DimensionError("evaluate_on_subspace: environment state has the wrong dimension");
    }
    const Matrix input = tensor_product(v1.columns() * rho * v1.columns().adjoint(), sigma);
    const Matrix out = partial_trace(uuqc::apply(ch, input), {v2.ambient_dim(), env.out}, {0});
    return v2.columns().adjoint() * out * v2.columns();
}

struct UuqcOptions {
    std::size_t checks = 4;  // random states used for the direct evaluation
    std::uint64_t seed = 0;
};

struct UuqcCertificate {
    bool is_uuqc = false;
    std::size_t dim = 0;
    /// q: sum of p_k over contributing elements that agree with the reference
    /// (largest-p) element. Covers every contributing element when is_uuqc.
    double total_probability = 0.0;
    /// q read off the direct evaluation P2 Tr_e2{E(rho (x) I_e1)} P2 = q U rho U^dagger.
    double direct_probability = 0.0;
    /// max over checks of ||P2 Tr_e2{E(rho (x) I)} P2 - q U rho U^dagger||_F.
    double definition_residual = 0.0;
    std::vector<UumCertificate> per_element;
    std::vector<bool> contributing;  // weight > tol
    Matrix unitary;                  // common U (reference element), subspace coordinates
    std::optional<std::pair<std::size_t, std::size_t>> conflict;  // elements mimicking different unitaries
    std::optional<std::size_t> failing_element;                   // contributing element that is not a UUM
    std::string reason;

    Matrix ambient_unitary(const SubspaceIsometry &v1, const SubspaceIsometry &v2) const {
        return v2.columns() * unitary * v1.columns().adjoint();
    }
};

/// |Tr(U^dagger W)| compared against d.
inline double phase_agreement_defect(const Matrix &u, const Matrix &w) {
    return static_cast<double>(u.cols()) - std::abs((u.adjoint() * w).trace());
}

inline UuqcCertificate certify_uuqc(const KrausChannel &ch, const SubspaceIsometry &v1, const SubspaceIsometry &v2,
                                    const EnvDims &env, double tol = kDefaultTolerance,
                                    const UuqcOptions &opts = {}) {
    if (ch.in_dim() != v1.ambient_dim() * env.in || ch.out_dim() != v2.ambient_dim() * env.out) {
        throw DimensionError("certify_uuqc: channel is " + std::to_string(ch.out_dim()) + "x" +
                             std::to_string(ch.in_dim()) + ", layout expects " +
                             std::to_string(v2.ambient_dim() * env.out) + "x" +
                             std::to_string(v1.ambient_dim() * env.in));
    }
    UuqcCertificate c;
    c.dim = v1.sub_dim();
    const std::size_t n = ch.size();
    c.per_element.reserve(n);
    c.contributing.assign(n, false);
    for (std::size_t k = 0; k < n; ++k) {
        c.per_element.push_back(certify_uum(ch[k], v1, v2, env, tol));
        c.contributing[k] = c.per_element[k].weight > tol;
    }

    std::optional<std::size_t> reference;
    for (std::size_t k = 0; k < n; ++k) {
        if (c.contributing[k] && c.per_element[k].is_uum &&
            (!reference || c.per_element[k].probability > c.per_element[*reference].probability)) {
            reference = k;
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (c.contributing[k] && !c.per_element[k].is_uum && !c.failing_element) {
            c.failing_element = k;
        }
    }
    if (reference) {
        c.unitary = c.per_element[*reference].unitary;
        for (std::size_t k = 0; k < n; ++k) {
            if (!c.contributing[k] || !c.per_element[k].is_uum) {
                continue;
            }
            if (phase_agreement_defect(c.unitary, c.per_element[k].unitary) <= tol) {
                c.total_probability += c.per_element[k].probability;
            } else if (!c.conflict) {
                c.conflict = std::make_pair(std::min(*reference, k), std::max(*reference, k));
            }
        }
    } else {
        c.unitary = identity(c.dim);
    }

    Rng rng(opts.seed);
    const Matrix u = c.unitary;
    for (std::size_t t = 0; t < std::max<std::size_t>(opts.checks, 1); ++t) {
        const Matrix rho = random_density(c.dim, rng);
        const Matrix out = evaluate_on_subspace(ch, v1, v2, env, rho);
        c.direct_probability += out.trace().real() / static_cast<double>(std::max<std::size_t>(opts.checks, 1));
        c.definition_residual =
            std::max(c.definition_residual, frobenius(out - c.total_probability * u * rho * u.adjoint()));
    }

    if (c.failing_element) {
        c.reason = "element " + std::to_string(*c.failing_element) + " is not an unambiguous unitary map: " +
                   c.per_element[*c.failing_element].reason;
    } else if (c.conflict) {
        c.reason = "elements " + std::to_string(c.conflict->first) + " and " + std::to_string(c.conflict->second) +
                   " mimic different unitaries";
    } else if (!(c.total_probability > tol)) {
        c.reason = "zero success probability";
    } else if (!(c.definition_residual <= tol)) {
        c.reason = "direct evaluation disagrees with q U rho U^dagger";
    } else {
        c.is_uuqc = true;
    }
    return c;
}

/// Bases used to refine the environment legs. Each entry is a unitary whose
/// columns are the basis kets of one leg; the legs multiply (slowest first)
/// to the environment dimension. Empty means the computational basis.
struct EnvBases {
    std::vector<Matrix> in_legs;
    std::vector<Matrix> out_legs;
};

/// Refines a UUQC to elements of the form w * U (x) |b><a|, one per pair of
/// environment basis states (input index a slowest), with
/// w = sqrt(sum_k |<b|Theta_k|a>|^2). Zero-weight pairs are dropped.
/// The refined channel mimics the same U with the same q.
inline KrausChannel refine(const KrausChannel &ch, const SubspaceIsometry &v1, const SubspaceIsometry &v2,
                           const EnvDims &env, const EnvBases &bases = {}, double tol = kDefaultTolerance) {
    const UuqcCertificate cert = certify_uuqc(ch, v1, v2, env, tol);
    if (!cert.is_uuqc) {
        throw NotCertifiedError("refine: channel is not an unambiguous unitary channel (" + cert.reason + ")");
    }
    const Matrix basis_in = detail::composite_basis(bases.in_legs, env.in, tol);
    const Matrix basis_out = detail::composite_basis(bases.out_legs, env.out, tol);
    const Matrix u_amb = cert.ambient_unitary(v1, v2);

    Matrix weight2 = Matrix::Zero(as_index(env.out), as_index(env.in));
    for (std::size_t k = 0; k < ch.size(); ++k) {
        if (!cert.contributing[k]) {
            continue;
        }
        const Matrix omega = basis_out.adjoint() * cert.per_element[k].env_factor * basis_in;
        weight2 += omega.cwiseAbs2().cast<Complex>();
    }
    std::vector<Matrix> elems;
    for (std::size_t a = 0; a < env.in; ++a) {
        for (std::size_t b = 0; b < env.out; ++b) {
            const double w = std::sqrt(weight2(as_index(b), as_index(a)).real());
            if (w <= tol) {
                continue;
            }
            const Matrix env_part = basis_out.col(as_index(b)) * basis_in.col(as_index(a)).adjoint();
            elems.push_back(w * tensor_product(u_amb, env_part));
        }
    }
    return KrausChannel(ch.in_dim(), ch.out_dim(), std::move(elems));
}

/// I_a (x) E. Certifies on I_a (x) V1 -> I_a (x) V2 with unitary I_a (x) U and the same q.
inline KrausChannel extend_by_identity(const KrausChannel &ch, std::size_t ancilla_dim) {
    if (ancilla_dim == 0) {
        throw DimensionError("extend_by_identity: ancilla dimension must be positive");
    }
    return tensor_with_identity(ch, ancilla_dim);
}

}  // namespace uuqc
