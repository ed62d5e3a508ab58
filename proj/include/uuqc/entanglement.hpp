#pragma once

// Schmidt machinery, uniformly entangled states (UES), the channel <-> UES
// conversions and unambiguous teleportation.
//
// Bipartite kets are ordered (A, B) with A the slow factor.

#include <algorithm>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "uuqc/channels.hpp"
#include "uuqc/linalg.hpp"
#include "uuqc/subspace.hpp"
#include "uuqc/unambiguous.hpp"
#include "uuqc/weyl.hpp"

namespace uuqc {

struct SchmidtForm {
    RealVector coefficients;  // descending, min(dim_a, dim_b) entries
    SubspaceIsometry left_basis;
    SubspaceIsometry right_basis;
    std::size_t rank = 0;  // coefficients above tolerance

    double squared_norm() const { return coefficients.squaredNorm(); }
};

/// psi = sum_i c_i |l_i> (x) |r_i>.
inline SchmidtForm schmidt(const Matrix &psi, std::size_t dim_a, std::size_t dim_b, double tol = kDefaultTolerance) {
    if (psi.cols() != 1 || psi.rows() != as_index(dim_a * dim_b)) {
        throw DimensionError("schmidt: ket of length " + std::to_string(psi.rows()) + " does not match " +
                             std::to_string(dim_a) + "x" + std::to_string(dim_b));
    }
    Matrix coeff(as_index(dim_a), as_index(dim_b));
    for (std::size_t i = 0; i < dim_a; ++i) {
        for (std::size_t j = 0; j < dim_b; ++j) {
            coeff(as_index(i), as_index(j)) = psi(as_index(i * dim_b + j), 0);
        }
    }
    const SvdResult dec = svd(coeff);
    std::size_t rank = 0;
    for (Index k = 0; k < dec.values.size(); ++k) {
        if (dec.values(k) > tol) {
            ++rank;
        }
    }
    return SchmidtForm{dec.values, SubspaceIsometry(dec.left), SubspaceIsometry(dec.right.conjugate()), rank};
}

/// |Phi_d> = d^{-1/2} sum_i |i>|i>.
inline Matrix ues(std::size_t d) {
    if (d == 0) {
        throw DimensionError("ues: rank must be at least 1");
    }
    Matrix phi = Matrix::Zero(as_index(d * d), 1);
    for (std::size_t i = 0; i < d; ++i) {
        phi(as_index(i * d + i), 0) = 1.0 / std::sqrt(static_cast<double>(d));
    }
    return phi;
}

/// Optimal probability of reaching |Phi_d> from a pure state with squared
/// Schmidt coefficients `lambda2`: min over l of d * (sum_{i>=l} lambda_i^2) / (d - l + 1).
/// The spectrum is normalized first; fewer than d nonzero coefficients give 0.
inline double conversion_probability(std::vector<double> lambda2, std::size_t d, double tol = kDefaultTolerance) {
    if (d == 0) {
        throw DimensionError("conversion_probability: target rank must be at least 1");
    }
    std::sort(lambda2.begin(), lambda2.end(), std::greater<>());
    const double total = std::accumulate(lambda2.begin(), lambda2.end(), 0.0);
    if (!(total > 0.0)) {
        return 0.0;
    }
    const auto nonzero = static_cast<std::size_t>(
        std::count_if(lambda2.begin(), lambda2.end(), [&](double v) { return std::sqrt(v / total) > tol; }));
    if (nonzero < d) {
        return 0.0;
    }
    double best = 1.0;
    for (std::size_t l = 1; l <= d; ++l) {
        double tail = 0.0;
        for (std::size_t i = l - 1; i < lambda2.size(); ++i) {
            tail += lambda2[i] / total;
        }
        best = std::min(best, static_cast<double>(d) * tail / static_cast<double>(d - l + 1));
    }
    return best;
}

inline double conversion_probability(const SchmidtForm &sf, std::size_t d, double tol = kDefaultTolerance) {
    std::vector<double> l2;
    for (Index k = 0; k < sf.coefficients.size(); ++k) {
        l2.push_back(sf.coefficients(k) * sf.coefficients(k));
    }
    return conversion_probability(std::move(l2), d, tol);
}

struct UesConversion {
    double probability = 0.0;    // success weight of the projected branch
    Matrix state;                // normalized ket on (ancilla d) (x) H_2, dominant entry real positive
    double purity_defect = 0.0;  // Tr(sigma) - largest eigenvalue
    Matrix unitary;              // certified U, subspace coordinates
};

/// Sends half of |Phi_d> through the channel and keeps the branch landing in
/// H_2^s: the weight is q and the state is (I (x) V2 U)|Phi_d>.
inline UesConversion uuqc_to_ues(const KrausChannel &ch, const SubspaceIsometry &v1, const SubspaceIsometry &v2,
                                 const EnvDims &env, double tol = kDefaultTolerance) {
    const UuqcCertificate cert = certify_uuqc(ch, v1, v2, env, tol);
    if (!cert.is_uuqc) {
        throw NotCertifiedError("uuqc_to_ues: channel is not an unambiguous unitary channel (" + cert.reason + ")");
    }
    const std::size_t d = v1.sub_dim();
    const Matrix phi = tensor_product(identity(d), v1.columns()) * ues(d);
    const KrausChannel extended = extend_by_identity(ch, d);
    const Matrix input = tensor_product(projector_of(phi), identity(env.in));
    const Matrix traced = partial_trace(uuqc::apply(extended, input), {d, v2.ambient_dim(), env.out}, {0, 1});
    const Matrix proj = tensor_product(identity(d), v2.projector());
    const Matrix sigma = proj * traced * proj;

    const HermitianEigen eig = hermitian_eigen(sigma);
    const Index top = eig.values.size() - 1;
    UesConversion out;
    out.probability = sigma.trace().real();
    out.purity_defect = out.probability - eig.values(top);
    out.state = eig.vectors.col(top);
    fix_global_phase(out.state);
    out.unitary = cert.unitary;
    return out;
}

/// Standard d-dimensional teleportation with |Phi_d> shared on (3, 2).
/// Alice measures (1, 3) in the basis |beta_ab> = (W_ab (x) I)|Phi_d>,
/// W_ab = X^a Z^b, and Bob applies W_ab.
struct TeleportationScheme {
    std::size_t dim = 0;
    Matrix resource;                  // |Phi_d> on (3, 2)
    std::vector<Matrix> bell_bras;    // <beta_ab| on (1, 3), 1 x d^2
    std::vector<Matrix> corrections;  // W_ab on particle 2
};

inline TeleportationScheme teleportation_scheme(std::size_t d) {
    if (d < 2) {
        throw DimensionError("teleportation_scheme: dimension must be at least 2");
    }
    TeleportationScheme s;
    s.dim = d;
    s.resource = ues(d);
    const Matrix id = identity(d);
    for (const auto &w : weyl_operators(d)) {
        s.bell_bras.push_back((tensor_product(w, id) * ues(d)).adjoint());
        s.corrections.push_back(w);
    }
    return s;
}

/// Kraus elements of the teleportation channel H_1 -> H_2 with the resource
/// consumed: W_ab (<beta_ab|_{13} (x) I_2)(I_1 (x) |Phi_d>_{32}). One element
/// per outcome; each mimics the identity.
inline KrausChannel ues_to_uuqc(std::size_t d) {
    const TeleportationScheme s = teleportation_scheme(d);
    const Matrix attach = tensor_product(identity(d), s.resource);  // (1) -> (1, 3, 2)
    std::vector<Matrix> elems;
    for (std::size_t x = 0; x < s.bell_bras.size(); ++x) {
        const Matrix measure = tensor_product(s.bell_bras[x], identity(d));  // (1, 3, 2) -> (2)
        elems.push_back(s.corrections[x] * measure * attach);
    }
    return KrausChannel(d, d, std::move(elems));
}

struct TeleportCertificate {
    bool nonzero = false;
    double probability = 0.0;
    std::size_t rank_d = 0;
    std::optional<std::pair<SubspaceIsometry, SubspaceIsometry>> witness;
    double purity_defect = 0.0;
    std::size_t schmidt_rank = 0;
};

/// Unambiguous teleportation of a d-dimensional state over a shared pure state.
inline TeleportCertificate teleport_probability_pure(const Matrix &shared, std::size_t dim_a, std::size_t dim_b,
                                                     std::size_t d, double tol = kDefaultTolerance) {
    const SchmidtForm sf = schmidt(shared, dim_a, dim_b, tol);
    TeleportCertificate c;
    c.rank_d = d;
    c.schmidt_rank = sf.rank;
    c.probability = conversion_probability(sf, d, tol);
    c.nonzero = c.probability > tol;
    return c;
}

/// Projects a shared mixed state with P_a (x) P_b and checks that the
/// result is a nonzero pure state of Schmidt rank d. `probability` is the
/// weight of the projected branch when the check succeeds.
inline TeleportCertificate check_mixed_nonzero(const Matrix &rho, std::size_t dim_a, std::size_t dim_b, std::size_t d,
                                               const SubspaceIsometry &v_a, const SubspaceIsometry &v_b,
                                               double tol = kDefaultTolerance) {
    if (rho.rows() != as_index(dim_a * dim_b) || rho.cols() != rho.rows()) {
        throw DimensionError("check_mixed_nonzero: state does not match dimensions " + std::to_string(dim_a) + "x" +
                             std::to_string(dim_b));
    }
    if (v_a.sub_dim() != d || v_b.sub_dim() != d) {
        throw DimensionError("check_mixed_nonzero: projectors must have rank " + std::to_string(d));
    }
    if (v_a.ambient_dim() != dim_a || v_b.ambient_dim() != dim_b) {
        throw DimensionError("check_mixed_nonzero: projector ambient dimensions do not match the state");
    }
    const Matrix p = tensor_product(v_a.projector(), v_b.projector());
    const Matrix tau = p * rho * p;
    const double weight = tau.trace().real();

    TeleportCertificate c;
    c.rank_d = d;
    if (!(weight > tol)) {
        c.purity_defect = 0.0;
        return c;
    }
    const HermitianEigen eig = hermitian_eigen(tau);
    const Index top = eig.values.size() - 1;
    c.purity_defect = weight - eig.values(top);
    const SchmidtForm sf = schmidt(eig.vectors.col(top), dim_a, dim_b, tol);
    c.schmidt_rank = sf.rank;
    if (c.purity_defect <= tol && sf.rank == d) {
        c.nonzero = true;
        c.probability = weight;
        c.witness.emplace(v_a, v_b);
    }
    return c;
}

namespace detail {

inline void for_each_subset(std::size_t n, std::size_t k, const std::function<bool(const std::vector<std::size_t> &)> &f) {
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
        if (f(idx)) {
            return;
        }
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + (i - 1)) {
            --i;
        }
        if (i == 0) {
            return;
        }
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

}  // namespace detail

/// Sweeps every pair of d-dimensional computational-basis subspaces in
/// lexicographic order and returns the first witness (or a zero certificate).
inline TeleportCertificate sweep_basis_subspaces(const Matrix &rho, std::size_t dim_a, std::size_t dim_b,
                                                 std::size_t d, double tol = kDefaultTolerance) {
    if (dim_a > 4 || dim_b > 4) {
        throw DimensionError("sweep_basis_subspaces: exhaustive sweep is limited to factor dimensions <= 4");
    }
    if (d == 0 || d > dim_a || d > dim_b) {
        throw DimensionError("sweep_basis_subspaces: rank exceeds a factor dimension");
    }
    TeleportCertificate found;
    found.rank_d = d;
    bool done = false;
    detail::for_each_subset(dim_a, d, [&](const std::vector<std::size_t> &sa) {
        detail::for_each_subset(dim_b, d, [&](const std::vector<std::size_t> &sb) {
            auto c = check_mixed_nonzero(rho, dim_a, dim_b, d, SubspaceIsometry::basis_span(dim_a, sa),
                                         SubspaceIsometry::basis_span(dim_b, sb), tol);
            if (c.nonzero) {
                found = std::move(c);
                done = true;
            }
            return done;
        });
        return done;
    });
    return found;
}

}  // namespace uuqc
