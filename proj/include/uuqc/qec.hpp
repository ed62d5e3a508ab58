#pragma once

// Error correction viewed as an unambiguous unitary channel: the
// Knill-Laflamme check, recovery construction, and the probability of
// unambiguous (heralded) correction from the Choi state of the noisy encoding.

#include <cstdint>
#include <string>
#include <vector>

#include "uuqc/channels.hpp"
#include "uuqc/entanglement.hpp"
#include "uuqc/linalg.hpp"
#include "uuqc/random.hpp"
#include "uuqc/subspace.hpp"
#include "uuqc/unambiguous.hpp"

namespace uuqc {

/// Encoding isometry C (physical x logical) and its code projector CC^dagger.
class CodeSpec {
  public:
    explicit CodeSpec(Matrix encoder, double tol = kDefaultTolerance) : encoder_(std::move(encoder)) {
        if (encoder_.cols() == 0 || encoder_.rows() < encoder_.cols()) {
            throw DimensionError("CodeSpec: encoder must be physical x logical with physical >= logical >= 1");
        }
        const double defect = frobenius(encoder_.adjoint() * encoder_ - identity(logical_dim()));
        if (!(defect <= tol)) {
            throw InvalidArgument("CodeSpec: encoder is not an isometry (defect " + std::to_string(defect) + ")");
        }
    }

    /// The whole space as the code (C = I_d).
    static CodeSpec trivial(std::size_t d) { return CodeSpec(identity(d)); }

    std::size_t logical_dim() const { return static_cast<std::size_t>(encoder_.cols()); }
    std::size_t physical_dim() const { return static_cast<std::size_t>(encoder_.rows()); }
    const Matrix &encoder() const { return encoder_; }
    Matrix projector() const { return encoder_ * encoder_.adjoint(); }
    SubspaceIsometry code_space() const { return SubspaceIsometry(encoder_); }
    KrausChannel encoding_channel() const { return KrausChannel({encoder_}); }

  private:
    Matrix encoder_;
};

struct KlReport {
    bool correctable = false;
    Matrix h;  // h(j, i) = Tr(P E_j^dagger E_i P) / d
    double residual = 0.0;  // max_{i,j} ||P E_j^dagger E_i P - h_ji P||_F
};

inline void check_acts_on_code(const CodeSpec &code, const KrausChannel &ch, const char *what) {
    if (ch.in_dim() != code.physical_dim() || ch.out_dim() != code.physical_dim()) {
        throw DimensionError(std::string(what) + ": operators are " + std::to_string(ch.out_dim()) + "x" +
                             std::to_string(ch.in_dim()) + " but the code lives in dimension " +
                             std::to_string(code.physical_dim()));
    }
}

inline KlReport kl_check(const CodeSpec &code, const KrausChannel &errors, double tol = kDefaultTolerance) {
    check_acts_on_code(code, errors, "kl_check");
    const Matrix p = code.projector();
    const double d = static_cast<double>(code.logical_dim());
    const std::size_t n = errors.size();
    KlReport r;
    r.h = Matrix::Zero(as_index(n), as_index(n));
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            const Matrix m = p * errors[j].adjoint() * errors[i] * p;
            const Complex hji = m.trace() / d;
            r.h(as_index(j), as_index(i)) = hji;
            r.residual = std::max(r.residual, frobenius(m - hji * p));
        }
    }
    r.correctable = r.residual <= tol;
    return r;
}

struct DiagonalizedErrors {
    KrausChannel errors;  // F_k = sum_i rotation(i, k) E_i
    Matrix rotation;      // unitary diagonalizing h
    RealVector spectrum;  // eigenvalues of h, descending (order of F_k)
};

/// Rotates a correctable error set so that P F_l^dagger F_k P = delta_lk D_k P.
/// An h that is already diagonal keeps the identity rotation.
inline DiagonalizedErrors diagonalize_errors(const KlReport &report, const KrausChannel &errors,
                                             double tol = kDefaultTolerance) {
    if (!report.correctable) {
        throw NotCertifiedError("diagonalize_errors: error set does not satisfy the Knill-Laflamme condition");
    }
    const Index n = report.h.rows();
    if (n != as_index(errors.size())) {
        throw DimensionError("diagonalize_errors: report does not belong to this error set");
    }
    Matrix rotation;
    RealVector spectrum(n);
    const Matrix off_diagonal = report.h - Matrix(report.h.diagonal().asDiagonal());
    if (frobenius(off_diagonal) <= tol) {
        rotation = identity(static_cast<std::size_t>(n));
        spectrum = report.h.diagonal().real();
    } else {
        const HermitianEigen eig = hermitian_eigen(0.5 * (report.h + report.h.adjoint()));
        rotation = eig.vectors.rowwise().reverse();
        spectrum = eig.values.reverse();
    }
    std::vector<Matrix> rotated;
    for (Index k = 0; k < n; ++k) {
        Matrix f = Matrix::Zero(as_index(errors.out_dim()), as_index(errors.in_dim()));
        for (Index i = 0; i < n; ++i) {
            f += rotation(i, k) * errors[static_cast<std::size_t>(i)];
        }
        rotated.push_back(std::move(f));
    }
    return {KrausChannel(errors.in_dim(), errors.out_dim(), std::move(rotated)), rotation, spectrum};
}

/// Two-stage recovery for a correctable error set: each nonzero diagonalized
/// error F_k maps the code onto an orthogonal corrupted copy V_k = F_k C / sqrt(D_k);
/// R_k = C V_k^dagger undoes it, and the projector onto the remaining space
/// completes the operation so that it preserves trace.
inline KrausChannel build_recovery(const CodeSpec &code, const KrausChannel &errors, double tol = kDefaultTolerance) {
    const KlReport report = kl_check(code, errors, tol);
    const DiagonalizedErrors diag = diagonalize_errors(report, errors, tol);
    const std::size_t n = code.physical_dim();
    std::vector<Matrix> images;
    for (std::size_t k = 0; k < diag.errors.size(); ++k) {
        const double dk = diag.spectrum(as_index(k));
        if (dk > tol) {
            images.push_back(diag.errors[k] * code.encoder() / std::sqrt(dk));
        }
    }
    std::vector<Matrix> elems;
    Matrix covered = Matrix::Zero(as_index(n), as_index(n));
    for (const auto &v : images) {
        elems.push_back(code.encoder() * v.adjoint());
        covered += v * v.adjoint();
    }
    const Matrix rest = identity(n) - covered;
    if (frobenius(rest) > tol) {
        elems.push_back(rest);
    }
    return KrausChannel(n, n, std::move(elems));
}

struct CorrectionReport {
    UuqcCertificate certificate;
    double q = 0.0;
    bool identity_unitary = false;  // U proportional to I on the logical space
    bool full_correction = false;   // UUQC, U = I, q = 1
};

/// Certifies recovery o errors o encoding, from the logical space onto the
/// code space, as an unambiguous unitary channel.
inline CorrectionReport verify_correction_uuqc(const CodeSpec &code, const KrausChannel &errors,
                                               const KrausChannel &recovery, double tol = kDefaultTolerance) {
    check_acts_on_code(code, errors, "verify_correction_uuqc");
    check_acts_on_code(code, recovery, "verify_correction_uuqc");
    const KrausChannel combined = compose(compose(code.encoding_channel(), errors), recovery);
    CorrectionReport r;
    r.certificate = certify_uuqc(combined, SubspaceIsometry::full(code.logical_dim()), code.code_space(), EnvDims{},
                                 tol);
    r.q = r.certificate.total_probability;
    r.identity_unitary = phase_agreement_defect(identity(code.logical_dim()), r.certificate.unitary) <= tol;
    r.full_correction = r.certificate.is_uuqc && r.identity_unitary && std::abs(r.q - 1.0) <= tol;
    return r;
}

/// (I_a (x) noise o C)|Phi_d><Phi_d|, unnormalized, on (a: d) (x) (b: physical).
inline Matrix noisy_choi_state(const CodeSpec &code, const KrausChannel &noise) {
    check_acts_on_code(code, noise, "noisy_choi_state");
    return choi_state(compose(code.encoding_channel(), noise));
}

struct FilterSearchOptions {
    std::uint64_t seed = 0;
    std::size_t grid_levels = 21;    // per diagonal entry, for physical dimension <= 3
    std::size_t random_filters = 200;
    double acceptance = 1e-6;  // purity and Schmidt-uniformity slack for an accepted outcome
};

enum class CorrectionMethod { PureExact, FilterLowerBound };

inline const char *to_string(CorrectionMethod m) {
    return m == CorrectionMethod::PureExact ? "pure-exact" : "filter-lower-bound";
}

struct CorrectionProbability {
    double probability = 0.0;
    CorrectionMethod method = CorrectionMethod::PureExact;
    double choi_trace = 0.0;
    double purity_defect = 0.0;  // Tr(sigma) - largest eigenvalue
    std::size_t filters_tried = 0;
};

namespace detail {

/// Weight of the filtered branch if it is a rank-d UES (up to a unitary on b), else 0.
inline double filtered_ues_weight(const Matrix &sigma, std::size_t d, std::size_t n, const Matrix &filter,
                                  double acceptance, double tol) {
    const Matrix k = tensor_product(identity(d), filter);
    const Matrix tau = k * sigma * k.adjoint();
    const double weight = tau.trace().real();
    if (!(weight > tol)) {
        return 0.0;
    }
    const HermitianEigen eig = hermitian_eigen(tau);
    const Index top = eig.values.size() - 1;
    if (1.0 - eig.values(top) / weight > acceptance) {
        return 0.0;
    }
    const SchmidtForm sf = schmidt(eig.vectors.col(top), d, n, tol);
    const double target = 1.0 / static_cast<double>(d);
    for (Index i = 0; i < sf.coefficients.size(); ++i) {
        const double expected = i < as_index(d) ? target : 0.0;
        if (std::abs(sf.coefficients(i) * sf.coefficients(i) - expected) > acceptance) {
            return 0.0;
        }
    }
    return weight;
}

}  // namespace detail

/// Probability that the noise on the code can be undone unambiguously. A pure
/// Choi state gives the exact optimum Tr(sigma) * P(sigma -> Phi_d); a mixed
/// one gets a lower bound from a search over local filters on particle b
/// (diagonal grid plus random filters).
inline CorrectionProbability unambiguous_correction_probability(const CodeSpec &code, const KrausChannel &noise,
                                                                const FilterSearchOptions &opts = {},
                                                                double tol = kDefaultTolerance) {
    const Matrix sigma = noisy_choi_state(code, noise);
    const std::size_t d = code.logical_dim();
    const std::size_t n = code.physical_dim();
    const HermitianEigen eig = hermitian_eigen(sigma);
    const Index top = eig.values.size() - 1;

    CorrectionProbability r;
    r.choi_trace = sigma.trace().real();
    r.purity_defect = r.choi_trace - eig.values(top);
    if (r.purity_defect <= tol) {
        r.method = CorrectionMethod::PureExact;
        r.probability = r.choi_trace * conversion_probability(schmidt(eig.vectors.col(top), d, n, tol), d, tol);
        return r;
    }

    r.method = CorrectionMethod::FilterLowerBound;
    double best = 0.0;
    auto consider = [&](const Matrix &filter) {
        ++r.filters_tried;
        best = std::max(best, detail::filtered_ues_weight(sigma, d, n, filter, opts.acceptance, tol));
    };

    // Diagonal grid: full resolution for small b, {0, 1/2, 1} per entry up to 10 dimensions.
    const std::size_t levels = n <= 3 ? std::max<std::size_t>(opts.grid_levels, 2) : (n <= 10 ? 3 : 0);
    if (levels > 0) {
        std::vector<std::size_t> digits(n, 0);
        while (true) {
            Matrix f = Matrix::Zero(as_index(n), as_index(n));
            for (std::size_t i = 0; i < n; ++i) {
                f(as_index(i), as_index(i)) = static_cast<double>(digits[i]) / static_cast<double>(levels - 1);
            }
            consider(f);
            std::size_t pos = 0;
            while (pos < n && ++digits[pos] == levels) {
                digits[pos++] = 0;
            }
            if (pos == n) {
                break;
            }
        }
    }

    Rng rng(opts.seed);
    for (std::size_t t = 0; t < opts.random_filters; ++t) {
        if (t % 2 == 0) {
            consider(random_contraction(n, n, rng));
        } else {
            const Matrix v = random_unitary(n, rng).leftCols(as_index(d));
            consider(v * v.adjoint());
        }
    }
    r.probability = best;
    return r;
}

struct CertaintyCheck {
    bool is_ues = false;  // normalized Choi state is a rank-d UES
    double trace = 0.0;
    double purity_defect = 0.0;     // 1 - largest eigenvalue / trace
    double uniformity_defect = 0.0;  // max_i |c_i^2 - 1/d| over the Schmidt spectrum
    RealVector schmidt_coefficients;
};

/// Necessary condition for correction with certainty: the normalized Choi
/// state of the noisy encoding is a uniformly entangled state of rank d.
inline CertaintyCheck certainty_check(const CodeSpec &code, const KrausChannel &noise, double tol = kDefaultTolerance) {
    const Matrix sigma = noisy_choi_state(code, noise);
    const std::size_t d = code.logical_dim();
    CertaintyCheck c;
    c.trace = sigma.trace().real();
    if (!(c.trace > tol)) {
        c.purity_defect = 1.0;
        c.uniformity_defect = 1.0;
        return c;
    }
    const HermitianEigen eig = hermitian_eigen(sigma / c.trace);
    const Index top = eig.values.size() - 1;
    c.purity_defect = 1.0 - eig.values(top);
    const SchmidtForm sf = schmidt(eig.vectors.col(top), d, code.physical_dim(), tol);
    c.schmidt_coefficients = sf.coefficients;
    for (Index i = 0; i < sf.coefficients.size(); ++i) {
        const double expected = i < as_index(d) ? 1.0 / static_cast<double>(d) : 0.0;
        c.uniformity_defect = std::max(c.uniformity_defect, std::abs(sf.coefficients(i) * sf.coefficients(i) - expected));
    }
    c.is_ues = c.purity_defect <= tol && c.uniformity_defect <= tol;
    return c;
}

}  // namespace uuqc
