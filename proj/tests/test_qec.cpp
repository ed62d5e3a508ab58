#include <gtest/gtest.h>

#include "oracles.hpp"
#include "uuqc/qec.hpp"
#include "uuqc/weyl.hpp"

using namespace uuqc;

namespace {

const Matrix kI = identity(2);
const Matrix kX = (Matrix(2, 2) << 0, 1, 1, 0).finished();
const Matrix kZ = (Matrix(2, 2) << 1, 0, 0, -1).finished();

/// Single-qubit operator on qubit `which` (0 = slowest) of three.
Matrix on_qubit(const Matrix &op, int which) {
    return tensor_product(which == 0 ? op : kI, which == 1 ? op : kI, which == 2 ? op : kI);
}

CodeSpec repetition_code() {
    Matrix c = Matrix::Zero(8, 2);
    c(0, 0) = 1.0;
    c(7, 1) = 1.0;
    return CodeSpec(c);
}

KrausChannel bit_flips() {
    return KrausChannel({0.5 * identity(8), 0.5 * on_qubit(kX, 0), 0.5 * on_qubit(kX, 1), 0.5 * on_qubit(kX, 2)});
}

KrausChannel depolarizing(std::size_t d) {
    std::vector<Matrix> ks;
    for (const auto &w : weyl_operators(d)) {
        ks.push_back(w / static_cast<double>(d));
    }
    return KrausChannel(std::move(ks));
}

Matrix diag2(double a, double b) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

double off_diagonal(const Matrix &h) { return frobenius(h - Matrix(h.diagonal().asDiagonal())); }

}  // namespace

TEST(CodeSpec, RejectsNonIsometry) {
    EXPECT_THROW(CodeSpec(2.0 * identity(2)), InvalidArgument);
    EXPECT_THROW(CodeSpec(Matrix::Zero(2, 3)), DimensionError);
}

TEST(KlCheck, TrivialCode) {
    const KlReport r = kl_check(CodeSpec::trivial(2), KrausChannel::identity_channel(2));
    EXPECT_TRUE(r.correctable);
    EXPECT_NEAR(std::abs(r.h(0, 0) - 1.0), 0.0, 1e-15);
}

TEST(KlCheck, RepetitionCodeCorrectsSingleBitFlips) {
    const KlReport r = kl_check(repetition_code(), bit_flips());
    EXPECT_TRUE(r.correctable);
    EXPECT_LE(frobenius(r.h - 0.25 * identity(4)), 1e-10);
}

TEST(KlCheck, RepetitionCodeCannotCorrectPhaseFlip) {
    const KlReport r = kl_check(repetition_code(),
                                KrausChannel({identity(8) / std::sqrt(2.0), on_qubit(kZ, 0) / std::sqrt(2.0)}));
    EXPECT_FALSE(r.correctable);
    // P Z1 P = |000><000| - |111><111| has zero trace, so h(0,1) = 0 and the residual is ||P Z1 P|| / 2.
    EXPECT_NEAR(r.residual, std::sqrt(2.0) / 2.0, 1e-12);
}

TEST(KlCheck, RejectsWrongDimension) {
    EXPECT_THROW(kl_check(repetition_code(), KrausChannel::identity_channel(4)), DimensionError);
}

TEST(DiagonalizeErrors, DiagonalInputKeepsIdentity) {
    const KrausChannel e = bit_flips();
    const DiagonalizedErrors d = diagonalize_errors(kl_check(repetition_code(), e), e);
    EXPECT_LE(frobenius(d.rotation - identity(4)), 0.0);
    for (std::size_t k = 0; k < 4; ++k) {
        EXPECT_LE(frobenius(d.errors[k] - e[k]), 0.0);
    }
}

TEST(DiagonalizeErrors, DegenerateMixtureIsAlreadyDiagonal) {
    const Matrix x1 = on_qubit(kX, 0);
    const KrausChannel e({(identity(8) + x1) / 2.0, (identity(8) - x1) / 2.0});
    const CodeSpec code = repetition_code();
    const KlReport r = kl_check(code, e);
    ASSERT_TRUE(r.correctable);
    EXPECT_LE(frobenius(r.h - 0.5 * identity(2)), 1e-12);
    const DiagonalizedErrors d = diagonalize_errors(r, e);
    EXPECT_LE(off_diagonal(kl_check(code, d.errors).h), 1e-12);
    // h is proportional to I, so the Hadamard-rotated pair {I/sqrt2, X1/sqrt2} is an equally valid diagonal form.
    const Matrix had = (Matrix(2, 2) << 1, 1, 1, -1).finished() / std::sqrt(2.0);
    const KrausChannel alt({had(0, 0) * e[0] + had(1, 0) * e[1], had(0, 1) * e[0] + had(1, 1) * e[1]});
    EXPECT_LE(frobenius(alt[0] - identity(8) / std::sqrt(2.0)), 1e-12);
    EXPECT_LE(frobenius(alt[1] - x1 / std::sqrt(2.0)), 1e-12);
    EXPECT_LE(off_diagonal(kl_check(code, alt).h), 1e-12);
}

TEST(DiagonalizeErrors, RandomMixturePreservesSpectrum) {
    Rng rng(1);
    const CodeSpec code = repetition_code();
    const std::vector<double> a = {0.7, 0.5, 0.4, 0.3};
    const std::vector<Matrix> base = {identity(8), on_qubit(kX, 0), on_qubit(kX, 1), on_qubit(kX, 2)};
    for (int t = 0; t < 10; ++t) {
        const Matrix mix = random_unitary(4, rng);
        std::vector<Matrix> mixed;
        for (Index k = 0; k < 4; ++k) {
            Matrix e = Matrix::Zero(8, 8);
            for (Index i = 0; i < 4; ++i) {
                e += mix(i, k) * a[static_cast<std::size_t>(i)] * base[static_cast<std::size_t>(i)];
            }
            mixed.push_back(e);
        }
        const KrausChannel errors(mixed);
        const KlReport r = kl_check(code, errors);
        ASSERT_TRUE(r.correctable);
        EXPECT_GT(off_diagonal(r.h), 1e-3);
        const DiagonalizedErrors d = diagonalize_errors(r, errors);
        EXPECT_LE(frobenius(d.rotation.adjoint() * d.rotation - identity(4)), 1e-12);
        const Matrix h2 = kl_check(code, d.errors).h;
        EXPECT_LE(off_diagonal(h2), 1e-10);
        for (Index k = 0; k < 4; ++k) {
            const double expect = a[static_cast<std::size_t>(k)] * a[static_cast<std::size_t>(k)];
            EXPECT_NEAR(d.spectrum(k), expect, 1e-10);
            EXPECT_NEAR(h2(k, k).real(), expect, 1e-10);
        }
    }
}

TEST(DiagonalizeErrors, RequiresCorrectableSet) {
    const KrausChannel e({identity(8) / std::sqrt(2.0), on_qubit(kZ, 0) / std::sqrt(2.0)});
    EXPECT_THROW(diagonalize_errors(kl_check(repetition_code(), e), e), NotCertifiedError);
}

TEST(Recovery, IdentityNoiseAndIdentityRecovery) {
    Rng rng(2);
    const CodeSpec code(random_unitary(4, rng).leftCols(2));
    const CorrectionReport r =
        verify_correction_uuqc(code, KrausChannel::identity_channel(4), KrausChannel::identity_channel(4));
    EXPECT_TRUE(r.full_correction);
    EXPECT_NEAR(r.q, 1.0, 1e-12);
}

TEST(Recovery, MajorityVoteUndoesBitFlips) {
    const CodeSpec code = repetition_code();
    const KrausChannel recovery = build_recovery(code, bit_flips());
    EXPECT_TRUE(is_physical(recovery).trace_preserving);
    const CorrectionReport r = verify_correction_uuqc(code, bit_flips(), recovery);
    EXPECT_TRUE(r.certificate.is_uuqc) << r.certificate.reason;
    EXPECT_TRUE(r.identity_unitary);
    EXPECT_TRUE(r.full_correction);
    EXPECT_NEAR(r.q, 1.0, 1e-9);
}

TEST(Recovery, MajorityVoteFailsOnPhaseFlips) {
    const CodeSpec code = repetition_code();
    const KrausChannel recovery = build_recovery(code, bit_flips());
    const KrausChannel noise({identity(8) / std::sqrt(2.0), on_qubit(kZ, 0) / std::sqrt(2.0)});
    const CorrectionReport r = verify_correction_uuqc(code, noise, recovery);
    EXPECT_FALSE(r.certificate.is_uuqc);
    EXPECT_FALSE(r.full_correction);
    EXPECT_LT(r.q, 1.0 - 1e-3);
    EXPECT_NEAR(r.q, 0.5, 1e-9);
}

TEST(Recovery, RandomCorrectableSets) {
    Rng rng(3);
    const CodeSpec code = repetition_code();
    const std::vector<Matrix> base = {identity(8), on_qubit(kX, 0), on_qubit(kX, 1), on_qubit(kX, 2)};
    for (int t = 0; t < 10; ++t) {
        // Random weights summing to one, mixed by a random unitary.
        std::vector<double> w(4);
        std::uniform_real_distribution<double> u(0.1, 1.0);
        double total = 0.0;
        for (auto &x : w) {
            total += (x = u(rng));
        }
        const Matrix mix = random_unitary(4, rng);
        std::vector<Matrix> mixed;
        for (Index k = 0; k < 4; ++k) {
            Matrix e = Matrix::Zero(8, 8);
            for (Index i = 0; i < 4; ++i) {
                e += mix(i, k) * std::sqrt(w[static_cast<std::size_t>(i)] / total) * base[static_cast<std::size_t>(i)];
            }
            mixed.push_back(e);
        }
        const KrausChannel errors(mixed);
        const CorrectionReport r = verify_correction_uuqc(code, errors, build_recovery(code, errors));
        EXPECT_TRUE(r.full_correction) << r.certificate.reason;
    }
}

TEST(CorrectionProbability, UnitaryNoise) {
    const CorrectionProbability p =
        unambiguous_correction_probability(CodeSpec::trivial(3), KrausChannel({random_unitary(3, 4)}));
    EXPECT_EQ(p.method, CorrectionMethod::PureExact);
    EXPECT_NEAR(p.probability, 1.0, 1e-12);
    EXPECT_TRUE(certainty_check(CodeSpec::trivial(3), KrausChannel({random_unitary(3, 4)})).is_ues);
}

TEST(CorrectionProbability, AmplitudeFilter) {
    const CodeSpec code = CodeSpec::trivial(2);
    const KrausChannel noise({diag2(1.0, std::sqrt(0.64))});
    const CorrectionProbability p = unambiguous_correction_probability(code, noise);
    EXPECT_EQ(p.method, CorrectionMethod::PureExact);
    EXPECT_NEAR(p.choi_trace, 0.82, 1e-12);
    EXPECT_NEAR(p.probability, 0.64, 1e-12);
    const double grid = oracle::filter_grid_two(1.0 / std::sqrt(2.0), 0.8 / std::sqrt(2.0), 2000, 1e-9);
    EXPECT_NEAR(p.probability, grid, 1e-4);
    const CertaintyCheck c = certainty_check(code, noise);
    EXPECT_FALSE(c.is_ues);
    EXPECT_LE(c.purity_defect, 1e-12);
    EXPECT_NEAR(c.schmidt_coefficients(0) * c.schmidt_coefficients(0), 1.0 / 1.64, 1e-12);
}

TEST(CorrectionProbability, DepolarizingHasNoHeraldedCorrection) {
    const CodeSpec code = CodeSpec::trivial(2);
    const CorrectionProbability p = unambiguous_correction_probability(code, depolarizing(2));
    EXPECT_EQ(p.method, CorrectionMethod::FilterLowerBound);
    EXPECT_LE(p.probability, 1e-3);
    EXPECT_GT(p.filters_tried, 200u);
    const CertaintyCheck c = certainty_check(code, depolarizing(2));
    EXPECT_FALSE(c.is_ues);
    EXPECT_NEAR(c.purity_defect, 0.75, 1e-12);
}

TEST(CorrectionProbability, MixedCorrectableNoiseGetsLowerBound) {
    const CorrectionProbability p = unambiguous_correction_probability(repetition_code(), bit_flips());
    EXPECT_EQ(p.method, CorrectionMethod::FilterLowerBound);
    // Filtering onto the code space keeps the no-error branch.
    EXPECT_GE(p.probability, 0.25 - 1e-9);
    EXPECT_LE(p.probability, 1.0 + 1e-9);
}

TEST(CorrectionProbability, SeedMakesSearchReproducible) {
    FilterSearchOptions opts;
    opts.seed = 9;
    const KrausChannel noise({std::sqrt(0.6) * identity(2), std::sqrt(0.4) * diag2(1.0, 0.0)});
    const double a = unambiguous_correction_probability(CodeSpec::trivial(2), noise, opts).probability;
    const double b = unambiguous_correction_probability(CodeSpec::trivial(2), noise, opts).probability;
    EXPECT_EQ(a, b);
}
