#include <gtest/gtest.h>

#include "oracles.hpp"
#include "uuqc/channels.hpp"
#include "uuqc/random.hpp"
#include "uuqc/weyl.hpp"

using namespace uuqc;

namespace {

const Matrix kX = (Matrix(2, 2) << 0, 1, 1, 0).finished();

Matrix diag2(double a, double b) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

KrausChannel random_channel(std::size_t dim, std::size_t n, Rng &rng) {
    // Stacked isometry cut into blocks gives a trace-preserving channel.
    const Matrix v = random_unitary(dim * n, rng).leftCols(as_index(dim));
    std::vector<Matrix> ks;
    for (std::size_t k = 0; k < n; ++k) {
        ks.push_back(v.middleRows(as_index(k * dim), as_index(dim)));
    }
    return KrausChannel(std::move(ks));
}

KrausChannel depolarizing(std::size_t d) {
    std::vector<Matrix> ks;
    for (const auto &w : weyl_operators(d)) {
        ks.push_back(w / static_cast<double>(d));
    }
    return KrausChannel(std::move(ks));
}

}  // namespace

TEST(Channel, RejectsInconsistentElements) {
    EXPECT_THROW(KrausChannel(2, 2, {identity(2), identity(3)}), DimensionError);
    EXPECT_THROW(KrausChannel(2, 2, {}), InvalidArgument);
}

TEST(Apply, IdentityChannel) {
    Rng rng(1);
    const Matrix rho = random_density(3, rng);
    EXPECT_LE(frobenius(uuqc::apply(KrausChannel::identity_channel(3), rho) - rho), 0.0);
}

TEST(Apply, UnitaryConjugation) {
    const Matrix u = random_unitary(2, 5);
    const Matrix zero = basis_ket(2, 0) * basis_ket(2, 0).adjoint();
    EXPECT_LE(frobenius(uuqc::apply(KrausChannel::unitary_channel(u), zero) - u * zero * u.adjoint()), 1e-15);
}

TEST(Apply, BitFlipMixture) {
    const KrausChannel ch({std::sqrt(0.7) * identity(2), std::sqrt(0.3) * kX});
    const Matrix zero = basis_ket(2, 0) * basis_ket(2, 0).adjoint();
    EXPECT_LE(frobenius(uuqc::apply(ch, zero) - diag2(0.7, 0.3)), 1e-15);
}

TEST(Apply, MatchesOracleOnRandomChannels) {
    Rng rng(2);
    for (int t = 0; t < 10; ++t) {
        const KrausChannel ch = random_channel(3, 3, rng);
        const Matrix rho = random_density(3, rng);
        const Matrix out = uuqc::apply(ch, rho);
        EXPECT_LE(frobenius(out - oracle::apply(ch.elements(), rho)), 1e-13);
        EXPECT_NEAR(out.trace().real(), 1.0, 1e-12);
    }
}

TEST(Physicality, Cases) {
    const PhysicalityReport id = is_physical(KrausChannel::identity_channel(2));
    EXPECT_TRUE(id.physical);
    EXPECT_TRUE(id.trace_preserving);

    const PhysicalityReport big = is_physical(KrausChannel({1.1 * identity(2)}));
    EXPECT_FALSE(big.physical);
    EXPECT_NEAR(big.max_eigenvalue, 1.21, 1e-12);

    const PhysicalityReport filter = is_physical(KrausChannel({diag2(1.0, std::sqrt(1.0 - 0.36))}));
    EXPECT_TRUE(filter.physical);
    EXPECT_FALSE(filter.trace_preserving);
    EXPECT_NEAR(filter.max_eigenvalue, 1.0, 1e-12);
}

TEST(Choi, IdentityIsMaximallyEntangled) {
    Matrix phi = Matrix::Zero(4, 1);
    phi(0, 0) = phi(3, 0) = 1.0 / std::sqrt(2.0);
    EXPECT_LE(frobenius(choi_state(KrausChannel::identity_channel(2)) - phi * phi.adjoint()), 1e-15);
}

TEST(Choi, DepolarizingIsMaximallyMixed) {
    for (std::size_t d : {2u, 3u}) {
        const Matrix c = choi_state(depolarizing(d));
        EXPECT_LE(frobenius(c - identity(d * d) / static_cast<double>(d * d)), 1e-14);
    }
}

TEST(Choi, AmplitudeFilter) {
    const Matrix c = choi_state(KrausChannel({diag2(1.0, 0.8)}));
    Matrix expect = Matrix::Zero(4, 1);
    expect(0, 0) = 1.0 / std::sqrt(2.0);
    expect(3, 0) = 0.8 / std::sqrt(2.0);
    EXPECT_LE(frobenius(c - expect * expect.adjoint()), 1e-15);
    EXPECT_NEAR(c.trace().real(), 0.82, 1e-15);
}

TEST(Choi, ReproducesChannelAction) {
    // E(rho) = d Tr_1[(rho^T (x) I) J] for J the Choi state.
    Rng rng(3);
    const KrausChannel ch = random_channel(2, 3, rng);
    const Matrix j = choi_state(ch);
    const Matrix rho = random_density(2, rng);
    const Matrix via_choi = 2.0 * oracle::trace_first(tensor_product(rho.transpose(), identity(2)) * j, 2, 2);
    EXPECT_LE(frobenius(via_choi - uuqc::apply(ch, rho)), 1e-13);
}

TEST(Compose, IdentityFirst) {
    Rng rng(4);
    const KrausChannel ch = random_channel(2, 2, rng);
    const KrausChannel c = compose(KrausChannel::identity_channel(2), ch);
    const Matrix rho = random_density(2, rng);
    EXPECT_LE(frobenius(uuqc::apply(c, rho) - uuqc::apply(ch, rho)), 1e-14);
}

TEST(Compose, BitFlipTwiceIsIdentity) {
    const KrausChannel c = compose(KrausChannel({kX}), KrausChannel({kX}));
    ASSERT_EQ(c.size(), 1u);
    EXPECT_LE(frobenius(c[0] - identity(2)), 0.0);
}

TEST(Compose, MatchesSequentialApplication) {
    Rng rng(5);
    const KrausChannel a = random_channel(2, 2, rng);
    const KrausChannel b = random_channel(2, 2, rng);
    const KrausChannel c = compose(a, b);
    EXPECT_EQ(c.size(), 4u);
    EXPECT_LE(frobenius(c[1] - b[1] * a[0]), 0.0);
    for (int t = 0; t < 20; ++t) {
        const Matrix rho = random_density(2, rng);
        EXPECT_LE(frobenius(uuqc::apply(c, rho) - uuqc::apply(b, uuqc::apply(a, rho))), 1e-10);
    }
}

TEST(Compose, RejectsDimensionMismatch) {
    EXPECT_THROW(compose(KrausChannel::identity_channel(2), KrausChannel::identity_channel(3)), DimensionError);
}

TEST(Povm, UnitaryGivesIdentity) {
    const PovmElementSet p = povm_of(KrausChannel::unitary_channel(random_unitary(3, 7)));
    ASSERT_EQ(p.elements.size(), 1u);
    EXPECT_LE(frobenius(p.elements[0] - identity(3)), 1e-14);
}

TEST(Povm, BitFlipMixture) {
    const PovmElementSet p = povm_of(KrausChannel({std::sqrt(0.7) * identity(2), std::sqrt(0.3) * kX}));
    EXPECT_LE(frobenius(p.elements[0] - 0.7 * identity(2)), 1e-15);
    EXPECT_LE(frobenius(p.elements[1] - 0.3 * identity(2)), 1e-15);
}

TEST(Povm, FilterCompletion) {
    const Matrix k = diag2(1.0, 0.5);
    const Matrix rest = diag2(0.0, std::sqrt(0.75));
    const PovmElementSet p = povm_of(KrausChannel({k, rest}));
    EXPECT_LE(frobenius(p.elements[0] - diag2(1.0, 0.25)), 1e-15);
    EXPECT_LE(frobenius(p.elements[1] - diag2(0.0, 0.75)), 1e-15);
    EXPECT_LE(frobenius(p.sum() - identity(2)), 1e-15);
}

TEST(Povm, RandomChannelsSumToIdentity) {
    Rng rng(6);
    for (int t = 0; t < 10; ++t) {
        EXPECT_LE(frobenius(povm_of(random_channel(3, 4, rng)).sum() - identity(3)), 1e-12);
    }
}

TEST(TensorWithIdentity, ActsOnSecondFactor) {
    Rng rng(8);
    const KrausChannel ch = random_channel(2, 2, rng);
    const KrausChannel ext = tensor_with_identity(ch, 3);
    EXPECT_EQ(ext.in_dim(), 6u);
    const Matrix sigma = random_density(3, rng);
    const Matrix rho = random_density(2, rng);
    EXPECT_LE(frobenius(uuqc::apply(ext, tensor_product(sigma, rho)) - tensor_product(sigma, uuqc::apply(ch, rho))), 1e-13);
}
