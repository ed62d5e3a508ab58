#pragma once

#include <cstdint>
#include <random>

#include "uuqc/linalg.hpp"

namespace uuqc {

using Rng = std::mt19937_64;

/// Matrix of i.i.d. standard complex Gaussians.
inline Matrix ginibre(std::size_t rows, std::size_t cols, Rng &rng) {
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    Matrix g(as_index(rows), as_index(cols));
    for (Index i = 0; i < g.rows(); ++i) {
        for (Index j = 0; j < g.cols(); ++j) {
            const double re = normal(rng);
            const double im = normal(rng);
            g(i, j) = Complex(re, im);
        }
    }
    return g;
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the diagonal of R
/// made real positive.
inline Matrix random_unitary(std::size_t dim, Rng &rng) {
    if (dim == 0) {
        throw DimensionError("random_unitary: dimension must be positive");
    }
    const Matrix g = ginibre(dim, dim, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * identity(dim);
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index j = 0; j < q.cols(); ++j) {
        const Complex d = r(j, j);
        const double mag = std::abs(d);
        if (mag > 0.0) {
            q.col(j) *= d / mag;
        }
    }
    return q;
}

inline Matrix random_unitary(std::size_t dim, std::uint64_t seed) {
    Rng rng(seed);
    return random_unitary(dim, rng);
}

/// Haar-random unit ket.
inline Matrix random_ket(std::size_t dim, Rng &rng) {
    if (dim == 0) {
        throw DimensionError("random_ket: dimension must be positive");
    }
    Matrix k = ginibre(dim, 1, rng);
    return k / k.norm();
}

inline Matrix random_ket(std::size_t dim, std::uint64_t seed) {
    Rng rng(seed);
    return random_ket(dim, rng);
}

/// Random density matrix of the given rank (trace one).
inline Matrix random_density(std::size_t dim, Rng &rng, std::size_t rank = 0) {
    if (rank == 0) {
        rank = dim;
    }
    const Matrix g = ginibre(dim, rank, rng);
    Matrix rho = g * g.adjoint();
    return rho / rho.trace().real();
}

/// Random matrix with entries of modulus at most one.
inline Matrix random_bounded(std::size_t rows, std::size_t cols, Rng &rng) {
    std::uniform_real_distribution<double> radius(0.0, 1.0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    Matrix m(as_index(rows), as_index(cols));
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            m(i, j) = std::polar(radius(rng), angle(rng));
        }
    }
    return m;
}

/// Random contraction (largest singular value `scale` <= 1).
inline Matrix random_contraction(std::size_t rows, std::size_t cols, Rng &rng, double scale = 1.0) {
    Matrix g = ginibre(rows, cols, rng);
    const double top = svd(g).values(0);
    return g * (scale / top);
}

}  // namespace uuqc
