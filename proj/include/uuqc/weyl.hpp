#pragma once

#include <vector>

#include "uuqc/linalg.hpp"

namespace uuqc {

/// Cyclic shift X|j> = |j+1 mod D>.
inline Matrix shift_operator(std::size_t dim) {
    Matrix x = Matrix::Zero(as_index(dim), as_index(dim));
    for (std::size_t j = 0; j < dim; ++j) {
        x(as_index((j + 1) % dim), as_index(j)) = 1.0;
    }
    return x;
}

/// Clock Z|j> = w^j |j>, w = exp(2 pi i / D).
inline Matrix clock_operator(std::size_t dim) {
    Matrix z = Matrix::Zero(as_index(dim), as_index(dim));
    for (std::size_t j = 0; j < dim; ++j) {
        z(as_index(j), as_index(j)) = std::polar(1.0, 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(dim));
    }
    return z;
}

/// X^a Z^b
inline Matrix weyl_operator(std::size_t dim, std::size_t a, std::size_t b) {
    const Matrix x = shift_operator(dim);
    const Matrix z = clock_operator(dim);
    Matrix w = identity(dim);
    for (std::size_t i = 0; i < a % dim; ++i) {
        w = w * x;
    }
    for (std::size_t i = 0; i < b % dim; ++i) {
        w = w * z;
    }
    return w;
}

/// The D^2 operators X^a Z^b, index a * D + b. Pairwise trace-orthogonal,
/// Tr(W_x^dagger W_y) = D delta_xy.
inline std::vector<Matrix> weyl_operators(std::size_t dim) {
    if (dim < 2) {
        throw DimensionError("weyl_operators: dimension must be at least 2");
    }
    std::vector<Matrix> ops;
    ops.reserve(dim * dim);
    for (std::size_t a = 0; a < dim; ++a) {
        for (std::size_t b = 0; b < dim; ++b) {
            ops.push_back(weyl_operator(dim, a, b));
        }
    }
    return ops;
}

}  // namespace uuqc
