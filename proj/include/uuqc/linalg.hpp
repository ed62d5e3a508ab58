#pragma once

// Dense complex linear algebra shared by every module.
//
// Index convention for composite spaces: the first factor is the
// slowest-varying one. For A (r_a x c_a) and B (r_b x c_b) the Kronecker
// product places a(i, j) * b(k, l) at row i * r_b + k, column j * c_b + l.
// Operators on system (x) environment spaces therefore keep the system
// leg in the high digits and the environment leg in the low digits.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace uuqc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kDefaultTolerance = 1e-9;

/// Malformed arguments: wrong shapes, non-isometries, bad parameters.
class InvalidArgument : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

class DimensionError : public InvalidArgument {
  public:
    using InvalidArgument::InvalidArgument;
};

/// A decomposition failed to converge or produced non-finite values.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// An operation that requires a certified input was handed one that fails
/// certification (e.g. refining a channel that is not an unambiguous
/// unitary channel).
class NotCertifiedError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline Index as_index(std::size_t n) { return static_cast<Index>(n); }

inline Matrix identity(std::size_t n) { return Matrix::Identity(as_index(n), as_index(n)); }

/// Computational basis ket |index> of a `dim`-dimensional space.
inline Matrix basis_ket(std::size_t dim, std::size_t index) {
    if (index >= dim) {
        throw DimensionError("basis_ket: index " + std::to_string(index) + " out of range for dimension " +
                             std::to_string(dim));
    }
    Matrix k = Matrix::Zero(as_index(dim), 1);
    k(as_index(index), 0) = 1.0;
    return k;
}

inline double frobenius(const Matrix &m) { return m.norm(); }

inline bool all_finite(const Matrix &m) { return m.allFinite(); }

/// Kronecker product a (x) b.
inline Matrix tensor_product(const Matrix &a, const Matrix &b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

template <typename... Rest>
Matrix tensor_product(const Matrix &a, const Matrix &b, const Rest &...rest) {
    return tensor_product(tensor_product(a, b), rest...);
}

inline std::size_t product_of(const std::vector<std::size_t> &dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

/// Traces out every tensor factor of `m` whose position is not listed in
/// `keep`. `dims` lists the factor dimensions, slowest first. The kept
/// factors stay in their original relative order.
inline Matrix partial_trace(const Matrix &m, const std::vector<std::size_t> &dims,
                            const std::vector<std::size_t> &keep) {
    if (m.rows() != m.cols()) {
        throw DimensionError("partial_trace: matrix is not square");
    }
    if (dims.empty() || as_index(product_of(dims)) != m.rows()) {
        throw DimensionError("partial_trace: product of factor dimensions does not match matrix size");
    }
    std::vector<bool> kept(dims.size(), false);
    for (auto k : keep) {
        if (k >= dims.size()) {
            throw DimensionError("partial_trace: kept factor index out of range");
        }
        kept[k] = true;
    }

    // Split every flat index into its kept part and traced part.
    const auto n = static_cast<std::size_t>(m.rows());
    std::vector<std::size_t> kept_part(n), traced_part(n);
    for (std::size_t flat = 0; flat < n; ++flat) {
        std::size_t rem = flat, stride_kept = 1, stride_traced = 1, kp = 0, tp = 0;
        for (std::size_t f = dims.size(); f-- > 0;) {
            std::size_t digit = rem % dims[f];
            rem /= dims[f];
            if (kept[f]) {
                kp += digit * stride_kept;
                stride_kept *= dims[f];
            } else {
                tp += digit * stride_traced;
                stride_traced *= dims[f];
            }
        }
        kept_part[flat] = kp;
        traced_part[flat] = tp;
    }

    std::size_t out_dim = 1;
    for (std::size_t f = 0; f < dims.size(); ++f) {
        if (kept[f]) {
            out_dim *= dims[f];
        }
    }
    Matrix out = Matrix::Zero(as_index(out_dim), as_index(out_dim));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (traced_part[i] == traced_part[j]) {
                out(as_index(kept_part[i]), as_index(kept_part[j])) += m(as_index(i), as_index(j));
            }
        }
    }
    return out;
}

struct SvdResult {
    Matrix left;        // rows x k, orthonormal columns
    RealVector values;  // k = min(rows, cols), descending, nonnegative
    Matrix right;       // cols x k, orthonormal columns; m = left * diag(values) * right^dagger
};

inline SvdResult svd(const Matrix &m) {
    if (!all_finite(m)) {
        throw NumericalError("svd: input contains non-finite entries");
    }
    Eigen::JacobiSVD<Matrix> solver(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("svd: decomposition did not converge");
    }
    return {solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

/// Eigenvalues of a Hermitian matrix, ascending.
inline RealVector hermitian_eigenvalues(const Matrix &h) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("hermitian_eigenvalues: eigensolver did not converge");
    }
    return solver.eigenvalues();
}

struct HermitianEigen {
    RealVector values;  // ascending
    Matrix vectors;     // columns are the matching eigenvectors
};

inline HermitianEigen hermitian_eigen(const Matrix &h) {
    if (h.rows() != h.cols()) {
        throw DimensionError("hermitian_eigen: matrix is not square");
    }
    if (!all_finite(h)) {
        throw NumericalError("hermitian_eigen: input contains non-finite entries");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("hermitian_eigen: eigensolver did not converge");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

inline double hermiticity_defect(const Matrix &h) { return frobenius(h - h.adjoint()); }

/// Rearranges an operator on (sys (x) env) so that the rows are indexed by
/// (sys_out, sys_in) and the columns by (env_out, env_in). An operator of the
/// form A (x) B becomes the rank-one matrix vec(A) vec(B)^T.
inline Matrix reshuffle(const Matrix &m, std::size_t sys_out, std::size_t env_out, std::size_t sys_in,
                        std::size_t env_in) {
    if (m.rows() != as_index(sys_out * env_out) || m.cols() != as_index(sys_in * env_in)) {
        throw DimensionError("reshuffle: operator shape does not match the leg dimensions");
    }
    Matrix r(as_index(sys_out * sys_in), as_index(env_out * env_in));
    for (std::size_t so = 0; so < sys_out; ++so) {
        for (std::size_t eo = 0; eo < env_out; ++eo) {
            for (std::size_t si = 0; si < sys_in; ++si) {
                for (std::size_t ei = 0; ei < env_in; ++ei) {
                    r(as_index(so * sys_in + si), as_index(eo * env_in + ei)) =
                        m(as_index(so * env_out + eo), as_index(si * env_in + ei));
                }
            }
        }
    }
    return r;
}

struct FactoredPair {
    Matrix sys_factor;          // sys_out x sys_in, unit Frobenius norm
    Matrix env_factor;          // env_out x env_in, carries the dominant operator-Schmidt value
    double residual = 0.0;      // Frobenius norm of the part not captured by sys (x) env
    RealVector schmidt_values;  // full operator-Schmidt spectrum, descending
};

/// Best product approximation sys (x) env of `m` via the operator-Schmidt
/// decomposition. `residual` is zero exactly when `m` is a product.
inline FactoredPair factor_as_tensor(const Matrix &m, std::size_t sys_out, std::size_t env_out,
                                     std::size_t sys_in, std::size_t env_in) {
    const Matrix r = reshuffle(m, sys_out, env_out, sys_in, env_in);
    const SvdResult dec = svd(r);

    FactoredPair out;
    out.schmidt_values = dec.values;
    out.sys_factor = Matrix(as_index(sys_out), as_index(sys_in));
    out.env_factor = Matrix(as_index(env_out), as_index(env_in));
    const double top = dec.values.size() > 0 ? dec.values(0) : 0.0;
    for (std::size_t so = 0; so < sys_out; ++so) {
        for (std::size_t si = 0; si < sys_in; ++si) {
            out.sys_factor(as_index(so), as_index(si)) = dec.left(as_index(so * sys_in + si), 0);
        }
    }
    for (std::size_t eo = 0; eo < env_out; ++eo) {
        for (std::size_t ei = 0; ei < env_in; ++ei) {
            out.env_factor(as_index(eo), as_index(ei)) = top * std::conj(dec.right(as_index(eo * env_in + ei), 0));
        }
    }
    double tail = 0.0;
    for (Index k = 1; k < dec.values.size(); ++k) {
        tail += dec.values(k) * dec.values(k);
    }
    out.residual = std::sqrt(tail);
    return out;
}

/// Position (row-major) of the largest-modulus entry. Near-ties resolve to
/// the earliest position so that equal matrices pick the same entry.
inline std::pair<Index, Index> dominant_entry(const Matrix &m) {
    double best = 0.0;
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            best = std::max(best, std::abs(m(i, j)));
        }
    }
    const double cutoff = best * (1.0 - 1e-8);
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (std::abs(m(i, j)) >= cutoff) {
                return {i, j};
            }
        }
    }
    return {0, 0};
}

/// Multiplies `m` by the unit phase that makes its dominant entry real and
/// positive. Returns the applied phase.
inline Complex fix_global_phase(Matrix &m) {
    if (m.size() == 0) {
        return 1.0;
    }
    auto [i, j] = dominant_entry(m);
    const Complex v = m(i, j);
    if (std::abs(v) == 0.0) {
        return 1.0;
    }
    const Complex phase = std::conj(v) / std::abs(v);
    m *= phase;
    return phase;
}

/// |<a|b>|^2 / (<a|a><b|b>) for kets.
inline double fidelity(const Matrix &a, const Matrix &b) {
    const Complex overlap = (a.adjoint() * b)(0, 0);
    return std::norm(overlap) / (a.squaredNorm() * b.squaredNorm());
}

/// Density matrix |k><k| of a ket.
inline Matrix projector_of(const Matrix &ket) { return ket * ket.adjoint(); }

}  // namespace uuqc
