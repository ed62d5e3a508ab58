#pragma once

#include <set>
#include <string>
#include <vector>

#include "uuqc/linalg.hpp"

namespace uuqc {

/// An orthonormal basis of a subspace, stored as the columns of an
/// ambient_dim x sub_dim isometry V. The projector onto the subspace is VV^dagger.
class SubspaceIsometry {
  public:
    explicit SubspaceIsometry(Matrix columns, double tol = kDefaultTolerance) : columns_(std::move(columns)) {
        if (columns_.cols() == 0 || columns_.rows() == 0) {
            throw DimensionError("SubspaceIsometry: degenerate subspace (dimension 0)");
        }
        if (columns_.cols() > columns_.rows()) {
            throw DimensionError("SubspaceIsometry: more basis vectors than the ambient dimension");
        }
        const double defect = frobenius(columns_.adjoint() * columns_ - identity(sub_dim()));
        if (!(defect <= tol)) {
            throw InvalidArgument("SubspaceIsometry: columns are not orthonormal (defect " +
                                  std::to_string(defect) + ")");
        }
    }

    static SubspaceIsometry full(std::size_t dim) { return SubspaceIsometry(identity(dim)); }

    /// Span of the computational basis vectors listed in `indices`, in that order.
    static SubspaceIsometry basis_span(std::size_t ambient, const std::vector<std::size_t> &indices) {
        if (std::set<std::size_t>(indices.begin(), indices.end()).size() != indices.size()) {
            throw InvalidArgument("SubspaceIsometry::basis_span: repeated basis index");
        }
        Matrix v = Matrix::Zero(as_index(ambient), as_index(indices.size()));
        for (std::size_t c = 0; c < indices.size(); ++c) {
            if (indices[c] >= ambient) {
                throw DimensionError("SubspaceIsometry::basis_span: index out of range");
            }
            v(as_index(indices[c]), as_index(c)) = 1.0;
        }
        return SubspaceIsometry(std::move(v));
    }

    /// Orthonormal basis of the column span of `spanning` (singular values
    /// above `tol` count towards the rank).
    static SubspaceIsometry span_of(const Matrix &spanning, double tol = kDefaultTolerance) {
        const SvdResult dec = svd(spanning);
        Index rank = 0;
        while (rank < dec.values.size() && dec.values(rank) > tol) {
            ++rank;
        }
        if (rank == 0) {
            throw DimensionError("SubspaceIsometry::span_of: spanning set has rank 0");
        }
        return SubspaceIsometry(dec.left.leftCols(rank));
    }

    std::size_t ambient_dim() const { return static_cast<std::size_t>(columns_.rows()); }
    std::size_t sub_dim() const { return static_cast<std::size_t>(columns_.cols()); }
    const Matrix &columns() const { return columns_; }
    Matrix projector() const { return columns_ * columns_.adjoint(); }

    /// I_ancilla (x) V: the same subspace carried along with an ancilla.
    SubspaceIsometry with_ancilla(std::size_t ancilla_dim) const {
        return SubspaceIsometry(tensor_product(identity(ancilla_dim), columns_));
    }

    /// V (x) W for subspaces of two tensor factors.
    SubspaceIsometry tensor(const SubspaceIsometry &other) const {
        return SubspaceIsometry(tensor_product(columns_, other.columns_));
    }

  private:
    Matrix columns_;
};

}  // namespace uuqc
