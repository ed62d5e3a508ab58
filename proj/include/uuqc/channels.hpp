#pragma once

// Quantum operations in operator-sum form. Trace-decreasing operations are
// ordinary values here; trace preservation is reported, never required.

#include <string>
#include <vector>

#include "uuqc/linalg.hpp"

namespace uuqc {

/// A quantum operation rho -> sum_k K_k rho K_k^dagger. Kraus elements are
/// kept exactly as given (no deduplication or canonical form).
class KrausChannel {
  public:
    KrausChannel(std::size_t in_dim, std::size_t out_dim, std::vector<Matrix> elements)
        : in_dim_(in_dim), out_dim_(out_dim), elements_(std::move(elements)) {
        if (in_dim_ == 0 || out_dim_ == 0) {
            throw DimensionError("KrausChannel: dimensions must be positive");
        }
        if (elements_.empty()) {
            throw InvalidArgument("KrausChannel: at least one Kraus element is required");
        }
        for (std::size_t k = 0; k < elements_.size(); ++k) {
            if (elements_[k].rows() != as_index(out_dim_) || elements_[k].cols() != as_index(in_dim_)) {
                throw DimensionError("KrausChannel: element " + std::to_string(k) + " is " +
                                     std::to_string(elements_[k].rows()) + "x" + std::to_string(elements_[k].cols()) +
                                     ", expected " + std::to_string(out_dim_) + "x" + std::to_string(in_dim_));
            }
        }
    }

    /// Channel whose dimensions are read off the first element.
    explicit KrausChannel(const std::vector<Matrix> &elements)
        : KrausChannel(elements.empty() ? 1 : static_cast<std::size_t>(elements.front().cols()),
                       elements.empty() ? 1 : static_cast<std::size_t>(elements.front().rows()), elements) {}

    static KrausChannel identity_channel(std::size_t dim) { return KrausChannel(dim, dim, {identity(dim)}); }

    static KrausChannel unitary_channel(const Matrix &u) { return KrausChannel({u}); }

    std::size_t in_dim() const { return in_dim_; }
    std::size_t out_dim() const { return out_dim_; }
    std::size_t size() const { return elements_.size(); }
    const std::vector<Matrix> &elements() const { return elements_; }
    const Matrix &operator[](std::size_t k) const { return elements_[k]; }

    /// sum_k K_k^dagger K_k
    Matrix effect_sum() const {
        Matrix s = Matrix::Zero(as_index(in_dim_), as_index(in_dim_));
        for (const auto &k : elements_) {
            s += k.adjoint() * k;
        }
        return s;
    }

  private:
    std::size_t in_dim_;
    std::size_t out_dim_;
    std::vector<Matrix> elements_;
};

struct PovmElementSet {
    std::vector<Matrix> elements;

    Matrix sum() const {
        Matrix s = Matrix::Zero(elements.front().rows(), elements.front().cols());
        for (const auto &g : elements) {
            s += g;
        }
        return s;
    }
};

inline Matrix apply(const KrausChannel &ch, const Matrix &rho) {
    if (rho.rows() != as_index(ch.in_dim()) || rho.cols() != as_index(ch.in_dim())) {
        throw DimensionError("apply: state is " + std::to_string(rho.rows()) + "x" + std::to_string(rho.cols()) +
                             ", channel expects " + std::to_string(ch.in_dim()) + "x" + std::to_string(ch.in_dim()));
    }
    Matrix out = Matrix::Zero(as_index(ch.out_dim()), as_index(ch.out_dim()));
    for (const auto &k : ch.elements()) {
        out += k * rho * k.adjoint();
    }
    return out;
}

struct PhysicalityReport {
    bool physical = false;
    bool trace_preserving = false;
    double max_eigenvalue = 0.0;  // of sum_k K_k^dagger K_k
};

inline PhysicalityReport is_physical(const KrausChannel &ch, double tol = kDefaultTolerance) {
    const Matrix s = ch.effect_sum();
    const RealVector ev = hermitian_eigenvalues(s);
    PhysicalityReport r;
    r.max_eigenvalue = ev.maxCoeff();
    r.physical = r.max_eigenvalue <= 1.0 + tol;
    r.trace_preserving = frobenius(s - identity(ch.in_dim())) <= tol;
    return r;
}

/// Unnormalized Choi state (I (x) ch)(|Phi_d><Phi_d|) with d = in_dim; the
/// reference system is the first (slow) factor. Its trace is the average
/// success weight (1/d) Tr(sum_k K_k^dagger K_k).
inline Matrix choi_state(const KrausChannel &ch) {
    const std::size_t d = ch.in_dim();
    Matrix phi = Matrix::Zero(as_index(d * d), 1);
    for (std::size_t i = 0; i < d; ++i) {
        phi(as_index(i * d + i), 0) = 1.0 / std::sqrt(static_cast<double>(d));
    }
    Matrix out = Matrix::Zero(as_index(d * ch.out_dim()), as_index(d * ch.out_dim()));
    const Matrix id = identity(d);
    for (const auto &k : ch.elements()) {
        const Matrix branch = tensor_product(id, k) * phi;
        out += branch * branch.adjoint();
    }
    return out;
}

/// `first` followed by `second`. Element index k = i * second.size() + j
/// holds second[j] * first[i].
inline KrausChannel compose(const KrausChannel &first, const KrausChannel &second) {
    if (first.out_dim() != second.in_dim()) {
        throw DimensionError("compose: first channel outputs dimension " + std::to_string(first.out_dim()) +
                             " but second expects " + std::to_string(second.in_dim()));
    }
    std::vector<Matrix> elems;
    elems.reserve(first.size() * second.size());
    for (const auto &a : first.elements()) {
        for (const auto &b : second.elements()) {
            elems.push_back(b * a);
        }
    }
    return KrausChannel(first.in_dim(), second.out_dim(), std::move(elems));
}

inline PovmElementSet povm_of(const KrausChannel &ch) {
    PovmElementSet p;
    for (const auto &k : ch.elements()) {
        p.elements.push_back(k.adjoint() * k);
    }
    return p;
}

/// I_a (x) ch, the ancilla as the slow factor.
inline KrausChannel tensor_with_identity(const KrausChannel &ch, std::size_t ancilla_dim) {
    std::vector<Matrix> elems;
    const Matrix id = identity(ancilla_dim);
    for (const auto &k : ch.elements()) {
        elems.push_back(tensor_product(id, k));
    }
    return KrausChannel(ancilla_dim * ch.in_dim(), ancilla_dim * ch.out_dim(), std::move(elems));
}

}  // namespace uuqc
