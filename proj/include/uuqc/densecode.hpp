#pragma once

// Unambiguous dense coding over a partially entangled pure state
// |E_D> = sum_i lambda_i |i>|i> when every message must get through with the
// same probability. Joint kets are ordered (Bob's half, Alice's half); Alice
// encodes message x with A_x on her half and sends it to Bob.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "uuqc/linalg.hpp"
#include "uuqc/random.hpp"
#include "uuqc/weyl.hpp"

namespace uuqc {

class SharedState {
  public:
    /// Schmidt coefficients lambda_1 >= ... >= lambda_D > 0 with sum lambda_i^2 = 1.
    explicit SharedState(std::vector<double> lambdas, double tol = 1e-12) : lambdas_(std::move(lambdas)) {
        if (lambdas_.size() < 2) {
            throw InvalidArgument("SharedState: Schmidt rank must be at least 2");
        }
        double norm2 = 0.0;
        for (std::size_t i = 0; i < lambdas_.size(); ++i) {
            if (!(lambdas_[i] > 0.0)) {
                throw InvalidArgument("SharedState: Schmidt coefficients must be strictly positive");
            }
            if (i > 0 && lambdas_[i] > lambdas_[i - 1]) {
                throw InvalidArgument("SharedState: Schmidt coefficients must be in descending order");
            }
            norm2 += lambdas_[i] * lambdas_[i];
        }
        if (!(std::abs(norm2 - 1.0) <= tol)) {
            throw InvalidArgument("SharedState: squared Schmidt coefficients sum to " + std::to_string(norm2) +
                                  ", expected 1");
        }
    }

    /// From squared coefficients lambda_i^2.
    static SharedState from_squared(const std::vector<double> &lambda2, double tol = 1e-12) {
        std::vector<double> l;
        for (double v : lambda2) {
            l.push_back(v > 0.0 ? std::sqrt(v) : v);
        }
        return SharedState(std::move(l), tol);
    }

    static SharedState maximally_entangled(std::size_t rank) {
        return SharedState(std::vector<double>(rank, 1.0 / std::sqrt(static_cast<double>(rank))));
    }

    std::size_t rank() const { return lambdas_.size(); }
    const std::vector<double> &lambdas() const { return lambdas_; }
    double smallest() const { return lambdas_.back(); }

    Matrix ket() const {
        const std::size_t d = rank();
        Matrix e = Matrix::Zero(as_index(d * d), 1);
        for (std::size_t i = 0; i < d; ++i) {
            e(as_index(i * d + i), 0) = lambdas_[i];
        }
        return e;
    }

    /// diag(lambda_1, ..., lambda_D)
    Matrix tilde() const {
        Matrix t = Matrix::Zero(as_index(rank()), as_index(rank()));
        for (std::size_t i = 0; i < rank(); ++i) {
            t(as_index(i), as_index(i)) = lambdas_[i];
        }
        return t;
    }

  private:
    std::vector<double> lambdas_;
};

/// Maximal equal-probability success D * lambda_D^2.
inline double capacity(const SharedState &state) {
    return static_cast<double>(state.rank()) * state.smallest() * state.smallest();
}

/// (I_bob (x) A_x)|E_D>
inline Matrix encoded_state(const SharedState &state, const Matrix &encoder) {
    return tensor_product(identity(state.rank()), encoder) * state.ket();
}

struct DenseCodingProtocol {
    std::vector<Matrix> encoders;              // A_x, x = 0..D^2-1
    Matrix filter;                             // Bob's distillation Kraus operator K (success branch)
    std::vector<Matrix> discrimination_basis;  // orthonormal kets on (Bob, Alice)
};

/// Weyl encoders, the one-shot distillation filter K = sum_i (lambda_D/lambda_i)|i><i|,
/// and the basis (I (x) A_x)|Phi_D> to read the message after a successful filter.
inline DenseCodingProtocol optimal_protocol(const SharedState &state, double tol = kDefaultTolerance) {
    const std::size_t d = state.rank();
    DenseCodingProtocol p;
    p.encoders = weyl_operators(d);
    p.filter = Matrix::Zero(as_index(d), as_index(d));
    for (std::size_t i = 0; i < d; ++i) {
        p.filter(as_index(i), as_index(i)) = state.smallest() / state.lambdas()[i];
    }
    const Matrix k = tensor_product(p.filter, identity(d));
    Matrix gram(as_index(d * d), as_index(d * d));
    for (const auto &a : p.encoders) {
        Matrix b = k * encoded_state(state, a);
        p.discrimination_basis.push_back(b / b.norm());
    }
    for (std::size_t x = 0; x < d * d; ++x) {
        for (std::size_t y = 0; y < d * d; ++y) {
            gram(as_index(x), as_index(y)) = (p.discrimination_basis[x].adjoint() * p.discrimination_basis[y])(0, 0);
        }
    }
    if (frobenius(gram - identity(d * d)) > tol) {
        throw NumericalError("optimal_protocol: discrimination states are not orthonormal");
    }
    return p;
}

/// Bob's full operation as one Kraus operator: sum_y |y><b_y| (K (x) I).
inline Matrix bob_operator(const DenseCodingProtocol &protocol) {
    const Index dim = protocol.discrimination_basis.front().rows();
    const auto d = static_cast<std::size_t>(protocol.filter.rows());
    Matrix stack(as_index(protocol.discrimination_basis.size()), dim);
    for (std::size_t y = 0; y < protocol.discrimination_basis.size(); ++y) {
        stack.row(as_index(y)) = protocol.discrimination_basis[y].adjoint();
    }
    return stack * tensor_product(protocol.filter, identity(d));
}

struct DenseCodingReport {
    std::size_t trials = 0;
    std::vector<std::size_t> sent;       // per message
    std::vector<std::size_t> delivered;  // per message, filter passed and decoded
    std::size_t decode_errors = 0;       // decoded message differs from the sent one
    std::size_t filter_failures = 0;

    double pooled_rate() const {
        std::size_t ok = 0;
        for (auto v : delivered) {
            ok += v;
        }
        return trials == 0 ? 0.0 : static_cast<double>(ok) / static_cast<double>(trials);
    }

    std::vector<double> rates() const {
        std::vector<double> r;
        for (std::size_t x = 0; x < sent.size(); ++x) {
            r.push_back(sent[x] == 0 ? 0.0 : static_cast<double>(delivered[x]) / static_cast<double>(sent[x]));
        }
        return r;
    }
};

/// Monte Carlo of the protocol: uniform message, Alice's encoding, Bob's
/// two-outcome filter {K, sqrt(I - K^dagger K)} sampled by the Born rule, then
/// a projective measurement in the discrimination basis on success.
inline DenseCodingReport simulate(const SharedState &state, const DenseCodingProtocol &protocol, std::size_t trials,
                                  std::uint64_t seed) {
    if (trials == 0) {
        throw InvalidArgument("simulate: trials must be at least 1");
    }
    const std::size_t d = state.rank();
    const std::size_t messages = protocol.encoders.size();
    if (messages != protocol.discrimination_basis.size() || messages == 0) {
        throw DimensionError("simulate: need one discrimination state per message");
    }
    const Matrix k = tensor_product(protocol.filter, identity(d));

    // Born probabilities per message: filter success, then outcome distribution.
    std::vector<double> pass(messages);
    std::vector<std::vector<double>> outcome_cdf(messages);
    for (std::size_t x = 0; x < messages; ++x) {
        const Matrix filtered = k * encoded_state(state, protocol.encoders[x]);
        pass[x] = filtered.squaredNorm();
        double acc = 0.0;
        for (const auto &b : protocol.discrimination_basis) {
            acc += pass[x] > 0.0 ? std::norm((b.adjoint() * filtered)(0, 0)) / pass[x] : 0.0;
            outcome_cdf[x].push_back(acc);
        }
    }

    Rng rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, messages - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    DenseCodingReport r;
    r.trials = trials;
    r.sent.assign(messages, 0);
    r.delivered.assign(messages, 0);
    for (std::size_t t = 0; t < trials; ++t) {
        const std::size_t x = pick(rng);
        ++r.sent[x];
        if (!(unit(rng) < pass[x])) {
            ++r.filter_failures;
            continue;
        }
        const double u = unit(rng) * outcome_cdf[x].back();
        std::size_t y = 0;
        while (y + 1 < messages && outcome_cdf[x][y] <= u) {
            ++y;
        }
        if (y == x) {
            ++r.delivered[x];
        } else {
            ++r.decode_errors;
        }
    }
    return r;
}

/// Encoders as kets: column x holds A~_x = sum_ij (A_x)_ij |j>|i>, the bra
/// index moved to the first leg. (E~_D (x) I) A~_x is the encoded state.
inline Matrix vectorized_encoders(const std::vector<Matrix> &encoders, std::size_t d) {
    Matrix a(as_index(d * d), as_index(encoders.size()));
    for (std::size_t x = 0; x < encoders.size(); ++x) {
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                a(as_index(j * d + i), as_index(x)) = encoders[x](as_index(i), as_index(j));
            }
        }
    }
    return a;
}

struct BoundCheck {
    Complex r = 0.0;
    double success = 0.0;   // |r|^2
    double capacity = 0.0;  // D lambda_D^2
    bool form_holds = false;  // B (E~ (x) I) A~ = r I
    double form_residual = 0.0;
    bool within_bound = false;
    bool trace_condition = false;  // tr_2(A~ A~^dagger) <= D^2 I
    double trace_condition_max = 0.0;
    bool encoders_valid = false;  // every A_x^dagger A_x <= I
    bool bob_valid = false;       // B^dagger B <= I

    bool verdict() const { return form_holds && within_bound && trace_condition && encoders_valid && bob_valid; }
};

namespace detail {

inline void check_dense_coding_dims(const SharedState &state, const std::vector<Matrix> &encoders) {
    const std::size_t d = state.rank();
    if (encoders.size() != d * d) {
        throw DimensionError("dense coding needs D^2 = " + std::to_string(d * d) + " encoders, got " +
                             std::to_string(encoders.size()));
    }
    for (const auto &a : encoders) {
        if (a.rows() != as_index(d) || a.cols() != as_index(d)) {
            throw DimensionError("dense coding encoders must be D x D");
        }
    }
}

}  // namespace detail

/// Checks a protocol (encoders A_x, Bob's Kraus operator B) against the
/// equal-probability form B (E~_D (x) I) A~ = r I and the bound |r|^2 <= D lambda_D^2.
inline BoundCheck verify_protocol_bound(const SharedState &state, const std::vector<Matrix> &encoders,
                                        const Matrix &bob, double tol = kDefaultTolerance) {
    detail::check_dense_coding_dims(state, encoders);
    const std::size_t d = state.rank();
    if (bob.rows() != as_index(d * d) || bob.cols() != as_index(d * d)) {
        throw DimensionError("verify_protocol_bound: Bob's operator must be D^2 x D^2");
    }
    BoundCheck c;
    c.capacity = capacity(state);

    c.encoders_valid = true;
    for (const auto &a : encoders) {
        if (hermitian_eigenvalues(a.adjoint() * a).maxCoeff() > 1.0 + tol) {
            c.encoders_valid = false;
        }
    }
    c.bob_valid = hermitian_eigenvalues(bob.adjoint() * bob).maxCoeff() <= 1.0 + tol;

    const Matrix a_tilde = vectorized_encoders(encoders, d);
    const Matrix m = bob * tensor_product(state.tilde(), identity(d)) * a_tilde;
    c.r = m.trace() / static_cast<double>(d * d);
    c.form_residual = frobenius(m - c.r * identity(d * d));
    c.form_holds = c.form_residual <= tol;
    c.success = std::norm(c.r);
    c.within_bound = c.success <= c.capacity + tol;

    const Matrix reduced = partial_trace(a_tilde * a_tilde.adjoint(), {d, d}, {0});
    c.trace_condition_max = hermitian_eigenvalues(reduced).maxCoeff();
    c.trace_condition = c.trace_condition_max <= static_cast<double>(d * d) + tol;
    return c;
}

/// For fixed encoders, the Bob operator of the required form with the largest
/// |r| allowed by B^dagger B <= I: B = M^{-1} / ||M^{-1}||_2 with M = (E~ (x) I) A~.
inline Matrix max_form_bob(const SharedState &state, const std::vector<Matrix> &encoders) {
    detail::check_dense_coding_dims(state, encoders);
    const std::size_t d = state.rank();
    const Matrix m = tensor_product(state.tilde(), identity(d)) * vectorized_encoders(encoders, d);
    Eigen::FullPivLU<Matrix> lu(m);
    if (!lu.isInvertible()) {
        throw NumericalError("max_form_bob: encoded states are linearly dependent");
    }
    const Matrix inv = lu.inverse();
    return inv / svd(inv).values(0);
}

}  // namespace uuqc
