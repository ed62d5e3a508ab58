#pragma once

// Random constructions with known answers, shared by the unit tests and the
// acceptance binary.

#include <vector>

#include "uuqc/channels.hpp"
#include "uuqc/linalg.hpp"
#include "uuqc/random.hpp"
#include "uuqc/subspace.hpp"
#include "uuqc/unambiguous.hpp"

namespace build {

using namespace uuqc;

/// Random d-dimensional subspace of C^ambient.
inline SubspaceIsometry random_subspace(std::size_t ambient, std::size_t d, Rng &rng) {
    return SubspaceIsometry(random_unitary(ambient, rng).leftCols(as_index(d)));
}

/// Random Theta scaled so that Tr(Theta Theta^dagger) = p.
inline Matrix random_theta(std::size_t rows, std::size_t cols, double p, Rng &rng) {
    Matrix t = ginibre(rows, cols, rng);
    return t * (std::sqrt(p) / frobenius(t));
}

struct UumCase {
    Matrix omega;
    SubspaceIsometry v1;
    SubspaceIsometry v2;
    EnvDims env;
    Matrix unitary;  // subspace coordinates
    Matrix theta;
    double p = 0.0;
};

/// (V2 U V1^dagger) (x) Theta plus terms the subspace projections remove:
/// anything landing outside H_2^s, and anything acting on the complement of H_1^s.
inline UumCase random_uum(std::size_t d, std::size_t ambient_in, std::size_t ambient_out, EnvDims env, double p,
                          Rng &rng, double noise = 0.5) {
    UumCase c{Matrix(), random_subspace(ambient_in, d, rng), random_subspace(ambient_out, d, rng), env,
              random_unitary(d, rng), random_theta(env.out, env.in, p, rng), p};
    c.omega = tensor_product(c.v2.columns() * c.unitary * c.v1.columns().adjoint(), c.theta);
    if (noise > 0.0) {
        const Matrix q2 = identity(ambient_out) - c.v2.projector();
        const Matrix q1 = identity(ambient_in) - c.v1.projector();
        c.omega += noise * tensor_product(q2 * ginibre(ambient_out, ambient_in, rng), ginibre(env.out, env.in, rng));
        c.omega += noise * tensor_product(ginibre(ambient_out, ambient_in, rng) * q1, ginibre(env.out, env.in, rng));
    }
    return c;
}

struct UuqcCase {
    KrausChannel channel;
    SubspaceIsometry v1;
    SubspaceIsometry v2;
    EnvDims env;
    Matrix unitary;
    std::vector<Matrix> thetas;
    double q = 0.0;
};

/// Channel whose elements all mimic the same U, element k with weight ps[k]
/// and an independent random phase; optional extra elements that only act
/// outside the subspaces (zero weight).
inline UuqcCase random_uuqc(std::size_t d, std::size_t ambient_in, std::size_t ambient_out, EnvDims env,
                            const std::vector<double> &ps, Rng &rng, std::size_t silent_elements = 0) {
    UuqcCase c{KrausChannel::identity_channel(1), random_subspace(ambient_in, d, rng),
               random_subspace(ambient_out, d, rng), env, random_unitary(d, rng), {}, 0.0};
    const Matrix u_amb = c.v2.columns() * c.unitary * c.v1.columns().adjoint();
    const Matrix q2 = identity(ambient_out) - c.v2.projector();
    const Matrix q1 = identity(ambient_in) - c.v1.projector();
    std::vector<Matrix> elems;
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    for (double p : ps) {
        const Matrix theta = random_theta(env.out, env.in, p, rng) * std::polar(1.0, angle(rng));
        c.thetas.push_back(theta);
        c.q += p;
        Matrix k = tensor_product(u_amb, theta);
        k += 0.3 * tensor_product(q2 * ginibre(ambient_out, ambient_in, rng), ginibre(env.out, env.in, rng));
        elems.push_back(std::move(k));
    }
    for (std::size_t s = 0; s < silent_elements; ++s) {
        elems.push_back(tensor_product(q2 * ginibre(ambient_out, ambient_in, rng) * q1, ginibre(env.out, env.in, rng)));
    }
    c.channel = KrausChannel(ambient_in * env.in, ambient_out * env.out, std::move(elems));
    return c;
}

}  // namespace build
