#pragma once

// Seeded random inputs for property tests and the acceptance run.

#include <cstdint>
#include <random>

#include "specflow/symbol.hpp"

namespace specflow::fixtures {

using Rng = std::mt19937_64;

/// Haar-distributed n x n unitary (QR of a complex Gaussian, phases fixed).
Matrix haar_unitary(int n, Rng& rng);

/// Orthogonal projector of the given rank onto a Haar-random subspace of C^dim.
Matrix random_projector(int dim, int rank, Rng& rng);

/// Gaussian Hermitian matrix with entries of standard deviation `scale`.
Matrix random_hermitian(int n, double scale, Rng& rng);

/// g = U_0 prod_j (I - p_j + e^{i s_j x} p_j) U_j with rank-one p_j and
/// s_j in [-max_power, max_power]. The winding of g is sum_j s_j.
struct UnitaryLoop {
  SymbolFunction symbol;
  int winding = 0;
};
UnitaryLoop random_unitary_loop(int rank, int factors, int max_power, Rng& rng);

/// Hermitian potential sum_{|k| <= bandwidth} c_k e^{ikx}, c_{-k} = c_k^*,
/// scaled so that multiplier_norm_bound is exactly `norm`.
SymbolFunction random_hermitian_potential(int rank, int bandwidth, double norm, Rng& rng);

/// Piecewise-linear potential path with `knots` uniform knots (>= 2), every
/// knot a random_hermitian_potential of the given norm plus `offset` I.
PotentialPath random_potential_path(int rank, int knots, int bandwidth, double norm, Rng& rng,
                                    double offset = 0.0);

/// Closed version: the last knot repeats the first.
PotentialPath random_potential_loop(int rank, int knots, int bandwidth, double norm, Rng& rng);

}  // namespace specflow::fixtures
