#pragma once

// Toeplitz compressions of unitary multipliers to Hardy-type sections,
// their Fredholm indices, winding numbers and the odd Chern integrals.

#include <vector>

#include "specflow/base.hpp"
#include "specflow/flow.hpp"

namespace specflow {

/// Projector onto the modes k >= 0.
SpectralSection hardy_section(const FourierTruncation& trunc);

struct ToeplitzOperator {
  Matrix matrix;           // P M_g P in the frame of Im P (rank P square)
  Matrix frame;            // orthonormal basis of Im P, dim x rank P
  SpectralSection section;
  SymbolFunction symbol;
};

/// Throws NotUnitary if g fails the unitarity bound.
ToeplitzOperator toeplitz_compress(const SpectralSection& p, const SymbolFunction& g,
                                   const Tolerances& tol = Tolerances::defaults());

struct ToeplitzIndex {
  int index = 0;
  int kernel_dim = 0;
  int cokernel_dim = 0;
  int index_doubled = 0;  // the same computation at truncation 2K
  bool stable = false;
  double gap_ratio = 0.0;  // worst singular gap over both computations
  Matrix kernel;           // orthonormal frame of ker T in the truncation space
  Matrix cokernel;         // orthonormal frame of ker T* in the truncation space
};

/// dim ker T - dim ker T*, with kernels taken on the exact image of M_g (the
/// output truncation is widened by the symbol bandwidth, so no edge rows are
/// lost). Recomputed at 2K; disagreement throws UnstableIndex, a singular
/// gap below tol.rank_gap throws IllConditioned.
ToeplitzIndex fredholm_index_detail(const ToeplitzOperator& t, const Tolerances& tol = Tolerances::defaults());
int fredholm_index(const ToeplitzOperator& t, const Tolerances& tol = Tolerances::defaults());

struct WindingData {
  int winding = 0;
  double raw_integral = 0.0;
  int grid = 0;
};

/// Trapezoid rule for (1 / 2 pi i) \oint tr(g^{-1} g') dx.
WindingData winding(const SymbolFunction& g, int grid = 512, const Tolerances& tol = Tolerances::defaults());

/// Degree-1 normalization of the odd Chern integral, fixed once against the
/// lattice Chern number of the Bott index bundle: ch_1(ind T_g) =
/// kOddChernDegree1 * I_1 with I_1 = (1/2) \int_B \int_{S^1} Tr([w_1, w_2] w_x),
/// w = g^{-1} dg. The value is -(1 / 2 pi i)^2, the degree-1 analogue of
/// ch_0 = -(1 / 2 pi i) \int tr(w_x). A single power of 2 pi i would give a
/// complex constant and cannot match.
inline constexpr double kOddChernDegree1 = 1.0 / (4.0 * kPi * kPi);

struct OddChernCochain {
  int degree = 0;               // n
  std::vector<double> values;   // per vertex (n = 0) or per plaquette (n = 1)
  double total = 0.0;           // n = 0: value at vertex 0; n = 1: sum over plaquettes
  double calibrated = 0.0;      // -total for n = 0, kOddChernDegree1 * total for n = 1
  double closedness_defect = 0.0;
};

struct OddChernOptions {
  int fiber_grid = 64;    // samples in x
  int subdivisions = 4;   // midpoint samples per plaquette side (n = 1)
  double derivative_step = 1e-4;
};

/// n = 0: winding of every vertex symbol. n = 1: per-plaquette real cochain
/// whose calibrated total approximates ch_1 of ind T_g. Throws GridTooCoarse
/// when the calibrated total is more than 0.1 from an integer.
OddChernCochain odd_chern_integral(const SymbolFamily& family, int n, const OddChernOptions& options = {},
                                   const Tolerances& tol = Tolerances::defaults());

}  // namespace specflow
