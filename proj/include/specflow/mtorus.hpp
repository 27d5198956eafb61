#pragma once

// The operator d/du + D_u on a twisted two-torus: sections psi(x, u) of the
// circle bundle over u in [0, 1] glued by psi(., u + 1) = g psi(., u).

#include <vector>

#include "specflow/flow.hpp"

namespace specflow {

struct TwistedLoopSpec {
  PotentialPath path;  // D_u = -i d/dx + V_u
  SymbolFunction glue;
  bool consistent = false;  // V_1 = i g' g* + g V_0 g* within tol.gluing

  /// Validates the gluing; g = identity is an honest periodic family.
  static TwistedLoopSpec make(PotentialPath path, SymbolFunction glue, const Tolerances& tol = Tolerances::defaults());
  /// D_u = -i d/dx - n u glued by e^{inx}: flux n.
  static TwistedLoopSpec flux(int n);
  /// The open path as an operator curve at truncation K.
  OperatorCurve curve(int k, int samples = 2) const;
};

/// Crank-Nicolson discretization in u. Row j (j = 0..m-1) is
///   s (psi_{j+1} - psi_j) / h + (D_{j+1} psi_{j+1} + D_j psi_j) / 2
/// with s = +1 (d/du + D_u) or s = -1 (the adjoint orientation -d/du + D_u),
/// and at the seam psi_m = g psi_0, D_m psi_m = g D_0 psi_0. Rows live on the
/// modes |k| <= K + bandwidth(V) + bandwidth(g), so the image is exact.
struct MappingTorusOperator {
  int m_u = 0;
  int max_mode = 0;
  int rank = 1;
  int orientation = 1;
  int out_mode = 0;
  std::vector<Matrix> left;   // row j, column j
  std::vector<Matrix> right;  // row j, column j + 1 (mod m)

  Eigen::Index cols() const;
  Eigen::Index rows() const;
  /// Dense assembly (small sizes only).
  Matrix dense() const;
  /// The same discretization with the opposite orientation.
  MappingTorusOperator adjoint_orientation(const TwistedLoopSpec& spec) const;
};

/// Throws GluingInconsistent unless spec.consistent.
MappingTorusOperator build_mapping_torus(const TwistedLoopSpec& spec, int m_u, int k, int orientation = 1,
                                         const Tolerances& tol = Tolerances::defaults());

/// Number of singular values of a below sigma, by an inertia count of
/// a* a - sigma^2 through block elimination of the cyclic tridiagonal form.
int count_small_singular_values(const MappingTorusOperator& a, double sigma);

struct MappingTorusIndex {
  int index = 0;
  int kernel_dim = 0;
  int cokernel_dim = 0;
  int index_refined_u = 0;  // at (2 m_u, K)
  int index_refined_k = 0;  // at (m_u, 2 K)
  bool stable = false;
};

struct MappingTorusOptions {
  double sigma_low = 1e-3;   // numerically zero below
  double sigma_high = 1e-1;  // counts must agree up to here (a 100x gap)
  bool check_refinement = true;
};

/// dim ker(d/du + D_u) - dim ker(-d/du + D_u). Throws IllConditioned when the
/// two thresholds disagree, UnstableIndex when refinement changes the
/// index, DoublingDetected when doubling m_u changes a kernel dimension.
MappingTorusIndex mapping_torus_index(const TwistedLoopSpec& spec, int m_u, int k,
                                      const MappingTorusOptions& options = {},
                                      const Tolerances& tol = Tolerances::defaults());

/// Kernel / cokernel count of one discretization (no refinement).
int mapping_torus_nullity(const MappingTorusOperator& a, const MappingTorusOptions& options = {});

}  // namespace specflow
