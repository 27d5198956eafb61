#pragma once

// Fourier truncation of Dirac-type operators on the circle and the dense
// linear algebra everything else is built on.
//
// Basis ordering: index(k, a) = (k + K) * N + a for mode k in [-K, K] and
// internal component a in [0, N). The N copies of one mode are contiguous.

#include <string>

#include "specflow/core.hpp"
#include "specflow/symbol.hpp"

namespace specflow {

struct FourierTruncation {
  int max_mode = 1;     // K
  int bundle_rank = 1;  // N

  FourierTruncation() = default;
  FourierTruncation(int k, int n);

  int modes() const { return 2 * max_mode + 1; }
  int dim() const { return modes() * bundle_rank; }
  int index(int k, int a) const { return (k + max_mode) * bundle_rank + a; }
  int mode_of(int idx) const { return idx / bundle_rank - max_mode; }
  FourierTruncation with_max_mode(int k) const { return {k, bundle_rank}; }

  friend bool operator==(const FourierTruncation&, const FourierTruncation&) = default;
};

struct TruncatedOperator {
  Matrix matrix;
  FourierTruncation truncation;
  std::string label;

  /// Checks shape and the Hermitian bound; throws on failure.
  void validate(const Tolerances& tol = Tolerances::defaults()) const;
};

struct EigenDecomposition {
  RealVector values;  // ascending
  Matrix vectors;     // orthonormal columns
};

/// -i d/dx (x) I_N.
TruncatedOperator build_derivative(const FourierTruncation& trunc);

/// Block Toeplitz matrix B[j, k] = c_{j-k}, modes j in [-K_out, K_out],
/// k in [-K_in, K_in]. With K_out >= K_in + bandwidth the image is exact.
Matrix build_multiplication_rect(const SymbolFunction& symbol, int k_in, int k_out);

/// Square multiplication matrix at the truncation.
Matrix build_multiplication(const SymbolFunction& symbol, const FourierTruncation& trunc);

/// -i d/dx + M_V for a Hermitian-valued potential V.
TruncatedOperator build_dirac(const SymbolFunction& potential, const FourierTruncation& trunc,
                              const Tolerances& tol = Tolerances::defaults());

/// Rectangular -i d/dx + M_V from modes [-K_in, K_in] into [-K_out, K_out].
Matrix build_dirac_rect(const SymbolFunction& potential, int k_in, int k_out);

/// Embeds modes [-K_in, K_in] into [-K_out, K_out] (zero padding).
Matrix mode_embedding(int k_in, int k_out, int rank);

bool is_hermitian(const Matrix& m, const Tolerances& tol = Tolerances::defaults());
double unitarity_defect(const Matrix& u);

/// Hermitian eigensolver with ascending eigenvalues and a deterministic
/// eigenvector convention inside degenerate clusters: every vector is
/// phase-normalized (first entry above 1e-8 made real positive) and vectors
/// of one cluster are ordered lexicographically by (real, imag) entries.
EigenDecomposition eigh(const Matrix& m, const Tolerances& tol = Tolerances::defaults());

/// Eigenvalues only, ascending.
RealVector eigvalsh(const Matrix& m, const Tolerances& tol = Tolerances::defaults());

/// Singular values, descending.
RealVector singular_values(const Matrix& m);

/// Number of singular values strictly above tol * sigma_max; 0 for the zero
/// matrix. tol must lie in (0, 1).
int numerical_rank(const Matrix& m, double tol);

/// Rank decision with a certified gap: every singular value is either
/// <= tol * scale ("zero") or > tol * scale, and the smallest nonzero one must
/// exceed the largest zero one by gap_factor. Throws IllConditioned otherwise.
struct GapRank {
  int rank = 0;
  int nullity = 0;        // cols - rank
  int co_nullity = 0;     // rows - rank
  double largest_zero = 0.0;
  double smallest_nonzero = 0.0;
  double gap_ratio = 0.0;  // smallest_nonzero / largest_zero (inf if no zeros)
};
GapRank gap_rank(const Matrix& m, double tol, double gap_factor, double scale = -1.0);

/// U M U*, requiring U unitary within tol.unitary.
Matrix conjugate(const Matrix& m, const Matrix& u, const Tolerances& tol = Tolerances::defaults());

/// Orthonormal basis of the range of an orthogonal projector.
Matrix projector_frame(const Matrix& p);

/// Orthogonal projector onto span of the columns of an orthonormal frame.
Matrix frame_projector(const Matrix& frame);

}  // namespace specflow
