#pragma once

// Matrix-valued functions on the circle, stored by their Fourier
// coefficients: g(x) = sum_k c_k e^{ikx}, c_k an N x N complex matrix.

#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "specflow/core.hpp"

namespace specflow {

class SymbolFunction {
 public:
  SymbolFunction() = default;

  /// Coefficient form. Zero matrices are dropped; all must be rank x rank.
  static SymbolFunction from_modes(int rank, std::map<int, Matrix> modes, bool unitary_flag = false);

  /// Uniform samples g(2 pi j / M), j = 0..M-1, projected to |k| <= max_mode
  /// by the discrete Fourier transform. max_mode < 0 keeps |k| < M/2.
  static SymbolFunction from_samples(const std::vector<Matrix>& samples, int max_mode = -1,
                                     bool unitary_flag = false);

  static SymbolFunction constant(const Matrix& value, bool unitary_flag = false);
  static SymbolFunction scalar_constant(cplx value, int rank = 1);
  /// e^{inx} I_rank (unitary).
  static SymbolFunction monomial(int n, int rank = 1);
  /// Block diagonal direct sum.
  static SymbolFunction block_diagonal(const std::vector<SymbolFunction>& blocks);

  int rank() const { return rank_; }
  bool unitary_flag() const { return unitary_; }
  void set_unitary_flag(bool flag) { unitary_ = flag; }
  const std::map<int, Matrix>& modes() const { return modes_; }

  /// c_k, zero if absent.
  Matrix coefficient(int k) const;
  /// max |k| over stored modes (0 for constants and the zero symbol).
  int bandwidth() const;
  int min_mode() const;
  int max_mode() const;

  Matrix operator()(double x) const;
  /// Pointwise derivative d/dx.
  SymbolFunction derivative() const;
  /// Pointwise adjoint g(x)^*: c_k -> c_{-k}^*.
  SymbolFunction adjoint() const;

  SymbolFunction operator*(const SymbolFunction& other) const;
  SymbolFunction operator+(const SymbolFunction& other) const;
  SymbolFunction operator-(const SymbolFunction& other) const;
  SymbolFunction scaled(cplx factor) const;
  /// Keeps |k| <= max_mode.
  SymbolFunction truncated(int max_mode) const;

  /// Largest coefficient-wise distance max_k ||c_k - d_k||_max.
  double distance(const SymbolFunction& other) const;

  /// c_{-k} = c_k^* within tol (pointwise Hermitian values).
  bool is_hermitian(double tol = 1e-12) const;
  /// max_x ||g g^* - I|| over a uniform grid of the given size.
  double unitarity_defect(int grid = 256) const;
  bool is_unitary(double tol, int grid = 256) const { return unitarity_defect(grid) <= tol; }

 private:
  int rank_ = 1;
  bool unitary_ = false;
  std::map<int, Matrix> modes_;
};

/// Potential V_t of the Dirac-type operator -i d/dx + V_t, interpolated
/// linearly in the symbol between knots (t_0 = 0 < ... < t_m = 1).
class PotentialPath {
 public:
  PotentialPath() = default;
  explicit PotentialPath(std::vector<std::pair<double, SymbolFunction>> knots);
  /// Two-knot path V_t = (1 - t) V_0 + t V_1.
  static PotentialPath linear(const SymbolFunction& v0, const SymbolFunction& v1);
  static PotentialPath constant(const SymbolFunction& v);

  SymbolFunction operator()(double t) const;
  int rank() const;
  /// max bandwidth over knots.
  int bandwidth() const;
  /// Largest knot-to-knot slope max ||V_{i+1} - V_i|| / (t_{i+1} - t_i), measured
  /// coefficient-wise through the l1 norm of coefficient spectral norms (an
  /// upper bound on the multiplication operator norm).
  double lipschitz_bound() const;
  const std::vector<std::pair<double, SymbolFunction>>& knots() const { return knots_; }

 private:
  std::vector<std::pair<double, SymbolFunction>> knots_;
};

/// Potential of g D g^{-1} for D = -i d/dx + V and unitary g:
/// i g' g^* + g V g^*.
SymbolFunction conjugated_potential(const SymbolFunction& g, const SymbolFunction& v);

/// Upper bound on the operator norm of multiplication by the symbol:
/// sum_k ||c_k||_2.
double multiplier_norm_bound(const SymbolFunction& s);

}  // namespace specflow
