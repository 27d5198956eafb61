#pragma once

// Common aliases, the tolerance record and the error hierarchy shared by
// every module.

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace specflow {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

/// Every numerical threshold used by the library. Operations take a
/// `const Tolerances&` defaulting to `Tolerances::defaults()`.
struct Tolerances {
  // specmat
  double hermitian = 1e-12;       // relative, ||M - M*||_max <= tol (1 + ||M||_max)
  double unitary = 1e-10;         // ||g g* - I|| per sample
  double eig_residual = 1e-9;     // relative to ||M||_2
  double eig_gram = 1e-10;
  double degeneracy = 1e-10;      // relative cluster width for the tie-break

  // flow
  double cutoff = 1e-9;           // eigenvalue-at-cutoff band
  double projector_idempotent = 1e-9;
  double projector_hermitian = 1e-10;
  double section_condition = 1e-8;
  double min_interval = 1e-6;     // bisection floor
  double lipschitz_safety = 1.5;
  int max_intervals = 200000;
  double difference_tol = 1e-8;   // numerically-zero principal cosine

  // rank decisions with a certified gap
  double rank_tol = 1e-8;
  double rank_gap = 100.0;

  // toeplitz
  double winding_invariant = 0.01;
  double winding_ambiguous = 0.1;
  int winding_min_grid = 64;

  // bundles
  double overlap_det = 1e-6;
  double neighbor_distance = 0.5;

  // eta
  double kernel = 1e-9;
  double jump_threshold = 0.5;
  double jump_ambiguity = 0.2;
  double heat_quadrature = 1e-13;

  // mtorus
  double gluing = 1e-9;

  static const Tolerances& defaults();
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SPECFLOW_ERROR(Name)              \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

SPECFLOW_ERROR(InvalidArgument);
SPECFLOW_ERROR(DimensionMismatch);
SPECFLOW_ERROR(NotHermitian);
SPECFLOW_ERROR(NotUnitary);
SPECFLOW_ERROR(EigenvalueAtCutoff);
SPECFLOW_ERROR(IllConditioned);
SPECFLOW_ERROR(NoGapFound);
SPECFLOW_ERROR(ResolutionExceeded);
SPECFLOW_ERROR(UnstableIndex);
SPECFLOW_ERROR(RoundingAmbiguous);
SPECFLOW_ERROR(RankJump);
SPECFLOW_ERROR(SingularOverlap);
SPECFLOW_ERROR(GridTooCoarse);
SPECFLOW_ERROR(ExtrapolationFailed);
SPECFLOW_ERROR(JumpAmbiguous);
SPECFLOW_ERROR(GluingInconsistent);
SPECFLOW_ERROR(DoublingDetected);
SPECFLOW_ERROR(InvalidSection);

#undef SPECFLOW_ERROR

}  // namespace specflow
