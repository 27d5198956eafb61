#pragma once

// Eta invariants of Dirac-type operators on the circle, the reduced eta
// variation formula for spectral flow, and the degree-0 eta form attached to
// a threshold section.

#include <string>
#include <vector>

#include "specflow/flow.hpp"

namespace specflow {

enum class EtaMethod { hurwitz, heat_extrapolation };

/// How the finite spectrum handed to eta_heat continues past its edge.
///   symmetric: the omitted tail is symmetric and contributes 0, so the heat
///     integral runs over the given spectrum from s = 0.
///   lattice_continuation: the spectrum is a window of an infinite spectrum;
///     the integral starts where the window edge is invisible and the small-s
///     part is extrapolated with an odd polynomial.
enum class TailModel { symmetric, lattice_continuation };

struct EtaValue {
  double eta = 0.0;
  int kernel_dim = 0;
  double reduced = 0.0;  // (eta + kernel_dim) / 2
  EtaMethod method = EtaMethod::hurwitz;
  std::string regularization;
  int spectrum_size = 0;
  double error_estimate = 0.0;

  static EtaValue make(double eta, int kernel_dim, EtaMethod method, std::string regularization);
};

/// eta(-i d/dx + a) = zeta(0, a) - zeta(0, 1 - a) for a in (0, 1).
EtaValue eta_shifted_derivative(double a);

/// Reduced eta of -i d/dx + a for any real a (closed form, kernel at integers).
double reduced_eta_shifted_closed_form(double a);

struct HeatOptions {
  TailModel tail = TailModel::lattice_continuation;
  double relative_tolerance = 1e-13;
  double fit_tolerance = 1e-7;  // residual allowed in the small-s extrapolation
};

/// (2 / sqrt(pi)) \int_0^inf sum_lambda lambda e^{-s^2 lambda^2} ds over the
/// nonzero eigenvalues; |lambda| <= tol.kernel counts as kernel. Throws
/// ExtrapolationFailed when the lattice fit does not converge.
EtaValue eta_heat(const RealVector& spectrum, const HeatOptions& options = {},
                  const Tolerances& tol = Tolerances::defaults());
EtaValue eta_heat(const TruncatedOperator& op, const HeatOptions& options = {},
                  const Tolerances& tol = Tolerances::defaults());

/// {k + a : |k| <= half_width}.
RealVector shifted_lattice(double a, int half_width);

/// Reduced-eta samples along a curve.
struct EtaProfile {
  std::vector<double> t;
  std::vector<double> reduced;
};

/// Closed-form profile of -i d/dx + a(t), a linear from a0 to a1.
EtaProfile shifted_derivative_profile(double a0, double a1, int samples);

/// Profile from eta_heat of a curve's sampled spectra.
EtaProfile heat_profile(const OperatorCurve& curve, const HeatOptions& options = {},
                        const Tolerances& tol = Tolerances::defaults());

struct EtaFlow {
  int sf = 0;
  double integral = 0.0;   // -\int d(reduced eta), smooth part
  double endpoints = 0.0;  // reduced(1) - reduced(0)
  int jumps = 0;
};

/// sf = -\int (smooth part of d reduced eta) + reduced(1) - reduced(0). Steps
/// larger than tol.jump_threshold are integer jumps; the smooth part of a jump
/// step is estimated from the neighbouring steps. Needs >= 64 samples. Throws
/// JumpAmbiguous when a jump is farther than tol.jump_ambiguity from an integer.
EtaFlow sf_via_eta(const EtaProfile& profile, const Tolerances& tol = Tolerances::defaults());

/// Finite-rank perturbation A moving every eigenvalue in [0, threshold)
/// below zero: the i-th such eigenvalue (ascending) becomes lambda_i - shifts[i].
struct MPOperatorSpec {
  double threshold = 0.0;
  std::vector<double> shifts;

  /// Shifts every flipped eigenvalue to lambda - (threshold + margin).
  static MPOperatorSpec uniform(const RealVector& spectrum, double threshold, double margin = 0.5);
};

/// Number of eigenvalues in [0, threshold) (kernel included).
int flipped_count(const RealVector& spectrum, double threshold, const Tolerances& tol = Tolerances::defaults());

/// Degree-0 eta form: reduced eta of D + A, where the APS projection of D + A
/// is the threshold section of D. The eta change is the exact telescoping sum
/// of sign changes, added to the eta of D given as base. Throws
/// InvalidArgument if D + A keeps an eigenvalue in (-tol.kernel, tol.kernel).
EtaValue eta_form_degree0(const RealVector& spectrum, const EtaValue& base, const MPOperatorSpec& a,
                          const Tolerances& tol = Tolerances::defaults());

/// Projector of the threshold section of op: eigenvalues >= threshold.
SpectralSection threshold_section(const TruncatedOperator& op, double threshold,
                                  const Tolerances& tol = Tolerances::defaults());

}  // namespace specflow
