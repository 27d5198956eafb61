#pragma once

// Spectral flow of curves of truncated operators by gap partition, spectral
// sections and difference elements.

#include <functional>
#include <optional>
#include <vector>

#include "specflow/specmat.hpp"

namespace specflow {

/// Sampled curve t in [0, 1] -> truncated operator. The generator, when
/// present, lets the gap partition refine between samples.
class OperatorCurve {
 public:
  using Generator = std::function<TruncatedOperator(double)>;

  OperatorCurve(std::vector<double> samples, std::vector<TruncatedOperator> operators, Generator generator = {});
  /// Uniform samples t_j = j / (n - 1) of the generator.
  static OperatorCurve from_generator(Generator generator, int samples);
  /// -i d/dx + V_t at the given truncation.
  static OperatorCurve from_path(const PotentialPath& path, const FourierTruncation& trunc, int samples);
  /// Constant curve.
  static OperatorCurve constant(const TruncatedOperator& op, int samples = 2);

  const std::vector<double>& samples() const { return samples_; }
  const std::vector<TruncatedOperator>& operators() const { return operators_; }
  const FourierTruncation& truncation() const { return operators_.front().truncation; }
  bool can_refine() const { return static_cast<bool>(generator_); }
  /// Operator at an arbitrary t: a stored sample if t matches one, else the generator.
  TruncatedOperator at(double t) const;

  /// Same curve on a new monotone parametrisation: sample t of the result is
  /// the old curve at phi(t). phi must map [0,1] onto [0,1] increasingly.
  OperatorCurve reparametrized(const std::function<double(double)>& phi) const;
  /// Restriction to [t0, t1], rescaled to [0, 1]; t0, t1 must be sample points.
  OperatorCurve restricted(double t0, double t1) const;
  /// Every interval split at its midpoint (needs a generator).
  OperatorCurve refined() const;

  /// Optional operator-norm Lipschitz bound supplied by the caller.
  std::optional<double> lipschitz;

 private:
  std::vector<double> samples_;
  std::vector<TruncatedOperator> operators_;
  Generator generator_;
};

enum class CutoffPolicy { strict, inclusive, exclusive };
enum class SectionProvenance { aps_cutoff, transported, explicit_projector };

struct SpectralSection {
  Matrix projector;
  double threshold_window = 0.0;  // R
  SectionProvenance provenance = SectionProvenance::explicit_projector;
  double cutoff = 0.0;            // meaningful for aps_cutoff
  FourierTruncation truncation;

  int rank() const;
  /// Projector invariants (idempotent, Hermitian); throws InvalidSection.
  void validate(const Tolerances& tol = Tolerances::defaults()) const;
};

/// Explicit projector, validated.
SpectralSection make_section(const Matrix& projector, const FourierTruncation& trunc, double threshold_window,
                             const Tolerances& tol = Tolerances::defaults());

/// Projector onto eigenvectors with eigenvalue >= c. With the strict policy an
/// eigenvalue within tol.cutoff of c throws EigenvalueAtCutoff; inclusive takes
/// that eigenspace in, exclusive leaves it out.
SpectralSection aps_projection(const TruncatedOperator& op, double cutoff, CutoffPolicy policy = CutoffPolicy::strict,
                               const Tolerances& tol = Tolerances::defaults());

/// Spectral projection of op onto eigenvalues strictly above a.
Matrix spectral_projector_above(const EigenDecomposition& eig, double a);

/// lambda > R => P v = v and lambda < -R => P v = 0 for every eigenpair of op.
bool satisfies_section_condition(const SpectralSection& section, const TruncatedOperator& op,
                                 const Tolerances& tol = Tolerances::defaults());

struct DifferenceElement {
  int value = 0;
  int kernel_dim = 0;
  int cokernel_dim = 0;
  double min_gap_ratio = 0.0;
};

/// [P - Q]: index of Q P from Im P to Im Q.
DifferenceElement difference_element(const Matrix& p, const Matrix& q, double tol = 1e-8,
                                     const Tolerances& tols = Tolerances::defaults());
DifferenceElement difference_element(const SpectralSection& p, const SpectralSection& q, double tol = 1e-8,
                                     const Tolerances& tols = Tolerances::defaults());

/// One certified subinterval: for all t in [t0, t1], +a and -a lie outside the
/// spectrum of every curve handled by the partition.
struct GapInterval {
  double t0 = 0.0;
  double t1 = 1.0;
  double a = 0.0;
  double spectral_distance = 0.0;  // min over endpoints of dist(+-a, spectrum)
  double lipschitz_margin = 0.0;   // L (t1 - t0) / 2
};

/// Spectra at the partition points, per curve, plus the certified intervals.
struct GapPartition {
  std::vector<GapInterval> intervals;
  std::vector<double> points;                    // t_0 .. t_n
  std::vector<std::vector<RealVector>> spectra;  // [curve][point]
  double min_gap() const;
};

/// Joint gap partition for curves sharing one sample grid and truncation.
/// The lowest admissible a is max(0, cutoff0, cutoff1) on the first and last
/// interval and 0 elsewhere.
GapPartition gap_partition(const std::vector<const OperatorCurve*>& curves, double cutoff0, double cutoff1,
                           const Tolerances& tol = Tolerances::defaults());

struct SpectralFlowResult {
  int sf = 0;
  int partitions = 0;
  double min_gap = 0.0;
};

/// Net number of eigenvalues crossing from below 0 to >= 0, with the endpoint
/// counts taken against cutoff0 at t=0 and cutoff1 at t=1 (inclusive at the
/// cutoff). Throws NoGapFound / ResolutionExceeded when the partition fails.
SpectralFlowResult spectral_flow(const OperatorCurve& curve, double cutoff0 = 0.0, double cutoff1 = 0.0,
                                 const Tolerances& tol = Tolerances::defaults());

/// Eigenvalue counting on an existing partition for curve index c.
int spectral_flow_on_partition(const GapPartition& partition, std::size_t c, double cutoff0, double cutoff1,
                               const Tolerances& tol = Tolerances::defaults());

/// Threshold-tracking transport along a partition, expressed as the chain of
/// difference elements [Q1 - P1] - [Q0 - P0], with the junction corrections
/// where the tracking threshold changes.
struct TransportChain {
  struct Term {
    int sign = 1;         // +1 or -1 in the alternating sum
    Matrix first, second; // the term is sign * [first - second]
  };
  std::vector<Term> terms;
};
TransportChain transport_chain(const GapPartition& partition, const OperatorCurve& curve, const Matrix& q0,
                               const Matrix& q1, const Tolerances& tol = Tolerances::defaults());

/// [Q1 - P1] - [Q0 - P0] with P_t the transported section. Recomputed on the
/// doubled sample grid when the curve can refine; a mismatch throws
/// UnstableIndex.
int sf_pairs(const OperatorCurve& curve, const SpectralSection& q0, const SpectralSection& q1,
             const Tolerances& tol = Tolerances::defaults());

/// Sum of difference elements of a transport chain (no refinement check).
int sf_pairs_on_partition(const GapPartition& partition, const OperatorCurve& curve, const Matrix& q0,
                          const Matrix& q1, const Tolerances& tol = Tolerances::defaults());

}  // namespace specflow
