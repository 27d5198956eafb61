#pragma once

// Vector-bundle data over discretized bases: projector families, kernel
// bundles, lattice Chern numbers, Toeplitz family indices and higher
// spectral flow as a numeric K-class.

#include <functional>
#include <optional>
#include <vector>

#include "specflow/base.hpp"
#include "specflow/flow.hpp"
#include "specflow/toeplitz.hpp"

namespace specflow {

/// Rank-r subbundle of a trivial C^dim bundle, stored by orthonormal frames.
class ProjectorFamily {
 public:
  ProjectorFamily() = default;
  /// Frames must be orthonormal with a common rank; throws RankJump otherwise.
  ProjectorFamily(BaseGrid grid, int dim, std::vector<Matrix> frames);
  static ProjectorFamily from_projectors(const BaseGrid& grid, const std::vector<Matrix>& projectors);
  static ProjectorFamily sample(const BaseGrid& grid, const std::function<Matrix(double, double)>& projector);
  static ProjectorFamily empty(const BaseGrid& grid, int dim);

  const BaseGrid& grid() const { return grid_; }
  int dim() const { return dim_; }
  int rank() const { return rank_; }
  const Matrix& frame(int v) const { return frames_[v]; }
  Matrix projector(int v) const { return frames_[v] * frames_[v].adjoint(); }

  /// Pointwise complement I - P.
  ProjectorFamily complement() const;
  /// Block-diagonal direct sum in C^{dim + other.dim}.
  ProjectorFamily direct_sum(const ProjectorFamily& other) const;

  /// Largest ||P(v) - P(w)||_2 over base edges.
  double max_neighbor_distance() const;
  /// Projector invariants and neighbour continuity (GridTooCoarse).
  void validate(const Tolerances& tol = Tolerances::defaults()) const;

 private:
  BaseGrid grid_;
  int dim_ = 0;
  int rank_ = 0;
  std::vector<Matrix> frames_;
};

/// Lattice first Chern number of a projector family on a torus base, in the
/// convention c_1 = (i / 2 pi) \int tr(P dP dP) with base orientation
/// d theta_1 d theta_2. Link variables U_mu(v) = det(F(v)* F(v + e_mu))
/// normalized; plaquette phases are summed in lexicographic order. Throws
/// SingularOverlap when some |det| < tol.overlap_det, GridTooCoarse below
/// 8 x 8 vertices.
int chern_number(const ProjectorFamily& p, const Tolerances& tol = Tolerances::defaults());

/// Unrounded lattice value behind chern_number.
double chern_lattice_sum(const ProjectorFamily& p, const Tolerances& tol = Tolerances::defaults());

/// Riemann sum of (i / 2 pi) tr(P [d1 P, d2 P]) with central differences, for
/// a smooth projector-valued map; an oracle independent of the link method.
double berry_curvature_integral(const std::function<Matrix(double, double)>& projector, int grid);

/// Formal difference [positive] - [negative] of projector families.
struct KClassNumeric {
  ProjectorFamily positive;
  ProjectorFamily negative;
  int ch0 = 0;
  std::optional<int> ch1;  // torus bases only
  bool stable = true;

  static KClassNumeric make(ProjectorFamily positive, ProjectorFamily negative,
                            const Tolerances& tol = Tolerances::defaults());
  KClassNumeric operator+(const KClassNumeric& other) const;
  KClassNumeric negated() const;
};

/// Numerical kernel of maps(v) at every vertex as a projector family in
/// C^{cols}. The kernel dimension must be constant (RankJump names the
/// offending vertices); rank decisions need a singular gap of tol.rank_gap.
ProjectorFamily kernel_bundle(const BaseGrid& grid, const std::vector<Matrix>& maps,
                              const Tolerances& tol = Tolerances::defaults());

/// Difference class [P - Q]: kernel bundle Im P cap ker Q minus cokernel
/// bundle Im Q cap ker P of Q P : Im P -> Im Q, at every vertex.
KClassNumeric difference_class(const ProjectorFamily& p, const ProjectorFamily& q,
                               const Tolerances& tol = Tolerances::defaults());

/// ind T_g over the base with the Hardy section at truncation trunc: kernel
/// bundle minus cokernel bundle. When the family carries a generator and the
/// base is a torus, ch1 is recomputed on the doubled base and `stable`
/// records agreement.
KClassNumeric toeplitz_family_index(const SymbolFamily& g, const FourierTruncation& trunc,
                                    const Tolerances& tol = Tolerances::defaults());

/// Operator curves over a base: curve(theta1, theta2) for t in [0, 1], with
/// endpoint sections.
struct CurveFamily {
  BaseGrid grid;
  std::vector<OperatorCurve> curves;
};

struct FamilyCurveSpec {
  std::function<OperatorCurve(double, double)> curve;
  std::function<Matrix(double, double)> q0;
  std::function<Matrix(double, double)> q1;
};

/// [Q1 - P1] - [Q0 - P0] over the base with one gap partition shared by all
/// vertices; each difference term contributes its kernel and cokernel
/// bundles. The pointwise value must be the same at every vertex.
KClassNumeric higher_spectral_flow(const CurveFamily& family, const ProjectorFamily& q0, const ProjectorFamily& q1,
                                   const Tolerances& tol = Tolerances::defaults());

/// Sampled version on grid; with check_doubling the class is recomputed on the
/// base at twice the resolution and `stable` records agreement of ch0 / ch1.
KClassNumeric higher_spectral_flow(const BaseGrid& grid, const FamilyCurveSpec& spec, bool check_doubling = true,
                                   const Tolerances& tol = Tolerances::defaults());

/// Degree-1 wrap n(theta) = d / |d|, d = (sin t1, sin t2, 1 + cos t1 + cos t2),
/// and q = (1 + n . sigma) / 2. Its lattice Chern number is +1.
Matrix wrap_projector(double theta1, double theta2);

/// Bott symbol g = e^{ix} q + (1 - q) with q = wrap_projector.
SymbolFunction bott_symbol(double theta1, double theta2);
SymbolFamily bott_family(const BaseGrid& grid);

/// Curve family D_t(b) = -i d/dx + t (i g' g*) for a symbol family with a
/// generator, APS sections (inclusive at 0) at both ends.
FamilyCurveSpec toeplitz_path_spec(const SymbolFamily::Generator& g, const FourierTruncation& trunc,
                                   int samples = 2);

}  // namespace specflow
