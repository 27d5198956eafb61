#include "specflow/mtorus.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace specflow {

TwistedLoopSpec TwistedLoopSpec::make(PotentialPath path, SymbolFunction glue, const Tolerances& tol) {
  if (glue.rank() != path.rank()) throw DimensionMismatch("gluing symbol rank does not match the path");
  if (!glue.is_unitary(tol.unitary)) throw NotUnitary("gluing symbol is not unitary-valued");
  TwistedLoopSpec s;
  s.consistent = conjugated_potential(glue, path(0.0)).distance(path(1.0)) <= tol.gluing;
  s.path = std::move(path);
  s.glue = std::move(glue);
  return s;
}

TwistedLoopSpec TwistedLoopSpec::flux(int n) {
  const SymbolFunction zero = SymbolFunction::from_modes(1, {});
  return make(PotentialPath::linear(zero, SymbolFunction::scalar_constant(-double(n))), SymbolFunction::monomial(n));
}

OperatorCurve TwistedLoopSpec::curve(int k, int samples) const {
  return OperatorCurve::from_path(path, FourierTruncation(k, path.rank()), samples);
}

Eigen::Index MappingTorusOperator::cols() const { return Eigen::Index(m_u) * (2 * max_mode + 1) * rank; }
Eigen::Index MappingTorusOperator::rows() const { return Eigen::Index(m_u) * (2 * out_mode + 1) * rank; }

Matrix MappingTorusOperator::dense() const {
  const Eigen::Index d = (2 * max_mode + 1) * rank, dout = (2 * out_mode + 1) * rank;
  Matrix a = Matrix::Zero(rows(), cols());
  for (int j = 0; j < m_u; ++j) {
    a.block(j * dout, j * d, dout, d) += left[j];
    a.block(j * dout, ((j + 1) % m_u) * d, dout, d) += right[j];
  }
  return a;
}

MappingTorusOperator build_mapping_torus(const TwistedLoopSpec& spec, int m_u, int k, int orientation,
                                         const Tolerances& tol) {
  if (!spec.consistent)
    throw GluingInconsistent("D_1 differs from g D_0 g^-1 by more than " + std::to_string(tol.gluing));
  if (m_u < 3) throw InvalidArgument("mapping torus needs at least 3 samples in u");
  if (orientation != 1 && orientation != -1) throw InvalidArgument("orientation must be +1 or -1");
  const int n = spec.path.rank();
  const int wd = spec.path.bandwidth();
  const int wg = spec.glue.bandwidth();
  MappingTorusOperator a;
  a.m_u = m_u;
  a.max_mode = k;
  a.rank = n;
  a.orientation = orientation;
  a.out_mode = k + wd + wg;
  const double h = 1.0 / m_u;
  const double s = orientation;
  const Matrix embed = mode_embedding(k, a.out_mode, n);
  std::vector<Matrix> d(m_u);
  for (int j = 0; j < m_u; ++j) d[j] = build_dirac_rect(spec.path(double(j) / m_u), k, a.out_mode);
  a.left.resize(m_u);
  a.right.resize(m_u);
  for (int j = 0; j < m_u; ++j) {
    a.left[j] = (-s / h) * embed + 0.5 * d[j];
    if (j + 1 < m_u) {
      a.right[j] = (s / h) * embed + 0.5 * d[j + 1];
    } else {
      const Matrix g = build_multiplication_rect(spec.glue, k, a.out_mode);
      const Matrix gd = build_multiplication_rect(spec.glue, k + wd, a.out_mode) *
                        build_dirac_rect(spec.path(0.0), k, k + wd);
      a.right[j] = (s / h) * g + 0.5 * gd;
    }
  }
  return a;
}

MappingTorusOperator MappingTorusOperator::adjoint_orientation(const TwistedLoopSpec& spec) const {
  return build_mapping_torus(spec, m_u, max_mode, -orientation);
}

namespace {

struct Pivot {
  int negative = 0;
  double min_abs = 0.0;
  Matrix inverse;
};

Pivot factor(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (s + s.adjoint()));
  Pivot p;
  const RealVector& ev = es.eigenvalues();
  p.min_abs = ev.cwiseAbs().minCoeff();
  RealVector inv(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] < 0) ++p.negative;
    inv[i] = 1.0 / ev[i];
  }
  p.inverse = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
  return p;
}

// Negative eigenvalues of H - tau with H = A* A block cyclic tridiagonal;
// -1 when a pivot is numerically singular.
int inertia(const std::vector<Matrix>& hd, const std::vector<Matrix>& hu, double tau) {
  const int m = static_cast<int>(hd.size());
  const Eigen::Index d = hd.front().rows();
  const Matrix id = Matrix::Identity(d, d);
  int negative = 0;
  Matrix s = hd[0] - tau * id;
  Matrix c = hu[m - 1].adjoint();  // block 0 to the border block m-1
  Matrix border = hd[m - 1] - tau * id;
  for (int j = 0; j <= m - 2; ++j) {
    const Pivot p = factor(s);
    if (p.min_abs < 1e-11 * (1.0 + s.cwiseAbs().maxCoeff())) return -1;
    negative += p.negative;
    const Matrix pc = p.inverse * c;
    border -= c.adjoint() * pc;
    if (j < m - 2) {
      const Matrix& couple = hu[j];  // H_{j, j+1}
      s = hd[j + 1] - tau * id - couple.adjoint() * p.inverse * couple;
      Matrix next = -couple.adjoint() * pc;
      if (j + 1 == m - 2) next += hu[m - 2];
      c = std::move(next);
    }
  }
  const Pivot last = factor(border);
  if (last.min_abs < 1e-11 * (1.0 + border.cwiseAbs().maxCoeff())) return -1;
  return negative + last.negative;
}

}  // namespace

int count_small_singular_values(const MappingTorusOperator& a, double sigma) {
  const int m = a.m_u;
  std::vector<Matrix> hd(m), hu(m);
  for (int j = 0; j < m; ++j) {
    const int prev = (j + m - 1) % m;
    hd[j] = a.left[j].adjoint() * a.left[j] + a.right[prev].adjoint() * a.right[prev];
    hu[j] = a.left[j].adjoint() * a.right[j];
  }
  double tau = sigma * sigma;
  for (int attempt = 0; attempt < 8; ++attempt) {
    const int n = inertia(hd, hu, tau);
    if (n >= 0) return n;
    tau *= 1.0 + 1e-3 * (attempt + 1);
  }
  throw IllConditioned("inertia count hit singular pivots near sigma = " + std::to_string(sigma));
}

int mapping_torus_nullity(const MappingTorusOperator& a, const MappingTorusOptions& options) {
  const int lo = count_small_singular_values(a, options.sigma_low);
  const int hi = count_small_singular_values(a, options.sigma_high);
  if (lo != hi)
    throw IllConditioned("mapping torus singular values between " + std::to_string(options.sigma_low) + " and " +
                         std::to_string(options.sigma_high) + ": " + std::to_string(lo) + " vs " +
                         std::to_string(hi) + "; no x100 gap");
  return lo;
}

MappingTorusIndex mapping_torus_index(const TwistedLoopSpec& spec, int m_u, int k, const MappingTorusOptions& options,
                                      const Tolerances& tol) {
  auto counts = [&](int mu, int kk) {
    const int ker = mapping_torus_nullity(build_mapping_torus(spec, mu, kk, 1, tol), options);
    const int cok = mapping_torus_nullity(build_mapping_torus(spec, mu, kk, -1, tol), options);
    return std::pair<int, int>{ker, cok};
  };
  MappingTorusIndex r;
  const auto [ker, cok] = counts(m_u, k);
  r.kernel_dim = ker;
  r.cokernel_dim = cok;
  r.index = ker - cok;
  r.index_refined_u = r.index_refined_k = r.index;
  if (options.check_refinement) {
    const auto [ker_u, cok_u] = counts(2 * m_u, k);
    if (ker_u != ker || cok_u != cok)
      throw DoublingDetected("kernel dimensions (" + std::to_string(ker) + ", " + std::to_string(cok) +
                             ") became (" + std::to_string(ker_u) + ", " + std::to_string(cok_u) +
                             ") when m_u doubled");
    const auto [ker_k, cok_k] = counts(m_u, 2 * k);
    r.index_refined_u = ker_u - cok_u;
    r.index_refined_k = ker_k - cok_k;
    if (r.index_refined_k != r.index)
      throw UnstableIndex("mapping torus index changed from " + std::to_string(r.index) + " to " +
                          std::to_string(r.index_refined_k) + " when K doubled");
  }
  r.stable = r.index == r.index_refined_u && r.index == r.index_refined_k;
  return r;
}

}  // namespace specflow
