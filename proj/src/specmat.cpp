#include "specflow/specmat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/SVD>

namespace specflow {

FourierTruncation::FourierTruncation(int k, int n) : max_mode(k), bundle_rank(n) {
  if (k < 1) throw InvalidArgument("truncation max_mode K must be >= 1");
  if (n < 1) throw InvalidArgument("truncation bundle_rank N must be >= 1");
}

bool is_hermitian(const Matrix& m, const Tolerances& tol) {
  if (m.rows() != m.cols()) return false;
  if (m.size() == 0) return true;
  const double scale = 1.0 + m.cwiseAbs().maxCoeff();
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol.hermitian * scale;
}

void TruncatedOperator::validate(const Tolerances& tol) const {
  if (matrix.rows() != truncation.dim() || matrix.cols() != truncation.dim())
    throw DimensionMismatch("operator '" + label + "' does not match its truncation");
  if (!is_hermitian(matrix, tol)) throw NotHermitian("operator '" + label + "' is not Hermitian");
}

TruncatedOperator build_derivative(const FourierTruncation& trunc) {
  TruncatedOperator op;
  op.truncation = trunc;
  op.label = "-i d/dx";
  op.matrix = Matrix::Zero(trunc.dim(), trunc.dim());
  for (int k = -trunc.max_mode; k <= trunc.max_mode; ++k)
    for (int a = 0; a < trunc.bundle_rank; ++a) op.matrix(trunc.index(k, a), trunc.index(k, a)) = double(k);
  return op;
}

Matrix build_multiplication_rect(const SymbolFunction& symbol, int k_in, int k_out) {
  const int n = symbol.rank();
  Matrix b = Matrix::Zero((2 * k_out + 1) * n, (2 * k_in + 1) * n);
  for (const auto& [shift, c] : symbol.modes()) {
    for (int k = -k_in; k <= k_in; ++k) {
      const int j = k + shift;
      if (j < -k_out || j > k_out) continue;
      b.block((j + k_out) * n, (k + k_in) * n, n, n) = c;
    }
  }
  return b;
}

Matrix build_multiplication(const SymbolFunction& symbol, const FourierTruncation& trunc) {
  if (symbol.rank() != trunc.bundle_rank)
    throw DimensionMismatch("symbol rank " + std::to_string(symbol.rank()) + " does not match truncation rank " +
                            std::to_string(trunc.bundle_rank));
  return build_multiplication_rect(symbol, trunc.max_mode, trunc.max_mode);
}

TruncatedOperator build_dirac(const SymbolFunction& potential, const FourierTruncation& trunc,
                              const Tolerances& tol) {
  if (!potential.is_hermitian(tol.hermitian * 100))
    throw NotHermitian("Dirac potential must be Hermitian-valued (c_{-k} = c_k^*)");
  TruncatedOperator op = build_derivative(trunc);
  op.matrix += build_multiplication(potential, trunc);
  op.matrix = 0.5 * (op.matrix + op.matrix.adjoint()).eval();
  op.label = "-i d/dx + V";
  return op;
}

Matrix mode_embedding(int k_in, int k_out, int rank) {
  if (k_out < k_in) throw InvalidArgument("mode_embedding needs k_out >= k_in");
  Matrix e = Matrix::Zero((2 * k_out + 1) * rank, (2 * k_in + 1) * rank);
  const int offset = (k_out - k_in) * rank;
  e.block(offset, 0, e.cols(), e.cols()).setIdentity();
  return e;
}

Matrix build_dirac_rect(const SymbolFunction& potential, int k_in, int k_out) {
  const int n = potential.rank();
  Matrix m = build_multiplication_rect(potential, k_in, k_out);
  for (int k = -k_in; k <= k_in; ++k) {
    if (k < -k_out || k > k_out) continue;
    for (int a = 0; a < n; ++a) m((k + k_out) * n + a, (k + k_in) * n + a) += double(k);
  }
  return m;
}

double unitarity_defect(const Matrix& u) {
  if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
  return (u * u.adjoint() - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

namespace {

void phase_normalize(Eigen::Ref<Vector> v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-8) {
      v *= std::conj(v[i]) / std::abs(v[i]);
      return;
    }
  }
}

bool lex_less(const Vector& a, const Vector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double dr = a[i].real() - b[i].real();
    if (std::abs(dr) > 1e-12) return dr < 0;
    const double di = a[i].imag() - b[i].imag();
    if (std::abs(di) > 1e-12) return di < 0;
  }
  return false;
}

void require_hermitian(const Matrix& m, const Tolerances& tol) {
  if (m.rows() != m.cols()) throw DimensionMismatch("eigh needs a square matrix");
  if (!is_hermitian(m, tol)) throw NotHermitian("eigh input is not Hermitian");
}

}  // namespace

EigenDecomposition eigh(const Matrix& m, const Tolerances& tol) {
  require_hermitian(m, tol);
  EigenDecomposition out;
  if (m.size() == 0) {
    out.values.resize(0);
    out.vectors.resize(0, 0);
    return out;
  }
  const Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw IllConditioned("Hermitian eigensolver failed to converge");
  out.values = solver.eigenvalues();
  out.vectors = solver.eigenvectors();

  const Eigen::Index n = out.values.size();
  const double scale = std::max(1.0, out.values.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < n; ++i) phase_normalize(out.vectors.col(i));
  Eigen::Index start = 0;
  while (start < n) {
    Eigen::Index end = start + 1;
    while (end < n && out.values[end] - out.values[end - 1] < tol.degeneracy * scale) ++end;
    if (end - start > 1) {
      std::vector<Eigen::Index> order(end - start);
      std::iota(order.begin(), order.end(), start);
      std::vector<Vector> cols;
      for (auto i : order) cols.emplace_back(out.vectors.col(i));
      std::vector<std::size_t> perm(cols.size());
      std::iota(perm.begin(), perm.end(), 0);
      std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return lex_less(cols[a], cols[b]); });
      for (std::size_t j = 0; j < perm.size(); ++j) out.vectors.col(start + j) = cols[perm[j]];
    }
    start = end;
  }
  return out;
}

RealVector eigvalsh(const Matrix& m, const Tolerances& tol) {
  require_hermitian(m, tol);
  if (m.size() == 0) return RealVector(0);
  const Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw IllConditioned("Hermitian eigensolver failed to converge");
  return solver.eigenvalues();
}

RealVector singular_values(const Matrix& m) {
  if (m.size() == 0) return RealVector(0);
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues();
}

int numerical_rank(const Matrix& m, double tol) {
  if (!(tol > 0.0 && tol < 1.0)) throw InvalidArgument("numerical_rank tol must lie in (0, 1)");
  const RealVector s = singular_values(m);
  if (s.size() == 0 || s[0] == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > tol * s[0]) ++r;
  return r;
}

GapRank gap_rank(const Matrix& m, double tol, double gap_factor, double scale) {
  GapRank g;
  const RealVector s = singular_values(m);
  const double ref = scale > 0 ? scale : (s.size() ? s[0] : 0.0);
  double largest_zero = 0.0;
  double smallest_nonzero = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (ref > 0.0 && s[i] > tol * ref) {
      ++g.rank;
      smallest_nonzero = std::min(smallest_nonzero, s[i]);
    } else {
      largest_zero = std::max(largest_zero, s[i]);
    }
  }
  g.nullity = static_cast<int>(m.cols()) - g.rank;
  g.co_nullity = static_cast<int>(m.rows()) - g.rank;
  g.largest_zero = largest_zero;
  g.smallest_nonzero = smallest_nonzero;
  g.gap_ratio = largest_zero > 0 ? smallest_nonzero / largest_zero : std::numeric_limits<double>::infinity();
  if (g.rank < s.size() && g.rank > 0 && g.gap_ratio < gap_factor) {
    throw IllConditioned("singular values cluster at the rank threshold: largest zero " +
                         std::to_string(largest_zero) + ", smallest nonzero " + std::to_string(smallest_nonzero) +
                         ", gap ratio " + std::to_string(g.gap_ratio) + " < " + std::to_string(gap_factor));
  }
  return g;
}

Matrix conjugate(const Matrix& m, const Matrix& u, const Tolerances& tol) {
  if (u.rows() != m.rows() || u.cols() != m.cols()) throw DimensionMismatch("conjugate: shape mismatch");
  if (unitarity_defect(u) > tol.unitary) throw NotUnitary("conjugate: U is not unitary");
  return u * m * u.adjoint();
}

Matrix projector_frame(const Matrix& p) {
  const Eigen::Index n = p.rows();
  // Coordinate projectors get the coordinate basis, in index order.
  bool coordinate = true;
  for (Eigen::Index i = 0; i < n && coordinate; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const cplx v = p(i, j);
      const double target = (i == j && std::abs(v - 1.0) < 1e-12) ? 1.0 : 0.0;
      if (std::abs(v - target) > 1e-12) {
        coordinate = false;
        break;
      }
    }
  if (coordinate) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < n; ++i)
      if (std::abs(p(i, i) - 1.0) < 1e-12) idx.push_back(i);
    Matrix f = Matrix::Zero(n, static_cast<Eigen::Index>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) f(idx[c], static_cast<Eigen::Index>(c)) = 1.0;
    return f;
  }
  const EigenDecomposition e = eigh(0.5 * (p + p.adjoint()));
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < e.values.size(); ++i)
    if (e.values[i] > 0.5) ++r;
  return e.vectors.rightCols(r);
}

Matrix frame_projector(const Matrix& frame) { return frame * frame.adjoint(); }

}  // namespace specflow
