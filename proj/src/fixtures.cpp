#include "specflow/fixtures.hpp"

#include <Eigen/QR>

namespace specflow::fixtures {

namespace {

Matrix gaussian(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix z(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) z(i, j) = cplx(normal(rng), normal(rng)) / std::sqrt(2.0);
  return z;
}

}  // namespace

Matrix haar_unitary(int n, Rng& rng) {
  const Matrix z = gaussian(n, n, rng);
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

Matrix random_projector(int dim, int rank, Rng& rng) {
  if (rank == 0) return Matrix::Zero(dim, dim);
  const Matrix frame = haar_unitary(dim, rng).leftCols(rank);
  return frame * frame.adjoint();
}

Matrix random_hermitian(int n, double scale, Rng& rng) {
  const Matrix z = gaussian(n, n, rng);
  return scale * (z + z.adjoint()) / std::sqrt(2.0);
}

UnitaryLoop random_unitary_loop(int rank, int factors, int max_power, Rng& rng) {
  std::uniform_int_distribution<int> power(-max_power, max_power);
  UnitaryLoop out;
  out.symbol = SymbolFunction::constant(haar_unitary(rank, rng), true);
  const Matrix id = Matrix::Identity(rank, rank);
  for (int j = 0; j < factors; ++j) {
    const int s = power(rng);
    const Matrix p = random_projector(rank, 1, rng);
    std::map<int, Matrix> modes;
    if (s == 0) {
      modes[0] = id;
    } else {
      modes[0] = id - p;
      modes[s] = p;
    }
    const SymbolFunction factor = SymbolFunction::from_modes(rank, std::move(modes), true);
    out.symbol = out.symbol * factor * SymbolFunction::constant(haar_unitary(rank, rng), true);
    out.winding += s;
  }
  out.symbol.set_unitary_flag(true);
  return out;
}

SymbolFunction random_hermitian_potential(int rank, int bandwidth, double norm, Rng& rng) {
  std::map<int, Matrix> modes;
  modes[0] = random_hermitian(rank, 1.0, rng);
  for (int k = 1; k <= bandwidth; ++k) {
    const Matrix c = gaussian(rank, rank, rng);
    modes[k] = c;
    modes[-k] = c.adjoint();
  }
  const SymbolFunction v = SymbolFunction::from_modes(rank, std::move(modes));
  const double bound = multiplier_norm_bound(v);
  return bound > 0 ? v.scaled(norm / bound) : v;
}

PotentialPath random_potential_path(int rank, int knots, int bandwidth, double norm, Rng& rng, double offset) {
  std::vector<std::pair<double, SymbolFunction>> pts;
  const SymbolFunction shift = SymbolFunction::scalar_constant(offset, rank);
  for (int i = 0; i < knots; ++i)
    pts.emplace_back(double(i) / (knots - 1), random_hermitian_potential(rank, bandwidth, norm, rng) + shift);
  return PotentialPath(std::move(pts));
}

PotentialPath random_potential_loop(int rank, int knots, int bandwidth, double norm, Rng& rng) {
  PotentialPath open = random_potential_path(rank, knots, bandwidth, norm, rng);
  auto pts = open.knots();
  pts.back().second = pts.front().second;
  return PotentialPath(std::move(pts));
}

}  // namespace specflow::fixtures
