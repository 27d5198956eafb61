#include <doctest.h>

#include "specflow/fixtures.hpp"
#include "specflow/specmat.hpp"

using namespace specflow;

namespace {

Matrix diag_of(std::initializer_list<double> v) {
  RealVector d(v.size());
  int i = 0;
  for (double x : v) d[i++] = x;
  return d.cast<cplx>().asDiagonal();
}

SymbolFunction cosine() {
  return SymbolFunction::from_modes(1, {{1, Matrix::Constant(1, 1, 0.5)}, {-1, Matrix::Constant(1, 1, 0.5)}});
}

// Cyclic shift e_k -> e_{k+1}, wrapping K to -K: unitary, and equal to
// multiplication by e^{ix} away from the edge.
Matrix cyclic_shift(int k) {
  const int n = 2 * k + 1;
  Matrix u = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j) u((j + 1) % n, j) = 1.0;
  return u;
}

}  // namespace

TEST_CASE("truncation dimension") {
  const FourierTruncation t(3, 2);
  CHECK(t.dim() == 14);
  CHECK(t.index(-3, 0) == 0);
  CHECK(t.index(3, 1) == 13);
  CHECK(t.mode_of(7) == 0);
}

TEST_CASE("derivative is diag(k) on every component") {
  CHECK((build_derivative({1, 1}).matrix - diag_of({-1, 0, 1})).norm() == 0.0);
  CHECK((build_derivative({2, 2}).matrix - diag_of({-2, -2, -1, -1, 0, 0, 1, 1, 2, 2})).norm() == 0.0);
  for (int k : {1, 4, 9})
    for (int n : {1, 3}) CHECK(std::abs(build_derivative({k, n}).matrix.trace()) == 0.0);
}

TEST_CASE("multiplication by constants, shifts and sampled symbols") {
  const FourierTruncation t(5, 1);
  const Matrix m = build_multiplication(SymbolFunction::scalar_constant(0.3), t);
  CHECK((m - 0.3 * Matrix::Identity(11, 11)).norm() < 1e-15);

  const Matrix s = build_multiplication(SymbolFunction::monomial(1), {1, 1});
  Matrix expect = Matrix::Zero(3, 3);
  expect(1, 0) = expect(2, 1) = 1.0;
  CHECK((s - expect).norm() == 0.0);

  std::vector<Matrix> samples;
  for (int j = 0; j < 256; ++j) samples.push_back(Matrix::Constant(1, 1, std::cos(2 * kPi * j / 256)));
  const Matrix sampled = build_multiplication(SymbolFunction::from_samples(samples), {8, 1});
  const Matrix coeff = build_multiplication(cosine(), {8, 1});
  CHECK((sampled - coeff).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("multiplication rejects a rank mismatch") {
  CHECK_THROWS_AS(build_multiplication(SymbolFunction::scalar_constant(1.0, 2), {3, 1}), DimensionMismatch);
}

TEST_CASE("dirac operator with constant potential") {
  const TruncatedOperator d = build_dirac(SymbolFunction::scalar_constant(0.4), {4, 1});
  for (int k = -4; k <= 4; ++k) CHECK(d.matrix(k + 4, k + 4).real() == doctest::Approx(k + 0.4).epsilon(1e-15));
  CHECK((build_dirac(SymbolFunction::from_modes(1, {}), {4, 1}).matrix - build_derivative({4, 1}).matrix).norm() ==
        0.0);
  CHECK_THROWS_AS(build_dirac(SymbolFunction::scalar_constant(cplx(0, 1)), {2, 1}), NotHermitian);
}

TEST_CASE("dirac with cos(x) potential agrees with finite differences") {
  // -i d/dx + cos x is gauge equivalent to -i d/dx, so both discretizations
  // approximate the integers; central differences also carry doubler modes,
  // hence each Fourier eigenvalue only needs a finite-difference partner.
  const RealVector fourier = eigvalsh(build_dirac(cosine(), {8, 1}).matrix);
  const int n = 1025;
  const double h = 2 * kPi / n;
  Matrix fd = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    fd(j, (j + 1) % n) += -kI / (2 * h);
    fd(j, (j + n - 1) % n) += kI / (2 * h);
    fd(j, j) += std::cos(j * h);
  }
  const RealVector fdv = eigvalsh(fd);
  std::vector<double> lowest(fourier.data(), fourier.data() + fourier.size());
  std::sort(lowest.begin(), lowest.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
  for (int i = 0; i < 5; ++i) {
    double best = 1e9;
    for (Eigen::Index j = 0; j < fdv.size(); ++j) best = std::min(best, std::abs(fdv[j] - lowest[i]));
    CHECK(best <= 1e-4);
  }
}

TEST_CASE("eigh contract") {
  const Matrix d = diag_of({3, -1, 2});
  const EigenDecomposition e = eigh(d);
  CHECK(e.values[0] == -1.0);
  CHECK(e.values[2] == 3.0);

  fixtures::Rng rng(7);
  const Matrix h = fixtures::random_hermitian(50, 1.0, rng);
  const EigenDecomposition r = eigh(h);
  const double norm = singular_values(h)[0];
  for (int i = 0; i < 50; ++i) CHECK((h * r.vectors.col(i) - r.values[i] * r.vectors.col(i)).norm() <= 1e-9 * norm);
  CHECK((r.vectors.adjoint() * r.vectors - Matrix::Identity(50, 50)).cwiseAbs().maxCoeff() <= 1e-10);
  for (int i = 1; i < 50; ++i) CHECK(r.values[i] >= r.values[i - 1]);

  const Matrix rebuilt = r.vectors * r.values.cast<cplx>().asDiagonal() * r.vectors.adjoint();
  CHECK((eigvalsh(rebuilt) - r.values).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(eigh(Matrix::Constant(2, 2, kI)), NotHermitian);
}

TEST_CASE("eigh is deterministic inside degenerate clusters") {
  fixtures::Rng rng(3);
  const Matrix u = fixtures::haar_unitary(6, rng);
  const Matrix m = u * diag_of({1, 1, 1, 2, 2, 5}) * u.adjoint();
  const Matrix herm = 0.5 * (m + m.adjoint());
  const EigenDecomposition a = eigh(herm), b = eigh(herm);
  CHECK((a.vectors - b.vectors).norm() == 0.0);
  for (int c = 0; c < 6; ++c) {
    Eigen::Index first = 0;
    while (std::abs(a.vectors(first, c)) <= 1e-8) ++first;
    CHECK(std::abs(a.vectors(first, c).imag()) < 1e-12);
    CHECK(a.vectors(first, c).real() > 0);
  }
}

TEST_CASE("numerical rank") {
  CHECK(numerical_rank(Matrix::Identity(7, 7), 1e-8) == 7);
  CHECK(numerical_rank(Matrix::Zero(4, 4), 1e-8) == 0);
  fixtures::Rng rng(11);
  Matrix m = Matrix::Zero(20, 20);
  for (int i = 0; i < 3; ++i) {
    const Matrix a = fixtures::haar_unitary(20, rng).col(0), b = fixtures::haar_unitary(20, rng).col(0);
    m += (i + 1.0) * a * b.adjoint();
  }
  CHECK(numerical_rank(m, 1e-8) == 3);
}

TEST_CASE("conjugation") {
  fixtures::Rng rng(5);
  const Matrix h = fixtures::random_hermitian(9, 1.0, rng);
  CHECK((conjugate(h, Matrix::Identity(9, 9)) - h).norm() < 1e-14);
  const Matrix c = conjugate(h, fixtures::haar_unitary(9, rng));
  CHECK(is_hermitian(c));
  CHECK((eigvalsh(c) - eigvalsh(h)).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK_THROWS_AS(conjugate(h, 2.0 * Matrix::Identity(9, 9)), NotUnitary);

  const int k = 6;
  const Matrix d = build_derivative({k, 1}).matrix;
  const Matrix shifted = conjugate(d, cyclic_shift(k));
  for (int m = -k + 1; m <= k; ++m) CHECK(std::abs(shifted(m + k, m + k) - cplx(m - 1)) < 1e-14);
  CHECK(std::abs(shifted(0, 0) - cplx(k)) < 1e-14);  // wrapped edge mode
}

TEST_CASE("truncation keeps the shifted zero mode exact") {
  for (int k : {1, 2, 5, 17}) {
    const RealVector ev = eigvalsh(build_dirac(SymbolFunction::scalar_constant(0.37), {k, 1}).matrix);
    double nearest = ev[0];
    for (Eigen::Index i = 0; i < ev.size(); ++i)
      if (std::abs(ev[i]) < std::abs(nearest)) nearest = ev[i];
    CHECK(nearest == doctest::Approx(0.37).epsilon(1e-14));
  }
}

TEST_CASE("multiplication is multiplicative on interior modes") {
  fixtures::Rng rng(9);
  const int k = 12;
  const SymbolFunction f = fixtures::random_hermitian_potential(2, 3, 1.0, rng);
  const SymbolFunction g = fixtures::random_unitary_loop(2, 2, 1, rng).symbol;
  const FourierTruncation t(k, 2);
  const Matrix lhs = build_multiplication(f * g, t);
  const Matrix rhs = build_multiplication(f, t) * build_multiplication(g, t);
  const int lo = t.index(-k / 2, 0), size = t.index(k / 2, 1) - lo + 1;
  CHECK((lhs - rhs).block(lo, lo, size, size).norm() <= 1e-9);
  const Matrix sum = build_multiplication(f + f.scaled(2.0), t);
  CHECK((sum - 3.0 * build_multiplication(f, t)).norm() <= 1e-12);
}
