#include <doctest.h>

#include "specflow/bundles.hpp"
#include "specflow/fixtures.hpp"
#include "specflow/toeplitz.hpp"

using namespace specflow;

namespace {

int toeplitz_index(const SymbolFunction& g, int k) {
  return fredholm_index(toeplitz_compress(hardy_section({k, g.rank()}), g));
}

// sf of -i d/dx + V -> g (-i d/dx + V) g^{-1}, i.e. potential V -> i g' g* + g V g*.
int conjugation_path_sf(const SymbolFunction& g, const SymbolFunction& v, int k) {
  const OperatorCurve c = OperatorCurve::from_path(PotentialPath::linear(v, conjugated_potential(g, v)), {k, g.rank()}, 2);
  return spectral_flow(c).sf;
}

Matrix full(const ToeplitzOperator& t) { return t.frame * t.matrix * t.frame.adjoint(); }

}  // namespace

TEST_CASE("hardy section") {
  const SpectralSection p = hardy_section({2, 1});
  CHECK(p.rank() == 3);
  CHECK((p.projector * p.projector - p.projector).norm() < 1e-14);
  const Matrix d = build_derivative({2, 1}).matrix;
  CHECK((p.projector * d - d * p.projector).norm() == 0.0);
  CHECK(hardy_section({4, 3}).rank() == 15);
}

TEST_CASE("compressions of simple symbols") {
  const int k = 6;
  const FourierTruncation t(k, 1);
  const SpectralSection p = hardy_section(t);
  const ToeplitzOperator id = toeplitz_compress(p, SymbolFunction::scalar_constant(1.0));
  CHECK((id.matrix - Matrix::Identity(k + 1, k + 1)).norm() < 1e-14);

  const Matrix shift = full(toeplitz_compress(p, SymbolFunction::monomial(1)));
  for (int a = 0; a <= k; ++a)
    for (int b = 0; b <= k; ++b) {
      const double expect = (a == b + 1) ? 1.0 : 0.0;
      CHECK(std::abs(shift(t.index(a, 0), t.index(b, 0)) - expect) < 1e-14);
    }
  const Matrix back = full(toeplitz_compress(p, SymbolFunction::monomial(-1)));
  CHECK((back - shift.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK_THROWS_AS(toeplitz_compress(p, SymbolFunction::scalar_constant(2.0)), NotUnitary);
}

TEST_CASE("fredholm index of monomials") {
  fixtures::Rng rng(1);
  CHECK(toeplitz_index(SymbolFunction::constant(fixtures::haar_unitary(2, rng), true), 16) == 0);
  CHECK(toeplitz_index(SymbolFunction::monomial(1), 32) == -1);
  CHECK(toeplitz_index(SymbolFunction::monomial(3), 32) == -3);
  CHECK(toeplitz_index(SymbolFunction::monomial(-2), 32) == 2);
  const ToeplitzIndex d = fredholm_index_detail(toeplitz_compress(hardy_section({32, 1}), SymbolFunction::monomial(1)));
  CHECK(d.kernel_dim == 0);
  CHECK(d.cokernel_dim == 1);
  CHECK(d.stable);
  CHECK(d.index_doubled == -1);
}

TEST_CASE("winding numbers") {
  CHECK(winding(SymbolFunction::monomial(2)).winding == 2);
  CHECK(winding(SymbolFunction::scalar_constant(1.0)).winding == 0);
  const SymbolFunction block = SymbolFunction::block_diagonal({SymbolFunction::monomial(1), SymbolFunction::monomial(-4)});
  const WindingData w = winding(block);
  CHECK(w.winding == -3);
  CHECK(std::abs(w.raw_integral - w.winding) <= 0.01);
  CHECK_THROWS_AS(winding(SymbolFunction::monomial(1), 32), GridTooCoarse);
}

TEST_CASE("index is minus the winding for random loops") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    fixtures::Rng rng(seed);
    const auto loop = fixtures::random_unitary_loop(2, 3, 2, rng);
    CHECK(winding(loop.symbol).winding == loop.winding);
    CHECK(toeplitz_index(loop.symbol, 24) == -loop.winding);
  }
}

TEST_CASE("index is additive under products") {
  for (std::uint64_t seed = 11; seed <= 15; ++seed) {
    fixtures::Rng rng(seed);
    const SymbolFunction g = fixtures::random_unitary_loop(2, 2, 2, rng).symbol;
    const SymbolFunction h = fixtures::random_unitary_loop(2, 2, 2, rng).symbol;
    CHECK(toeplitz_index(g * h, 24) == toeplitz_index(g, 24) + toeplitz_index(h, 24));
  }
}

TEST_CASE("index equals the spectral flow of the conjugation path") {
  const SymbolFunction zero2 = SymbolFunction::from_modes(2, {});
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    fixtures::Rng rng(seed);
    const SymbolFunction g = fixtures::random_unitary_loop(2, 3, 2, rng).symbol;
    const int index = toeplitz_index(g, 24);
    CHECK(conjugation_path_sf(g, zero2, 24) == index);
    // Only the symbol of D matters: a bounded band-limited perturbation keeps sf.
    const SymbolFunction w = fixtures::random_hermitian_potential(2, 2, 0.8, rng);
    CHECK(conjugation_path_sf(g, w, 24) == index);
  }
}

TEST_CASE("odd Chern cochain, degree 0") {
  const BaseGrid grid = BaseGrid::torus(8);
  const SymbolFamily fam = SymbolFamily::sample(grid, [](double, double) { return SymbolFunction::monomial(1); });
  const OddChernCochain c = odd_chern_integral(fam, 0);
  for (double v : c.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(c.calibrated == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(c.calibrated == doctest::Approx(toeplitz_index(SymbolFunction::monomial(1), 16)));
  CHECK(c.closedness_defect < 1e-6);
}

TEST_CASE("odd Chern cochain, degree 1") {
  const BaseGrid grid = BaseGrid::torus(8);
  const SymbolFamily flat = SymbolFamily::sample(grid, [](double, double) {
    return SymbolFunction::block_diagonal({SymbolFunction::monomial(1), SymbolFunction::monomial(-1)});
  });
  const OddChernCochain c = odd_chern_integral(flat, 1);
  for (double v : c.values) CHECK(std::abs(v) <= 1e-10);

  const BaseGrid g12 = BaseGrid::torus(12);
  const OddChernCochain bott = odd_chern_integral(bott_family(g12), 1);
  const int ch1 = chern_number(ProjectorFamily::sample(g12, wrap_projector));
  CHECK(std::abs(bott.calibrated + ch1) <= 0.02);  // ch1(ind T_g) = -c1(q)
  CHECK(bott.closedness_defect < 1e-6);
  CHECK(kOddChernDegree1 == doctest::Approx(1.0 / (4 * kPi * kPi)));
}
