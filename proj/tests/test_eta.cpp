#include <doctest.h>

#include <gsl/gsl_sf_zeta.h>

#include "specflow/eta.hpp"
#include "specflow/hurwitz.hpp"

using namespace specflow;

namespace {

RealVector flipped(RealVector s, double value) {
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] == value) s[i] = -value;
  return s;
}

}  // namespace

TEST_CASE("hurwitz zeta against GSL and closed forms") {
  for (double s : {1.5, 2.0, 3.7})
    for (double a : {0.1, 0.25, 0.7, 2.5}) CHECK(hurwitz_zeta(s, a) == doctest::Approx(gsl_sf_hzeta(s, a)).epsilon(1e-12));
  for (double a : {0.1, 0.25, 0.5, 0.9}) {
    CHECK(hurwitz_zeta(0.0, a) == doctest::Approx(0.5 - a).epsilon(1e-12));
    CHECK(hurwitz_zeta(-1.0, a) == doctest::Approx(-(a * a - a + 1.0 / 6.0) / 2.0).epsilon(1e-12));
  }
}

TEST_CASE("eta of the shifted derivative") {
  CHECK(std::abs(eta_shifted_derivative(0.5).eta) < 1e-12);
  CHECK(eta_shifted_derivative(0.25).eta == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(eta_shifted_derivative(0.1).eta == doctest::Approx(0.8).epsilon(1e-12));
  const EtaValue e = eta_shifted_derivative(0.7);
  CHECK(e.kernel_dim == 0);
  CHECK(e.reduced - e.eta / 2 - e.kernel_dim / 2.0 == 0.0);
  CHECK(e.method == EtaMethod::hurwitz);
  CHECK_THROWS_AS(eta_shifted_derivative(0.0), InvalidArgument);
  CHECK_THROWS_AS(eta_shifted_derivative(1.0), InvalidArgument);
}

TEST_CASE("closed-form reduced eta") {
  CHECK(reduced_eta_shifted_closed_form(0.25) == doctest::Approx(0.25));
  CHECK(reduced_eta_shifted_closed_form(1.25) == doctest::Approx(0.25));
  CHECK(reduced_eta_shifted_closed_form(0.0) == doctest::Approx(0.5));  // eta 0, one kernel mode
}

TEST_CASE("heat extrapolation on lattice windows") {
  for (double a : {0.1, 0.25, 0.7}) {
    const EtaValue h = eta_heat(shifted_lattice(a, 10000));
    CHECK(std::abs(h.eta - (1 - 2 * a)) <= 1e-6);
    CHECK(h.method == EtaMethod::heat_extrapolation);
  }
  CHECK(std::abs(eta_heat(shifted_lattice(0.3, 300)).eta - eta_shifted_derivative(0.3).eta) <= 1e-6);
}

TEST_CASE("heat eta of a symmetric spectrum") {
  RealVector s(6);
  s << -3, -1, -0.5, 0.5, 1, 3;
  HeatOptions sym;
  sym.tail = TailModel::symmetric;
  CHECK(std::abs(eta_heat(s, sym).eta) <= 1e-10);
  RealVector with_kernel(3);
  with_kernel << -2, 0, 2;
  const EtaValue k = eta_heat(with_kernel, sym);
  CHECK(k.kernel_dim == 1);
  CHECK(k.reduced == doctest::Approx(0.5));
}

TEST_CASE("flipping one eigenvalue changes eta by -2") {
  const RealVector base = shifted_lattice(0.25, 2000);
  const double before = eta_heat(base).eta;
  const double after = eta_heat(flipped(base, 1.25)).eta;
  CHECK(std::abs(after - before + 2.0) <= 1e-6);
}

TEST_CASE("eta variation formula") {
  const EtaFlow none = sf_via_eta(shifted_derivative_profile(0.25, 0.75, 128));
  CHECK(none.sf == 0);
  CHECK(none.integral == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(none.endpoints == doctest::Approx(-0.5).epsilon(1e-9));
  CHECK(sf_via_eta(shifted_derivative_profile(-0.25, 0.25, 128)).sf == 1);
  CHECK(sf_via_eta(shifted_derivative_profile(0.3, 0.3, 64)).sf == 0);
  CHECK(sf_via_eta(shifted_derivative_profile(0.25, -1.75, 200)).sf == -2);
  CHECK_THROWS_AS(sf_via_eta(shifted_derivative_profile(-0.25, 0.25, 16)), GridTooCoarse);
}

TEST_CASE("eta variation agrees with the gap-partition count") {
  for (auto [a0, a1] : std::vector<std::pair<double, double>>{{-0.25, 0.25}, {0.25, 0.75}, {0.6, -1.3}, {-2.2, 0.9}}) {
    const OperatorCurve c = OperatorCurve::from_path(
        PotentialPath::linear(SymbolFunction::scalar_constant(a0), SymbolFunction::scalar_constant(a1)), {12, 1}, 2);
    CHECK(sf_via_eta(shifted_derivative_profile(a0, a1, 256)).sf == spectral_flow(c).sf);
  }
}

TEST_CASE("heat profile of a sampled curve") {
  const OperatorCurve c = OperatorCurve::from_path(
      PotentialPath::linear(SymbolFunction::scalar_constant(-0.25), SymbolFunction::scalar_constant(0.25)), {300, 1},
      64);
  CHECK(sf_via_eta(heat_profile(c)).sf == 1);
}

TEST_CASE("degree-0 eta form") {
  const TruncatedOperator d = build_dirac(SymbolFunction::scalar_constant(0.25), {40, 1});
  const RealVector spec = eigvalsh(d.matrix);
  const EtaValue base = eta_shifted_derivative(0.25);

  const EtaValue none = eta_form_degree0(spec, base, MPOperatorSpec::uniform(spec, 0.2));
  CHECK(none.reduced == doctest::Approx(base.reduced));

  const EtaValue two = eta_form_degree0(spec, base, MPOperatorSpec::uniform(spec, 2.0));
  CHECK(flipped_count(spec, 2.0) == 2);
  CHECK(base.reduced - two.reduced == doctest::Approx(2.0).epsilon(1e-12));

  for (int m : {1, 2, 5}) {
    const double c = m - 0.5;
    const SpectralSection p0 = threshold_section(d, 0.0), pc = threshold_section(d, c);
    const double e0 = eta_form_degree0(spec, base, MPOperatorSpec::uniform(spec, 0.0)).reduced;
    const double ec = eta_form_degree0(spec, base, MPOperatorSpec::uniform(spec, c)).reduced;
    CHECK(difference_element(p0, pc).value == m);
    CHECK(std::lround(e0 - ec) == m);
    CHECK(std::abs(e0 - ec - m) < 1e-12);
  }

  // Any valid set of shifts gives the same value.
  MPOperatorSpec other = MPOperatorSpec::uniform(spec, 2.0, 3.0);
  CHECK(eta_form_degree0(spec, base, other).reduced == doctest::Approx(two.reduced));

  MPOperatorSpec bad{2.0, {0.25, 2.0}};  // moves 0.25 -> 0
  CHECK_THROWS_AS(eta_form_degree0(spec, base, bad), InvalidArgument);
}
