// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "specflow/bundles.hpp"
#include "specflow/eta.hpp"
#include "specflow/fixtures.hpp"
#include "specflow/mtorus.hpp"
#include "specflow/toeplitz.hpp"

using namespace specflow;

namespace {

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int id, const char* title, double limit_s, const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.ok = false;
    out.detail << " [exception: " << e.what() << "]";
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (limit_s > 0 && elapsed > limit_s) {
    out.ok = false;
    out.detail << " [over time limit " << limit_s << " s]";
  }
  if (!out.ok) ++failures;
  std::printf("%s criterion %d: %s (%.2f s)%s\n", out.ok ? "PASS" : "FAIL", id, title, elapsed,
              out.detail.str().c_str());
  std::fflush(stdout);
}

ToeplitzIndex hardy_index(const SymbolFunction& g, int k) {
  return fredholm_index_detail(toeplitz_compress(hardy_section({k, g.rank()}), g));
}

// Linear path from -i d/dx + V to g (-i d/dx + V) g^{-1}.
int conjugation_sf(const SymbolFunction& g, const SymbolFunction& v, int k) {
  return spectral_flow(
             OperatorCurve::from_path(PotentialPath::linear(v, conjugated_potential(g, v)), {k, g.rank()}, 2))
      .sf;
}

fixtures::UnitaryLoop seeded_symbol(std::uint64_t seed) {
  fixtures::Rng rng(1000 + seed);
  return fixtures::random_unitary_loop(2, 3, 2, rng);
}

constexpr int kSeeds = 20;

// Gap midpoints of a spectrum nearest to 0, as candidate section thresholds.
std::vector<double> gap_levels(const RealVector& s, int count) {
  std::vector<std::pair<double, double>> mids;
  for (Eigen::Index i = 0; i + 1 < s.size(); ++i)
    if (s[i + 1] - s[i] > 0.2) mids.push_back({std::abs(0.5 * (s[i] + s[i + 1])), 0.5 * (s[i] + s[i + 1])});
  std::sort(mids.begin(), mids.end());
  std::vector<double> out;
  for (int i = 0; i < count && i < static_cast<int>(mids.size()); ++i) out.push_back(mids[i].second);
  return out;
}

Matrix unitary_exp(const Matrix& h, double s) {
  const Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  return es.eigenvectors() * (kI * s * es.eigenvalues().cast<cplx>().array()).exp().matrix().asDiagonal() *
         es.eigenvectors().adjoint();
}

}  // namespace

int main() {
  criterion(1, "Toeplitz index law ind T_{e^{inx}} = -n, K = 64, K/2K stable", 10.0, [](Outcome& o) {
    for (int n : {1, 2, 3}) {
      const ToeplitzIndex r = hardy_index(SymbolFunction::monomial(n), 64);
      o.require(r.index == -n && r.stable && r.index_doubled == -n, "e^{i" + std::to_string(n) + "x}");
      o.detail << " n=" << n << ":" << r.index;
    }
    const std::vector<std::pair<int, int>> blocks = {{1, 2}, {3, -1}, {-2, -2}};
    for (auto [a, b] : blocks) {
      const SymbolFunction g = SymbolFunction::block_diagonal({SymbolFunction::monomial(a), SymbolFunction::monomial(b)});
      const ToeplitzIndex r = hardy_index(g, 64);
      o.require(r.index == -(a + b) && r.stable, "block diag");
      o.detail << " diag(" << a << "," << b << "):" << r.index;
    }
  });

  criterion(2, "index = spectral flow of the conjugation path, 5 seeded symbols", 60.0, [](Outcome& o) {
    const SymbolFunction zero = SymbolFunction::from_modes(2, {});
    for (std::uint64_t s = 1; s <= 5; ++s) {
      const auto loop = seeded_symbol(s);
      const ToeplitzIndex r = hardy_index(loop.symbol, 32);
      const int sf = conjugation_sf(loop.symbol, zero, 32);
      o.require(r.stable && r.index == sf, "seed " + std::to_string(s));
      o.detail << " " << r.index << "/" << sf;
    }
  });

  criterion(3, "conjugation-path sf unchanged under 3 bounded perturbations of D", 0.0, [](Outcome& o) {
    for (std::uint64_t s = 1; s <= 5; ++s) {
      const auto loop = seeded_symbol(s);
      const int base = conjugation_sf(loop.symbol, SymbolFunction::from_modes(2, {}), 32);
      fixtures::Rng rng(2000 + s);
      for (int p = 0; p < 3; ++p) {
        const SymbolFunction w = fixtures::random_hermitian_potential(2, 2, 0.5 + 0.5 * p, rng);
        const int sf = conjugation_sf(loop.symbol, w, 32);
        o.require(sf == base, "seed " + std::to_string(s) + " perturbation " + std::to_string(p));
      }
      o.detail << " " << base;
    }
  });

  criterion(4, "eta(-i d/dx + a) = 1 - 2a within 1e-6, Hurwitz and heat", 5.0, [](Outcome& o) {
    for (double a : {0.1, 0.25, 0.7}) {
      const double hz = eta_shifted_derivative(a).eta;
      const double heat = eta_heat(shifted_lattice(a, 10000)).eta;
      o.require(std::abs(hz - (1 - 2 * a)) <= 1e-6 && std::abs(heat - (1 - 2 * a)) <= 1e-6,
                "a = " + std::to_string(a));
      char buf[96];
      std::snprintf(buf, sizeof buf, " a=%.2f: %.2e/%.2e", a, std::abs(hz - (1 - 2 * a)), std::abs(heat - (1 - 2 * a)));
      o.detail << buf;
    }
  });

  criterion(5, "APS variation formula: sf_via_eta matches spectral_flow", 5.0, [](Outcome& o) {
    const std::vector<std::tuple<double, double, int>> paths = {{0.25, 0.75, 0}, {-0.25, 0.25, 1}};
    for (auto [a0, a1, expect] : paths) {
      const int eta_sf = sf_via_eta(shifted_derivative_profile(a0, a1, 128)).sf;
      const int heat_sf = sf_via_eta(heat_profile(OperatorCurve::from_path(
                                         PotentialPath::linear(SymbolFunction::scalar_constant(a0),
                                                               SymbolFunction::scalar_constant(a1)),
                                         {64, 1}, 64)))
                              .sf;
      const int flow = spectral_flow(OperatorCurve::from_path(
                                         PotentialPath::linear(SymbolFunction::scalar_constant(a0),
                                                               SymbolFunction::scalar_constant(a1)),
                                         {16, 1}, 2))
                           .sf;
      o.require(eta_sf == expect && heat_sf == expect && flow == expect, "path " + std::to_string(a0));
      o.detail << " " << eta_sf << "/" << heat_sf << "/" << flow;
    }
  });

  criterion(6, "rank[P_0 - P_c] = degree-0 eta-form difference = m", 0.0, [](Outcome& o) {
    const TruncatedOperator d = build_dirac(SymbolFunction::scalar_constant(0.25), {40, 1});
    const RealVector spec = eigvalsh(d.matrix);
    const EtaValue base = eta_shifted_derivative(0.25);
    for (int m : {1, 2, 5}) {
      const double c = m - 0.5;
      const int diff = difference_element(threshold_section(d, 0.0), threshold_section(d, c)).value;
      const double e0 = eta_form_degree0(spec, base, MPOperatorSpec::uniform(spec, 0.0)).reduced;
      const double ec = eta_form_degree0(spec, base, MPOperatorSpec::uniform(spec, c)).reduced;
      o.require(diff == m && e0 - ec == double(m), "m = " + std::to_string(m));
      o.detail << " m=" << m << ":" << diff << "/" << e0 - ec;
    }
  });

  criterion(7, "higher spectral flow of the Bott Toeplitz family on a 12x12 torus", 300.0, [](Outcome& o) {
    const BaseGrid grid = BaseGrid::torus(12);
    const FourierTruncation trunc(16, 2);
    const SymbolFamily fam = bott_family(grid);
    int bad = 0;
    for (int v = 0; v < grid.vertex_count(); ++v) {
      const int pointwise = fredholm_index(toeplitz_compress(hardy_section(trunc), fam.symbols[v]));
      const int sf = conjugation_sf(fam.symbols[v], SymbolFunction::from_modes(2, {}), 16);
      bad += pointwise != -1 || sf != -1;
    }
    o.require(bad == 0, std::to_string(bad) + " vertices with ch0 != -1");
    const KClassNumeric hsf = higher_spectral_flow(grid, toeplitz_path_spec(bott_symbol, trunc), true);
    o.require(hsf.ch0 == -1 && hsf.ch1 && std::abs(*hsf.ch1) == 1 && hsf.stable, "higher sf class");
    const KClassNumeric ind = toeplitz_family_index(fam, trunc);
    o.require(ind.ch0 == hsf.ch0 && ind.ch1 == hsf.ch1, "index bundle equals higher sf");
    const OddChernCochain odd = odd_chern_integral(fam, 1);
    o.require(hsf.ch1 && std::abs(odd.calibrated - *hsf.ch1) <= 0.02, "calibrated odd Chern integral");
    char buf[160];
    std::snprintf(buf, sizeof buf, " ch0=%d ch1=%d stable=%d index ch1=%d odd=%.6f", hsf.ch0, hsf.ch1 ? *hsf.ch1 : 99,
                  int(hsf.stable), ind.ch1 ? *ind.ch1 : 99, odd.calibrated);
    o.detail << buf;
  });

  criterion(8, "mapping-torus index = path spectral flow, flux 1 and 2 at (64, 32)", 300.0, [](Outcome& o) {
    for (int n : {1, 2}) {
      const TwistedLoopSpec spec = TwistedLoopSpec::flux(n);
      const MappingTorusIndex r = mapping_torus_index(spec, 64, 32);
      const int sf = spectral_flow(spec.curve(32)).sf;
      o.require(r.stable && r.index == sf && sf == -n, "flux " + std::to_string(n));
      o.detail << " flux " << n << ": " << r.index << "/" << sf << " (2m_u " << r.index_refined_u << ", 2K "
               << r.index_refined_k << ")";
    }
  });

  criterion(9, "property suites over 20 seeded instances each", 0.0, [](Outcome& o) {
    int fails = 0;
    auto tally = [&](const char* name, const std::function<bool(std::uint64_t)>& prop) {
      int bad = 0;
      for (std::uint64_t s = 1; s <= kSeeds; ++s) bad += !prop(s);
      o.detail << " " << name << " " << (kSeeds - bad) << "/" << kSeeds;
      fails += bad;
    };

    tally("additivity", [](std::uint64_t s) {
      fixtures::Rng rng(100 + s);
      const OperatorCurve c = OperatorCurve::from_path(fixtures::random_potential_path(1, 4, 1, 1.5, rng), {6, 1}, 9);
      std::uniform_int_distribution<int> pick(1, 7);
      const double tau = c.samples()[pick(rng)];
      return spectral_flow(c).sf == spectral_flow(c.restricted(0, tau)).sf + spectral_flow(c.restricted(tau, 1)).sf;
    });

    tally("cocycle", [](std::uint64_t s) {
      fixtures::Rng rng(200 + s);
      const TruncatedOperator d = build_dirac(fixtures::random_hermitian_potential(2, 1, 0.3, rng), {5, 2});
      std::uniform_int_distribution<int> lvl(-3, 3);
      const Matrix u = unitary_exp(fixtures::random_hermitian(d.truncation.dim(), 1.0, rng), 1.0);
      // Generalized sections: threshold sections and a rotated copy of one.
      const Matrix p1 = aps_projection(d, lvl(rng) + 0.5).projector;
      const Matrix p2 = u * aps_projection(d, lvl(rng) + 0.5).projector * u.adjoint();
      const Matrix p3 = aps_projection(d, lvl(rng) + 0.5).projector;
      return difference_element(p1, p3).value == difference_element(p2, p3).value + difference_element(p1, p2).value;
    });

    tally("section additivity", [](std::uint64_t s) {
      fixtures::Rng rng(300 + s);
      const BaseGrid loop = BaseGrid::loop(8);
      const FourierTruncation t(4, 1);
      const SymbolFunction w0 = fixtures::random_hermitian_potential(1, 1, 0.2, rng);
      const SymbolFunction w1 = fixtures::random_hermitian_potential(1, 1, 0.2, rng);
      std::uniform_int_distribution<int> lvl(-2, 2);
      auto section = [&](double c) {
        return ProjectorFamily::sample(loop, [=](double th, double) {
          return aps_projection(build_dirac(w0.scaled(std::cos(th)) + w1.scaled(std::sin(th)), t), c).projector;
        });
      };
      const ProjectorFamily q1 = section(lvl(rng) + 0.5), q2 = section(lvl(rng) + 0.5), q3 = section(lvl(rng) + 0.5);
      const KClassNumeric a = difference_class(q1, q2), b = difference_class(q2, q3), c = difference_class(q1, q3);
      bool vertexwise = true;
      for (int v = 0; v < loop.vertex_count(); ++v)
        vertexwise = vertexwise && difference_element(q1.projector(v), q2.projector(v)).value +
                                           difference_element(q2.projector(v), q3.projector(v)).value ==
                                       difference_element(q1.projector(v), q3.projector(v)).value;
      return vertexwise && (a + b).ch0 == c.ch0;
    });

    tally("homotopy", [](std::uint64_t s) {
      fixtures::Rng rng(400 + s);
      const FourierTruncation t(4, 2);
      const TruncatedOperator d = build_dirac(fixtures::random_hermitian_potential(2, 1, 0.3, rng), t);
      const Matrix p = aps_projection(d, -0.5).projector, q = aps_projection(d, 1.5).projector;
      const Matrix h = fixtures::random_hermitian(t.dim(), 1.0, rng);
      const int first = difference_element(p, q).value;
      bool same = true;
      for (int step = 1; step <= 5; ++step) {
        const Matrix u = unitary_exp(h, 0.2 * step);
        same = same && difference_element(p, u * q * u.adjoint()).value == first;
      }
      const OperatorCurve c = OperatorCurve::from_path(fixtures::random_potential_path(1, 3, 1, 1.5, rng), {6, 1}, 5);
      return same && spectral_flow(c.reparametrized([](double x) { return x * x * (3 - 2 * x); })).sf ==
                         spectral_flow(c).sf;
    });

    tally("conjugation", [](std::uint64_t s) {
      fixtures::Rng rng(500 + s);
      const TruncatedOperator d = build_dirac(fixtures::random_hermitian_potential(2, 1, 0.4, rng), {4, 2});
      std::uniform_int_distribution<int> lvl(-3, 3);
      const Matrix p = aps_projection(d, lvl(rng) + 0.5).projector, q = aps_projection(d, lvl(rng) + 0.5).projector;
      const Matrix u = fixtures::haar_unitary(d.truncation.dim(), rng);
      const DifferenceElement a = difference_element(p, q);
      const DifferenceElement b = difference_element(u * p * u.adjoint(), u * q * u.adjoint());
      return a.value == b.value && a.kernel_dim == b.kernel_dim && a.cokernel_dim == b.cokernel_dim;
    });

    tally("periodic section independence", [](std::uint64_t s) {
      fixtures::Rng rng(600 + s);
      const OperatorCurve c =
          OperatorCurve::from_path(fixtures::random_potential_loop(1, 4, 1, 1.5, rng), {6, 1}, 9);
      const TruncatedOperator& d0 = c.operators().front();
      const std::vector<double> levels = gap_levels(eigvalsh(d0.matrix), 3);
      if (levels.size() < 3) return false;
      std::vector<int> values;
      for (double lv : levels) {
        const SpectralSection q = aps_projection(d0, lv);
        values.push_back(sf_pairs(c, q, q));
      }
      return values[0] == values[1] && values[1] == values[2] && values[0] == spectral_flow(c).sf;
    });

    o.require(fails == 0, std::to_string(fails) + " failing instances");
  });

  std::printf("%s: %d criterion(s) failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
