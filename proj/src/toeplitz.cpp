#include "specflow/toeplitz.hpp"

#include <cmath>
#include <limits>

#include <Eigen/SVD>

#include "specflow/parallel.hpp"

namespace specflow {

SpectralSection hardy_section(const FourierTruncation& trunc) {
  SpectralSection s = aps_projection(build_derivative(trunc), 0.0, CutoffPolicy::inclusive);
  s.threshold_window = 0.0;
  return s;
}

ToeplitzOperator toeplitz_compress(const SpectralSection& p, const SymbolFunction& g, const Tolerances& tol) {
  if (g.rank() != p.truncation.bundle_rank) throw DimensionMismatch("symbol rank does not match the section");
  if (!g.is_unitary(tol.unitary)) throw NotUnitary("Toeplitz symbol is not unitary-valued");
  p.validate(tol);
  ToeplitzOperator t;
  t.section = p;
  t.symbol = g;
  t.frame = projector_frame(p.projector);
  t.matrix = t.frame.adjoint() * build_multiplication(g, p.truncation) * t.frame;
  return t;
}

namespace {

// Section at truncation K widened to K_out: identity on the new top modes,
// zero on the new bottom modes.
Matrix pad_section(const Matrix& p, int k, int k_out, int n) {
  const int dim_out = (2 * k_out + 1) * n;
  Matrix q = Matrix::Zero(dim_out, dim_out);
  const int off = (k_out - k) * n;
  q.block(off, off, p.rows(), p.cols()) = p;
  for (int i = (k_out + k + 1) * n; i < dim_out; ++i) q(i, i) = 1.0;
  return q;
}

Matrix pad_frame(const Matrix& frame, int k, int k_out, int n) {
  const int extra = (k_out - k) * n;
  Matrix f = Matrix::Zero((2 * k_out + 1) * n, frame.cols() + extra);
  f.block(extra, 0, frame.rows(), frame.cols()) = frame;
  for (int c = 0; c < extra; ++c) f((k_out + k + 1) * n + c, frame.cols() + c) = 1.0;
  return f;
}

struct Side {
  int nullity = 0;
  double gap = std::numeric_limits<double>::infinity();
  Matrix null_frame;
};

// Nullity of P_ext M_g Phi, with the output widened so the image is exact.
Side kernel_side(const Matrix& p, const Matrix& frame, const SymbolFunction& g, int k, const Tolerances& tol) {
  const int n = g.rank();
  const int k_out = k + g.bandwidth();
  const Matrix a = pad_section(p, k, k_out, n) * build_multiplication_rect(g, k, k_out) * frame;
  Side s;
  if (a.cols() == 0) return s;
  const GapRank gr = gap_rank(a, tol.rank_tol, tol.rank_gap, 1.0);
  s.nullity = gr.nullity;
  s.gap = gr.gap_ratio;
  if (s.nullity > 0) {
    Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeFullV);
    s.null_frame = frame * svd.matrixV().rightCols(s.nullity);
  } else {
    s.null_frame = Matrix::Zero(frame.rows(), 0);
  }
  return s;
}

}  // namespace

ToeplitzIndex fredholm_index_detail(const ToeplitzOperator& t, const Tolerances& tol) {
  const int k = t.section.truncation.max_mode;
  const int n = t.section.truncation.bundle_rank;
  const SymbolFunction gs = t.symbol.adjoint();

  ToeplitzIndex r;
  const Side ker = kernel_side(t.section.projector, t.frame, t.symbol, k, tol);
  const Side cok = kernel_side(t.section.projector, t.frame, gs, k, tol);
  r.kernel_dim = ker.nullity;
  r.cokernel_dim = cok.nullity;
  r.index = ker.nullity - cok.nullity;
  r.kernel = ker.null_frame;
  r.cokernel = cok.null_frame;

  const int k2 = 2 * k;
  const Matrix p2 = pad_section(t.section.projector, k, k2, n);
  const Matrix f2 = pad_frame(t.frame, k, k2, n);
  const Side ker2 = kernel_side(p2, f2, t.symbol, k2, tol);
  const Side cok2 = kernel_side(p2, f2, gs, k2, tol);
  r.index_doubled = ker2.nullity - cok2.nullity;
  r.gap_ratio = std::min({ker.gap, cok.gap, ker2.gap, cok2.gap});
  r.stable = r.index == r.index_doubled;
  if (!r.stable)
    throw UnstableIndex("Toeplitz index changed from " + std::to_string(r.index) + " at K=" + std::to_string(k) +
                        " to " + std::to_string(r.index_doubled) + " at K=" + std::to_string(k2));
  return r;
}

int fredholm_index(const ToeplitzOperator& t, const Tolerances& tol) { return fredholm_index_detail(t, tol).index; }

WindingData winding(const SymbolFunction& g, int grid, const Tolerances& tol) {
  if (grid < tol.winding_min_grid)
    throw GridTooCoarse("winding needs at least " + std::to_string(tol.winding_min_grid) + " samples");
  if (!g.is_unitary(tol.unitary, grid)) throw NotUnitary("winding: symbol is not unitary-valued");
  const SymbolFunction dg = g.derivative();
  cplx sum = 0.0;
  for (int j = 0; j < grid; ++j) {
    const double x = 2.0 * kPi * j / grid;
    sum += (g(x).partialPivLu().solve(dg(x))).trace();
  }
  WindingData w;
  w.grid = grid;
  w.raw_integral = (sum * (2.0 * kPi / grid) / (2.0 * kPi * kI)).real();
  w.winding = static_cast<int>(std::lround(w.raw_integral));
  if (std::abs(w.raw_integral - w.winding) > tol.winding_ambiguous)
    throw RoundingAmbiguous("winding integral " + std::to_string(w.raw_integral) + " is not near an integer");
  return w;
}

namespace {

// (1/2) \int_{S^1} Tr([w1, w2] wx) dx at one base point.
double degree1_density(const SymbolFunction& g, const SymbolFunction& d1, const SymbolFunction& d2, int fiber_grid) {
  const SymbolFunction dx = g.derivative();
  cplx sum = 0.0;
  for (int j = 0; j < fiber_grid; ++j) {
    const double x = 2.0 * kPi * j / fiber_grid;
    const auto lu = g(x).partialPivLu();
    const Matrix w1 = lu.solve(d1(x));
    const Matrix w2 = lu.solve(d2(x));
    const Matrix wx = lu.solve(dx(x));
    sum += ((w1 * w2 - w2 * w1) * wx).trace();
  }
  return (0.5 * sum * (2.0 * kPi / fiber_grid)).real();
}

}  // namespace

OddChernCochain odd_chern_integral(const SymbolFamily& family, int n, const OddChernOptions& options,
                                   const Tolerances& tol) {
  if (n != 0 && n != 1) throw InvalidArgument("odd_chern_integral supports n = 0 and n = 1");
  const BaseGrid& grid = family.grid;
  if (static_cast<int>(family.symbols.size()) != grid.vertex_count())
    throw DimensionMismatch("symbol family does not cover the base grid");
  OddChernCochain out;
  out.degree = n;

  if (n == 0) {
    out.values.resize(family.symbols.size());
    parallel_for(family.symbols.size(), [&](std::size_t v) {
      out.values[v] = winding(family.symbols[v], std::max(options.fiber_grid, tol.winding_min_grid), tol).raw_integral;
    });
    for (const auto& [a, b] : grid.edges())
      out.closedness_defect = std::max(out.closedness_defect, std::abs(out.values[a] - out.values[b]));
    out.total = out.values.empty() ? 0.0 : out.values.front();
    out.calibrated = -out.total;
  } else {
    if (grid.topology() != BaseTopology::torus) throw InvalidArgument("degree-1 odd Chern integral needs a torus base");
    const auto plaquettes = grid.plaquettes();
    const double h = grid.spacing();
    const int s = std::max(1, options.subdivisions);
    const double e = options.derivative_step;
    out.values.assign(plaquettes.size(), 0.0);
    parallel_for(plaquettes.size(), [&](std::size_t p) {
      const auto c0 = grid.coordinates(plaquettes[p][0]);
      double acc = 0.0;
      for (int a = 0; a < s; ++a)
        for (int b = 0; b < s; ++b) {
          const double t1 = c0[0] + (a + 0.5) * h / s;
          const double t2 = c0[1] + (b + 0.5) * h / s;
          SymbolFunction g, d1, d2;
          if (family.generator) {
            g = family.generator(t1, t2);
            d1 = (family.generator(t1 + e, t2) - family.generator(t1 - e, t2)).scaled(1.0 / (2 * e));
            d2 = (family.generator(t1, t2 + e) - family.generator(t1, t2 - e)).scaled(1.0 / (2 * e));
          } else {
            // Bilinear interpolation of the corner symbols.
            const auto& q = plaquettes[p];
            const double u = (a + 0.5) / s, w = (b + 0.5) / s;
            const SymbolFunction& g00 = family.symbols[q[0]];
            const SymbolFunction& g10 = family.symbols[q[1]];
            const SymbolFunction& g11 = family.symbols[q[2]];
            const SymbolFunction& g01 = family.symbols[q[3]];
            g = g00.scaled((1 - u) * (1 - w)) + g10.scaled(u * (1 - w)) + g11.scaled(u * w) + g01.scaled((1 - u) * w);
            d1 = ((g10 - g00).scaled(1 - w) + (g11 - g01).scaled(w)).scaled(1.0 / h);
            d2 = ((g01 - g00).scaled(1 - u) + (g11 - g10).scaled(u)).scaled(1.0 / h);
          }
          acc += degree1_density(g, d1, d2, options.fiber_grid);
        }
      out.values[p] = acc * (h / s) * (h / s);
    });
    for (double v : out.values) out.total += v;
    out.calibrated = kOddChernDegree1 * out.total;
    // Top degree on a surface: the coboundary vanishes identically.
    out.closedness_defect = 0.0;
  }
  if (std::abs(out.calibrated - std::round(out.calibrated)) > 0.1)
    throw GridTooCoarse("calibrated odd Chern integral " + std::to_string(out.calibrated) +
                        " is not near an integer; refine the base or fiber grid");
  return out;
}

}  // namespace specflow
