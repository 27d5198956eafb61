#include "specflow/bundles.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "specflow/parallel.hpp"

namespace specflow {

// ---------------------------------------------------------------- families

ProjectorFamily::ProjectorFamily(BaseGrid grid, int dim, std::vector<Matrix> frames)
    : grid_(std::move(grid)), dim_(dim), frames_(std::move(frames)) {
  if (static_cast<int>(frames_.size()) != grid_.vertex_count())
    throw DimensionMismatch("projector family needs one frame per base vertex");
  rank_ = frames_.empty() ? 0 : static_cast<int>(frames_.front().cols());
  std::ostringstream jumps;
  int bad = 0;
  for (std::size_t v = 0; v < frames_.size(); ++v) {
    const Matrix& f = frames_[v];
    if (f.rows() != dim_) throw DimensionMismatch("projector family frame has the wrong ambient dimension");
    if (f.cols() != rank_) {
      if (bad++ < 8) jumps << " v" << v << ":" << f.cols();
      continue;
    }
    if (rank_ > 0 && (f.adjoint() * f - Matrix::Identity(rank_, rank_)).cwiseAbs().maxCoeff() > 1e-9)
      throw InvalidSection("projector family frame is not orthonormal at vertex " + std::to_string(v));
  }
  if (bad)
    throw RankJump("rank changes over the base (vertex 0 has rank " + std::to_string(rank_) + ";" + jumps.str() +
                   "); perturb the family so the kernel dimension is constant");
}

ProjectorFamily ProjectorFamily::from_projectors(const BaseGrid& grid, const std::vector<Matrix>& projectors) {
  if (projectors.empty()) throw InvalidArgument("no projectors given");
  std::vector<Matrix> frames(projectors.size());
  parallel_for(projectors.size(), [&](std::size_t v) { frames[v] = projector_frame(projectors[v]); });
  return ProjectorFamily(grid, static_cast<int>(projectors.front().rows()), std::move(frames));
}

ProjectorFamily ProjectorFamily::sample(const BaseGrid& grid, const std::function<Matrix(double, double)>& projector) {
  std::vector<Matrix> p(grid.vertex_count());
  parallel_for(p.size(), [&](std::size_t v) {
    const auto th = grid.coordinates(static_cast<int>(v));
    p[v] = projector(th[0], th[1]);
  });
  return from_projectors(grid, p);
}

ProjectorFamily ProjectorFamily::empty(const BaseGrid& grid, int dim) {
  return ProjectorFamily(grid, dim, std::vector<Matrix>(grid.vertex_count(), Matrix::Zero(dim, 0)));
}

ProjectorFamily ProjectorFamily::complement() const {
  std::vector<Matrix> out(frames_.size());
  parallel_for(frames_.size(), [&](std::size_t v) {
    if (rank_ == 0) {
      out[v] = Matrix::Identity(dim_, dim_);
      return;
    }
    Eigen::HouseholderQR<Matrix> qr(frames_[v]);
    const Matrix q = qr.householderQ() * Matrix::Identity(dim_, dim_);
    out[v] = q.rightCols(dim_ - rank_);
  });
  return ProjectorFamily(grid_, dim_, std::move(out));
}

ProjectorFamily ProjectorFamily::direct_sum(const ProjectorFamily& other) const {
  if (other.grid_.vertex_count() != grid_.vertex_count()) throw DimensionMismatch("direct sum over different bases");
  std::vector<Matrix> out(frames_.size());
  for (std::size_t v = 0; v < frames_.size(); ++v) {
    Matrix f = Matrix::Zero(dim_ + other.dim_, rank_ + other.rank_);
    f.topLeftCorner(dim_, rank_) = frames_[v];
    f.bottomRightCorner(other.dim_, other.rank_) = other.frames_[v];
    out[v] = std::move(f);
  }
  return ProjectorFamily(grid_, dim_ + other.dim_, std::move(out));
}

double ProjectorFamily::max_neighbor_distance() const {
  if (rank_ == 0 || rank_ == dim_) return 0.0;
  double worst = 0.0;
  for (const auto& [a, b] : grid_.edges()) {
    const RealVector s = singular_values(frames_[a].adjoint() * frames_[b]);
    const double smin = s[s.size() - 1];
    worst = std::max(worst, std::sqrt(std::max(0.0, 1.0 - smin * smin)));
  }
  return worst;
}

void ProjectorFamily::validate(const Tolerances& tol) const {
  const double d = max_neighbor_distance();
  if (!(d < tol.neighbor_distance))
    throw GridTooCoarse("neighbouring projectors differ by " + std::to_string(d) + " >= " +
                        std::to_string(tol.neighbor_distance) + "; refine the base grid");
}

// ---------------------------------------------------------------- Chern numbers

double chern_lattice_sum(const ProjectorFamily& p, const Tolerances& tol) {
  const BaseGrid& g = p.grid();
  if (g.topology() != BaseTopology::torus) throw InvalidArgument("chern_number needs a torus base");
  if (g.resolution() < 8) throw GridTooCoarse("chern_number needs at least an 8 x 8 base grid");
  if (p.rank() == 0 || p.rank() == p.dim()) return 0.0;
  p.validate(tol);
  const int m = g.resolution();
  auto link = [&](int a, int b) {
    const cplx d = (p.frame(a).adjoint() * p.frame(b)).determinant();
    if (std::abs(d) < tol.overlap_det)
      throw SingularOverlap("overlap determinant " + std::to_string(std::abs(d)) + " between vertices " +
                            std::to_string(a) + " and " + std::to_string(b));
    return d / std::abs(d);
  };
  std::vector<cplx> u1(g.vertex_count()), u2(g.vertex_count());
  parallel_for(g.vertex_count(), [&](std::size_t vi) {
    const int v = static_cast<int>(vi);
    const int i = v % m, j = v / m;
    u1[v] = link(v, g.vertex(i + 1, j));
    u2[v] = link(v, g.vertex(i, j + 1));
  });
  double sum = 0.0;
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) {
      const int v = g.vertex(i, j);
      const cplx w = u1[v] * u2[g.vertex(i + 1, j)] * std::conj(u1[g.vertex(i, j + 1)]) * std::conj(u2[v]);
      sum += std::arg(w);
    }
  // The plaquette phases give (1 / 2 pi i) \int tr(P [d1 P, d2 P]) = -c_1.
  return -sum / (2.0 * kPi);
}

int chern_number(const ProjectorFamily& p, const Tolerances& tol) {
  return static_cast<int>(std::lround(chern_lattice_sum(p, tol)));
}

double berry_curvature_integral(const std::function<Matrix(double, double)>& projector, int grid) {
  const double h = 2.0 * kPi / grid;
  const double e = 1e-5;
  double total = 0.0;
  for (int j = 0; j < grid; ++j)
    for (int i = 0; i < grid; ++i) {
      const double t1 = (i + 0.5) * h, t2 = (j + 0.5) * h;
      const Matrix p = projector(t1, t2);
      const Matrix d1 = (projector(t1 + e, t2) - projector(t1 - e, t2)) / (2 * e);
      const Matrix d2 = (projector(t1, t2 + e) - projector(t1, t2 - e)) / (2 * e);
      total += (kI * (p * (d1 * d2 - d2 * d1)).trace()).real();
    }
  return total * h * h / (2.0 * kPi);
}

// ---------------------------------------------------------------- K-classes

KClassNumeric KClassNumeric::make(ProjectorFamily positive, ProjectorFamily negative, const Tolerances& tol) {
  KClassNumeric k;
  k.ch0 = positive.rank() - negative.rank();
  if (positive.grid().topology() == BaseTopology::torus)
    k.ch1 = chern_number(positive, tol) - chern_number(negative, tol);
  k.positive = std::move(positive);
  k.negative = std::move(negative);
  return k;
}

KClassNumeric KClassNumeric::operator+(const KClassNumeric& other) const {
  KClassNumeric k;
  k.positive = positive.direct_sum(other.positive);
  k.negative = negative.direct_sum(other.negative);
  k.ch0 = ch0 + other.ch0;
  if (ch1 && other.ch1) k.ch1 = *ch1 + *other.ch1;
  k.stable = stable && other.stable;
  return k;
}

KClassNumeric KClassNumeric::negated() const {
  KClassNumeric k = *this;
  std::swap(k.positive, k.negative);
  k.ch0 = -ch0;
  if (ch1) k.ch1 = -*ch1;
  return k;
}

namespace {

// Orthonormal frame of the numerical kernel of m (in C^{cols}).
Matrix null_frame(const Matrix& m, const Tolerances& tol) {
  if (m.cols() == 0) return Matrix::Zero(0, 0);
  if (m.rows() == 0) return Matrix::Identity(m.cols(), m.cols());
  const GapRank g = gap_rank(m, tol.rank_tol, tol.rank_gap, 1.0);
  if (g.nullity == 0) return Matrix::Zero(m.cols(), 0);
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeFullV);
  return svd.matrixV().rightCols(g.nullity);
}

struct TermFrames {
  Matrix kernel;    // Im first cap ker second
  Matrix cokernel;  // Im second cap ker first
};

TermFrames difference_frames(const Matrix& first_frame, const Matrix& second_frame, const Tolerances& tol) {
  const Matrix t = second_frame.adjoint() * first_frame;
  TermFrames f;
  f.kernel = first_frame * null_frame(t, tol);
  f.cokernel = second_frame * null_frame(t.adjoint(), tol);
  if (f.kernel.cols() == 0) f.kernel = Matrix::Zero(first_frame.rows(), 0);
  if (f.cokernel.cols() == 0) f.cokernel = Matrix::Zero(first_frame.rows(), 0);
  return f;
}

}  // namespace

ProjectorFamily kernel_bundle(const BaseGrid& grid, const std::vector<Matrix>& maps, const Tolerances& tol) {
  if (static_cast<int>(maps.size()) != grid.vertex_count())
    throw DimensionMismatch("kernel_bundle needs one map per base vertex");
  std::vector<Matrix> frames(maps.size());
  parallel_for(maps.size(), [&](std::size_t v) {
    const Matrix& m = maps[v];
    if (m.rows() == 0) {
      frames[v] = Matrix::Identity(m.cols(), m.cols());
      return;
    }
    const GapRank g = gap_rank(m, tol.rank_tol, tol.rank_gap);
    if (g.nullity == 0) {
      frames[v] = Matrix::Zero(m.cols(), 0);
      return;
    }
    Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeFullV);
    frames[v] = svd.matrixV().rightCols(g.nullity);
  });
  return ProjectorFamily(grid, maps.empty() ? 0 : static_cast<int>(maps.front().cols()), std::move(frames));
}

KClassNumeric difference_class(const ProjectorFamily& p, const ProjectorFamily& q, const Tolerances& tol) {
  if (p.dim() != q.dim() || p.grid().vertex_count() != q.grid().vertex_count())
    throw DimensionMismatch("difference_class: families of different shapes");
  const int n = p.grid().vertex_count();
  std::vector<Matrix> ker(n), cok(n);
  parallel_for(n, [&](std::size_t v) {
    TermFrames f = difference_frames(p.frame(v), q.frame(v), tol);
    ker[v] = std::move(f.kernel);
    cok[v] = std::move(f.cokernel);
  });
  return KClassNumeric::make(ProjectorFamily(p.grid(), p.dim(), std::move(ker)),
                             ProjectorFamily(p.grid(), p.dim(), std::move(cok)), tol);
}

// ---------------------------------------------------------------- Toeplitz families

namespace {

KClassNumeric toeplitz_family_once(const SymbolFamily& g, const FourierTruncation& trunc, const Tolerances& tol) {
  const int n = g.grid.vertex_count();
  if (static_cast<int>(g.symbols.size()) != n) throw DimensionMismatch("symbol family does not cover the base");
  const SpectralSection hardy = hardy_section(trunc);
  std::vector<Matrix> ker(n), cok(n);
  std::vector<int> index(n);
  parallel_for(n, [&](std::size_t v) {
    const ToeplitzIndex d = fredholm_index_detail(toeplitz_compress(hardy, g.symbols[v], tol), tol);
    ker[v] = d.kernel;
    cok[v] = d.cokernel;
    index[v] = d.index;
  });
  for (int v = 1; v < n; ++v)
    if (index[v] != index[0])
      throw RankJump("Toeplitz index " + std::to_string(index[v]) + " at vertex " + std::to_string(v) +
                     " differs from " + std::to_string(index[0]) + " at vertex 0");
  return KClassNumeric::make(ProjectorFamily(g.grid, trunc.dim(), std::move(ker)),
                             ProjectorFamily(g.grid, trunc.dim(), std::move(cok)), tol);
}

}  // namespace

KClassNumeric toeplitz_family_index(const SymbolFamily& g, const FourierTruncation& trunc, const Tolerances& tol) {
  KClassNumeric k = toeplitz_family_once(g, trunc, tol);
  if (g.generator && g.grid.topology() == BaseTopology::torus) {
    const SymbolFamily fine = SymbolFamily::sample(BaseGrid::torus(2 * g.grid.resolution()), g.generator);
    const KClassNumeric k2 = toeplitz_family_once(fine, trunc, tol);
    k.stable = k2.ch0 == k.ch0 && k2.ch1 == k.ch1;
  }
  return k;
}

// ---------------------------------------------------------------- higher spectral flow

KClassNumeric higher_spectral_flow(const CurveFamily& family, const ProjectorFamily& q0, const ProjectorFamily& q1,
                                   const Tolerances& tol) {
  const int n = family.grid.vertex_count();
  if (static_cast<int>(family.curves.size()) != n) throw DimensionMismatch("curve family does not cover the base");
  if (q0.grid().vertex_count() != n || q1.grid().vertex_count() != n)
    throw DimensionMismatch("section families do not cover the base");
  std::vector<const OperatorCurve*> ptrs;
  for (const auto& c : family.curves) ptrs.push_back(&c);
  const GapPartition part = gap_partition(ptrs, 0.0, 0.0, tol);

  // Per vertex: the transport chain, reduced to kernel / cokernel frames.
  std::vector<std::vector<TermFrames>> frames(n);
  std::vector<std::vector<int>> signs(n);
  parallel_for(n, [&](std::size_t v) {
    const TransportChain chain =
        transport_chain(part, family.curves[v], q0.projector(static_cast<int>(v)), q1.projector(static_cast<int>(v)), tol);
    for (const auto& term : chain.terms) {
      frames[v].push_back(difference_frames(projector_frame(term.first), projector_frame(term.second), tol));
      signs[v].push_back(term.sign);
    }
  });
  const std::size_t terms = frames.front().size();
  for (int v = 1; v < n; ++v)
    if (frames[v].size() != terms) throw RankJump("transport chains differ in length over the base");

  const int dim = q0.dim();
  KClassNumeric total = KClassNumeric::make(ProjectorFamily::empty(family.grid, dim),
                                            ProjectorFamily::empty(family.grid, dim), tol);
  for (std::size_t j = 0; j < terms; ++j) {
    std::vector<Matrix> ker(n), cok(n);
    for (int v = 0; v < n; ++v) {
      ker[v] = std::move(frames[v][j].kernel);
      cok[v] = std::move(frames[v][j].cokernel);
    }
    KClassNumeric term = KClassNumeric::make(ProjectorFamily(family.grid, dim, std::move(ker)),
                                             ProjectorFamily(family.grid, dim, std::move(cok)), tol);
    total = total + (signs[0][j] > 0 ? term : term.negated());
  }
  return total;
}

KClassNumeric higher_spectral_flow(const BaseGrid& grid, const FamilyCurveSpec& spec, bool check_doubling,
                                   const Tolerances& tol) {
  auto run = [&](const BaseGrid& g) {
    CurveFamily fam;
    fam.grid = g;
    std::vector<std::optional<OperatorCurve>> curves(g.vertex_count());
    parallel_for(curves.size(), [&](std::size_t v) {
      const auto th = g.coordinates(static_cast<int>(v));
      curves[v] = spec.curve(th[0], th[1]);
    });
    for (auto& c : curves) fam.curves.push_back(std::move(*c));
    return higher_spectral_flow(fam, ProjectorFamily::sample(g, spec.q0), ProjectorFamily::sample(g, spec.q1), tol);
  };
  KClassNumeric k = run(grid);
  if (check_doubling) {
    const BaseGrid fine = grid.topology() == BaseTopology::torus ? BaseGrid::torus(2 * grid.resolution())
                                                                 : BaseGrid::loop(2 * grid.resolution());
    const KClassNumeric k2 = run(fine);
    k.stable = k.stable && k2.ch0 == k.ch0 && k2.ch1 == k.ch1;
  }
  return k;
}

// ---------------------------------------------------------------- fixtures on T^2

Matrix wrap_projector(double theta1, double theta2) {
  const double d1 = std::sin(theta1), d2 = std::sin(theta2), d3 = 1.0 + std::cos(theta1) + std::cos(theta2);
  const double r = std::sqrt(d1 * d1 + d2 * d2 + d3 * d3);
  const double n1 = d1 / r, n2 = d2 / r, n3 = d3 / r;
  Matrix q(2, 2);
  q(0, 0) = 0.5 * (1.0 + n3);
  q(1, 1) = 0.5 * (1.0 - n3);
  q(0, 1) = 0.5 * cplx(n1, -n2);
  q(1, 0) = 0.5 * cplx(n1, n2);
  return q;
}

SymbolFunction bott_symbol(double theta1, double theta2) {
  const Matrix q = wrap_projector(theta1, theta2);
  return SymbolFunction::from_modes(2, {{0, Matrix::Identity(2, 2) - q}, {1, q}}, true);
}

SymbolFamily bott_family(const BaseGrid& grid) { return SymbolFamily::sample(grid, bott_symbol); }

FamilyCurveSpec toeplitz_path_spec(const SymbolFamily::Generator& g, const FourierTruncation& trunc, int samples) {
  FamilyCurveSpec spec;
  const int n = trunc.bundle_rank;
  auto path = [g, n](double t1, double t2) {
    const SymbolFunction zero = SymbolFunction::from_modes(n, {});
    return PotentialPath::linear(zero, conjugated_potential(g(t1, t2), zero));
  };
  spec.curve = [path, trunc, samples](double t1, double t2) {
    return OperatorCurve::from_path(path(t1, t2), trunc, samples);
  };
  spec.q0 = [trunc](double, double) { return hardy_section(trunc).projector; };
  spec.q1 = [path, trunc](double t1, double t2) {
    return aps_projection(build_dirac(path(t1, t2)(1.0), trunc), 0.0, CutoffPolicy::inclusive).projector;
  };
  return spec;
}

}  // namespace specflow
