#include "specflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <sstream>

#include "specflow/parallel.hpp"

namespace specflow {

// ---------------------------------------------------------------- curves

OperatorCurve::OperatorCurve(std::vector<double> samples, std::vector<TruncatedOperator> operators,
                             Generator generator)
    : samples_(std::move(samples)), operators_(std::move(operators)), generator_(std::move(generator)) {
  if (samples_.size() < 2) throw InvalidArgument("operator curve needs at least two samples");
  if (samples_.size() != operators_.size()) throw DimensionMismatch("curve samples and operators differ in count");
  if (std::abs(samples_.front()) > 1e-15 || std::abs(samples_.back() - 1.0) > 1e-15)
    throw InvalidArgument("curve samples must start at 0 and end at 1");
  for (std::size_t i = 1; i < samples_.size(); ++i)
    if (!(samples_[i] > samples_[i - 1])) throw InvalidArgument("curve samples must be strictly increasing");
  for (const auto& op : operators_) {
    if (!(op.truncation == operators_.front().truncation))
      throw DimensionMismatch("curve operators must share one truncation");
    op.validate();
  }
}

OperatorCurve OperatorCurve::from_generator(Generator generator, int samples) {
  if (samples < 2) throw InvalidArgument("curve needs at least two samples");
  std::vector<double> t(samples);
  std::vector<TruncatedOperator> ops(samples);
  for (int j = 0; j < samples; ++j) t[j] = j == samples - 1 ? 1.0 : double(j) / (samples - 1);
  parallel_for(samples, [&](std::size_t j) { ops[j] = generator(t[j]); });
  return OperatorCurve(std::move(t), std::move(ops), std::move(generator));
}

OperatorCurve OperatorCurve::from_path(const PotentialPath& path, const FourierTruncation& trunc, int samples) {
  if (path.rank() != trunc.bundle_rank) throw DimensionMismatch("path rank does not match truncation rank");
  auto gen = [path, trunc](double t) { return build_dirac(path(t), trunc); };
  OperatorCurve c = from_generator(gen, samples);
  // Linear-in-symbol paths have an exact Lipschitz bound.
  c.lipschitz = path.lipschitz_bound();
  return c;
}

OperatorCurve OperatorCurve::constant(const TruncatedOperator& op, int samples) {
  auto gen = [op](double) { return op; };
  OperatorCurve c = from_generator(gen, samples);
  c.lipschitz = 0.0;
  return c;
}

TruncatedOperator OperatorCurve::at(double t) const {
  auto it = std::lower_bound(samples_.begin(), samples_.end(), t - 1e-15);
  if (it != samples_.end() && std::abs(*it - t) <= 1e-15) return operators_[it - samples_.begin()];
  if (!generator_) throw ResolutionExceeded("curve has no generator to evaluate between samples");
  return generator_(t);
}

OperatorCurve OperatorCurve::reparametrized(const std::function<double(double)>& phi) const {
  OperatorCurve base = *this;
  auto gen = [base, phi](double t) { return base.at(std::clamp(phi(t), 0.0, 1.0)); };
  std::vector<TruncatedOperator> ops;
  for (double t : samples_) ops.push_back(gen(t));
  OperatorCurve c(samples_, std::move(ops), generator_ ? Generator(gen) : Generator{});
  return c;
}

OperatorCurve OperatorCurve::restricted(double t0, double t1) const {
  if (!(t1 > t0)) throw InvalidArgument("restricted: need t0 < t1");
  std::vector<double> t;
  std::vector<TruncatedOperator> ops;
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (samples_[i] >= t0 - 1e-15 && samples_[i] <= t1 + 1e-15) {
      t.push_back(std::clamp((samples_[i] - t0) / (t1 - t0), 0.0, 1.0));
      ops.push_back(operators_[i]);
    }
  }
  if (t.size() < 2 || t.front() != 0.0 || t.back() != 1.0)
    throw InvalidArgument("restricted: endpoints must be sample points");
  Generator gen;
  if (generator_) {
    OperatorCurve base = *this;
    gen = [base, t0, t1](double s) { return base.at(t0 + s * (t1 - t0)); };
  }
  OperatorCurve c(std::move(t), std::move(ops), std::move(gen));
  if (lipschitz) c.lipschitz = *lipschitz * (t1 - t0);
  return c;
}

OperatorCurve OperatorCurve::refined() const {
  if (!generator_) throw ResolutionExceeded("curve has no generator to refine");
  std::vector<double> t;
  std::vector<TruncatedOperator> ops;
  for (std::size_t i = 0; i + 1 < samples_.size(); ++i) {
    t.push_back(samples_[i]);
    ops.push_back(operators_[i]);
    const double mid = 0.5 * (samples_[i] + samples_[i + 1]);
    t.push_back(mid);
    ops.push_back(generator_(mid));
  }
  t.push_back(samples_.back());
  ops.push_back(operators_.back());
  OperatorCurve c(std::move(t), std::move(ops), generator_);
  c.lipschitz = lipschitz;
  return c;
}

// ---------------------------------------------------------------- sections

int SpectralSection::rank() const {
  return static_cast<int>(std::lround(projector.trace().real()));
}

void SpectralSection::validate(const Tolerances& tol) const {
  if (projector.rows() != projector.cols()) throw InvalidSection("section projector must be square");
  if (projector.rows() != truncation.dim()) throw InvalidSection("section projector does not match its truncation");
  if ((projector * projector - projector).cwiseAbs().maxCoeff() > tol.projector_idempotent)
    throw InvalidSection("section projector is not idempotent");
  if ((projector - projector.adjoint()).cwiseAbs().maxCoeff() > tol.projector_hermitian)
    throw InvalidSection("section projector is not Hermitian");
  if (threshold_window < 0) throw InvalidSection("section threshold window must be nonnegative");
}

SpectralSection make_section(const Matrix& projector, const FourierTruncation& trunc, double threshold_window,
                             const Tolerances& tol) {
  SpectralSection s;
  s.projector = projector;
  s.truncation = trunc;
  s.threshold_window = threshold_window;
  s.provenance = SectionProvenance::explicit_projector;
  s.validate(tol);
  return s;
}

Matrix spectral_projector_above(const EigenDecomposition& eig, double a) {
  const Eigen::Index n = eig.values.size();
  Eigen::Index first = 0;
  while (first < n && !(eig.values[first] > a)) ++first;
  const Matrix v = eig.vectors.rightCols(n - first);
  return v * v.adjoint();
}

SpectralSection aps_projection(const TruncatedOperator& op, double cutoff, CutoffPolicy policy,
                               const Tolerances& tol) {
  op.validate(tol);
  const EigenDecomposition eig = eigh(op.matrix, tol);
  const Eigen::Index n = eig.values.size();
  double nearest = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) nearest = std::min(nearest, std::abs(eig.values[i] - cutoff));
  if (policy == CutoffPolicy::strict && nearest <= tol.cutoff) {
    std::ostringstream msg;
    msg << "eigenvalue within " << nearest << " of the cutoff " << cutoff << " (strict policy)";
    throw EigenvalueAtCutoff(msg.str());
  }
  Eigen::Index first = 0;
  for (; first < n; ++first) {
    const double lam = eig.values[first];
    const bool at = std::abs(lam - cutoff) <= tol.cutoff;
    if (at ? policy == CutoffPolicy::inclusive : lam > cutoff) break;
  }
  const Matrix v = eig.vectors.rightCols(n - first);
  SpectralSection s;
  s.projector = v * v.adjoint();
  s.truncation = op.truncation;
  s.provenance = SectionProvenance::aps_cutoff;
  s.cutoff = cutoff;
  s.threshold_window = std::abs(cutoff) + (std::isfinite(nearest) ? nearest : 0.0);
  return s;
}

bool satisfies_section_condition(const SpectralSection& section, const TruncatedOperator& op,
                                 const Tolerances& tol) {
  if (section.projector.rows() != op.matrix.rows()) return false;
  const EigenDecomposition eig = eigh(op.matrix, tol);
  const double r = section.threshold_window;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    const Vector v = eig.vectors.col(i);
    if (eig.values[i] > r && (section.projector * v - v).norm() > tol.section_condition) return false;
    if (eig.values[i] < -r && (section.projector * v).norm() > tol.section_condition) return false;
  }
  return true;
}

DifferenceElement difference_element(const Matrix& p, const Matrix& q, double tol, const Tolerances& tols) {
  if (p.rows() != q.rows() || p.cols() != q.cols() || p.rows() != p.cols())
    throw DimensionMismatch("difference_element: projectors of different dimensions");
  const Matrix fp = projector_frame(p);
  const Matrix fq = projector_frame(q);
  DifferenceElement d;
  if (fp.cols() == 0 || fq.cols() == 0) {
    d.kernel_dim = static_cast<int>(fp.cols());
    d.cokernel_dim = static_cast<int>(fq.cols());
    d.value = d.kernel_dim - d.cokernel_dim;
    d.min_gap_ratio = std::numeric_limits<double>::infinity();
    return d;
  }
  // Q P : Im P -> Im Q in the frames; singular values are principal cosines.
  const Matrix t = fq.adjoint() * fp;
  const GapRank g = gap_rank(t, tol, tols.rank_gap, 1.0);
  d.kernel_dim = g.nullity;
  d.cokernel_dim = g.co_nullity;
  d.value = d.kernel_dim - d.cokernel_dim;
  d.min_gap_ratio = g.gap_ratio;
  return d;
}

DifferenceElement difference_element(const SpectralSection& p, const SpectralSection& q, double tol,
                                     const Tolerances& tols) {
  return difference_element(p.projector, q.projector, tol, tols);
}

// ---------------------------------------------------------------- partition

double GapPartition::min_gap() const {
  double g = std::numeric_limits<double>::infinity();
  for (const auto& iv : intervals) g = std::min(g, iv.spectral_distance);
  return g;
}

namespace {

struct Point {
  double t;
  std::vector<TruncatedOperator> ops;
  std::vector<RealVector> spectra;
};

double interval_lipschitz(const std::vector<const OperatorCurve*>& curves, const Point& l, const Point& r,
                          const Tolerances& tol) {
  double bound = 0.0;
  bool all_supplied = true;
  for (const auto* c : curves) {
    if (c->lipschitz)
      bound = std::max(bound, *c->lipschitz);
    else
      all_supplied = false;
  }
  if (all_supplied) return bound;
  const double h = r.t - l.t;
  double est = 0.0;
  for (std::size_t c = 0; c < curves.size(); ++c) {
    if (curves[c]->lipschitz) continue;
    const RealVector ev = eigvalsh(r.ops[c].matrix - l.ops[c].matrix, tol);
    if (ev.size()) est = std::max(est, ev.cwiseAbs().maxCoeff() / h);
  }
  return std::max(bound, tol.lipschitz_safety * est);
}

struct Certificate {
  bool ok = false;
  double a = 0.0;
  double distance = 0.0;
};

// Smallest admissible a > lo with |a - |lambda|| > delta for every sampled
// eigenvalue, centred in its gap. Returns !ok when only the region above the
// whole sampled spectrum remains.
Certificate find_threshold(std::vector<double> abs_values, double lo, double delta) {
  std::sort(abs_values.begin(), abs_values.end());
  Certificate cert;
  double prev = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i <= abs_values.size(); ++i) {
    const double next = i < abs_values.size() ? abs_values[i] : std::numeric_limits<double>::infinity();
    if (!std::isfinite(next)) break;
    const double allowed_lo = std::max(prev + delta, lo);
    const double allowed_hi = next - delta;
    if (allowed_hi > allowed_lo && next > lo) {
      double centre = 0.5 * (std::max(prev, lo) + next);
      if (!(centre > allowed_lo && centre < allowed_hi)) centre = 0.5 * (allowed_lo + allowed_hi);
      if (centre > lo) {
        cert.ok = true;
        cert.a = centre;
        double d = std::numeric_limits<double>::infinity();
        for (double v : abs_values) d = std::min(d, std::abs(v - centre));
        cert.distance = d;
        return cert;
      }
    }
    prev = next;
  }
  return cert;
}

}  // namespace

GapPartition gap_partition(const std::vector<const OperatorCurve*>& curves, double cutoff0, double cutoff1,
                           const Tolerances& tol) {
  if (curves.empty()) throw InvalidArgument("gap_partition needs at least one curve");
  const auto& grid = curves.front()->samples();
  bool refinable = true;
  for (const auto* c : curves) {
    if (c->samples() != grid) throw InvalidArgument("gap_partition: curves must share one sample grid");
    if (!(c->truncation() == curves.front()->truncation()))
      throw DimensionMismatch("gap_partition: curves must share one truncation");
    refinable = refinable && c->can_refine();
  }

  bool need_ops = false;
  for (const auto* c : curves) need_ops = need_ops || !c->lipschitz;

  std::list<Point> points;
  {
    std::vector<Point> initial(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
      Point p{grid[i], {}, {}};
      for (const auto* c : curves) {
        p.spectra.push_back(eigvalsh(c->operators()[i].matrix, tol));
        if (need_ops) p.ops.push_back(c->operators()[i]);
      }
      initial[i] = std::move(p);
    });
    for (auto& p : initial) points.push_back(std::move(p));
  }

  GapPartition out;
  auto left = points.begin();
  while (std::next(left) != points.end()) {
    auto right = std::next(left);
    const double h = right->t - left->t;
    const double lip = interval_lipschitz(curves, *left, *right, tol);
    // Slack so that a gap of exactly 2 delta (eigenvalues that can meet a
    // inside the interval) is never certified through rounding.
    const double delta = 0.5 * lip * h * (1.0 + 1e-6) + 1e-12;
    double lo = 0.0;
    if (left->t == 0.0) lo = std::max(lo, cutoff0);
    if (right->t == 1.0) lo = std::max(lo, cutoff1);
    std::vector<double> abs_values;
    for (const auto* p : {&*left, &*right})
      for (const auto& s : p->spectra)
        for (Eigen::Index i = 0; i < s.size(); ++i) abs_values.push_back(std::abs(s[i]));
    const Certificate cert = find_threshold(abs_values, lo, delta);
    if (cert.ok) {
      out.intervals.push_back({left->t, right->t, cert.a, cert.distance, delta});
      left = right;
      continue;
    }
    if (!refinable || h / 2 < tol.min_interval) {
      std::ostringstream msg;
      msg << "no spectral gap certified on [" << left->t << ", " << right->t << "]: Lipschitz margin " << delta
          << " (L = " << lip << "), " << (refinable ? "bisection floor reached" : "curve cannot refine");
      throw NoGapFound(msg.str());
    }
    if (static_cast<int>(points.size()) >= tol.max_intervals) {
      std::ostringstream msg;
      msg << "gap partition exceeded " << tol.max_intervals << " points near t = " << left->t;
      throw ResolutionExceeded(msg.str());
    }
    const double mid = 0.5 * (left->t + right->t);
    Point p{mid, {}, std::vector<RealVector>(curves.size())};
    if (need_ops) p.ops.resize(curves.size());
    parallel_for(curves.size(), [&](std::size_t c) {
      TruncatedOperator op = curves[c]->at(mid);
      p.spectra[c] = eigvalsh(op.matrix, tol);
      if (need_ops) p.ops[c] = std::move(op);
    });
    points.insert(right, std::move(p));
  }

  out.spectra.assign(curves.size(), {});
  for (auto& p : points) {
    out.points.push_back(p.t);
    for (std::size_t c = 0; c < curves.size(); ++c) out.spectra[c].push_back(std::move(p.spectra[c]));
  }
  return out;
}

namespace {

int count_window(const RealVector& spectrum, double lower, double a, double cutoff_tol) {
  int n = 0;
  for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
    const double lam = spectrum[i];
    if (lam >= lower - cutoff_tol && lam < a) ++n;
  }
  return n;
}

}  // namespace

int spectral_flow_on_partition(const GapPartition& partition, std::size_t c, double cutoff0, double cutoff1,
                               const Tolerances& tol) {
  int sf = 0;
  const std::size_t n = partition.intervals.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& iv = partition.intervals[i];
    const double lower_left = i == 0 ? cutoff0 : 0.0;
    const double lower_right = i + 1 == n ? cutoff1 : 0.0;
    sf += count_window(partition.spectra[c][i + 1], lower_right, iv.a, tol.cutoff) -
          count_window(partition.spectra[c][i], lower_left, iv.a, tol.cutoff);
  }
  return sf;
}

SpectralFlowResult spectral_flow(const OperatorCurve& curve, double cutoff0, double cutoff1, const Tolerances& tol) {
  const GapPartition part = gap_partition({&curve}, cutoff0, cutoff1, tol);
  SpectralFlowResult r;
  r.sf = spectral_flow_on_partition(part, 0, cutoff0, cutoff1, tol);
  r.partitions = static_cast<int>(part.intervals.size());
  r.min_gap = part.min_gap();
  return r;
}

TransportChain transport_chain(const GapPartition& partition, const OperatorCurve& curve, const Matrix& q0,
                               const Matrix& q1, const Tolerances& tol) {
  const auto& iv = partition.intervals;
  const std::size_t n = iv.size();
  if (n == 0) throw InvalidArgument("transport_chain: empty partition");
  auto decompose = [&](std::size_t point) { return eigh(curve.at(partition.points[point]).matrix, tol); };
  auto above = [&](std::size_t point, double a) { return spectral_projector_above(decompose(point), a); };
  TransportChain chain;
  chain.terms.push_back({+1, q1, above(n, iv[n - 1].a)});
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (iv[i].a == iv[i + 1].a) continue;
    const EigenDecomposition eig = decompose(i + 1);
    chain.terms.push_back({-1, spectral_projector_above(eig, iv[i].a), spectral_projector_above(eig, iv[i + 1].a)});
  }
  chain.terms.push_back({-1, q0, above(0, iv[0].a)});
  return chain;
}

int sf_pairs_on_partition(const GapPartition& partition, const OperatorCurve& curve, const Matrix& q0,
                          const Matrix& q1, const Tolerances& tol) {
  const TransportChain chain = transport_chain(partition, curve, q0, q1, tol);
  int total = 0;
  for (const auto& term : chain.terms)
    total += term.sign * difference_element(term.first, term.second, tol.difference_tol, tol).value;
  return total;
}

int sf_pairs(const OperatorCurve& curve, const SpectralSection& q0, const SpectralSection& q1,
             const Tolerances& tol) {
  q0.validate(tol);
  q1.validate(tol);
  const TruncatedOperator& d0 = curve.operators().front();
  const TruncatedOperator& d1 = curve.operators().back();
  if (!satisfies_section_condition(q0, d0, tol))
    throw InvalidSection("Q0 is not a spectral section of the initial operator");
  if (!satisfies_section_condition(q1, d1, tol))
    throw InvalidSection("Q1 is not a spectral section of the final operator");
  const GapPartition part = gap_partition({&curve}, 0.0, 0.0, tol);
  const int value = sf_pairs_on_partition(part, curve, q0.projector, q1.projector, tol);
  if (curve.can_refine()) {
    const OperatorCurve fine = curve.refined();
    const GapPartition fine_part = gap_partition({&fine}, 0.0, 0.0, tol);
    const int fine_value = sf_pairs_on_partition(fine_part, fine, q0.projector, q1.projector, tol);
    if (fine_value != value)
      throw UnstableIndex("sf_pairs changed under refinement: " + std::to_string(value) + " vs " +
                          std::to_string(fine_value));
  }
  return value;
}

}  // namespace specflow
