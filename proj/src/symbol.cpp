#include "specflow/symbol.hpp"

#include <algorithm>
#include <cmath>

namespace specflow {

namespace {

constexpr double kDropCoefficient = 1e-15;

void insert_mode(std::map<int, Matrix>& modes, int k, const Matrix& c) {
  if (c.size() == 0 || c.cwiseAbs().maxCoeff() <= kDropCoefficient) return;
  auto it = modes.find(k);
  if (it == modes.end()) {
    modes.emplace(k, c);
  } else {
    it->second += c;
    if (it->second.cwiseAbs().maxCoeff() <= kDropCoefficient) modes.erase(it);
  }
}

}  // namespace

SymbolFunction SymbolFunction::from_modes(int rank, std::map<int, Matrix> modes, bool unitary_flag) {
  if (rank < 1) throw InvalidArgument("symbol rank must be positive");
  SymbolFunction s;
  s.rank_ = rank;
  s.unitary_ = unitary_flag;
  for (auto& [k, c] : modes) {
    if (c.rows() != rank || c.cols() != rank)
      throw DimensionMismatch("symbol coefficient for mode " + std::to_string(k) + " is not " +
                              std::to_string(rank) + "x" + std::to_string(rank));
    insert_mode(s.modes_, k, c);
  }
  return s;
}

SymbolFunction SymbolFunction::from_samples(const std::vector<Matrix>& samples, int max_mode,
                                            bool unitary_flag) {
  if (samples.empty()) throw InvalidArgument("symbol needs at least one sample");
  const int m = static_cast<int>(samples.size());
  const int rank = static_cast<int>(samples.front().rows());
  for (const auto& s : samples)
    if (s.rows() != rank || s.cols() != rank) throw DimensionMismatch("inconsistent sample shapes");
  const int kmax = max_mode < 0 ? (m - 1) / 2 : std::min(max_mode, (m - 1) / 2);
  std::map<int, Matrix> modes;
  for (int k = -kmax; k <= kmax; ++k) {
    Matrix c = Matrix::Zero(rank, rank);
    for (int j = 0; j < m; ++j) {
      const double x = 2.0 * kPi * j / m;
      c += samples[j] * std::exp(-kI * (double(k) * x));
    }
    modes.emplace(k, c / double(m));
  }
  return from_modes(rank, std::move(modes), unitary_flag);
}

SymbolFunction SymbolFunction::constant(const Matrix& value, bool unitary_flag) {
  if (value.rows() != value.cols()) throw DimensionMismatch("constant symbol must be square");
  return from_modes(static_cast<int>(value.rows()), {{0, value}}, unitary_flag);
}

SymbolFunction SymbolFunction::scalar_constant(cplx value, int rank) {
  const bool unit = std::abs(std::abs(value) - 1.0) < 1e-14;
  return constant(value * Matrix::Identity(rank, rank), unit);
}

SymbolFunction SymbolFunction::monomial(int n, int rank) {
  return from_modes(rank, {{n, Matrix::Identity(rank, rank)}}, true);
}

SymbolFunction SymbolFunction::block_diagonal(const std::vector<SymbolFunction>& blocks) {
  if (blocks.empty()) throw InvalidArgument("block_diagonal needs blocks");
  int rank = 0;
  bool unit = true;
  for (const auto& b : blocks) {
    rank += b.rank();
    unit = unit && b.unitary_flag();
  }
  std::map<int, Matrix> modes;
  int offset = 0;
  for (const auto& b : blocks) {
    for (const auto& [k, c] : b.modes()) {
      auto it = modes.try_emplace(k, Matrix::Zero(rank, rank)).first;
      it->second.block(offset, offset, b.rank(), b.rank()) = c;
    }
    offset += b.rank();
  }
  return from_modes(rank, std::move(modes), unit);
}

Matrix SymbolFunction::coefficient(int k) const {
  auto it = modes_.find(k);
  return it == modes_.end() ? Matrix::Zero(rank_, rank_) : it->second;
}

int SymbolFunction::bandwidth() const {
  int w = 0;
  for (const auto& [k, c] : modes_) w = std::max(w, std::abs(k));
  return w;
}

int SymbolFunction::min_mode() const { return modes_.empty() ? 0 : modes_.begin()->first; }
int SymbolFunction::max_mode() const { return modes_.empty() ? 0 : modes_.rbegin()->first; }

Matrix SymbolFunction::operator()(double x) const {
  Matrix v = Matrix::Zero(rank_, rank_);
  for (const auto& [k, c] : modes_) v += c * std::exp(kI * (double(k) * x));
  return v;
}

SymbolFunction SymbolFunction::derivative() const {
  SymbolFunction d;
  d.rank_ = rank_;
  for (const auto& [k, c] : modes_) insert_mode(d.modes_, k, (kI * double(k)) * c);
  return d;
}

SymbolFunction SymbolFunction::adjoint() const {
  SymbolFunction a;
  a.rank_ = rank_;
  a.unitary_ = unitary_;
  for (const auto& [k, c] : modes_) insert_mode(a.modes_, -k, c.adjoint());
  return a;
}

SymbolFunction SymbolFunction::operator*(const SymbolFunction& other) const {
  if (rank_ != other.rank_) throw DimensionMismatch("symbol product of different ranks");
  SymbolFunction p;
  p.rank_ = rank_;
  p.unitary_ = unitary_ && other.unitary_;
  for (const auto& [k, c] : modes_)
    for (const auto& [l, d] : other.modes_) insert_mode(p.modes_, k + l, c * d);
  return p;
}

SymbolFunction SymbolFunction::operator+(const SymbolFunction& other) const {
  if (rank_ != other.rank_) throw DimensionMismatch("symbol sum of different ranks");
  SymbolFunction s = *this;
  s.unitary_ = false;
  for (const auto& [k, c] : other.modes_) insert_mode(s.modes_, k, c);
  return s;
}

SymbolFunction SymbolFunction::operator-(const SymbolFunction& other) const {
  return *this + other.scaled(-1.0);
}

SymbolFunction SymbolFunction::scaled(cplx factor) const {
  SymbolFunction s;
  s.rank_ = rank_;
  s.unitary_ = unitary_ && std::abs(std::abs(factor) - 1.0) < 1e-14;
  for (const auto& [k, c] : modes_) insert_mode(s.modes_, k, factor * c);
  return s;
}

SymbolFunction SymbolFunction::truncated(int max_mode) const {
  SymbolFunction s;
  s.rank_ = rank_;
  s.unitary_ = unitary_;
  for (const auto& [k, c] : modes_)
    if (std::abs(k) <= max_mode) s.modes_.emplace(k, c);
  return s;
}

double SymbolFunction::distance(const SymbolFunction& other) const {
  if (rank_ != other.rank_) throw DimensionMismatch("symbol distance of different ranks");
  double d = 0.0;
  for (const auto& [k, c] : (*this - other).modes_) d = std::max(d, c.cwiseAbs().maxCoeff());
  return d;
}

bool SymbolFunction::is_hermitian(double tol) const {
  for (const auto& [k, c] : modes_) {
    const Matrix partner = coefficient(-k);
    if ((partner - c.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

double SymbolFunction::unitarity_defect(int grid) const {
  double worst = 0.0;
  const Matrix id = Matrix::Identity(rank_, rank_);
  for (int j = 0; j < grid; ++j) {
    const Matrix g = (*this)(2.0 * kPi * j / grid);
    worst = std::max(worst, (g * g.adjoint() - id).norm());
  }
  return worst;
}

PotentialPath::PotentialPath(std::vector<std::pair<double, SymbolFunction>> knots)
    : knots_(std::move(knots)) {
  if (knots_.size() < 1) throw InvalidArgument("potential path needs knots");
  if (knots_.size() == 1) knots_.push_back({1.0, knots_.front().second});
  std::sort(knots_.begin(), knots_.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  if (std::abs(knots_.front().first) > 1e-15 || std::abs(knots_.back().first - 1.0) > 1e-15)
    throw InvalidArgument("potential path knots must start at t=0 and end at t=1");
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    if (!(knots_[i].first > knots_[i - 1].first))
      throw InvalidArgument("potential path knots must be strictly increasing");
    if (knots_[i].second.rank() != knots_[0].second.rank())
      throw DimensionMismatch("potential path knots of different ranks");
  }
  for (const auto& [t, v] : knots_)
    if (!v.is_hermitian(1e-12)) throw NotHermitian("potential path knot is not Hermitian-valued");
}

PotentialPath PotentialPath::linear(const SymbolFunction& v0, const SymbolFunction& v1) {
  return PotentialPath({{0.0, v0}, {1.0, v1}});
}

PotentialPath PotentialPath::constant(const SymbolFunction& v) { return PotentialPath({{0.0, v}, {1.0, v}}); }

SymbolFunction PotentialPath::operator()(double t) const {
  if (knots_.empty()) throw InvalidArgument("empty potential path");
  if (t <= knots_.front().first) return knots_.front().second;
  if (t >= knots_.back().first) return knots_.back().second;
  auto hi = std::upper_bound(knots_.begin(), knots_.end(), t,
                             [](double v, const auto& k) { return v < k.first; });
  auto lo = hi - 1;
  const double w = (t - lo->first) / (hi->first - lo->first);
  if (w == 0.0) return lo->second;
  return lo->second.scaled(1.0 - w) + hi->second.scaled(w);
}

int PotentialPath::rank() const { return knots_.empty() ? 1 : knots_.front().second.rank(); }

int PotentialPath::bandwidth() const {
  int w = 0;
  for (const auto& [t, v] : knots_) w = std::max(w, v.bandwidth());
  return w;
}

double PotentialPath::lipschitz_bound() const {
  double l = 0.0;
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    const double dt = knots_[i].first - knots_[i - 1].first;
    l = std::max(l, multiplier_norm_bound(knots_[i].second - knots_[i - 1].second) / dt);
  }
  return l;
}

SymbolFunction conjugated_potential(const SymbolFunction& g, const SymbolFunction& v) {
  const SymbolFunction gstar = g.adjoint();
  SymbolFunction gauge = (g.derivative() * gstar).scaled(kI);
  SymbolFunction result = gauge + g * v * gstar;
  // Round-off can leave the coefficient list marginally non-Hermitian.
  std::map<int, Matrix> sym;
  for (int k = result.min_mode(); k <= result.max_mode(); ++k) {
    sym[k] = 0.5 * (result.coefficient(k) + result.coefficient(-k).adjoint());
  }
  return SymbolFunction::from_modes(result.rank(), std::move(sym));
}

double multiplier_norm_bound(const SymbolFunction& s) {
  double n = 0.0;
  for (const auto& [k, c] : s.modes()) n += c.operatorNorm();
  return n;
}

}  // namespace specflow
