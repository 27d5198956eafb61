#include "specflow/eta.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <Eigen/Dense>

#include "specflow/hurwitz.hpp"
#include "specflow/parallel.hpp"

namespace specflow {

EtaValue EtaValue::make(double eta, int kernel_dim, EtaMethod method, std::string regularization) {
  EtaValue v;
  v.eta = eta;
  v.kernel_dim = kernel_dim;
  v.reduced = 0.5 * (eta + kernel_dim);
  v.method = method;
  v.regularization = std::move(regularization);
  return v;
}

EtaValue eta_shifted_derivative(double a) {
  if (!(a > 0.0 && a < 1.0)) throw InvalidArgument("eta_shifted_derivative needs a in (0, 1); a kernel appears at the endpoints");
  EtaValue v = EtaValue::make(hurwitz_zeta(0.0, a) - hurwitz_zeta(0.0, 1.0 - a), 0, EtaMethod::hurwitz,
                              "hurwitz zeta continuation at s = 0");
  v.spectrum_size = -1;
  return v;
}

double reduced_eta_shifted_closed_form(double a) {
  const double frac = a - std::floor(a);
  if (frac < 1e-12 || frac > 1.0 - 1e-12) return 0.5;
  return 0.5 * (1.0 - 2.0 * frac);
}

RealVector shifted_lattice(double a, int half_width) {
  RealVector v(2 * half_width + 1);
  for (int k = -half_width; k <= half_width; ++k) v[k + half_width] = k + a;
  return v;
}

namespace {

struct HeatIntegrand {
  std::vector<double> lambda;  // sorted by |lambda|
  double operator()(double s) const {
    double sum = 0.0;
    const double s2 = s * s;
    for (double l : lambda) {
      const double x = s2 * l * l;
      if (x > 60.0) break;
      sum += l * std::exp(-x);
    }
    return sum;
  }
};

// \int_lo^hi, on geometric segments so every scale 1/|lambda| is resolved.
double integrate(const HeatIntegrand& f, double lo, double hi, double rel_tol, double& error) {
  using boost::math::quadrature::gauss_kronrod;
  double total = 0.0;
  double a = lo;
  while (a < hi) {
    const double b = std::min(hi, a * 1.5);
    double err = 0.0;
    total += gauss_kronrod<double, 61>::integrate(f, a, b, 2, rel_tol, &err);
    error += err;
    a = b;
  }
  return total;
}

// Exact \int_smax^inf lambda e^{-s^2 lambda^2} ds summed over the spectrum.
double exact_tail(const std::vector<double>& lambda, double smax) {
  double t = 0.0;
  for (double l : lambda) t += (l > 0 ? 1.0 : -1.0) * 0.5 * std::sqrt(kPi) * std::erfc(smax * std::abs(l));
  return t;
}

}  // namespace

EtaValue eta_heat(const RealVector& spectrum, const HeatOptions& options, const Tolerances& tol) {
  HeatIntegrand f;
  int kernel = 0;
  for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
    if (std::abs(spectrum[i]) <= tol.kernel)
      ++kernel;
    else
      f.lambda.push_back(spectrum[i]);
  }
  const char* label =
      options.tail == TailModel::symmetric ? "heat kernel, symmetric tail" : "heat kernel, lattice continuation";
  if (f.lambda.empty()) {
    EtaValue v = EtaValue::make(0.0, kernel, EtaMethod::heat_extrapolation, label);
    v.spectrum_size = static_cast<int>(spectrum.size());
    return v;
  }
  std::stable_sort(f.lambda.begin(), f.lambda.end(), [](double x, double y) { return std::abs(x) < std::abs(y); });
  const double lmin = std::abs(f.lambda.front());
  const double lmax = std::abs(f.lambda.back());
  const double smax = std::sqrt(50.0) / lmin;
  const double norm = 2.0 / std::sqrt(kPi);
  double error = 0.0;
  double eta = 0.0;

  if (options.tail == TailModel::symmetric) {
    // Near s = 0 the integrand is smooth on the scale 1 / lmax.
    const double s1 = std::min(smax, 0.25 / lmax);
    double err0 = 0.0;
    double head = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, s1, 2,
                                                                                 options.relative_tolerance, &err0);
    error += err0;
    eta = norm * (head + integrate(f, s1, smax, options.relative_tolerance, error) + exact_tail(f.lambda, smax));
  } else {
    // Past s_v the window edge is suppressed by e^{-40}; extrapolate to s = 0
    // through F(s0) = F0 - b1 s0 - b3 s0^3.
    const double sv = std::sqrt(40.0) / lmax;
    if (4.0 * sv >= smax)
      throw ExtrapolationFailed("spectrum window too narrow for lattice continuation: edge " + std::to_string(lmax) +
                                ", smallest |lambda| " + std::to_string(lmin));
    double far = integrate(f, 4.0 * sv, smax, options.relative_tolerance, error) + exact_tail(f.lambda, smax);
    Eigen::Vector4d values;
    Eigen::Matrix<double, 4, 3> design;
    values[3] = norm * far;
    double acc = far;
    for (int j = 3; j >= 1; --j) {
      acc += integrate(f, j * sv, (j + 1) * sv, options.relative_tolerance, error);
      values[j - 1] = norm * acc;
    }
    for (int j = 0; j < 4; ++j) {
      const double s0 = (j + 1) * sv;
      design(j, 0) = 1.0;
      design(j, 1) = -s0;
      design(j, 2) = -s0 * s0 * s0;
    }
    const Eigen::Vector3d coef = design.colPivHouseholderQr().solve(values);
    const double residual = (design * coef - values).cwiseAbs().maxCoeff();
    if (residual > options.fit_tolerance)
      throw ExtrapolationFailed("small-s extrapolation residual " + std::to_string(residual) + " exceeds " +
                                std::to_string(options.fit_tolerance));
    eta = coef[0];
    error = norm * error + residual;
  }
  EtaValue v = EtaValue::make(eta, kernel, EtaMethod::heat_extrapolation, label);
  v.spectrum_size = static_cast<int>(spectrum.size());
  v.error_estimate = error;
  return v;
}

EtaValue eta_heat(const TruncatedOperator& op, const HeatOptions& options, const Tolerances& tol) {
  return eta_heat(eigvalsh(op.matrix, tol), options, tol);
}

EtaProfile shifted_derivative_profile(double a0, double a1, int samples) {
  if (samples < 2) throw InvalidArgument("profile needs at least two samples");
  EtaProfile p;
  for (int j = 0; j < samples; ++j) {
    const double t = j == samples - 1 ? 1.0 : double(j) / (samples - 1);
    p.t.push_back(t);
    p.reduced.push_back(reduced_eta_shifted_closed_form(a0 + (a1 - a0) * t));
  }
  return p;
}

EtaProfile heat_profile(const OperatorCurve& curve, const HeatOptions& options, const Tolerances& tol) {
  EtaProfile p;
  p.t = curve.samples();
  p.reduced.resize(p.t.size());
  parallel_for(p.t.size(), [&](std::size_t j) {
    p.reduced[j] = eta_heat(curve.operators()[j], options, tol).reduced;
  });
  return p;
}

EtaFlow sf_via_eta(const EtaProfile& profile, const Tolerances& tol) {
  const std::size_t n = profile.reduced.size();
  if (n != profile.t.size()) throw DimensionMismatch("eta profile sizes differ");
  if (n < 64) throw GridTooCoarse("sf_via_eta needs at least 64 samples, got " + std::to_string(n));
  std::vector<double> step(n - 1);
  std::vector<bool> jump(n - 1);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    step[j] = profile.reduced[j + 1] - profile.reduced[j];
    jump[j] = std::abs(step[j]) > tol.jump_threshold;
  }
  auto smooth_neighbour = [&](std::size_t j) {
    double sum = 0.0;
    int count = 0;
    for (std::size_t l = j; l-- > 0;)
      if (!jump[l]) {
        sum += step[l];
        ++count;
        break;
      }
    for (std::size_t r = j + 1; r < n - 1; ++r)
      if (!jump[r]) {
        sum += step[r];
        ++count;
        break;
      }
    return count ? sum / count : 0.0;
  };
  EtaFlow out;
  int jump_total = 0;
  double smooth = 0.0;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    if (!jump[j]) {
      smooth += step[j];
      continue;
    }
    const double s = smooth_neighbour(j);
    const double raw = step[j] - s;
    const long k = std::lround(raw);
    if (std::abs(raw - k) > tol.jump_ambiguity)
      throw JumpAmbiguous("reduced eta jump " + std::to_string(raw) + " near t = " + std::to_string(profile.t[j]) +
                          " is not an integer");
    smooth += s;
    jump_total += static_cast<int>(k);
    ++out.jumps;
  }
  out.integral = -smooth;
  out.endpoints = profile.reduced.back() - profile.reduced.front();
  out.sf = static_cast<int>(std::lround(out.integral + out.endpoints));
  if (out.sf != jump_total)
    throw JumpAmbiguous("variation formula total " + std::to_string(out.integral + out.endpoints) +
                        " disagrees with the jump count " + std::to_string(jump_total));
  return out;
}

int flipped_count(const RealVector& spectrum, double threshold, const Tolerances& tol) {
  int m = 0;
  for (Eigen::Index i = 0; i < spectrum.size(); ++i)
    if (spectrum[i] >= -tol.kernel && spectrum[i] < threshold) ++m;
  return m;
}

MPOperatorSpec MPOperatorSpec::uniform(const RealVector& spectrum, double threshold, double margin) {
  MPOperatorSpec a;
  a.threshold = threshold;
  const int m = flipped_count(spectrum, threshold);
  a.shifts.assign(m, threshold + margin);
  return a;
}

EtaValue eta_form_degree0(const RealVector& spectrum, const EtaValue& base, const MPOperatorSpec& a,
                          const Tolerances& tol) {
  if (a.threshold < 0) throw InvalidArgument("Melrose-Piazza threshold must be nonnegative");
  std::vector<double> sorted(spectrum.data(), spectrum.data() + spectrum.size());
  std::sort(sorted.begin(), sorted.end());
  for (double l : sorted)
    if (std::abs(l - a.threshold) <= tol.cutoff && a.threshold > 0)
      throw EigenvalueAtCutoff("eigenvalue within " + std::to_string(tol.cutoff) + " of the section threshold");
  auto sgn = [&](double x) { return std::abs(x) <= tol.kernel ? 0.0 : (x > 0 ? 1.0 : -1.0); };
  double delta = 0.0;
  int kernel_removed = 0;
  std::size_t flip = 0;
  int kernel_after = 0;
  for (double l : sorted) {
    const bool selected = l >= -tol.kernel && l < a.threshold;
    double moved = l;
    if (selected) {
      if (flip >= a.shifts.size())
        throw InvalidArgument("Melrose-Piazza operator has fewer shifts than eigenvalues in [0, threshold)");
      moved = l - a.shifts[flip++];
      if (!(moved < -tol.kernel)) throw InvalidArgument("Melrose-Piazza shift leaves an eigenvalue at or above 0");
      delta += sgn(moved) - sgn(l);
      if (std::abs(l) <= tol.kernel) ++kernel_removed;
    }
    if (std::abs(moved) <= tol.kernel) ++kernel_after;
  }
  if (flip != a.shifts.size())
    throw InvalidArgument("Melrose-Piazza operator has more shifts than eigenvalues in [0, threshold)");
  if (kernel_after > 0) throw InvalidArgument("D + A is not invertible: an eigenvalue remains at 0");
  EtaValue v = EtaValue::make(base.eta + delta, base.kernel_dim - kernel_removed, base.method,
                              base.regularization + ", degree-0 eta form");
  v.spectrum_size = base.spectrum_size;
  v.error_estimate = base.error_estimate;
  return v;
}

SpectralSection threshold_section(const TruncatedOperator& op, double threshold, const Tolerances& tol) {
  return aps_projection(op, threshold, CutoffPolicy::inclusive, tol);
}

}  // namespace specflow
