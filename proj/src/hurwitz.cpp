#include "specflow/hurwitz.hpp"

#include <cmath>

#include "specflow/core.hpp"

namespace specflow {

namespace {

// B_{2j} / (2j)! for j = 1..12.
constexpr double kBernoulliOverFactorial[] = {
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
    -3617.0 / 10670622842880000.0,
    43867.0 / 5109094217170944000.0,
    -174611.0 / 802857662698291200000.0,
    77683.0 / 14101100039391805440000.0,
    -236364091.0 / 1693824136731743669452800000.0,
};

}  // namespace

double hurwitz_zeta(double s, double a) {
  if (!(a > 0.0)) throw InvalidArgument("hurwitz_zeta needs a > 0");
  if (std::abs(s - 1.0) < 1e-14) throw InvalidArgument("hurwitz_zeta has a pole at s = 1");
  constexpr int kDirect = 24;
  double sum = 0.0;
  for (int k = 0; k < kDirect; ++k) sum += std::pow(k + a, -s);
  const double x = kDirect + a;
  sum += std::pow(x, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(x, -s);
  // Rising factorial s (s+1) ... (s+2j-2) times x^{-s-2j+1}.
  double rising = s;
  double power = std::pow(x, -s - 1.0);
  for (int j = 1; j <= 12; ++j) {
    const double term = kBernoulliOverFactorial[j - 1] * rising * power;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    rising *= (s + 2 * j - 1) * (s + 2 * j);
    power /= x * x;
  }
  return sum;
}

}  // namespace specflow
