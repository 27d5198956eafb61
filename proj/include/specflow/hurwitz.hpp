#pragma once

namespace specflow {

/// Hurwitz zeta zeta(s, a) = sum_{k >= 0} (k + a)^{-s} for real s != 1 and
/// a > 0, continued to s <= 1 by Euler-Maclaurin summation.
double hurwitz_zeta(double s, double a);

}  // namespace specflow
