#include "specflow/core.hpp"

namespace specflow {

const Tolerances& Tolerances::defaults() {
  static const Tolerances tol{};
  return tol;
}

}  // namespace specflow
