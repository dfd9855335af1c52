#pragma once

#include <string>
#include <vector>

#include "gammak/gamma.hpp"
#include "gammak/quadrature.hpp"

namespace gammak {

struct CheckResult {
  std::string suite;
  std::string name;
  bool passed = false;
  double measured = 0.0;  ///< the quantity compared against the limit
  double limit = 0.0;
  std::string detail;
};

struct VerifyOptions {
  GammaSpec spec{{1.0}, {0.25}, 3};
  QuadratureConfig quad;
  /// Fault injection: build gamma with the sign of c1 flipped.
  bool flip_c1 = false;
};

/// Runs the invariant suite "calculus", "weights", "modulus", "kfunctional"
/// or "all". Throws std::invalid_argument for other names.
std::vector<CheckResult> verify(const std::string& suite, const VerifyOptions& opt = {});

std::vector<std::string> verify_suite_names();

/// "PASS  weights/gamma_c1_join  measured 1.2e-12 <= 1e-09".
std::string format_check(const CheckResult& c);

}  // namespace gammak
