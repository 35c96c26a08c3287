#ifndef LEVYLAB_ACCEPTANCE_HPP
#define LEVYLAB_ACCEPTANCE_HPP

#include <string>
#include <vector>

namespace levylab {

/// Outcome of one named acceptance check. `pass` includes the runtime budget.
struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;  ///< measured quantities, one "key=value" per item
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

/// Names in criterion order: symbol-isotropic, route-equivalence,
/// kernel-cauchy, max-principle, maximal-regularity, riesz-equivalence,
/// analytic-semigroup, feynman-kac, stable-law, krylov, burgers,
/// hamilton-jacobi.
std::vector<std::string> check_names();

/// Runs one check. Throws InvalidArgument for an unknown name; errors raised
/// inside a check are reported as a failed result.
CheckResult run_check(const std::string& name);

/// "PASS name (1.23 s / 30 s) detail" or the same with FAIL.
std::string format_result(const CheckResult& result);

}  // namespace levylab

#endif  // LEVYLAB_ACCEPTANCE_HPP
