#include "fedssca/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fedssca {

namespace {

double power_step(double scale, double exponent, long t) {
  if (t < 1) throw std::invalid_argument("step index must be >= 1");
  return std::min(1.0, scale / std::pow(static_cast<double>(t), exponent));
}

}  // namespace

double rho(const StepSchedule& s, long t) { return power_step(s.a1, s.alpha, t); }

double gamma(const StepSchedule& s, long t) { return power_step(s.a2, s.alpha_gamma, t); }

std::vector<std::string> validate(const StepSchedule& s) {
  std::vector<std::string> violations;
  if (!(s.a1 > 0.0)) violations.emplace_back("a1 must be positive");
  if (!(s.a2 > 0.0)) violations.emplace_back("a2 must be positive");
  if (!(s.alpha > 0.0 && s.alpha <= 1.0)) violations.emplace_back("alpha out of (0,1]");
  if (!(s.alpha_gamma > s.alpha)) violations.emplace_back("gamma/rho does not vanish");
  // sum of gamma must still diverge.
  if (!(s.alpha_gamma <= 1.0)) violations.emplace_back("gamma is summable");
  return violations;
}

std::vector<std::string> warnings(const StepSchedule& s) {
  std::vector<std::string> out;
  if (!(s.alpha_gamma > 0.5)) out.emplace_back("gamma not square-summable");
  return out;
}

}  // namespace fedssca
