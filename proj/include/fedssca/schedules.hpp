#pragma once

#include <string>
#include <vector>

namespace fedssca {

/// Diminishing step sizes rho(t) = a1 / t^alpha (surrogate recursion) and
/// gamma(t) = a2 / t^alpha_gamma (iterate averaging).
struct StepSchedule {
  double a1 = 0.6;
  double a2 = 0.9;
  double alpha = 0.3;
  double alpha_gamma = 0.35;

  /// The usual coupling gamma exponent = rho exponent + 0.05.
  static StepSchedule coupled(double a1, double a2, double alpha) {
    return {a1, a2, alpha, alpha + 0.05};
  }
};

/// Values above 1 at small t are clamped to 1 so both updates stay convex
/// combinations. Throws std::invalid_argument for t == 0.
double rho(const StepSchedule& schedule, long t);
double gamma(const StepSchedule& schedule, long t);

/// Names of every violated convergence condition; empty when the schedule
/// is usable. Runs refuse to start on a non-empty result.
std::vector<std::string> validate(const StepSchedule& schedule);

/// Conditions that are violated but do not block a run. Currently only
/// square-summability of gamma (alpha_gamma > 1/2), which the bundled
/// presets (alpha_gamma = 0.35) do not meet.
std::vector<std::string> warnings(const StepSchedule& schedule);

inline bool is_valid(const StepSchedule& schedule) { return validate(schedule).empty(); }

}  // namespace fedssca
