#include "fedssca/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fedssca {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0)) throw std::invalid_argument(std::string(what) + " must be positive");
}

}  // namespace

ModelParams solve_unconstrained(const SurrogateState& state, double lambda, double tau) {
  require_positive(tau, "tau");
  const double scale = -1.0 / (2.0 * tau);
  ModelParams w;
  w.w1 = scale * (state.B + 2.0 * lambda * state.beta.w1);
  w.w2 = scale * (state.C + 2.0 * lambda * state.beta.w2);
  return w;
}

double dual_nu(double b, double tau, double U, double A, double c) {
  const double denom = b + 4.0 * tau * (U - A);
  if (!(denom > 0.0)) return c;
  const double raw = (std::sqrt(b / denom) - 1.0) / tau;
  return std::min(std::max(raw, 0.0), c);
}

ConstrainedSolution solve_constrained(const SurrogateState& state, double tau, double c, double U) {
  require_positive(tau, "tau");
  require_positive(c, "penalty c");
  const double b = state.B.squaredNorm() + state.C.squaredNorm();

  ConstrainedSolution sol;
  if (b == 0.0) {
    sol.omega_bar = ModelParams::zeros({static_cast<std::size_t>(state.B.cols()),
                                        static_cast<std::size_t>(state.B.rows()),
                                        static_cast<std::size_t>(state.C.rows())});
    sol.nu = state.A <= U ? 0.0 : c;
  } else {
    sol.nu = dual_nu(b, tau, U, state.A, c);
    const double scale = -sol.nu / (2.0 * (1.0 + sol.nu * tau));
    sol.omega_bar.w1 = scale * state.B;
    sol.omega_bar.w2 = scale * state.C;
  }
  sol.slack = std::max(0.0, constraint_value(state, sol.omega_bar, tau) - U);
  return sol;
}

double penalized_objective(const ConstrainedSolution& sol, double c) {
  return sol.omega_bar.squared_norm() + c * sol.slack;
}

}  // namespace fedssca
