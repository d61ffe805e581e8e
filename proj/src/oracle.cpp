#include "fedssca/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fedssca {

namespace {

// Minimizer of the Lagrangian ||w||^2 + nu (<coef, w> + tau ||w||^2) for a
// fixed multiplier, written out entry by entry.
void lagrangian_argmin(const Matrix& coef, double nu, double tau, Matrix& out) {
  out.resize(coef.rows(), coef.cols());
  for (Eigen::Index i = 0; i < coef.size(); ++i) {
    out.data()[i] = -nu * coef.data()[i] / (2.0 + 2.0 * nu * tau);
  }
}

// Surrogate constraint value minus U along the dual path. This is the
// derivative of the (concave) dual function, decreasing in nu.
double dual_slope(const SurrogateState& state, double nu, double tau, double U, ModelParams& w) {
  lagrangian_argmin(state.B, nu, tau, w.w1);
  lagrangian_argmin(state.C, nu, tau, w.w2);
  double linear = 0.0, square = 0.0;
  for (Eigen::Index i = 0; i < state.B.size(); ++i) {
    linear += state.B.data()[i] * w.w1.data()[i];
    square += w.w1.data()[i] * w.w1.data()[i];
  }
  for (Eigen::Index i = 0; i < state.C.size(); ++i) {
    linear += state.C.data()[i] * w.w2.data()[i];
    square += w.w2.data()[i] * w.w2.data()[i];
  }
  return linear + tau * square + state.A - U;
}

}  // namespace

ConstrainedSolution oracle_solve(const SurrogateState& state, double tau, double c, double U) {
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  if (!(c > 0.0)) throw std::invalid_argument("penalty c must be positive");

  ConstrainedSolution sol;
  double g = dual_slope(state, 0.0, tau, U, sol.omega_bar);
  if (g <= 0.0) {
    sol.nu = 0.0;
    sol.slack = 0.0;
    return sol;
  }
  g = dual_slope(state, c, tau, U, sol.omega_bar);
  if (g >= 0.0) {
    sol.nu = c;
    sol.slack = g;
    return sol;
  }

  double lo = 0.0, hi = c;  // slope > 0 at lo, < 0 at hi
  for (int iter = 0; iter < 400 && hi - lo > 1e-12; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (dual_slope(state, mid, tau, U, sol.omega_bar) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  sol.nu = 0.5 * (lo + hi);
  dual_slope(state, sol.nu, tau, U, sol.omega_bar);
  // Interior multiplier: the slack's own multiplier c - nu is positive, so s = 0.
  sol.slack = 0.0;
  return sol;
}

}  // namespace fedssca
