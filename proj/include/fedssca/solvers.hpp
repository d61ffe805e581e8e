#pragma once

// Per-round minimizers of the server's approximate problems.

#include "fedssca/surrogate.hpp"
#include "fedssca/types.hpp"

namespace fedssca {

/// argmin_w Fbar(w) + 2 lambda <beta, w>:
///   w1 = -(B + 2 lambda beta1) / (2 tau),  w2 = -(C + 2 lambda beta2) / (2 tau).
ModelParams solve_unconstrained(const SurrogateState& state, double lambda, double tau);

struct ConstrainedSolution {
  ModelParams omega_bar;
  double slack = 0.0;
  double nu = 0.0;  // multiplier of the surrogate cost constraint, in [0, c]
};

/// Multiplier of
///   min ||w||^2 + c s  s.t.  Fbar(w) + A - U <= s,  s >= 0
/// where b = ||B||^2 + ||C||^2:
///   nu = clamp_[0,c]((sqrt(b / (b + 4 tau (U - A))) - 1) / tau)  if b + 4 tau (U - A) > 0,
///   nu = c                                                       otherwise.
double dual_nu(double b, double tau, double U, double A, double c);

/// Closed-form solution of the penalized problem above. The primal point is
/// w = -nu (B, C) / (2 (1 + nu tau)); the slack is the positive part of the
/// surrogate constraint at that point.
///
/// When b == 0 every nu gives w = 0, and nu is reported as 0 if A <= U and
/// c otherwise.
ConstrainedSolution solve_constrained(const SurrogateState& state, double tau, double c, double U);

/// Objective ||w||^2 + c s of the penalized problem.
double penalized_objective(const ConstrainedSolution& sol, double c);

/// Independent check of solve_constrained: bisection on the derivative of
/// the one-dimensional dual function (the surrogate constraint value along
/// w(nu)), refined to 1e-12 in nu. Test-only; the training path never calls it.
ConstrainedSolution oracle_solve(const SurrogateState& state, double tau, double c, double U);

}  // namespace fedssca
