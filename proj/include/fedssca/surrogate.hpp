#pragma once

// Recursive convex surrogate kept by the server.
//
// With the linearized-plus-proximal per-sample approximation, the running
// surrogate of the cost (up to a constant) is
//
//   Fbar(w) = <B, w1> + <C, w2> + tau ||w||^2.
//
// The unconstrained objective adds 2 lambda <beta, w> for the l2
// regularizer; the cost constraint uses Fbar(w) + A. B, C, A and beta are
// exponential averages with weight rho(t), all starting at zero.

#include "fedssca/kernels.hpp"
#include "fedssca/types.hpp"

#include <span>
#include <vector>

namespace fedssca {

struct SurrogateState {
  ModelParams beta;  // running average of the broadcast iterates
  Matrix B;          // J x K linear coefficients of w1
  Matrix C;          // L x J linear coefficients of w2
  double A = 0.0;    // constant term (constraint surrogate only)
  long t = 0;

  static SurrogateState zeros(const Dims& dims);
  bool all_finite() const;
};

/// Server-side weighted sums sum_i N_i / (batch_size N) * (client sums).
struct AggregatedStats {
  Matrix b_w;
  Matrix c_w;
  double a_w = 0.0;
};

/// A client's uplink message paired with its local dataset size N_i.
struct ClientStats {
  BatchStats stats;
  std::size_t local_size = 0;
};

/// Weighted reduction of the client messages in the order given. Throws if
/// the N_i do not sum to `total_samples` or a message has count != batch_size.
AggregatedStats aggregate(std::span<const ClientStats> clients, std::size_t total_samples,
                          std::size_t batch_size);

/// beta, B and C updates; A is left untouched. Throws unless rho_t is in (0, 1].
SurrogateState update_unconstrained(const SurrogateState& state, double rho_t,
                                    const ModelParams& omega_t, const AggregatedStats& agg,
                                    double tau);

/// As update_unconstrained, plus
///   A <- (1 - rho) A + rho (a_w + tau ||w_t||^2 - <b_w, w1_t> - <c_w, w2_t>).
SurrogateState update_constrained(const SurrogateState& state, double rho_t,
                                  const ModelParams& omega_t, const AggregatedStats& agg,
                                  double tau);

struct ValueAndGrad {
  double value = 0.0;
  ModelParams grad;
};

/// Fbar(w) + 2 lambda <beta, w> and its gradient.
ValueAndGrad surrogate_value_and_grad(const SurrogateState& state, const ModelParams& omega,
                                      double tau, double lambda);

/// Fbar(w) + A, the surrogate value of the cost.
double constraint_value(const SurrogateState& state, const ModelParams& omega, double tau);

}  // namespace fedssca
