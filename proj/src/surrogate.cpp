#include "fedssca/surrogate.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fedssca {

SurrogateState SurrogateState::zeros(const Dims& dims) {
  SurrogateState s;
  s.beta = ModelParams::zeros(dims);
  s.B = Matrix::Zero(static_cast<Eigen::Index>(dims.hidden), static_cast<Eigen::Index>(dims.inputs));
  s.C = Matrix::Zero(static_cast<Eigen::Index>(dims.classes), static_cast<Eigen::Index>(dims.hidden));
  return s;
}

bool SurrogateState::all_finite() const {
  return beta.all_finite() && B.allFinite() && C.allFinite() && std::isfinite(A);
}

AggregatedStats aggregate(std::span<const ClientStats> clients, std::size_t total_samples,
                          std::size_t batch_size) {
  if (clients.empty()) throw std::invalid_argument("no client statistics to aggregate");
  if (batch_size == 0) throw std::invalid_argument("batch size must be positive");
  std::size_t sum_sizes = 0;
  for (const auto& c : clients) {
    if (c.stats.count != batch_size) {
      throw std::invalid_argument("client message covers " + std::to_string(c.stats.count) +
                                  " samples, expected batch size " + std::to_string(batch_size));
    }
    sum_sizes += c.local_size;
  }
  if (sum_sizes != total_samples) {
    throw std::invalid_argument("client sizes sum to " + std::to_string(sum_sizes) + ", expected " +
                                std::to_string(total_samples));
  }

  AggregatedStats agg;
  agg.b_w = Matrix::Zero(clients.front().stats.b_bar.rows(), clients.front().stats.b_bar.cols());
  agg.c_w = Matrix::Zero(clients.front().stats.c_bar.rows(), clients.front().stats.c_bar.cols());
  const double denom = static_cast<double>(batch_size) * static_cast<double>(total_samples);
  for (const auto& c : clients) {
    const double w = static_cast<double>(c.local_size) / denom;
    agg.b_w += w * c.stats.b_bar;
    agg.c_w += w * c.stats.c_bar;
    agg.a_w += w * c.stats.a_bar;
  }
  return agg;
}

namespace {

void check_rho(double rho_t) {
  if (!(rho_t > 0.0 && rho_t <= 1.0)) {
    throw std::invalid_argument("rho must lie in (0, 1], got " + std::to_string(rho_t));
  }
}

}  // namespace

SurrogateState update_unconstrained(const SurrogateState& state, double rho_t,
                                    const ModelParams& omega_t, const AggregatedStats& agg,
                                    double tau) {
  check_rho(rho_t);
  const double keep = 1.0 - rho_t;
  SurrogateState next;
  next.beta.w1 = keep * state.beta.w1 + rho_t * omega_t.w1;
  next.beta.w2 = keep * state.beta.w2 + rho_t * omega_t.w2;
  next.B = keep * state.B + rho_t * (agg.b_w - 2.0 * tau * omega_t.w1);
  next.C = keep * state.C + rho_t * (agg.c_w - 2.0 * tau * omega_t.w2);
  next.A = state.A;
  next.t = state.t + 1;
  return next;
}

SurrogateState update_constrained(const SurrogateState& state, double rho_t,
                                  const ModelParams& omega_t, const AggregatedStats& agg,
                                  double tau) {
  SurrogateState next = update_unconstrained(state, rho_t, omega_t, agg, tau);
  const double fresh = agg.a_w + tau * omega_t.squared_norm() - agg.b_w.cwiseProduct(omega_t.w1).sum() -
                       agg.c_w.cwiseProduct(omega_t.w2).sum();
  next.A = (1.0 - rho_t) * state.A + rho_t * fresh;
  return next;
}

ValueAndGrad surrogate_value_and_grad(const SurrogateState& state, const ModelParams& omega,
                                      double tau, double lambda) {
  ValueAndGrad out;
  out.value = state.B.cwiseProduct(omega.w1).sum() + state.C.cwiseProduct(omega.w2).sum() +
              tau * omega.squared_norm() + 2.0 * lambda * dot(state.beta, omega);
  out.grad.w1 = state.B + 2.0 * tau * omega.w1 + 2.0 * lambda * state.beta.w1;
  out.grad.w2 = state.C + 2.0 * tau * omega.w2 + 2.0 * lambda * state.beta.w2;
  return out;
}

double constraint_value(const SurrogateState& state, const ModelParams& omega, double tau) {
  return state.B.cwiseProduct(omega.w1).sum() + state.C.cwiseProduct(omega.w2).sum() +
         tau * omega.squared_norm() + state.A;
}

}  // namespace fedssca
