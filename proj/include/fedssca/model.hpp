#pragma once

// Three-layer classifier: K inputs -> J swish units -> L-way softmax,
// trained on mean cross-entropy.

#include "fedssca/kernels.hpp"
#include "fedssca/types.hpp"

#include <cmath>
#include <span>
#include <vector>

namespace fedssca {

/// Logistic function, evaluated without overflow for any finite z.
inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// S(z) = z / (1 + e^{-z}).
inline double swish(double z) { return z * sigmoid(z); }

/// S'(z) = sigma(z) (1 + z (1 - sigma(z))), with 1 - sigma(z) taken as sigma(-z).
inline double swish_prime(double z) { return sigmoid(z) * (1.0 + z * sigmoid(-z)); }

/// Class probabilities Q(params, x). Throws on a feature-length mismatch.
std::vector<double> forward(const ModelParams& params, std::span<const double> x);

/// Mean cross-entropy over `samples`. Throws on an empty set.
double cost(const ModelParams& params, const Dataset& samples);

/// Unweighted uplink statistics over `batch` (indices into `data`).
BatchStats batch_stats(const ModelParams& params, const Dataset& data,
                       std::span<const std::size_t> batch);
/// Statistics with every sample of `data` in the batch.
BatchStats batch_stats(const ModelParams& params, const Dataset& data);

/// Fraction of samples whose argmax class (lowest index on ties) matches the label.
double accuracy(const ModelParams& params, const Dataset& samples);

/// Gradient of cost(params, batch) recovered from its statistics:
/// (b_bar, c_bar) / count.
ModelParams mean_gradient(const BatchStats& stats);

}  // namespace fedssca
