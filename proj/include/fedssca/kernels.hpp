#pragma once

// Data-parallel kernels behind the model API.
//
// Every kernel exists twice: a plain serial reference and an OpenMP
// version. Both accumulate each output entry over samples in ascending
// sample order, so they agree bit for bit and the thread count never
// changes a result. Tests assert exact equality; bench/ compares speed.

#include "fedssca/types.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace fedssca {

/// Per-batch uplink statistics. All three fields are unweighted sums over
/// the batch:
///   b_bar(j,k) = sum_n sum_l (Q_l - y_l) S'(z_j) w2(l,j) x_k
///   c_bar(l,j) = sum_n (Q_l - y_l) S(z_j)
///   a_bar      = -sum_n log Q_{y_n}   (positive cross-entropy)
/// Shapes depend only on the model dimensions, never on the batch size.
struct BatchStats {
  Matrix b_bar;
  Matrix c_bar;
  double a_bar = 0.0;
  std::size_t count = 0;
};

namespace kernels {

void set_num_threads(int threads);
int num_threads();

/// Scratch buffers for one forward pass.
struct Workspace {
  std::vector<double> z;      // hidden pre-activations
  std::vector<double> h;      // S(z)
  std::vector<double> dh;     // S'(z)
  std::vector<double> logq;   // log-softmax outputs

  explicit Workspace(const Dims& dims);
};

/// Forward pass for one sample into `ws`. Shared by both kernel families.
void forward_sample(const ModelParams& params, std::span<const double> x, Workspace& ws);

namespace serial {

BatchStats batch_stats(const ModelParams& params, const Dataset& data,
                       std::span<const std::size_t> batch);
/// -log Q_{y_n} for every sample.
std::vector<double> sample_losses(const ModelParams& params, const Dataset& data);
/// argmax_l Q_l per sample, lowest index on ties.
std::vector<int> predictions(const ModelParams& params, const Dataset& data);

}  // namespace serial

namespace parallel {

BatchStats batch_stats(const ModelParams& params, const Dataset& data,
                       std::span<const std::size_t> batch);
std::vector<double> sample_losses(const ModelParams& params, const Dataset& data);
std::vector<int> predictions(const ModelParams& params, const Dataset& data);

}  // namespace parallel

}  // namespace kernels
}  // namespace fedssca
