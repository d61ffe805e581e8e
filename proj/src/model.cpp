#include "fedssca/model.hpp"

#include <numeric>
#include <stdexcept>

namespace fedssca {

namespace {

void check_shapes(const ModelParams& params, const Dataset& samples) {
  const Dims d = params.dims();
  if (d.inputs != samples.num_features() || d.classes != samples.num_classes()) {
    throw std::invalid_argument("model and dataset shapes disagree");
  }
}

}  // namespace

std::vector<double> forward(const ModelParams& params, std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(params.w1.cols())) {
    throw std::invalid_argument("feature vector length does not match model inputs");
  }
  kernels::Workspace ws(params.dims());
  kernels::forward_sample(params, x, ws);
  std::vector<double> q(ws.logq.size());
  for (std::size_t l = 0; l < q.size(); ++l) q[l] = std::exp(ws.logq[l]);
  return q;
}

double cost(const ModelParams& params, const Dataset& samples) {
  if (samples.empty()) throw std::invalid_argument("cost of an empty sample set");
  check_shapes(params, samples);
  const auto losses = kernels::parallel::sample_losses(params, samples);
  double total = 0.0;
  for (double v : losses) total += v;
  return total / static_cast<double>(samples.size());
}

BatchStats batch_stats(const ModelParams& params, const Dataset& data,
                       std::span<const std::size_t> batch) {
  return kernels::parallel::batch_stats(params, data, batch);
}

BatchStats batch_stats(const ModelParams& params, const Dataset& data) {
  std::vector<std::size_t> all(data.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return batch_stats(params, data, all);
}

double accuracy(const ModelParams& params, const Dataset& samples) {
  if (samples.empty()) throw std::invalid_argument("accuracy of an empty sample set");
  check_shapes(params, samples);
  const auto pred = kernels::parallel::predictions(params, samples);
  std::size_t hits = 0;
  for (std::size_t n = 0; n < pred.size(); ++n) hits += pred[n] == samples.label(n) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(samples.size());
}

ModelParams mean_gradient(const BatchStats& stats) {
  const double inv = 1.0 / static_cast<double>(stats.count);
  ModelParams g;
  g.w1 = stats.b_bar * inv;
  g.w2 = stats.c_bar * inv;
  return g;
}

}  // namespace fedssca
