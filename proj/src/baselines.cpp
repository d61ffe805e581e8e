#include "fedssca/baselines.hpp"

#include "fedssca/model.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fedssca {

void validate(const SgdConfig& cfg) {
  if (cfg.hidden < 1) throw std::invalid_argument("hidden width must be at least 1");
  if (cfg.E < 1) throw std::invalid_argument("E must be at least 1");
  if (cfg.batch_size < 1) throw std::invalid_argument("batch size must be at least 1");
  if (cfg.T < 1) throw std::invalid_argument("T must be at least 1");
  if (!(cfg.lr_a >= 0.0)) throw std::invalid_argument("learning-rate scale must be non-negative");
  if (!(cfg.lambda >= 0.0)) throw std::invalid_argument("lambda must be non-negative");
}

double learning_rate(const SgdConfig& cfg, long t) {
  if (t < 1) throw std::invalid_argument("round index must be >= 1");
  return cfg.lr_a / std::pow(static_cast<double>(t), cfg.lr_alpha);
}

ModelParams local_sgd_round(ClientShard& shard, const ModelParams& omega_t, const SgdConfig& cfg, long t) {
  const double r = learning_rate(cfg, t);
  ModelParams w = omega_t;
  for (int step = 0; step < cfg.E; ++step) {
    const auto batch = draw_batch(shard, cfg.batch_size);
    const ModelParams g = mean_gradient(batch_stats(w, shard.samples, batch));
    w.w1 -= r * (g.w1 + 2.0 * cfg.lambda * w.w1);
    w.w2 -= r * (g.w2 + 2.0 * cfg.lambda * w.w2);
  }
  return w;
}

ModelParams weighted_average(std::span<const ModelParams> models, std::span<const std::size_t> sizes) {
  if (models.empty() || models.size() != sizes.size()) {
    throw std::invalid_argument("need one size per model");
  }
  ModelParams avg = models[0];
  std::size_t seen = sizes[0];
  for (std::size_t i = 1; i < models.size(); ++i) {
    seen += sizes[i];
    const double w = static_cast<double>(sizes[i]) / static_cast<double>(seen);
    avg.w1 += w * (models[i].w1 - avg.w1);
    avg.w2 += w * (models[i].w2 - avg.w2);
  }
  return avg;
}

RunResult run_fedavg(const SgdConfig& cfg, std::span<ClientShard> shards, const Dataset& test_set,
                     const RunOptions& options) {
  validate(cfg);
  if (shards.empty()) throw std::invalid_argument("no clients");
  if (test_set.empty()) throw std::invalid_argument("empty test set");
  for (const auto& s : shards) {
    if (cfg.batch_size > s.size()) {
      throw std::invalid_argument("batch size " + std::to_string(cfg.batch_size) + " exceeds client " +
                                  std::to_string(s.client_id) + " size " + std::to_string(s.size()));
    }
  }
  const Dataset train = union_of(shards);
  const Dims dims{train.num_features(), cfg.hidden, train.num_classes()};
  ModelParams omega = options.initial ? *options.initial : initial_params(dims, cfg.seed, cfg.init_scale);
  if (omega.dims() != dims) throw std::invalid_argument("initial parameters do not match the model dimensions");

  std::vector<std::size_t> sizes;
  for (const auto& s : shards) sizes.push_back(s.size());
  const RoundTraffic per_round = round_traffic(Algorithm::fedavg, shards.size(), dims);

  RunResult result;
  RoundTraffic total;
  const auto start = std::chrono::steady_clock::now();
  std::vector<ModelParams> local(shards.size());
  const auto n = static_cast<std::ptrdiff_t>(shards.size());

  for (long t = 1; t <= cfg.T; ++t) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      local[k] = local_sgd_round(shards[k], omega, cfg, t);
    }
    omega = weighted_average(local, sizes);
    total.uplink += per_round.uplink;
    total.downlink += per_round.downlink;

    RoundRecord row;
    row.t = t;
    row.train_cost = cost(omega, train);
    row.test_acc = accuracy(omega, test_set);
    row.uplink_scalars = total.uplink;
    row.downlink_scalars = total.downlink;
    if (options.record_time) {
      row.wall_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
    result.trace.rows.push_back(row);
  }
  result.params = std::move(omega);
  return result;
}

}  // namespace fedssca
