#pragma once

// FedAvg-style baseline: E local SGD steps per client, then a
// size-weighted model average at the server.

#include "fedssca/federation.hpp"
#include "fedssca/types.hpp"

#include <cstdint>
#include <span>

namespace fedssca {

struct SgdConfig {
  std::size_t hidden = 16;
  int E = 1;                    // local steps per round
  std::size_t batch_size = 10;  // per local step
  double lr_a = 1.0;            // r(t) = lr_a / t^lr_alpha
  double lr_alpha = 0.3;
  long T = 100;
  double lambda = 1e-5;
  std::uint64_t seed = 1;
  double init_scale = 0.05;
};

void validate(const SgdConfig& cfg);

double learning_rate(const SgdConfig& cfg, long t);

/// E steps w <- w - r(t) (grad cost(batch) + 2 lambda w), each on a fresh
/// batch from the client's stream.
ModelParams local_sgd_round(ClientShard& shard, const ModelParams& omega_t, const SgdConfig& cfg, long t);

/// sum_i (N_i / N) w_i as a running mean, so identical inputs come back
/// bit for bit.
ModelParams weighted_average(std::span<const ModelParams> models, std::span<const std::size_t> sizes);

RunResult run_fedavg(const SgdConfig& cfg, std::span<ClientShard> shards, const Dataset& test_set,
                     const RunOptions& options = {});

}  // namespace fedssca
