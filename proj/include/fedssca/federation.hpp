#pragma once

// Round-based simulation of sample-based federated training with
// mini-batch SSCA.
//
// Each round the server broadcasts the current iterate, every client
// returns unweighted statistics of a fresh mini-batch, and the server
// folds the weighted sum into its surrogate, solves the approximate
// problem in closed form and moves the iterate toward the solution.
// Clients run concurrently; results are combined in client order so the
// thread count never changes a result.

#include "fedssca/kernels.hpp"
#include "fedssca/schedules.hpp"
#include "fedssca/surrogate.hpp"
#include "fedssca/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fedssca {

enum class PartitionPolicy { iid, label_sorted };

std::string to_string(PartitionPolicy p);
PartitionPolicy parse_partition_policy(const std::string& name);

/// One client's local samples and its private random stream. The samples
/// never leave the client: only BatchStats (or a model, for FedAvg) do.
struct ClientShard {
  int client_id = 0;
  Dataset samples;
  std::mt19937_64 rng;

  std::size_t size() const { return samples.size(); }
};

/// Stream for client `client_id` derived from the master seed.
std::mt19937_64 client_stream(std::uint64_t master_seed, int client_id);

/// Disjoint cover of `dataset` by `clients` shards. iid shuffles then
/// splits as evenly as possible; label_sorted sorts by class (stable) and
/// splits contiguously.
std::vector<ClientShard> partition(const Dataset& dataset, std::size_t clients, PartitionPolicy policy,
                                   std::uint64_t seed);

/// B distinct local indices drawn uniformly from the client's stream,
/// returned in increasing order.
std::vector<std::size_t> draw_batch(ClientShard& shard, std::size_t batch_size);

/// Uplink message for one round. Throws if batch_size exceeds the shard.
BatchStats client_round(ClientShard& shard, const ModelParams& omega_t, std::size_t batch_size);

/// Entries drawn uniformly from [-scale, scale] with a stream derived from `seed`.
ModelParams initial_params(const Dims& dims, std::uint64_t seed, double scale);

struct RunConfig {
  std::size_t hidden = 16;      // J; K and L come from the data
  long T = 100;                 // communication rounds
  std::size_t batch_size = 10;  // per-client mini-batch
  double tau = 0.1;
  double lambda = 1e-5;         // unconstrained mode
  double c = 1e5;               // constrained mode: penalty
  double U = 0.13;              // constrained mode: cost limit
  StepSchedule schedule{};
  std::uint64_t seed = 1;
  double init_scale = 0.05;
  PartitionPolicy partition = PartitionPolicy::iid;
};

/// Throws std::invalid_argument naming the first problem found, including
/// any schedule violation.
void validate(const RunConfig& config);

struct RoundRecord {
  long t = 0;
  double train_cost = 0.0;
  double test_acc = 0.0;
  std::optional<double> slack;
  std::uint64_t uplink_scalars = 0;    // cumulative
  std::uint64_t downlink_scalars = 0;  // cumulative
  double wall_ms = 0.0;                // 0 unless timing was requested
};

/// Row t describes the state after t rounds: metrics at the iterate the
/// round produced, the slack of the round's approximate problem, and the
/// traffic of rounds 1..t.
struct RoundTrace {
  std::vector<RoundRecord> rows;
};

/// What the server saw and did in one round; handed to RunOptions::observer.
struct RoundObservation {
  long t;
  double rho;
  double gamma;
  const ModelParams& omega_t;
  const AggregatedStats& agg;
  const SurrogateState& state;
  const ModelParams& omega_bar;
  std::optional<double> slack;
  std::optional<double> nu;
};

struct RunOptions {
  std::optional<ModelParams> initial;                  // defaults to initial_params(seed)
  std::function<double(long)> gamma_override;          // replaces gamma(schedule, t)
  std::function<void(const RoundObservation&)> observer;
  bool record_time = false;
};

struct RunResult {
  ModelParams params;
  RoundTrace trace;
  std::optional<double> final_slack;  // constrained runs only
};

/// Unconstrained mini-batch SSCA on cost + lambda ||w||^2.
RunResult run_algorithm1(const RunConfig& config, std::span<ClientShard> shards, const Dataset& test_set,
                         const RunOptions& options = {});

/// Constrained mini-batch SSCA on min ||w||^2 s.t. cost <= U, through the
/// exact penalty with parameter c.
RunResult run_algorithm2(const RunConfig& config, std::span<ClientShard> shards, const Dataset& test_set,
                         const RunOptions& options = {});

struct ContinuationResult {
  ModelParams params;
  double final_c = 0.0;
  std::vector<double> stage_slacks;
  std::vector<RoundTrace> traces;
};

class ContinuationExhausted : public std::runtime_error {
 public:
  ContinuationExhausted(std::vector<double> stage_slacks, std::vector<RoundTrace> traces);
  const std::vector<double>& stage_slacks() const { return stage_slacks_; }
  const std::vector<RoundTrace>& traces() const { return traces_; }
  double last_slack() const { return stage_slacks_.back(); }

 private:
  std::vector<double> stage_slacks_;
  std::vector<RoundTrace> traces_;
};

/// Runs the constrained SSCA solver for each c in `c_sequence` (strictly increasing),
/// warm-starting every stage from the previous stage's iterate, and stops at
/// the first stage whose final slack is <= slack_tol. Throws
/// ContinuationExhausted if no stage gets there.
ContinuationResult penalty_continuation(const RunConfig& base, std::span<const double> c_sequence,
                                        double slack_tol, std::span<ClientShard> shards,
                                        const Dataset& test_set, const RunOptions& options = {});

enum class Algorithm { ssca_unconstrained, ssca_constrained, fedavg };

/// Scalars on the wire for one round. Downlink is the broadcast of w to
/// every client; uplink is (b_bar, c_bar) per client for unconstrained SSCA, plus
/// a_bar for the constrained variant, and a full model per client for FedAvg. The
/// sample count is metadata and is not counted.
struct RoundTraffic {
  std::uint64_t uplink = 0;
  std::uint64_t downlink = 0;
};

RoundTraffic round_traffic(Algorithm algorithm, std::size_t clients, const Dims& dims);

/// Scalars a client actually transmits for `stats` under `algorithm`.
std::uint64_t uplink_scalars(const BatchStats& stats, Algorithm algorithm);

/// Totals over a sequence of rounds.
RoundTraffic comm_account(std::span<const RoundTraffic> rounds);

/// All shards concatenated in client order.
Dataset union_of(std::span<const ClientShard> shards);

}  // namespace fedssca
