#pragma once

// Runs an ExperimentSpec: loads data per seed, partitions it, and drives
// the selected algorithm(s) over `repeats` seeds (seed, seed+1, ...).

#include "fedssca/config.hpp"
#include "fedssca/trace_io.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fedssca {

/// $FEDSSCA_DATA_DIR, or "data" when unset.
std::filesystem::path default_data_dir();

struct LoadedData {
  Dataset train;
  Dataset test;
};

/// Synthetic data is regenerated from `seed` and split train/test; IDX paths
/// are resolved against `data_dir` unless absolute.
LoadedData load_data(const ExperimentSpec& spec, std::uint64_t seed, const std::filesystem::path& data_dir);

struct SeedRun {
  std::string algorithm;  // "ssca" or "fedavg"
  std::uint64_t seed = 0;
  RoundTrace trace;
  ModelParams params;
  std::optional<double> final_slack;
  std::vector<std::uint64_t> shard_hashes;
  std::vector<double> stage_slacks;  // penalty continuation only
  std::optional<double> final_c;
  bool exhausted = false;
};

struct ExperimentResult {
  Mode mode = Mode::ssca_unconstrained;
  std::vector<SeedRun> runs;  // seed-major; in compare mode ssca then fedavg per seed
};

struct ExecOptions {
  std::filesystem::path data_dir = default_data_dir();
  bool record_time = false;
};

/// Dispatches on spec.mode. Penalty-continuation stages are concatenated
/// into one trace with t and the traffic counters carried across stages.
ExperimentResult run_experiment(const ExperimentSpec& spec, const ExecOptions& options = {});

/// Runs of one algorithm, in seed order.
std::vector<const SeedRun*> runs_of(const ExperimentResult& result, const std::string& algorithm);

RoundTrace mean_trace(const std::vector<const SeedRun*>& runs);

/// Per-seed first round with train_cost <= level; a run that never gets
/// there counts as T + 1.
std::vector<long> rounds_to_level(const std::vector<const SeedRun*>& runs, double level);

std::vector<CompareRow> compare_rows(const ExperimentResult& result);

nlohmann::ordered_json summary_json(const ExperimentSpec& spec, const ExperimentResult& result);

struct GridPoint {
  double lr_a = 0.0;
  double lr_alpha = 0.0;
  double score = 0.0;  // seed-mean of the trace-mean train cost; +inf if any run diverged
};

struct GridResult {
  std::vector<GridPoint> points;
  GridPoint best;
};

/// FedAvg learning-rate search over spec.grid.
GridResult grid_search(const ExperimentSpec& spec, const ExecOptions& options = {});

}  // namespace fedssca
