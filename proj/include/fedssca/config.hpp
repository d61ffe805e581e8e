#pragma once

// Experiment description: what data, which algorithm, which knobs. Stored
// as JSON; the bundled presets live in presets/ and are also compiled in.

#include "fedssca/baselines.hpp"
#include "fedssca/federation.hpp"
#include "fedssca/synthetic.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace fedssca {

enum class Mode { ssca_unconstrained, ssca_constrained, fedavg, compare, penalty_continuation };

std::string to_string(Mode m);
Mode parse_mode(const std::string& name);

struct DataSpec {
  std::string source = "synthetic";  // "synthetic" | "idx"
  SyntheticSpec synthetic{};         // seed is ignored; the experiment seed is used
  double train_fraction = 0.8;       // synthetic only
  std::string train_images = "mnist/train-images-idx3-ubyte";
  std::string train_labels = "mnist/train-labels-idx1-ubyte";
  std::string test_images = "mnist/t10k-images-idx3-ubyte";
  std::string test_labels = "mnist/t10k-labels-idx1-ubyte";
  std::size_t train_limit = 0;       // 0 keeps every sample
  std::size_t test_limit = 0;
  std::size_t classes = 10;          // idx only
};

struct ContinuationSpec {
  std::vector<double> c_sequence{1e2, 1e3, 1e4, 1e5};
  double slack_tol = 1e-3;
};

struct GridSpec {
  std::vector<double> lr_a{0.5, 1.0, 2.0, 4.0};
  std::vector<double> lr_alpha{0.0, 0.3, 0.5};
};

struct ExperimentSpec {
  std::string name = "custom";
  Mode mode = Mode::ssca_unconstrained;
  std::uint64_t seed = 1;
  int repeats = 1;
  int threads = 1;
  DataSpec data{};
  std::size_t hidden = 16;
  double init_scale = 0.05;
  std::size_t clients = 5;
  PartitionPolicy partition = PartitionPolicy::iid;
  RunConfig ssca{};      // hidden, seed, init_scale and partition are taken from above
  SgdConfig fedavg{};    // hidden, seed and init_scale are taken from above
  ContinuationSpec continuation{};
  GridSpec grid{};

  /// Sub-configs with the shared fields filled in for one seed.
  RunConfig run_config(std::uint64_t run_seed) const;
  SgdConfig sgd_config(std::uint64_t run_seed) const;
};

/// Throws std::invalid_argument on an inconsistent spec.
void validate(const ExperimentSpec& spec);

nlohmann::ordered_json to_json(const ExperimentSpec& spec);
/// Missing keys keep their defaults; unknown keys are rejected.
ExperimentSpec experiment_from_json(const nlohmann::json& j);

ExperimentSpec load_experiment(const std::filesystem::path& path);

std::vector<std::string> preset_names();
/// Throws std::invalid_argument for an unknown name.
ExperimentSpec preset(const std::string& name);

/// Applies a "/json/pointer=value" override. The value is parsed as JSON
/// when possible and taken as a string otherwise.
ExperimentSpec apply_override(const ExperimentSpec& spec, const std::string& assignment);

}  // namespace fedssca
