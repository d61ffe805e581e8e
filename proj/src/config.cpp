#include "fedssca/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <stdexcept>

namespace fedssca {

using nlohmann::json;
using nlohmann::ordered_json;

std::string to_string(Mode m) {
  switch (m) {
    case Mode::ssca_unconstrained: return "ssca_unconstrained";
    case Mode::ssca_constrained: return "ssca_constrained";
    case Mode::fedavg: return "fedavg";
    case Mode::compare: return "compare";
    case Mode::penalty_continuation: return "penalty_continuation";
  }
  return "unknown";
}

Mode parse_mode(const std::string& name) {
  for (Mode m : {Mode::ssca_unconstrained, Mode::ssca_constrained, Mode::fedavg, Mode::compare,
                 Mode::penalty_continuation}) {
    if (to_string(m) == name) return m;
  }
  throw std::invalid_argument("unknown mode '" + name + "'");
}

RunConfig ExperimentSpec::run_config(std::uint64_t run_seed) const {
  RunConfig c = ssca;
  c.hidden = hidden;
  c.seed = run_seed;
  c.init_scale = init_scale;
  c.partition = partition;
  return c;
}

SgdConfig ExperimentSpec::sgd_config(std::uint64_t run_seed) const {
  SgdConfig c = fedavg;
  c.hidden = hidden;
  c.seed = run_seed;
  c.init_scale = init_scale;
  return c;
}

void validate(const ExperimentSpec& spec) {
  if (spec.repeats < 1) throw std::invalid_argument("repeats must be at least 1");
  if (spec.threads < 1) throw std::invalid_argument("threads must be at least 1");
  if (spec.hidden < 1) throw std::invalid_argument("model.hidden must be at least 1");
  if (spec.clients < 1) throw std::invalid_argument("federation.clients must be at least 1");
  if (spec.data.source != "synthetic" && spec.data.source != "idx") {
    throw std::invalid_argument("data.source must be 'synthetic' or 'idx'");
  }
  const bool needs_ssca = spec.mode != Mode::fedavg;
  const bool needs_sgd = spec.mode == Mode::fedavg || spec.mode == Mode::compare;
  if (needs_ssca) validate(spec.run_config(spec.seed));
  if (needs_sgd) validate(spec.sgd_config(spec.seed));
  if (spec.mode == Mode::penalty_continuation && spec.continuation.c_sequence.empty()) {
    throw std::invalid_argument("continuation.c_sequence is empty");
  }
}

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> known, const std::string& where) {
  if (!obj.is_object()) throw std::invalid_argument(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
      throw std::invalid_argument("unknown key '" + key + "' in " + where);
    }
  }
}

template <typename T>
void read(const json& obj, const char* key, T& field) {
  if (auto it = obj.find(key); it != obj.end()) field = it->get<T>();
}

}  // namespace

ordered_json to_json(const ExperimentSpec& s) {
  ordered_json j;
  j["name"] = s.name;
  j["mode"] = to_string(s.mode);
  j["seed"] = s.seed;
  j["repeats"] = s.repeats;
  j["threads"] = s.threads;

  ordered_json data;
  data["source"] = s.data.source;
  if (s.data.source == "synthetic") {
    data["synthetic"] = {{"N", s.data.synthetic.N},
                         {"K", s.data.synthetic.K},
                         {"L", s.data.synthetic.L},
                         {"margin", s.data.synthetic.margin}};
    data["train_fraction"] = s.data.train_fraction;
  } else {
    data["train_images"] = s.data.train_images;
    data["train_labels"] = s.data.train_labels;
    data["test_images"] = s.data.test_images;
    data["test_labels"] = s.data.test_labels;
    data["train_limit"] = s.data.train_limit;
    data["test_limit"] = s.data.test_limit;
    data["classes"] = s.data.classes;
  }
  j["data"] = data;

  j["model"] = {{"hidden", s.hidden}, {"init_scale", s.init_scale}};
  j["federation"] = {{"clients", s.clients}, {"partition", to_string(s.partition)}};
  j["ssca"] = {{"T", s.ssca.T},
               {"batch_size", s.ssca.batch_size},
               {"tau", s.ssca.tau},
               {"lambda", s.ssca.lambda},
               {"c", s.ssca.c},
               {"U", s.ssca.U},
               {"schedule",
                {{"a1", s.ssca.schedule.a1},
                 {"a2", s.ssca.schedule.a2},
                 {"alpha", s.ssca.schedule.alpha},
                 {"alpha_gamma", s.ssca.schedule.alpha_gamma}}}};
  j["fedavg"] = {{"T", s.fedavg.T},
                 {"E", s.fedavg.E},
                 {"batch_size", s.fedavg.batch_size},
                 {"lr_a", s.fedavg.lr_a},
                 {"lr_alpha", s.fedavg.lr_alpha},
                 {"lambda", s.fedavg.lambda}};
  j["continuation"] = {{"c_sequence", s.continuation.c_sequence}, {"slack_tol", s.continuation.slack_tol}};
  j["grid"] = {{"lr_a", s.grid.lr_a}, {"lr_alpha", s.grid.lr_alpha}};
  return j;
}

ExperimentSpec experiment_from_json(const json& j) {
  check_keys(j, {"name", "mode", "seed", "repeats", "threads", "data", "model", "federation", "ssca", "fedavg",
                 "continuation", "grid"},
             "config");
  ExperimentSpec s;
  read(j, "name", s.name);
  if (j.contains("mode")) s.mode = parse_mode(j["mode"].get<std::string>());
  read(j, "seed", s.seed);
  read(j, "repeats", s.repeats);
  read(j, "threads", s.threads);

  if (j.contains("data")) {
    const auto& d = j["data"];
    check_keys(d, {"source", "synthetic", "train_fraction", "train_images", "train_labels", "test_images",
                   "test_labels", "train_limit", "test_limit", "classes"},
               "data");
    read(d, "source", s.data.source);
    if (d.contains("synthetic")) {
      const auto& syn = d["synthetic"];
      check_keys(syn, {"N", "K", "L", "margin"}, "data.synthetic");
      read(syn, "N", s.data.synthetic.N);
      read(syn, "K", s.data.synthetic.K);
      read(syn, "L", s.data.synthetic.L);
      read(syn, "margin", s.data.synthetic.margin);
    }
    read(d, "train_fraction", s.data.train_fraction);
    read(d, "train_images", s.data.train_images);
    read(d, "train_labels", s.data.train_labels);
    read(d, "test_images", s.data.test_images);
    read(d, "test_labels", s.data.test_labels);
    read(d, "train_limit", s.data.train_limit);
    read(d, "test_limit", s.data.test_limit);
    read(d, "classes", s.data.classes);
  }
  if (j.contains("model")) {
    check_keys(j["model"], {"hidden", "init_scale"}, "model");
    read(j["model"], "hidden", s.hidden);
    read(j["model"], "init_scale", s.init_scale);
  }
  if (j.contains("federation")) {
    check_keys(j["federation"], {"clients", "partition"}, "federation");
    read(j["federation"], "clients", s.clients);
    if (j["federation"].contains("partition")) {
      s.partition = parse_partition_policy(j["federation"]["partition"].get<std::string>());
    }
  }
  if (j.contains("ssca")) {
    const auto& a = j["ssca"];
    check_keys(a, {"T", "batch_size", "tau", "lambda", "c", "U", "schedule"}, "ssca");
    read(a, "T", s.ssca.T);
    read(a, "batch_size", s.ssca.batch_size);
    read(a, "tau", s.ssca.tau);
    read(a, "lambda", s.ssca.lambda);
    read(a, "c", s.ssca.c);
    read(a, "U", s.ssca.U);
    if (a.contains("schedule")) {
      const auto& sc = a["schedule"];
      check_keys(sc, {"a1", "a2", "alpha", "alpha_gamma"}, "ssca.schedule");
      read(sc, "a1", s.ssca.schedule.a1);
      read(sc, "a2", s.ssca.schedule.a2);
      read(sc, "alpha", s.ssca.schedule.alpha);
      read(sc, "alpha_gamma", s.ssca.schedule.alpha_gamma);
    }
  }
  if (j.contains("fedavg")) {
    const auto& f = j["fedavg"];
    check_keys(f, {"T", "E", "batch_size", "lr_a", "lr_alpha", "lambda"}, "fedavg");
    read(f, "T", s.fedavg.T);
    read(f, "E", s.fedavg.E);
    read(f, "batch_size", s.fedavg.batch_size);
    read(f, "lr_a", s.fedavg.lr_a);
    read(f, "lr_alpha", s.fedavg.lr_alpha);
    read(f, "lambda", s.fedavg.lambda);
  }
  if (j.contains("continuation")) {
    check_keys(j["continuation"], {"c_sequence", "slack_tol"}, "continuation");
    read(j["continuation"], "c_sequence", s.continuation.c_sequence);
    read(j["continuation"], "slack_tol", s.continuation.slack_tol);
  }
  if (j.contains("grid")) {
    check_keys(j["grid"], {"lr_a", "lr_alpha"}, "grid");
    read(j["grid"], "lr_a", s.grid.lr_a);
    read(j["grid"], "lr_alpha", s.grid.lr_alpha);
  }
  return s;
}

ExperimentSpec load_experiment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
  return experiment_from_json(j);
}

namespace {

// N=1000, K=20, J=16, L=4, I=5, B=10, margin 1, T=300.
ExperimentSpec synthetic_base() {
  ExperimentSpec s;
  s.seed = 1;
  s.repeats = 5;
  s.data.source = "synthetic";
  s.data.synthetic = {1000, 20, 4, 1.0, 0};
  s.hidden = 16;
  s.clients = 5;
  s.ssca.T = 300;
  s.ssca.batch_size = 10;
  s.ssca.tau = 0.1;
  s.ssca.lambda = 1e-5;
  s.ssca.c = 1e5;
  s.ssca.U = 0.5;
  s.ssca.schedule = StepSchedule::coupled(0.6, 0.9, 0.3);
  s.fedavg.T = 300;
  s.fedavg.E = 2;
  s.fedavg.batch_size = 5;
  s.fedavg.lambda = 1e-5;
  s.fedavg.lr_a = 2.0;
  s.fedavg.lr_alpha = 0.0;
  return s;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"synthetic-small",        "synthetic",         "synthetic-constrained",
          "synthetic-continuation", "synthetic-compare", "mnist-paper"};
}

ExperimentSpec preset(const std::string& name) {
  if (name == "synthetic-small") {
    ExperimentSpec s = synthetic_base();
    s.name = name;
    s.repeats = 1;
    s.data.synthetic = {400, 10, 3, 1.0, 0};
    s.hidden = 8;
    s.clients = 4;
    s.ssca.T = 50;
    s.fedavg.T = 50;
    return s;
  }
  if (name == "synthetic") {
    ExperimentSpec s = synthetic_base();
    s.name = name;
    return s;
  }
  if (name == "synthetic-constrained") {
    ExperimentSpec s = synthetic_base();
    s.name = name;
    s.mode = Mode::ssca_constrained;
    return s;
  }
  if (name == "synthetic-continuation") {
    ExperimentSpec s = synthetic_base();
    s.name = name;
    s.mode = Mode::penalty_continuation;
    // Tight enough that the weakest penalty leaves a visible slack.
    s.ssca.U = 0.1;
    return s;
  }
  if (name == "synthetic-compare") {
    ExperimentSpec s = synthetic_base();
    s.name = name;
    s.mode = Mode::compare;
    return s;
  }
  if (name == "mnist-paper") {
    ExperimentSpec s;
    s.name = name;
    s.mode = Mode::ssca_unconstrained;
    s.seed = 1;
    s.repeats = 1;
    s.data.source = "idx";
    s.data.classes = 10;
    s.hidden = 128;
    s.clients = 10;
    s.ssca.T = 100;
    s.ssca.batch_size = 10;
    s.ssca.tau = 0.1;
    s.ssca.lambda = 1e-5;
    s.ssca.c = 1e5;
    s.ssca.U = 0.13;
    s.ssca.schedule = StepSchedule::coupled(0.6, 0.9, 0.3);
    s.fedavg.T = 100;
    s.fedavg.E = 2;
    s.fedavg.batch_size = 5;
    s.fedavg.lambda = 1e-5;
    return s;
  }
  throw std::invalid_argument("unknown preset '" + name + "'");
}

ExperimentSpec apply_override(const ExperimentSpec& spec, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0 || assignment[0] != '/') {
    throw std::invalid_argument("override must look like /path/to/key=value, got '" + assignment + "'");
  }
  const std::string pointer = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  json j = to_json(spec);
  const json::json_pointer ptr(pointer);
  if (!j.contains(ptr)) throw std::invalid_argument("override targets unknown key " + pointer);
  j[ptr] = value;
  return experiment_from_json(j);
}

}  // namespace fedssca
