#include "fedssca/experiment.hpp"

#include "fedssca/idx.hpp"
#include "fedssca/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace fedssca {

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("FEDSSCA_DATA_DIR"); env && *env) return env;
  return "data";
}

LoadedData load_data(const ExperimentSpec& spec, std::uint64_t seed, const std::filesystem::path& data_dir) {
  if (spec.data.source == "synthetic") {
    SyntheticSpec syn = spec.data.synthetic;
    syn.seed = seed;
    auto split = train_test_split(gen_synthetic(syn), spec.data.train_fraction, seed);
    return {std::move(split.train), std::move(split.test)};
  }
  if (spec.data.source != "idx") throw std::invalid_argument("unknown data source '" + spec.data.source + "'");
  auto resolve = [&](const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : data_dir / path;
  };
  return {load_idx(resolve(spec.data.train_images), resolve(spec.data.train_labels), spec.data.classes,
                   spec.data.train_limit),
          load_idx(resolve(spec.data.test_images), resolve(spec.data.test_labels), spec.data.classes,
                   spec.data.test_limit)};
}

namespace {

struct Prepared {
  std::vector<ClientShard> shards;
  Dataset test;
  std::vector<std::uint64_t> hashes;
};

Prepared prepare(const ExperimentSpec& spec, std::uint64_t seed, const ExecOptions& options) {
  LoadedData data = load_data(spec, seed, options.data_dir);
  Prepared p;
  p.shards = partition(data.train, spec.clients, spec.partition, seed);
  p.test = std::move(data.test);
  for (const auto& s : p.shards) p.hashes.push_back(shard_hash(s));
  return p;
}

SeedRun from_result(std::string algorithm, std::uint64_t seed, RunResult r, std::vector<std::uint64_t> hashes) {
  SeedRun run;
  run.algorithm = std::move(algorithm);
  run.seed = seed;
  run.trace = std::move(r.trace);
  run.params = std::move(r.params);
  run.final_slack = r.final_slack;
  run.shard_hashes = std::move(hashes);
  return run;
}

RoundTrace concatenate(const std::vector<RoundTrace>& stages) {
  RoundTrace out;
  long t0 = 0;
  std::uint64_t up0 = 0, down0 = 0;
  double ms0 = 0.0;
  for (const auto& st : stages) {
    for (RoundRecord r : st.rows) {
      r.t += t0;
      r.uplink_scalars += up0;
      r.downlink_scalars += down0;
      r.wall_ms += ms0;
      out.rows.push_back(r);
    }
    if (!out.rows.empty()) {
      const auto& last = out.rows.back();
      t0 = last.t;
      up0 = last.uplink_scalars;
      down0 = last.downlink_scalars;
      ms0 = last.wall_ms;
    }
  }
  return out;
}

SeedRun run_continuation(const ExperimentSpec& spec, std::uint64_t seed, Prepared& p, const RunOptions& ro) {
  SeedRun run;
  run.algorithm = "ssca";
  run.seed = seed;
  run.shard_hashes = p.hashes;
  const RunConfig cfg = spec.run_config(seed);
  try {
    auto res = penalty_continuation(cfg, spec.continuation.c_sequence, spec.continuation.slack_tol, p.shards,
                                    p.test, ro);
    run.trace = concatenate(res.traces);
    run.params = std::move(res.params);
    run.stage_slacks = std::move(res.stage_slacks);
    run.final_c = res.final_c;
  } catch (const ContinuationExhausted& e) {
    run.trace = concatenate(e.traces());
    run.stage_slacks = e.stage_slacks();
    run.exhausted = true;
  }
  if (!run.stage_slacks.empty()) run.final_slack = run.stage_slacks.back();
  return run;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec, const ExecOptions& options) {
  validate(spec);
  kernels::set_num_threads(spec.threads);
  ExperimentResult out;
  out.mode = spec.mode;
  RunOptions ro;
  ro.record_time = options.record_time;

  for (int r = 0; r < spec.repeats; ++r) {
    const std::uint64_t seed = spec.seed + static_cast<std::uint64_t>(r);
    Prepared p = prepare(spec, seed, options);
    switch (spec.mode) {
      case Mode::ssca_unconstrained:
        out.runs.push_back(from_result("ssca", seed, run_algorithm1(spec.run_config(seed), p.shards, p.test, ro),
                                       p.hashes));
        break;
      case Mode::ssca_constrained:
        out.runs.push_back(from_result("ssca", seed, run_algorithm2(spec.run_config(seed), p.shards, p.test, ro),
                                       p.hashes));
        break;
      case Mode::fedavg:
        out.runs.push_back(
            from_result("fedavg", seed, run_fedavg(spec.sgd_config(seed), p.shards, p.test, ro), p.hashes));
        break;
      case Mode::compare: {
        // Both algorithms start from the same shards and fresh client streams.
        std::vector<ClientShard> for_sgd = p.shards;
        out.runs.push_back(from_result("ssca", seed, run_algorithm1(spec.run_config(seed), p.shards, p.test, ro),
                                       p.hashes));
        std::vector<std::uint64_t> sgd_hashes;
        for (const auto& s : for_sgd) sgd_hashes.push_back(shard_hash(s));
        out.runs.push_back(
            from_result("fedavg", seed, run_fedavg(spec.sgd_config(seed), for_sgd, p.test, ro), sgd_hashes));
        break;
      }
      case Mode::penalty_continuation:
        out.runs.push_back(run_continuation(spec, seed, p, ro));
        break;
    }
  }
  return out;
}

std::vector<const SeedRun*> runs_of(const ExperimentResult& result, const std::string& algorithm) {
  std::vector<const SeedRun*> out;
  for (const auto& r : result.runs) {
    if (r.algorithm == algorithm) out.push_back(&r);
  }
  return out;
}

RoundTrace mean_trace(const std::vector<const SeedRun*>& runs) {
  std::vector<RoundTrace> traces;
  for (const auto* r : runs) traces.push_back(r->trace);
  return average_traces(traces);
}

std::vector<long> rounds_to_level(const std::vector<const SeedRun*>& runs, double level) {
  std::vector<long> out;
  for (const auto* r : runs) {
    const long never = r->trace.rows.empty() ? 1 : r->trace.rows.back().t + 1;
    out.push_back(rounds_to_threshold(r->trace, level).value_or(never));
  }
  return out;
}

std::vector<CompareRow> compare_rows(const ExperimentResult& result) {
  std::vector<CompareRow> rows;
  for (const auto& run : result.runs) {
    for (const auto& rec : run.trace.rows) rows.push_back({run.algorithm, run.seed, rec});
  }
  return rows;
}

namespace {

nlohmann::ordered_json run_json(const SeedRun& run) {
  auto j = to_json(summarize(run.trace, run.seed));
  j["algorithm"] = run.algorithm;
  j["norm_sq"] = run.params.size() > 0 ? run.params.squared_norm() : 0.0;
  j["shard_hashes"] = run.shard_hashes;
  if (!run.stage_slacks.empty() || run.exhausted) {
    j["stage_slacks"] = run.stage_slacks;
    j["final_c"] = run.final_c ? nlohmann::ordered_json(*run.final_c) : nlohmann::ordered_json(nullptr);
    j["exhausted"] = run.exhausted;
  }
  return j;
}

double mean(const std::vector<long>& v) {
  double s = 0;
  for (long x : v) s += static_cast<double>(x);
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

nlohmann::ordered_json summary_json(const ExperimentSpec& spec, const ExperimentResult& result) {
  nlohmann::ordered_json j;
  const std::string primary = spec.mode == Mode::fedavg ? "fedavg" : "ssca";
  const auto prim = runs_of(result, primary);
  if (prim.empty()) throw std::invalid_argument("no runs to summarize");
  // Mean over seeds; "seed" is the first seed of the batch.
  j = to_json(summarize(mean_trace(prim), spec.seed));
  j["experiment"] = spec.name;
  j["mode"] = to_string(spec.mode);
  j["repeats"] = spec.repeats;
  if (spec.mode == Mode::compare) {
    const auto classes = static_cast<double>(prim.front()->params.w2.rows());
    const double level = 0.5 * std::log(classes);
    nlohmann::ordered_json cmp;
    cmp["cost_level"] = level;
    for (const char* algo : {"ssca", "fedavg"}) {
      const auto rounds = rounds_to_level(runs_of(result, algo), level);
      cmp[algo] = {{"rounds", rounds}, {"mean_rounds", mean(rounds)}};
    }
    j["rounds_to_level"] = cmp;
  }
  nlohmann::ordered_json runs = nlohmann::ordered_json::array();
  for (const auto& r : result.runs) runs.push_back(run_json(r));
  j["runs"] = runs;
  return j;
}

GridResult grid_search(const ExperimentSpec& spec, const ExecOptions& options) {
  ExperimentSpec s = spec;
  s.mode = Mode::fedavg;
  validate(s);
  kernels::set_num_threads(s.threads);
  if (s.grid.lr_a.empty() || s.grid.lr_alpha.empty()) throw std::invalid_argument("empty learning-rate grid");

  std::vector<Prepared> per_seed;
  for (int r = 0; r < s.repeats; ++r) per_seed.push_back(prepare(s, s.seed + static_cast<std::uint64_t>(r), options));

  GridResult out;
  out.best.score = std::numeric_limits<double>::infinity();
  for (double a : s.grid.lr_a) {
    for (double alpha : s.grid.lr_alpha) {
      double total = 0.0;
      for (int r = 0; r < s.repeats; ++r) {
        const std::uint64_t seed = s.seed + static_cast<std::uint64_t>(r);
        SgdConfig cfg = s.sgd_config(seed);
        cfg.lr_a = a;
        cfg.lr_alpha = alpha;
        std::vector<ClientShard> shards = per_seed[static_cast<std::size_t>(r)].shards;
        const RunResult res = run_fedavg(cfg, shards, per_seed[static_cast<std::size_t>(r)].test);
        double area = 0.0;
        for (const auto& row : res.trace.rows) area += row.train_cost;
        area /= static_cast<double>(res.trace.rows.size());
        total += std::isfinite(area) ? area : std::numeric_limits<double>::infinity();
      }
      GridPoint pt{a, alpha, total / static_cast<double>(s.repeats)};
      out.points.push_back(pt);
      if (pt.score < out.best.score) out.best = pt;
    }
  }
  if (!std::isfinite(out.best.score)) throw std::runtime_error("every grid point diverged");
  return out;
}

}  // namespace fedssca
