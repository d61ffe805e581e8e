#include "fedssca/cli.hpp"

#include "fedssca/experiment.hpp"
#include "fedssca/schedules.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace fedssca {

namespace {

struct Common {
  std::string preset;
  std::string config;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<int> repeats;
  std::optional<long> T;
  std::string mode;
  std::vector<std::string> overrides;
  bool timing = false;
  std::string data_dir;
};

void add_common(CLI::App* cmd, Common& c, bool with_out = true) {
  auto* p = cmd->add_option("--preset", c.preset, "Built-in preset name");
  cmd->add_option("--config", c.config, "JSON experiment file")->excludes(p);
  if (with_out) cmd->add_option("--out", c.out_dir, "Output directory")->capture_default_str();
  cmd->add_option("--seed", c.seed, "Base seed");
  cmd->add_option("--threads", c.threads, "OpenMP threads (results do not depend on it)");
  cmd->add_option("--repeats", c.repeats, "Seeds to run: seed, seed+1, ...");
  cmd->add_option("--T", c.T, "Rounds, for both SSCA and FedAvg");
  cmd->add_option("--mode", c.mode, "Override the config's mode");
  cmd->add_option("--set", c.overrides, "JSON-pointer override, e.g. /ssca/tau=0.2");
  cmd->add_flag("--timing", c.timing, "Record wall_ms (makes CSVs run-dependent)");
  cmd->add_option("--data-dir", c.data_dir, "Base directory for IDX files");
}

ExperimentSpec build_spec(const Common& c) {
  ExperimentSpec spec;
  if (!c.config.empty()) spec = load_experiment(c.config);
  else if (!c.preset.empty()) spec = preset(c.preset);
  else spec = preset("synthetic-small");
  for (const auto& o : c.overrides) spec = apply_override(spec, o);
  if (c.seed) spec.seed = *c.seed;
  if (c.threads) spec.threads = *c.threads;
  if (c.repeats) spec.repeats = *c.repeats;
  if (c.T) spec.ssca.T = spec.fedavg.T = *c.T;
  if (!c.mode.empty()) spec.mode = parse_mode(c.mode);
  return spec;
}

ExecOptions exec_options(const Common& c) {
  ExecOptions o;
  if (!c.data_dir.empty()) o.data_dir = c.data_dir;
  o.record_time = c.timing;
  return o;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

int do_train(const Common& c, bool force_compare, std::ostream& out) {
  ExperimentSpec spec = build_spec(c);
  if (force_compare) spec.mode = Mode::compare;
  for (const auto& w : warnings(spec.ssca.schedule)) out << "warning: " << w << "\n";
  const ExperimentResult res = run_experiment(spec, exec_options(c));

  const std::filesystem::path dir(c.out_dir);
  std::filesystem::create_directories(dir);
  if (spec.mode == Mode::compare) {
    std::ostringstream os;
    write_compare_csv(os, compare_rows(res));
    write_file(dir / "compare.csv", os.str());
  } else {
    const std::string algo = spec.mode == Mode::fedavg ? "fedavg" : "ssca";
    const auto runs = runs_of(res, algo);
    write_file(dir / "trace.csv", trace_to_csv(runs.size() == 1 ? runs.front()->trace : mean_trace(runs)));
    if (runs.size() > 1) {
      for (const auto* r : runs) {
        write_file(dir / ("trace_seed" + std::to_string(r->seed) + ".csv"), trace_to_csv(r->trace));
      }
    }
  }
  const auto summary = summary_json(spec, res);
  write_file(dir / "summary.json", dump(summary));
  out << "final_cost " << format_double(summary["final_cost"].get<double>()) << "  final_acc "
      << format_double(summary["final_acc"].get<double>()) << "  -> " << dir.string() << "\n";

  for (const auto& r : res.runs) {
    if (r.exhausted) {
      out << "penalty sequence exhausted for seed " << r.seed << "; last slack "
          << format_double(r.stage_slacks.back()) << "\n";
      return 3;
    }
  }
  return 0;
}

int do_grid(const Common& c, std::ostream& out) {
  ExperimentSpec spec = build_spec(c);
  const GridResult g = grid_search(spec, exec_options(c));
  const std::filesystem::path dir(c.out_dir);
  std::filesystem::create_directories(dir);
  std::ostringstream csv;
  csv << "lr_a,lr_alpha,score\n";
  for (const auto& p : g.points) {
    csv << format_double(p.lr_a) << ',' << format_double(p.lr_alpha) << ',' << format_double(p.score) << '\n';
  }
  write_file(dir / "grid.csv", csv.str());
  ExperimentSpec best = spec;
  best.fedavg.lr_a = g.best.lr_a;
  best.fedavg.lr_alpha = g.best.lr_alpha;
  write_file(dir / "best_config.json", dump(to_json(best)));
  out << "best lr_a " << format_double(g.best.lr_a) << "  lr_alpha " << format_double(g.best.lr_alpha)
      << "  score " << format_double(g.best.score) << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Federated mini-batch SSCA and FedAvg simulator", "fedssca"};
  app.require_subcommand(1);

  Common train_opts, compare_opts, grid_opts, dump_opts;
  auto* train = app.add_subcommand("train", "Run the configured mode");
  add_common(train, train_opts);
  auto* compare = app.add_subcommand("compare", "SSCA and FedAvg on the same shards, joined CSV");
  add_common(compare, compare_opts);
  auto* grid = app.add_subcommand("grid", "FedAvg learning-rate grid search");
  add_common(grid, grid_opts);
  auto* dumpc = app.add_subcommand("dump-config", "Print the resolved experiment as JSON");
  add_common(dumpc, dump_opts, false);
  auto* list = app.add_subcommand("presets", "List built-in presets");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*train) return do_train(train_opts, false, out);
    if (*compare) return do_train(compare_opts, true, out);
    if (*grid) return do_grid(grid_opts, out);
    if (*dumpc) {
      const ExperimentSpec spec = build_spec(dump_opts);
      validate(spec);
      out << dump(to_json(spec));
      return 0;
    }
    if (*list) {
      for (const auto& n : preset_names()) out << n << "\n";
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace fedssca
