#include "fedssca/federation.hpp"

#include "fedssca/model.hpp"
#include "fedssca/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

namespace fedssca {

std::string to_string(PartitionPolicy p) { return p == PartitionPolicy::iid ? "iid" : "label_sorted"; }

PartitionPolicy parse_partition_policy(const std::string& name) {
  if (name == "iid") return PartitionPolicy::iid;
  if (name == "label_sorted") return PartitionPolicy::label_sorted;
  throw std::invalid_argument("unknown partition policy '" + name + "'");
}

namespace {

std::seed_seq seeds(std::uint64_t seed, std::uint32_t tag, std::uint32_t extra = 0) {
  return std::seed_seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                       tag, extra};
}

constexpr std::uint32_t kClientTag = 0x636c6e74;     // "clnt"
constexpr std::uint32_t kPartitionTag = 0x70617274;  // "part"
constexpr std::uint32_t kInitTag = 0x696e6974;       // "init"

}  // namespace

std::mt19937_64 client_stream(std::uint64_t master_seed, int client_id) {
  auto seq = seeds(master_seed, kClientTag, static_cast<std::uint32_t>(client_id));
  return std::mt19937_64(seq);
}

std::vector<ClientShard> partition(const Dataset& dataset, std::size_t clients, PartitionPolicy policy,
                                   std::uint64_t seed) {
  if (clients == 0 || clients > dataset.size()) {
    throw std::invalid_argument("cannot split " + std::to_string(dataset.size()) + " samples into " +
                                std::to_string(clients) + " clients");
  }
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (policy == PartitionPolicy::iid) {
    auto seq = seeds(seed, kPartitionTag);
    std::mt19937_64 rng(seq);
    std::shuffle(order.begin(), order.end(), rng);
  } else {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return dataset.label(a) < dataset.label(b); });
  }

  std::vector<ClientShard> shards;
  shards.reserve(clients);
  const std::size_t base = dataset.size() / clients, extra = dataset.size() % clients;
  std::size_t begin = 0;
  for (std::size_t i = 0; i < clients; ++i) {
    const std::size_t len = base + (i < extra ? 1 : 0);
    std::span<const std::size_t> idx(order.data() + begin, len);
    shards.push_back({static_cast<int>(i), dataset.subset(idx), client_stream(seed, static_cast<int>(i))});
    begin += len;
  }
  return shards;
}

std::vector<std::size_t> draw_batch(ClientShard& shard, std::size_t batch_size) {
  if (batch_size == 0 || batch_size > shard.size()) {
    throw std::invalid_argument("batch size " + std::to_string(batch_size) + " invalid for client " +
                                std::to_string(shard.client_id) + " holding " + std::to_string(shard.size()) +
                                " samples");
  }
  std::vector<std::size_t> all(shard.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  if (batch_size == shard.size()) return all;
  std::vector<std::size_t> picked;
  picked.reserve(batch_size);
  std::sample(all.begin(), all.end(), std::back_inserter(picked), batch_size, shard.rng);
  return picked;
}

BatchStats client_round(ClientShard& shard, const ModelParams& omega_t, std::size_t batch_size) {
  const auto batch = draw_batch(shard, batch_size);
  return batch_stats(omega_t, shard.samples, batch);
}

ModelParams initial_params(const Dims& dims, std::uint64_t seed, double scale) {
  auto seq = seeds(seed, kInitTag);
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> dist(-scale, scale);
  ModelParams p(dims);
  for (Eigen::Index i = 0; i < p.w1.size(); ++i) p.w1.data()[i] = dist(rng);
  for (Eigen::Index i = 0; i < p.w2.size(); ++i) p.w2.data()[i] = dist(rng);
  return p;
}

void validate(const RunConfig& config) {
  if (config.hidden < 1) throw std::invalid_argument("hidden width must be at least 1");
  if (config.T < 1) throw std::invalid_argument("T must be at least 1");
  if (config.batch_size < 1) throw std::invalid_argument("batch size must be at least 1");
  if (!(config.tau > 0.0)) throw std::invalid_argument("tau must be positive");
  if (!(config.lambda >= 0.0)) throw std::invalid_argument("lambda must be non-negative");
  if (!(config.c > 0.0)) throw std::invalid_argument("penalty c must be positive");
  if (!(config.init_scale >= 0.0)) throw std::invalid_argument("init_scale must be non-negative");
  const auto violations = validate(config.schedule);
  if (!violations.empty()) {
    std::string msg = "invalid step schedule:";
    for (const auto& v : violations) msg += " [" + v + "]";
    throw std::invalid_argument(msg);
  }
}

Dataset union_of(std::span<const ClientShard> shards) {
  if (shards.empty()) return {};
  Dataset all(shards.front().samples.num_features(), shards.front().samples.num_classes());
  for (const auto& s : shards) all.append(s.samples);
  return all;
}

namespace {

using Clock = std::chrono::steady_clock;

std::vector<BatchStats> collect(std::span<ClientShard> shards, const ModelParams& omega, std::size_t batch_size) {
  for (const auto& s : shards) {
    if (batch_size > s.size()) {
      throw std::invalid_argument("batch size " + std::to_string(batch_size) + " exceeds client " +
                                  std::to_string(s.client_id) + " size " + std::to_string(s.size()));
    }
  }
  std::vector<BatchStats> msgs(shards.size());
  const auto n = static_cast<std::ptrdiff_t>(shards.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    msgs[static_cast<std::size_t>(i)] = client_round(shards[static_cast<std::size_t>(i)], omega, batch_size);
  }
  return msgs;
}

RunResult run_ssca(const RunConfig& config, std::span<ClientShard> shards, const Dataset& test_set,
                   const RunOptions& options, bool constrained) {
  validate(config);
  if (shards.empty()) throw std::invalid_argument("no clients");
  if (test_set.empty()) throw std::invalid_argument("empty test set");
  const Dataset train = union_of(shards);
  const Dims dims{train.num_features(), config.hidden, train.num_classes()};
  ModelParams omega = options.initial ? *options.initial : initial_params(dims, config.seed, config.init_scale);
  if (omega.dims() != dims) throw std::invalid_argument("initial parameters do not match the model dimensions");
  const Algorithm algo = constrained ? Algorithm::ssca_constrained : Algorithm::ssca_unconstrained;
  const RoundTraffic per_round = round_traffic(algo, shards.size(), dims);

  SurrogateState state = SurrogateState::zeros(dims);
  RunResult result;
  RoundTraffic total;
  const auto start = Clock::now();

  for (long t = 1; t <= config.T; ++t) {
    const auto msgs = collect(shards, omega, config.batch_size);
    std::vector<ClientStats> weighted;
    weighted.reserve(msgs.size());
    for (std::size_t i = 0; i < msgs.size(); ++i) weighted.push_back({msgs[i], shards[i].size()});
    const AggregatedStats agg = aggregate(weighted, train.size(), config.batch_size);

    const double rho_t = rho(config.schedule, t);
    std::optional<double> slack, nu;
    ModelParams omega_bar;
    if (constrained) {
      state = update_constrained(state, rho_t, omega, agg, config.tau);
      auto sol = solve_constrained(state, config.tau, config.c, config.U);
      omega_bar = std::move(sol.omega_bar);
      slack = sol.slack;
      nu = sol.nu;
    } else {
      state = update_unconstrained(state, rho_t, omega, agg, config.tau);
      omega_bar = solve_unconstrained(state, config.lambda, config.tau);
    }
    const double gamma_t = options.gamma_override ? options.gamma_override(t) : gamma(config.schedule, t);
    if (options.observer) options.observer({t, rho_t, gamma_t, omega, agg, state, omega_bar, slack, nu});

    omega = lerp(omega, omega_bar, gamma_t);
    total.uplink += per_round.uplink;
    total.downlink += per_round.downlink;

    RoundRecord row;
    row.t = t;
    row.train_cost = cost(omega, train);
    row.test_acc = accuracy(omega, test_set);
    row.slack = slack;
    row.uplink_scalars = total.uplink;
    row.downlink_scalars = total.downlink;
    if (options.record_time) {
      row.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    }
    result.trace.rows.push_back(row);
    result.final_slack = slack;
  }
  result.params = std::move(omega);
  return result;
}

}  // namespace

RunResult run_algorithm1(const RunConfig& config, std::span<ClientShard> shards, const Dataset& test_set,
                         const RunOptions& options) {
  return run_ssca(config, shards, test_set, options, false);
}

RunResult run_algorithm2(const RunConfig& config, std::span<ClientShard> shards, const Dataset& test_set,
                         const RunOptions& options) {
  return run_ssca(config, shards, test_set, options, true);
}

ContinuationExhausted::ContinuationExhausted(std::vector<double> stage_slacks, std::vector<RoundTrace> traces)
    : std::runtime_error("penalty sequence exhausted; last slack " +
                         std::to_string(stage_slacks.empty() ? 0.0 : stage_slacks.back())),
      stage_slacks_(std::move(stage_slacks)),
      traces_(std::move(traces)) {}

ContinuationResult penalty_continuation(const RunConfig& base, std::span<const double> c_sequence,
                                        double slack_tol, std::span<ClientShard> shards,
                                        const Dataset& test_set, const RunOptions& options) {
  if (c_sequence.empty()) throw std::invalid_argument("empty penalty sequence");
  if (!(slack_tol > 0.0)) throw std::invalid_argument("slack tolerance must be positive");
  for (std::size_t j = 0; j < c_sequence.size(); ++j) {
    if (!(c_sequence[j] > 0.0)) throw std::invalid_argument("penalties must be positive");
    if (j > 0 && !(c_sequence[j] > c_sequence[j - 1])) {
      throw std::invalid_argument("penalty sequence must be strictly increasing");
    }
  }

  ContinuationResult out;
  RunOptions stage_opts = options;
  for (const double c : c_sequence) {
    RunConfig cfg = base;
    cfg.c = c;
    RunResult r = run_algorithm2(cfg, shards, test_set, stage_opts);
    const double slack = r.final_slack.value_or(0.0);
    out.stage_slacks.push_back(slack);
    out.traces.push_back(std::move(r.trace));
    if (slack <= slack_tol) {
      out.params = std::move(r.params);
      out.final_c = c;
      return out;
    }
    stage_opts.initial = std::move(r.params);
  }
  throw ContinuationExhausted(std::move(out.stage_slacks), std::move(out.traces));
}

RoundTraffic round_traffic(Algorithm algorithm, std::size_t clients, const Dims& dims) {
  const std::uint64_t d = dims.param_count();
  const std::uint64_t I = clients;
  RoundTraffic r;
  r.downlink = I * d;
  switch (algorithm) {
    case Algorithm::ssca_unconstrained: r.uplink = I * d; break;
    case Algorithm::ssca_constrained: r.uplink = I * (d + 1); break;
    case Algorithm::fedavg: r.uplink = I * d; break;
  }
  return r;
}

std::uint64_t uplink_scalars(const BatchStats& stats, Algorithm algorithm) {
  const auto matrices = static_cast<std::uint64_t>(stats.b_bar.size() + stats.c_bar.size());
  return algorithm == Algorithm::ssca_constrained ? matrices + 1 : matrices;
}

RoundTraffic comm_account(std::span<const RoundTraffic> rounds) {
  RoundTraffic total;
  for (const auto& r : rounds) {
    total.uplink += r.uplink;
    total.downlink += r.downlink;
  }
  return total;
}

}  // namespace fedssca
