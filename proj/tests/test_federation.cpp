#include "fedssca/federation.hpp"
#include "fedssca/kernels.hpp"
#include "fedssca/model.hpp"
#include "fedssca/solvers.hpp"
#include "fedssca/synthetic.hpp"
#include "reference.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

using namespace fedssca;

namespace {

RunConfig small_config() {
  RunConfig c;
  c.hidden = 4;
  c.T = 20;
  c.batch_size = 5;
  c.tau = 0.1;
  c.lambda = 1e-5;
  c.c = 1e5;
  c.U = 0.5;
  c.schedule = {0.6, 0.9, 0.3, 0.35};
  c.seed = 7;
  return c;
}

struct Problem {
  std::vector<ClientShard> shards;
  Dataset test;
};

Problem synthetic_problem(std::size_t N, std::size_t clients, std::uint64_t seed) {
  auto split = train_test_split(gen_synthetic({N, 6, 3, 0.5, seed}), 0.8, seed);
  return {partition(split.train, clients, PartitionPolicy::iid, seed), std::move(split.test)};
}

bool same_trace(const RoundTrace& a, const RoundTrace& b) {
  if (a.rows.size() != b.rows.size()) return false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const auto &x = a.rows[i], &y = b.rows[i];
    if (x.t != y.t || x.train_cost != y.train_cost || x.test_acc != y.test_acc || x.slack != y.slack ||
        x.uplink_scalars != y.uplink_scalars || x.downlink_scalars != y.downlink_scalars)
      return false;
  }
  return true;
}

bool same_params(const ModelParams& a, const ModelParams& b) { return a.flatten() == b.flatten(); }

}  // namespace

TEST_SUITE("federation") {
  TEST_CASE("iid partition is a disjoint even cover") {
    std::mt19937_64 rng(1);
    const auto data = ref::random_dataset(10, 3, 2, rng);
    const auto shards = partition(data, 2, PartitionPolicy::iid, 5);
    REQUIRE(shards.size() == 2);
    CHECK(shards[0].size() == 5);
    CHECK(shards[1].size() == 5);
    std::multiset<double> orig, got;
    for (std::size_t n = 0; n < data.size(); ++n) orig.insert(data.x(n)[0]);
    for (const auto& s : shards)
      for (std::size_t n = 0; n < s.size(); ++n) got.insert(s.samples.x(n)[0]);
    CHECK(orig == got);
    CHECK(std::set<double>(got.begin(), got.end()).size() == 10);

    const auto uneven = partition(data, 3, PartitionPolicy::iid, 5);
    CHECK(uneven[0].size() == 4);
    CHECK(uneven[1].size() == 3);
    CHECK(uneven[2].size() == 3);
  }

  TEST_CASE("label-sorted partition gives single-class shards") {
    Dataset d(1, 2);
    for (int i = 0; i < 10; ++i) d.push_back(std::vector<double>{double(i)}, i % 2);
    const auto shards = partition(d, 2, PartitionPolicy::label_sorted, 1);
    for (const auto& s : shards) {
      const auto& y = s.samples.labels();
      CHECK(std::all_of(y.begin(), y.end(), [&](int v) { return v == y.front(); }));
    }
    CHECK(shards[0].samples.label(0) != shards[1].samples.label(0));
  }

  TEST_CASE("partition is deterministic and validated") {
    std::mt19937_64 rng(2);
    const auto data = ref::random_dataset(30, 3, 2, rng);
    const auto a = partition(data, 4, PartitionPolicy::iid, 9);
    const auto b = partition(data, 4, PartitionPolicy::iid, 9);
    for (std::size_t i = 0; i < 4; ++i) CHECK(a[i].samples.features() == b[i].samples.features());
    CHECK_THROWS_AS(partition(data, 0, PartitionPolicy::iid, 9), std::invalid_argument);
    CHECK_THROWS_AS(partition(data, 31, PartitionPolicy::iid, 9), std::invalid_argument);
  }

  TEST_CASE("client batches") {
    std::mt19937_64 rng(3);
    const auto data = ref::random_dataset(100, 3, 2, rng);
    auto shards = partition(data, 1, PartitionPolicy::iid, 4);
    auto& s = shards[0];
    const auto b1 = draw_batch(s, 10);
    const auto b2 = draw_batch(s, 10);
    CHECK(b1.size() == 10);
    CHECK(std::set<std::size_t>(b1.begin(), b1.end()).size() == 10);
    CHECK(b1 != b2);
    CHECK(draw_batch(s, 100).size() == 100);
    CHECK_THROWS_AS(draw_batch(s, 101), std::invalid_argument);
    CHECK_THROWS_AS(draw_batch(s, 0), std::invalid_argument);

    // Full batch: same statistics regardless of the stream position.
    const auto p = ref::random_params({3, 2, 2}, rng, 0.5);
    const auto f1 = client_round(s, p, 100);
    const auto f2 = client_round(s, p, 100);
    CHECK(f1.b_bar == f2.b_bar);
  }

  TEST_CASE("message size") {
    const Dims d{7, 5, 3};
    BatchStats s;
    s.b_bar = Matrix::Zero(5, 7);
    s.c_bar = Matrix::Zero(3, 5);
    CHECK(uplink_scalars(s, Algorithm::ssca_constrained) == 35 + 15 + 1);
    CHECK(uplink_scalars(s, Algorithm::ssca_unconstrained) == 35 + 15);
  }

  TEST_CASE("traffic accounting") {
    const Dims d{784, 128, 10};
    const std::uint64_t dd = d.param_count();
    const auto a1 = round_traffic(Algorithm::ssca_unconstrained, 10, d);
    const auto a2 = round_traffic(Algorithm::ssca_constrained, 10, d);
    const auto fa = round_traffic(Algorithm::fedavg, 10, d);
    CHECK(a1.downlink == 10 * dd);
    CHECK(a2.uplink - a1.uplink == 10);
    CHECK(fa.uplink == a1.uplink);
    const std::vector<RoundTraffic> rounds{a1, a2, fa};
    const auto tot = comm_account(rounds);
    CHECK(tot.downlink == 30 * dd);
    CHECK(tot.uplink == 30 * dd + 10);
  }

  TEST_CASE("gamma forced to zero freezes the iterate") {
    auto prob = synthetic_problem(200, 4, 3);
    RunOptions opt;
    opt.gamma_override = [](long) { return 0.0; };
    const RunConfig cfg = small_config();
    const auto r = run_algorithm1(cfg, prob.shards, prob.test, opt);
    const auto init = initial_params({6, cfg.hidden, 3}, cfg.seed, cfg.init_scale);
    CHECK(same_params(r.params, init));
  }

  TEST_CASE("single client full batch matches a hand-rolled loop") {
    std::mt19937_64 rng(5);
    const auto data = ref::random_dataset(12, 3, 2, rng);
    auto shards = partition(data, 1, PartitionPolicy::iid, 1);
    RunConfig cfg = small_config();
    cfg.hidden = 2;
    cfg.batch_size = 12;
    cfg.lambda = 0.0;
    cfg.T = 25;
    const auto r = run_algorithm1(cfg, shards, data);

    const Dataset& local = shards[0].samples;
    std::vector<std::size_t> all(12);
    for (std::size_t i = 0; i < 12; ++i) all[i] = i;
    ModelParams w = initial_params({3, 2, 2}, cfg.seed, cfg.init_scale);
    ref::Mat B(2, ref::Vec(3, 0.0)), C(2, ref::Vec(2, 0.0));
    for (long t = 1; t <= cfg.T; ++t) {
      const double rho = std::min(1.0, 0.6 / std::pow(double(t), 0.3));
      const double gam = std::min(1.0, 0.9 / std::pow(double(t), 0.35));
      const auto g = ref::grad_sum(w, local, all);
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 3; ++k) B[j][k] = (1 - rho) * B[j][k] + rho * (g.w1(j, k) / 12 - 0.2 * w.w1(j, k));
      for (int l = 0; l < 2; ++l)
        for (int j = 0; j < 2; ++j) C[l][j] = (1 - rho) * C[l][j] + rho * (g.w2(l, j) / 12 - 0.2 * w.w2(l, j));
      ModelParams next = w;
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 3; ++k) next.w1(j, k) = (1 - gam) * w.w1(j, k) + gam * (-B[j][k] / 0.2);
      for (int l = 0; l < 2; ++l)
        for (int j = 0; j < 2; ++j) next.w2(l, j) = (1 - gam) * w.w2(l, j) + gam * (-C[l][j] / 0.2);
      w = next;
    }
    CHECK((r.params.w1 - w.w1).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((r.params.w2 - w.w2).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("iterates stay on the segment and traces are well formed") {
    auto prob = synthetic_problem(200, 4, 4);
    std::vector<std::pair<ModelParams, ModelParams>> seg;  // (omega_t, omega_bar)
    RunOptions opt;
    opt.observer = [&](const RoundObservation& o) { seg.push_back({o.omega_t, o.omega_bar}); };
    const auto r = run_algorithm1(small_config(), prob.shards, prob.test, opt);
    bool on_segment = true;
    for (std::size_t t = 0; t < seg.size(); ++t) {
      const auto next = (t + 1 < seg.size() ? seg[t + 1].first : r.params).flatten();
      const auto a = seg[t].first.flatten(), b = seg[t].second.flatten();
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (next[i] < std::min(a[i], b[i]) || next[i] > std::max(a[i], b[i])) on_segment = false;
      }
    }
    CHECK(on_segment);
    for (std::size_t i = 1; i < r.trace.rows.size(); ++i) {
      CHECK(r.trace.rows[i].t == r.trace.rows[i - 1].t + 1);
      CHECK(r.trace.rows[i].uplink_scalars >= r.trace.rows[i - 1].uplink_scalars);
    }
    CHECK(r.trace.rows.size() == 20);
    CHECK_FALSE(r.trace.rows.back().slack.has_value());
  }

  TEST_CASE("results do not depend on the thread count") {
    RunResult runs[2];
    int k = 0;
    for (int threads : {1, 4}) {
      kernels::set_num_threads(threads);
      auto prob = synthetic_problem(300, 5, 6);
      runs[k++] = run_algorithm2(small_config(), prob.shards, prob.test);
    }
    kernels::set_num_threads(1);
    CHECK(same_trace(runs[0].trace, runs[1].trace));
    CHECK(same_params(runs[0].params, runs[1].params));
  }

  TEST_CASE("infinite U keeps the approximate solution at zero") {
    auto prob = synthetic_problem(200, 4, 8);
    RunConfig cfg = small_config();
    cfg.U = std::numeric_limits<double>::infinity();
    bool zero = true;
    std::vector<double> gammas;
    RunOptions opt;
    opt.observer = [&](const RoundObservation& o) {
      zero = zero && o.omega_bar.squared_norm() == 0.0 && *o.slack == 0.0;
      gammas.push_back(o.gamma);
    };
    const auto r = run_algorithm2(cfg, prob.shards, prob.test, opt);
    CHECK(zero);
    ModelParams expect = initial_params({6, cfg.hidden, 3}, cfg.seed, cfg.init_scale);
    for (double g : gammas) expect = lerp(expect, ModelParams::zeros(expect.dims()), g);
    CHECK(same_params(r.params, expect));
  }

  TEST_CASE("constrained rounds satisfy the slack invariant") {
    auto prob = synthetic_problem(300, 5, 9);
    RunConfig cfg = small_config();
    cfg.T = 40;
    bool ok = true;
    RunOptions opt;
    opt.observer = [&](const RoundObservation& o) {
      ok = ok && *o.slack >= 0.0 &&
           constraint_value(o.state, o.omega_bar, cfg.tau) - *o.slack - cfg.U <= 1e-8;
    };
    const auto r = run_algorithm2(cfg, prob.shards, prob.test, opt);
    CHECK(ok);
    CHECK(r.final_slack.has_value());
    CHECK(r.trace.rows.back().slack == r.final_slack);
  }

  TEST_CASE("tight U: larger penalty drives the slack down") {
    auto base = synthetic_problem(400, 4, 10);
    RunConfig cfg = small_config();
    cfg.T = 150;
    cfg.U = 0.3;
    cfg.c = 0.5;
    auto p1 = base;
    const double weak = *run_algorithm2(cfg, p1.shards, p1.test).final_slack;
    cfg.c = 1e5;
    auto p2 = base;
    const double strong = *run_algorithm2(cfg, p2.shards, p2.test).final_slack;
    CHECK(weak > 0.0);
    CHECK(strong < 1e-3);
  }

  TEST_CASE("invalid configurations are rejected before round 1") {
    auto prob = synthetic_problem(100, 2, 11);
    RunConfig cfg = small_config();
    cfg.schedule.alpha_gamma = cfg.schedule.alpha;
    CHECK_THROWS_AS(run_algorithm1(cfg, prob.shards, prob.test), std::invalid_argument);
    cfg = small_config();
    cfg.tau = 0.0;
    CHECK_THROWS_AS(run_algorithm1(cfg, prob.shards, prob.test), std::invalid_argument);
    cfg = small_config();
    cfg.batch_size = 1000;
    CHECK_THROWS_AS(run_algorithm1(cfg, prob.shards, prob.test), std::invalid_argument);
  }

  TEST_CASE("penalty continuation") {
    auto prob = synthetic_problem(300, 3, 12);
    RunConfig cfg = small_config();
    cfg.T = 60;
    const std::vector<double> none;
    CHECK_THROWS_AS(penalty_continuation(cfg, none, 1e-3, prob.shards, prob.test), std::invalid_argument);
    const std::vector<double> down{10.0, 1.0};
    CHECK_THROWS_AS(penalty_continuation(cfg, down, 1e-3, prob.shards, prob.test), std::invalid_argument);

    const std::vector<double> seq{1e2, 1e3, 1e4, 1e5};
    cfg.U = 5.0;  // loose: the first stage is already feasible
    auto p1 = prob;
    const auto easy = penalty_continuation(cfg, seq, 1e-3, p1.shards, p1.test);
    CHECK(easy.stage_slacks.size() == 1);
    CHECK(easy.final_c == 1e2);

    cfg.U = -1.0;  // cross-entropy is never negative
    auto p2 = prob;
    try {
      penalty_continuation(cfg, seq, 1e-3, p2.shards, p2.test);
      FAIL("expected exhaustion");
    } catch (const ContinuationExhausted& e) {
      CHECK(e.stage_slacks().size() == 4);
      CHECK(e.last_slack() > 1.0);
      CHECK(std::string(e.what()).find("exhausted") != std::string::npos);
    }
  }
}
