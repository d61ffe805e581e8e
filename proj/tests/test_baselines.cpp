#include "fedssca/baselines.hpp"
#include "fedssca/model.hpp"
#include "fedssca/synthetic.hpp"
#include "reference.hpp"

#include <doctest.h>

#include <cmath>

using namespace fedssca;

namespace {

SgdConfig sgd(std::size_t hidden, std::size_t B, int E) {
  SgdConfig c;
  c.hidden = hidden;
  c.batch_size = B;
  c.E = E;
  c.lr_a = 0.5;
  c.lr_alpha = 0.3;
  c.lambda = 1e-3;
  c.T = 10;
  c.seed = 3;
  return c;
}

double max_diff(const ModelParams& a, const ModelParams& b) {
  return std::max((a.w1 - b.w1).cwiseAbs().maxCoeff(), (a.w2 - b.w2).cwiseAbs().maxCoeff());
}

}  // namespace

TEST_SUITE("baselines") {
  TEST_CASE("learning rate") {
    SgdConfig c;
    c.lr_a = 2.0;
    c.lr_alpha = 0.5;
    CHECK(learning_rate(c, 1) == 2.0);
    CHECK(learning_rate(c, 4) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS(learning_rate(c, 0));
  }

  TEST_CASE("full-batch single step is gradient descent") {
    std::mt19937_64 rng(1);
    const auto data = ref::random_dataset(15, 4, 3, rng);
    auto shards = partition(data, 1, PartitionPolicy::iid, 1);
    const auto w = ref::random_params({4, 3, 3}, rng, 0.5);
    const SgdConfig cfg = sgd(3, 15, 1);
    const auto out = local_sgd_round(shards[0], w, cfg, 4);
    std::vector<std::size_t> all(15);
    for (std::size_t i = 0; i < 15; ++i) all[i] = i;
    const auto g = ref::grad_sum(w, shards[0].samples, all);
    const double r = learning_rate(cfg, 4);
    ModelParams expect = w;
    expect.w1 = w.w1 - r * (g.w1 / 15.0 + 2 * cfg.lambda * w.w1);
    expect.w2 = w.w2 - r * (g.w2 / 15.0 + 2 * cfg.lambda * w.w2);
    CHECK(max_diff(out, expect) < 1e-12);
  }

  TEST_CASE("zero learning rate returns the broadcast model") {
    std::mt19937_64 rng(2);
    const auto data = ref::random_dataset(20, 4, 3, rng);
    auto shards = partition(data, 1, PartitionPolicy::iid, 1);
    const auto w = ref::random_params({4, 3, 3}, rng, 0.5);
    SgdConfig cfg = sgd(3, 5, 3);
    cfg.lr_a = 0.0;
    CHECK(local_sgd_round(shards[0], w, cfg, 2).flatten() == w.flatten());
  }

  TEST_CASE("two local steps compose two single steps") {
    std::mt19937_64 rng(3);
    const auto data = ref::random_dataset(30, 4, 3, rng);
    auto a = partition(data, 1, PartitionPolicy::iid, 8);
    auto b = a;
    const auto w = ref::random_params({4, 3, 3}, rng, 0.5);
    const auto two = local_sgd_round(a[0], w, sgd(3, 5, 2), 3);
    const auto one = local_sgd_round(b[0], local_sgd_round(b[0], w, sgd(3, 5, 1), 3), sgd(3, 5, 1), 3);
    CHECK(two.flatten() == one.flatten());
  }

  TEST_CASE("weighted average") {
    std::mt19937_64 rng(4);
    const auto w = ref::random_params({5, 4, 3}, rng, 1.0);
    const std::vector<ModelParams> same{w, w, w};
    const std::vector<std::size_t> sizes{3, 11, 7};
    CHECK(weighted_average(same, sizes).flatten() == w.flatten());

    const auto v = ref::random_params({5, 4, 3}, rng, 1.0);
    const std::vector<ModelParams> two{w, v};
    const std::vector<std::size_t> s2{1, 3};
    const auto avg = weighted_average(two, s2);
    CHECK((avg.w1 - (0.25 * w.w1 + 0.75 * v.w1)).cwiseAbs().maxCoeff() < 1e-15);
    const std::vector<std::size_t> bad{1};
    CHECK_THROWS_AS(weighted_average(two, bad), std::invalid_argument);
  }

  TEST_CASE("identical shards match a centralized step") {
    std::mt19937_64 rng(5);
    const auto data = ref::random_dataset(10, 4, 3, rng);
    auto one = partition(data, 1, PartitionPolicy::iid, 1);
    std::vector<ClientShard> twins{one[0], one[0]};
    twins[1].client_id = 1;
    SgdConfig cfg = sgd(3, 10, 1);
    cfg.T = 1;
    const auto fed = run_fedavg(cfg, twins, data);
    const auto w0 = initial_params({4, 3, 3}, cfg.seed, cfg.init_scale);
    std::vector<std::size_t> all(10);
    for (std::size_t i = 0; i < 10; ++i) all[i] = i;
    const auto g = ref::grad_sum(w0, one[0].samples, all);
    ModelParams expect = w0;
    expect.w1 = w0.w1 - cfg.lr_a * (g.w1 / 10.0 + 2 * cfg.lambda * w0.w1);
    expect.w2 = w0.w2 - cfg.lr_a * (g.w2 / 10.0 + 2 * cfg.lambda * w0.w2);
    CHECK(max_diff(fed.params, expect) < 1e-12);
  }

  TEST_CASE("one client is plain mini-batch SGD") {
    std::mt19937_64 rng(6);
    const auto data = ref::random_dataset(40, 4, 3, rng);
    auto shards = partition(data, 1, PartitionPolicy::iid, 2);
    auto replay = shards;
    const SgdConfig cfg = sgd(3, 8, 2);
    const auto fed = run_fedavg(cfg, shards, data);
    ModelParams w = initial_params({4, 3, 3}, cfg.seed, cfg.init_scale);
    for (long t = 1; t <= cfg.T; ++t) w = local_sgd_round(replay[0], w, cfg, t);
    CHECK(fed.params.flatten() == w.flatten());
    CHECK(fed.trace.rows.size() == static_cast<std::size_t>(cfg.T));
    CHECK_FALSE(fed.trace.rows.back().slack.has_value());
  }

  TEST_CASE("cost decreases on synthetic data") {
    auto split = train_test_split(gen_synthetic({500, 10, 4, 1.0, 3}), 0.8, 3);
    auto shards = partition(split.train, 5, PartitionPolicy::iid, 3);
    SgdConfig cfg = sgd(8, 5, 2);
    cfg.T = 200;
    cfg.lr_a = 1.0;
    cfg.lr_alpha = 0.3;
    const auto r = run_fedavg(cfg, shards, split.test);
    CHECK(r.trace.rows.back().train_cost < 0.5 * r.trace.rows.front().train_cost);
    CHECK(r.trace.rows.back().uplink_scalars == 200u * 5u * (8u * 10u + 4u * 8u));
  }
}
