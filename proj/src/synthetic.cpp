#include "fedssca/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace fedssca {

namespace {

std::mt19937_64 stream(std::uint64_t seed, std::uint32_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32), tag};
  return std::mt19937_64(seq);
}

}  // namespace

Dataset gen_synthetic(const SyntheticSpec& spec) {
  if (spec.K == 0 || spec.L < 2) throw std::invalid_argument("synthetic data needs K >= 1 and L >= 2");
  if (spec.N < spec.L) throw std::invalid_argument("synthetic data needs N >= L");
  if (!(spec.margin >= 0.0)) throw std::invalid_argument("margin must be non-negative");

  auto rng = stream(spec.seed, 0x73796e74);  // "synt"
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix hidden_map(static_cast<Eigen::Index>(spec.L), static_cast<Eigen::Index>(spec.K));
  for (Eigen::Index i = 0; i < hidden_map.size(); ++i) hidden_map.data()[i] = normal(rng);
  if (spec.L <= spec.K) {
    // Orthogonal rows of equal length sqrt(K): the argmax regions of
    // isotropic x then all have mass 1/L, so classes come out balanced.
    for (Eigen::Index l = 0; l < hidden_map.rows(); ++l) {
      for (Eigen::Index m = 0; m < l; ++m) {
        hidden_map.row(l) -= hidden_map.row(l).dot(hidden_map.row(m)) * hidden_map.row(m);
      }
      hidden_map.row(l).normalize();
    }
    hidden_map *= std::sqrt(static_cast<double>(spec.K));
  }

  const std::size_t max_draws = 1000 * spec.N;
  std::vector<double> features;
  features.reserve(spec.N * spec.K);
  std::vector<int> labels;
  labels.reserve(spec.N);
  std::vector<double> x(spec.K), logits(spec.L);
  std::size_t draws = 0;
  while (labels.size() < spec.N) {
    if (draws++ >= max_draws) {
      throw std::runtime_error("margin " + std::to_string(spec.margin) + " rejects over 99.9% of draws (" +
                               std::to_string(labels.size()) + " of " + std::to_string(spec.N) +
                               " samples after " + std::to_string(max_draws) + " draws)");
    }
    for (auto& v : x) v = normal(rng);
    for (std::size_t l = 0; l < spec.L; ++l) {
      double acc = 0.0;
      for (std::size_t k = 0; k < spec.K; ++k) acc += hidden_map(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k)) * x[k];
      logits[l] = acc;
    }
    const auto top = static_cast<std::size_t>(std::max_element(logits.begin(), logits.end()) - logits.begin());
    double runner_up = -INFINITY;
    for (std::size_t l = 0; l < spec.L; ++l) {
      if (l != top) runner_up = std::max(runner_up, logits[l]);
    }
    if (logits[top] - runner_up < spec.margin) continue;
    features.insert(features.end(), x.begin(), x.end());
    labels.push_back(static_cast<int>(top));
  }
  Matrix f = Eigen::Map<const Matrix>(features.data(), static_cast<Eigen::Index>(spec.N),
                                      static_cast<Eigen::Index>(spec.K));
  return Dataset(std::move(f), std::move(labels), spec.L);
}

TrainTestSplit train_test_split(const Dataset& data, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("train fraction must lie in (0, 1)");
  }
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto rng = stream(seed, 0x73706c74);  // "splt"
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(data.size())));
  if (n_train == 0 || n_train == data.size()) throw std::invalid_argument("split leaves one side empty");
  return {data.subset(std::span<const std::size_t>(order.data(), n_train)),
          data.subset(std::span<const std::size_t>(order.data() + n_train, data.size() - n_train))};
}

}  // namespace fedssca
