#pragma once

#include "fedssca/types.hpp"

#include <cstdint>

namespace fedssca {

/// Linearly separable stand-in for MNIST: features ~ N(0, I_K), labels the
/// argmax of a hidden linear map, and samples whose top two hidden logits
/// are closer than `margin` rejected and redrawn. The map starts as a
/// standard-normal L x K draw; when L <= K its rows are orthogonalized and
/// rescaled to length sqrt(K) so every class has probability 1/L.
struct SyntheticSpec {
  std::size_t N = 1000;
  std::size_t K = 20;
  std::size_t L = 4;
  double margin = 1.0;
  std::uint64_t seed = 1;
};

/// Deterministic per seed. Throws std::invalid_argument for N < L or a
/// negative margin, and std::runtime_error when fewer than 1 in 1000 draws
/// clear the margin.
Dataset gen_synthetic(const SyntheticSpec& spec);

struct TrainTestSplit {
  Dataset train;
  Dataset test;
};

/// Shuffled split with the first round(train_fraction * N) samples in train.
TrainTestSplit train_test_split(const Dataset& data, double train_fraction, std::uint64_t seed);

}  // namespace fedssca
