#pragma once

// Deliberately naive re-implementations used as test oracles. Nothing here
// shares code with the library beyond the plain data types: plain nested
// vectors, textbook formulas, no workspaces, no OpenMP.

#include "fedssca/types.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace ref {

using Vec = std::vector<double>;
using Mat = std::vector<std::vector<double>>;

inline Mat to_mat(const fedssca::Matrix& m) {
  Mat out(static_cast<std::size_t>(m.rows()), Vec(static_cast<std::size_t>(m.cols())));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  return out;
}

inline double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }
inline double swish(double z) { return z * logistic(z); }
inline double dswish(double z) { return logistic(z) + z * logistic(z) * (1.0 - logistic(z)); }

// Softmax probabilities, written out the long way.
inline Vec probs(const fedssca::ModelParams& p, std::span<const double> x) {
  const Mat w1 = to_mat(p.w1), w2 = to_mat(p.w2);
  Vec h(w1.size());
  for (std::size_t j = 0; j < w1.size(); ++j) {
    double z = 0;
    for (std::size_t k = 0; k < x.size(); ++k) z += w1[j][k] * x[k];
    h[j] = swish(z);
  }
  Vec logit(w2.size());
  double mx = -1e300;
  for (std::size_t l = 0; l < w2.size(); ++l) {
    for (std::size_t j = 0; j < h.size(); ++j) logit[l] += w2[l][j] * h[j];
    mx = std::max(mx, logit[l]);
  }
  double s = 0;
  for (double v : logit) s += std::exp(v - mx);
  Vec q(logit.size());
  for (std::size_t l = 0; l < q.size(); ++l) q[l] = std::exp(logit[l] - mx) / s;
  return q;
}

inline double cost(const fedssca::ModelParams& p, const fedssca::Dataset& d, std::span<const std::size_t> idx) {
  double total = 0;
  for (auto n : idx) total -= std::log(probs(p, d.x(n))[static_cast<std::size_t>(d.label(n))]);
  return total / static_cast<double>(idx.size());
}

inline double cost(const fedssca::ModelParams& p, const fedssca::Dataset& d) {
  std::vector<std::size_t> all(d.size());
  for (std::size_t n = 0; n < all.size(); ++n) all[n] = n;
  return cost(p, d, all);
}

// Summed gradient of the cross-entropy over idx, by the chain rule.
inline fedssca::ModelParams grad_sum(const fedssca::ModelParams& p, const fedssca::Dataset& d,
                                     std::span<const std::size_t> idx) {
  const auto J = static_cast<std::size_t>(p.w1.rows()), K = static_cast<std::size_t>(p.w1.cols()),
             L = static_cast<std::size_t>(p.w2.rows());
  fedssca::ModelParams g = fedssca::ModelParams::zeros(p.dims());
  for (auto n : idx) {
    const auto x = d.x(n);
    Vec z(J), h(J);
    for (std::size_t j = 0; j < J; ++j) {
      for (std::size_t k = 0; k < K; ++k) z[j] += p.w1(j, k) * x[k];
      h[j] = swish(z[j]);
    }
    const Vec q = probs(p, x);
    for (std::size_t l = 0; l < L; ++l) {
      const double e = q[l] - (static_cast<int>(l) == d.label(n) ? 1.0 : 0.0);
      for (std::size_t j = 0; j < J; ++j) {
        g.w2(l, j) += e * h[j];
        for (std::size_t k = 0; k < K; ++k) g.w1(j, k) += e * p.w2(l, j) * dswish(z[j]) * x[k];
      }
    }
  }
  return g;
}

inline fedssca::ModelParams random_params(const fedssca::Dims& d, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> n(0.0, scale);
  fedssca::ModelParams p(d);
  for (Eigen::Index i = 0; i < p.w1.size(); ++i) p.w1.data()[i] = n(rng);
  for (Eigen::Index i = 0; i < p.w2.size(); ++i) p.w2.data()[i] = n(rng);
  return p;
}

inline fedssca::Dataset random_dataset(std::size_t N, std::size_t K, std::size_t L, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_int_distribution<int> lab(0, static_cast<int>(L) - 1);
  fedssca::Dataset d(K, L);
  Vec x(K);
  for (std::size_t i = 0; i < N; ++i) {
    for (auto& v : x) v = n(rng);
    d.push_back(x, lab(rng));
  }
  return d;
}

}  // namespace ref
