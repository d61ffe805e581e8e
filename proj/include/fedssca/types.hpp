#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace fedssca {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Layer widths of the three-layer classifier: K inputs, J hidden swish
/// units, L softmax outputs.
struct Dims {
  std::size_t inputs = 0;   // K
  std::size_t hidden = 0;   // J
  std::size_t classes = 0;  // L

  std::size_t param_count() const { return hidden * inputs + classes * hidden; }
  bool operator==(const Dims&) const = default;
};

/// Network weights. w1 is J x K (hidden layer), w2 is L x J (output layer).
///
/// The flat d-vector layout is w1 row-major (j outer, k inner) followed by
/// w2 row-major (l outer, j inner). Since both matrices are stored
/// row-major, that is simply the concatenation of their buffers.
struct ModelParams {
  Matrix w1;
  Matrix w2;

  ModelParams() = default;
  explicit ModelParams(const Dims& dims);

  static ModelParams zeros(const Dims& dims) { return ModelParams(dims); }

  Dims dims() const;
  std::size_t size() const { return static_cast<std::size_t>(w1.size() + w2.size()); }
  bool all_finite() const;
  double squared_norm() const;

  std::vector<double> flatten() const;
  static ModelParams from_flat(const Dims& dims, std::span<const double> flat);
};

double dot(const ModelParams& a, const ModelParams& b);

/// Returns (1 - weight) * from + weight * to, entry by entry.
ModelParams lerp(const ModelParams& from, const ModelParams& to, double weight);

/// Labeled samples stored contiguously. The one-hot label y_n is kept as
/// its class index; `one_hot` materializes it when needed.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::size_t num_features, std::size_t num_classes);
  Dataset(Matrix features, std::vector<int> labels, std::size_t num_classes);

  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  std::size_t num_features() const { return num_features_; }
  std::size_t num_classes() const { return num_classes_; }

  std::span<const double> x(std::size_t n) const {
    return {features_.data() + n * num_features_, num_features_};
  }
  int label(std::size_t n) const { return labels_[n]; }
  std::vector<double> one_hot(std::size_t n) const;

  const Matrix& features() const { return features_; }
  const std::vector<int>& labels() const { return labels_; }

  void push_back(std::span<const double> x, int label);
  Dataset subset(std::span<const std::size_t> indices) const;
  void append(const Dataset& other);

 private:
  std::size_t num_features_ = 0;
  std::size_t num_classes_ = 0;
  Matrix features_;
  std::vector<int> labels_;
};

}  // namespace fedssca
