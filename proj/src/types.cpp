#include "fedssca/types.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace fedssca {

ModelParams::ModelParams(const Dims& dims)
    : w1(Matrix::Zero(static_cast<Eigen::Index>(dims.hidden), static_cast<Eigen::Index>(dims.inputs))),
      w2(Matrix::Zero(static_cast<Eigen::Index>(dims.classes), static_cast<Eigen::Index>(dims.hidden))) {}

Dims ModelParams::dims() const {
  return {static_cast<std::size_t>(w1.cols()), static_cast<std::size_t>(w1.rows()),
          static_cast<std::size_t>(w2.rows())};
}

bool ModelParams::all_finite() const { return w1.allFinite() && w2.allFinite(); }

double ModelParams::squared_norm() const { return w1.squaredNorm() + w2.squaredNorm(); }

std::vector<double> ModelParams::flatten() const {
  std::vector<double> flat;
  flat.reserve(size());
  flat.insert(flat.end(), w1.data(), w1.data() + w1.size());
  flat.insert(flat.end(), w2.data(), w2.data() + w2.size());
  return flat;
}

ModelParams ModelParams::from_flat(const Dims& dims, std::span<const double> flat) {
  if (flat.size() != dims.param_count()) {
    throw std::invalid_argument("flat parameter vector has length " + std::to_string(flat.size()) +
                                ", expected " + std::to_string(dims.param_count()));
  }
  ModelParams p(dims);
  const auto n1 = static_cast<std::size_t>(p.w1.size());
  std::copy_n(flat.begin(), n1, p.w1.data());
  std::copy(flat.begin() + static_cast<std::ptrdiff_t>(n1), flat.end(), p.w2.data());
  return p;
}

double dot(const ModelParams& a, const ModelParams& b) {
  return a.w1.cwiseProduct(b.w1).sum() + a.w2.cwiseProduct(b.w2).sum();
}

ModelParams lerp(const ModelParams& from, const ModelParams& to, double weight) {
  ModelParams out;
  out.w1 = (1.0 - weight) * from.w1 + weight * to.w1;
  out.w2 = (1.0 - weight) * from.w2 + weight * to.w2;
  return out;
}

Dataset::Dataset(std::size_t num_features, std::size_t num_classes)
    : num_features_(num_features), num_classes_(num_classes), features_(0, static_cast<Eigen::Index>(num_features)) {}

Dataset::Dataset(Matrix features, std::vector<int> labels, std::size_t num_classes)
    : num_features_(static_cast<std::size_t>(features.cols())),
      num_classes_(num_classes),
      features_(std::move(features)),
      labels_(std::move(labels)) {
  if (static_cast<std::size_t>(features_.rows()) != labels_.size()) {
    throw std::invalid_argument("feature rows and label count differ");
  }
  for (int y : labels_) {
    if (y < 0 || static_cast<std::size_t>(y) >= num_classes_) {
      throw std::invalid_argument("label " + std::to_string(y) + " outside [0, " +
                                  std::to_string(num_classes_) + ")");
    }
  }
}

std::vector<double> Dataset::one_hot(std::size_t n) const {
  std::vector<double> y(num_classes_, 0.0);
  y[static_cast<std::size_t>(labels_[n])] = 1.0;
  return y;
}

void Dataset::push_back(std::span<const double> x, int label) {
  if (x.size() != num_features_) throw std::invalid_argument("feature length mismatch");
  if (label < 0 || static_cast<std::size_t>(label) >= num_classes_) {
    throw std::invalid_argument("label out of range");
  }
  const auto row = features_.rows();
  features_.conservativeResize(row + 1, Eigen::NoChange);
  std::copy(x.begin(), x.end(), features_.row(row).data());
  labels_.push_back(label);
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Matrix f(static_cast<Eigen::Index>(indices.size()), static_cast<Eigen::Index>(num_features_));
  std::vector<int> y;
  y.reserve(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto src = x(indices[i]);
    std::copy(src.begin(), src.end(), f.row(static_cast<Eigen::Index>(i)).data());
    y.push_back(labels_[indices[i]]);
  }
  return Dataset(std::move(f), std::move(y), num_classes_);
}

void Dataset::append(const Dataset& other) {
  if (other.num_features_ != num_features_ || other.num_classes_ != num_classes_) {
    throw std::invalid_argument("cannot append datasets with different shapes");
  }
  const auto old_rows = features_.rows();
  features_.conservativeResize(old_rows + other.features_.rows(), Eigen::NoChange);
  features_.bottomRows(other.features_.rows()) = other.features_;
  labels_.insert(labels_.end(), other.labels_.begin(), other.labels_.end());
}

}  // namespace fedssca
