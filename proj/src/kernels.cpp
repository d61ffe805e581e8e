#include "fedssca/kernels.hpp"

#include "fedssca/model.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fedssca::kernels {

void set_num_threads(int threads) { omp_set_num_threads(std::max(1, threads)); }

int num_threads() { return omp_get_max_threads(); }

Workspace::Workspace(const Dims& dims)
    : z(dims.hidden), h(dims.hidden), dh(dims.hidden), logq(dims.classes) {}

namespace {

// Four interleaved partial sums; fixed order, so the result only depends on
// the inputs, never on threading.
double dot(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    s0 += a[k] * b[k];
    s1 += a[k + 1] * b[k + 1];
    s2 += a[k + 2] * b[k + 2];
    s3 += a[k + 3] * b[k + 3];
  }
  for (; k < n; ++k) s0 += a[k] * b[k];
  return (s0 + s1) + (s2 + s3);
}

}  // namespace

void forward_sample(const ModelParams& params, std::span<const double> x, Workspace& ws) {
  const auto J = static_cast<std::size_t>(params.w1.rows());
  const auto K = static_cast<std::size_t>(params.w1.cols());
  const auto L = static_cast<std::size_t>(params.w2.rows());
  const double* w1 = params.w1.data();
  const double* w2 = params.w2.data();

  for (std::size_t j = 0; j < J; ++j) {
    const double acc = dot(w1 + j * K, x.data(), K);
    ws.z[j] = acc;
    const double s = sigmoid(acc);
    ws.h[j] = acc * s;
    ws.dh[j] = s * (1.0 + acc * sigmoid(-acc));
  }

  double max_logit = -std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < L; ++l) {
    const double acc = dot(w2 + l * J, ws.h.data(), J);
    ws.logq[l] = acc;
    max_logit = std::max(max_logit, acc);
  }
  double denom = 0.0;
  for (std::size_t l = 0; l < L; ++l) denom += std::exp(ws.logq[l] - max_logit);
  const double log_norm = max_logit + std::log(denom);
  for (std::size_t l = 0; l < L; ++l) ws.logq[l] -= log_norm;
}

namespace {

void check_batch(const ModelParams& params, const Dataset& data, std::span<const std::size_t> batch) {
  if (batch.empty()) throw std::invalid_argument("batch must be non-empty");
  const Dims d = params.dims();
  if (d.inputs != data.num_features() || d.classes != data.num_classes()) {
    throw std::invalid_argument("model and dataset shapes disagree");
  }
  for (auto n : batch) {
    if (n >= data.size()) throw std::out_of_range("batch index outside dataset");
  }
}

BatchStats empty_stats(const Dims& d, std::size_t count) {
  BatchStats s;
  s.b_bar = Matrix::Zero(static_cast<Eigen::Index>(d.hidden), static_cast<Eigen::Index>(d.inputs));
  s.c_bar = Matrix::Zero(static_cast<Eigen::Index>(d.classes), static_cast<Eigen::Index>(d.hidden));
  s.count = count;
  return s;
}

int argmax(const std::vector<double>& v) {
  // std::max_element keeps the first maximum, i.e. the lowest class index.
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

namespace serial {

BatchStats batch_stats(const ModelParams& params, const Dataset& data,
                       std::span<const std::size_t> batch) {
  check_batch(params, data, batch);
  const Dims d = params.dims();
  const std::size_t J = d.hidden, K = d.inputs, L = d.classes;
  BatchStats out = empty_stats(d, batch.size());
  Workspace ws(d);
  std::vector<double> resid(L);
  const double* w2 = params.w2.data();
  double* b = out.b_bar.data();
  double* c = out.c_bar.data();

  for (const std::size_t n : batch) {
    const auto x = data.x(n);
    const auto y = static_cast<std::size_t>(data.label(n));
    forward_sample(params, x, ws);
    for (std::size_t l = 0; l < L; ++l) resid[l] = std::exp(ws.logq[l]) - (l == y ? 1.0 : 0.0);
    out.a_bar += -ws.logq[y];
    for (std::size_t l = 0; l < L; ++l) {
      for (std::size_t j = 0; j < J; ++j) c[l * J + j] += resid[l] * ws.h[j];
    }
    for (std::size_t j = 0; j < J; ++j) {
      double back = 0.0;
      for (std::size_t l = 0; l < L; ++l) back += resid[l] * w2[l * J + j];
      const double delta = ws.dh[j] * back;
      for (std::size_t k = 0; k < K; ++k) b[j * K + k] += delta * x[k];
    }
  }
  return out;
}

std::vector<double> sample_losses(const ModelParams& params, const Dataset& data) {
  Workspace ws(params.dims());
  std::vector<double> out(data.size());
  for (std::size_t n = 0; n < data.size(); ++n) {
    forward_sample(params, data.x(n), ws);
    out[n] = -ws.logq[static_cast<std::size_t>(data.label(n))];
  }
  return out;
}

std::vector<int> predictions(const ModelParams& params, const Dataset& data) {
  Workspace ws(params.dims());
  std::vector<int> out(data.size());
  for (std::size_t n = 0; n < data.size(); ++n) {
    forward_sample(params, data.x(n), ws);
    out[n] = argmax(ws.logq);
  }
  return out;
}

}  // namespace serial

namespace parallel {

BatchStats batch_stats(const ModelParams& params, const Dataset& data,
                       std::span<const std::size_t> batch) {
  check_batch(params, data, batch);
  const Dims d = params.dims();
  const std::size_t J = d.hidden, K = d.inputs, L = d.classes;
  const auto count = static_cast<std::ptrdiff_t>(batch.size());
  BatchStats out = empty_stats(d, batch.size());

  // Phase 1: per-sample forward/backward quantities.
  std::vector<double> resid(batch.size() * L), hidden(batch.size() * J), delta(batch.size() * J),
      loss(batch.size());
  const double* w2 = params.w2.data();
#pragma omp parallel
  {
    Workspace ws(d);
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      const std::size_t n = batch[static_cast<std::size_t>(i)];
      const auto y = static_cast<std::size_t>(data.label(n));
      forward_sample(params, data.x(n), ws);
      double* r = resid.data() + static_cast<std::size_t>(i) * L;
      for (std::size_t l = 0; l < L; ++l) r[l] = std::exp(ws.logq[l]) - (l == y ? 1.0 : 0.0);
      loss[static_cast<std::size_t>(i)] = -ws.logq[y];
      double* hrow = hidden.data() + static_cast<std::size_t>(i) * J;
      double* drow = delta.data() + static_cast<std::size_t>(i) * J;
      for (std::size_t j = 0; j < J; ++j) {
        hrow[j] = ws.h[j];
        double back = 0.0;
        for (std::size_t l = 0; l < L; ++l) back += r[l] * w2[l * J + j];
        drow[j] = ws.dh[j] * back;
      }
    }
  }

  // Phase 2: reductions, each output row owned by one thread and summed in
  // sample order.
  double* b = out.b_bar.data();
  double* c = out.c_bar.data();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t jj = 0; jj < static_cast<std::ptrdiff_t>(J); ++jj) {
    const auto j = static_cast<std::size_t>(jj);
    double* brow = b + j * K;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const double dj = delta[i * J + j];
      const auto x = data.x(batch[i]);
      for (std::size_t k = 0; k < K; ++k) brow[k] += dj * x[k];
    }
  }
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ll = 0; ll < static_cast<std::ptrdiff_t>(L); ++ll) {
    const auto l = static_cast<std::size_t>(ll);
    double* crow = c + l * J;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const double rl = resid[i * L + l];
      const double* hrow = hidden.data() + i * J;
      for (std::size_t j = 0; j < J; ++j) crow[j] += rl * hrow[j];
    }
  }
  for (double v : loss) out.a_bar += v;
  return out;
}

std::vector<double> sample_losses(const ModelParams& params, const Dataset& data) {
  const auto n_total = static_cast<std::ptrdiff_t>(data.size());
  std::vector<double> out(data.size());
#pragma omp parallel
  {
    Workspace ws(params.dims());
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < n_total; ++i) {
      const auto n = static_cast<std::size_t>(i);
      forward_sample(params, data.x(n), ws);
      out[n] = -ws.logq[static_cast<std::size_t>(data.label(n))];
    }
  }
  return out;
}

std::vector<int> predictions(const ModelParams& params, const Dataset& data) {
  const auto n_total = static_cast<std::ptrdiff_t>(data.size());
  std::vector<int> out(data.size());
#pragma omp parallel
  {
    Workspace ws(params.dims());
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < n_total; ++i) {
      const auto n = static_cast<std::size_t>(i);
      forward_sample(params, data.x(n), ws);
      out[n] = argmax(ws.logq);
    }
  }
  return out;
}

}  // namespace parallel
}  // namespace fedssca::kernels
