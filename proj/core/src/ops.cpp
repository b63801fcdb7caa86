#include "discpar/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "discpar/error.hpp"

namespace discpar {

namespace {

std::string shape(std::size_t r, std::size_t c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

}  // namespace

void matvec_add(const Matrix& w, std::span<const double> x, std::span<double> y) noexcept {
  const std::size_t cols = w.cols();
  const double* row = w.values().data();
  for (std::size_t r = 0; r < w.rows(); ++r, row += cols) {
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
    y[r] += acc;
  }
}

void matvec_transpose_add(const Matrix& w, std::span<const double> dy,
                          std::span<double> dx) noexcept {
  const std::size_t cols = w.cols();
  const double* row = w.values().data();
  double* out = dx.data();
  for (std::size_t r = 0; r < w.rows(); ++r, row += cols) {
    const double g = dy[r];
    if (g == 0.0) continue;
    for (std::size_t c = 0; c < cols; ++c) out[c] += g * row[c];
  }
}

void outer_add(std::span<const double> dy, std::span<const double> x, Matrix& dw) noexcept {
  const std::size_t cols = dw.cols();
  double* row = dw.values().data();
  const double* in = x.data();
  for (std::size_t r = 0; r < dw.rows(); ++r, row += cols) {
    const double g = dy[r];
    if (g == 0.0) continue;
    for (std::size_t c = 0; c < cols; ++c) row[c] += g * in[c];
  }
}

Vector affine(const Matrix& w, std::span<const double> x, std::span<const double> b) {
  if (w.cols() != x.size() || w.rows() != b.size()) {
    throw DimensionError("affine: W is " + shape(w.rows(), w.cols()) + ", x is " +
                         shape(x.size(), 1) + ", b is " + shape(b.size(), 1));
  }
  Vector y(b.begin(), b.end());
  matvec_add(w, x, y);
  return y;
}

void affine_backward(const Matrix& w, std::span<const double> x, std::span<const double> dy,
                     Matrix* dw, std::span<double> dx, std::span<double> db) {
  if (w.cols() != x.size() || w.rows() != dy.size()) {
    throw DimensionError("affine_backward: W is " + shape(w.rows(), w.cols()) + ", x is " +
                         shape(x.size(), 1) + ", dy is " + shape(dy.size(), 1));
  }
  if (dw != nullptr) {
    if (!dw->same_shape(w)) throw DimensionError("affine_backward: dW shape differs from W");
    outer_add(dy, x, *dw);
  }
  if (!dx.empty()) {
    if (dx.size() != x.size()) throw DimensionError("affine_backward: dx size differs from x");
    matvec_transpose_add(w, dy, dx);
  }
  if (!db.empty()) {
    if (db.size() != dy.size()) throw DimensionError("affine_backward: db size differs from b");
    for (std::size_t i = 0; i < dy.size(); ++i) db[i] += dy[i];
  }
}

Vector softmax(std::span<const double> logits) {
  Vector out(logits.size());
  if (logits.empty()) return out;
  const double peak = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - peak);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

double logsumexp(std::span<const double> v) {
  if (v.empty()) throw DimensionError("logsumexp: empty input");
  const double peak = *std::max_element(v.begin(), v.end());
  if (peak == -std::numeric_limits<double>::infinity()) return peak;
  double total = 0.0;
  for (double x : v) total += std::exp(x - peak);
  return peak + std::log(total);
}

double sigmoid(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Vector dropout(std::span<const double> x, double p, Rng& rng, bool training, Vector* mask) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw ConfigError("dropout: probability must lie in [0, 1), got " + std::to_string(p));
  }
  Vector out(x.begin(), x.end());
  if (!training || p == 0.0) {
    if (mask != nullptr) mask->assign(x.size(), 1.0);
    return out;
  }
  const double keep_scale = 1.0 / (1.0 - p);
  if (mask != nullptr) mask->resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double m = rng.uniform() < p ? 0.0 : keep_scale;
    out[i] *= m;
    if (mask != nullptr) (*mask)[i] = m;
  }
  return out;
}

}  // namespace discpar
