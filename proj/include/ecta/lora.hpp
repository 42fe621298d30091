#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ecta/error.hpp"

namespace ecta::lora {

// 64-bit throughout: this module exists to verify the math, not to be fast.

struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // row-major

  static Matrix zeros(std::size_t r, std::size_t c) { return {r, c, std::vector<double>(r * c, 0.0)}; }

  double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  bool operator==(const Matrix&) const = default;
};

using Vector = std::vector<double>;

inline Vector matvec(const Matrix& m, const Vector& x) {
  if (x.size() != m.cols)
    throw Error(errc::dimension_mismatch,
                "matvec: " + std::to_string(m.rows) + "x" + std::to_string(m.cols) +
                    " against vector of length " + std::to_string(x.size()));
  Vector y(m.rows, 0.0);
  for (std::size_t i = 0; i < m.rows; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < m.cols; ++j) acc += m.at(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows) throw Error(errc::dimension_mismatch, "matmul: inner dimensions differ");
  Matrix out = Matrix::zeros(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t l = 0; l < a.cols; ++l) {
      const double v = a.at(i, l);
      if (v == 0.0) continue;
      for (std::size_t j = 0; j < b.cols; ++j) out.at(i, j) += v * b.at(l, j);
    }
  return out;
}

// Deterministic uniform in [lo, hi): avoids std::uniform_real_distribution,
// whose output is implementation-defined.
inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = (rng() >> 11) * (1.0 / 9007199254740992.0);  // [0, 1)
  return lo + u * (hi - lo);
}

inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng,
                            double lo = -1.0, double hi = 1.0) {
  Matrix m = Matrix::zeros(rows, cols);
  for (double& v : m.data) v = uniform(rng, lo, hi);
  return m;
}

// Frozen base weight W (d x k) with trainable low-rank factors A (r x k) and
// B (d x r); the effective map is W + BA.
struct LoraLayer {
  Matrix W;
  Matrix A;
  Matrix B;
  std::size_t rank = 0;

  std::size_t d() const { return W.rows; }
  std::size_t k() const { return W.cols; }

  // A ~ uniform(-1/sqrt(k), 1/sqrt(k)), B = 0: the initial delta is zero, so
  // an untrained layer behaves exactly like the plain linear map.
  static LoraLayer init(Matrix base, std::size_t rank, std::uint64_t seed) {
    check_rank(base.rows, base.cols, rank);
    std::mt19937_64 rng(seed);
    const double bound = 1.0 / std::sqrt(static_cast<double>(base.cols));
    LoraLayer layer;
    layer.A = random_matrix(rank, base.cols, rng, -bound, bound);
    layer.B = Matrix::zeros(base.rows, rank);
    layer.W = std::move(base);
    layer.rank = rank;
    return layer;
  }

  static void check_rank(std::size_t d, std::size_t k, std::size_t r) {
    if (r < 1 || r >= std::min(d, k))
      throw Error(errc::rank_too_large,
                  "rank " + std::to_string(r) + " must satisfy 1 <= r < min(" + std::to_string(d) +
                      ", " + std::to_string(k) + ")");
  }
};

/// y = Wx + B(Ax)
inline Vector lora_forward(const LoraLayer& layer, const Vector& x) {
  Vector y = matvec(layer.W, x);
  const Vector ax = matvec(layer.A, x);
  const Vector bax = matvec(layer.B, ax);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += bax[i];
  return y;
}

/// W + B*A, entrywise.
inline Matrix merge_weights(const LoraLayer& layer) {
  Matrix delta = matmul(layer.B, layer.A);
  Matrix merged = layer.W;
  for (std::size_t i = 0; i < merged.data.size(); ++i) merged.data[i] += delta.data[i];
  return merged;
}

struct Gradients {
  Matrix dA;  // r x k
  Matrix dB;  // d x r
};

// Analytic gradients of L = 1/2 * ||y - target||^2 with respect to A and B
// only; W is frozen. With e = y - target: dB = e (Ax)^T, dA = B^T e x^T.
inline Gradients lora_gradients(const LoraLayer& layer, const Vector& x, const Vector& target) {
  if (target.size() != layer.d())
    throw Error(errc::dimension_mismatch, "target length does not match output dimension");
  const Vector y = lora_forward(layer, x);
  Vector e(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) e[i] = y[i] - target[i];
  const Vector ax = matvec(layer.A, x);

  Gradients grad;
  grad.dB = Matrix::zeros(layer.d(), layer.rank);
  for (std::size_t i = 0; i < layer.d(); ++i)
    for (std::size_t j = 0; j < layer.rank; ++j) grad.dB.at(i, j) = e[i] * ax[j];

  Vector bte(layer.rank, 0.0);  // B^T e
  for (std::size_t j = 0; j < layer.rank; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < layer.d(); ++i) acc += layer.B.at(i, j) * e[i];
    bte[j] = acc;
  }
  grad.dA = Matrix::zeros(layer.rank, layer.k());
  for (std::size_t j = 0; j < layer.rank; ++j)
    for (std::size_t l = 0; l < layer.k(); ++l) grad.dA.at(j, l) = bte[j] * x[l];
  return grad;
}

inline double sample_loss(const LoraLayer& layer, const Vector& x, const Vector& target) {
  const Vector y = lora_forward(layer, x);
  double loss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double e = y[i] - target[i];
    loss += 0.5 * e * e;
  }
  return loss;
}

struct TrainSample {
  Vector x;
  Vector target;
};

// Plain SGD over A and B. Defaults follow the reference training setup
// (learning rate 1e-5, 10 epochs). Returns the mean loss per epoch, measured
// as each sample is visited.
inline std::vector<double> sgd_fit(LoraLayer& layer, const std::vector<TrainSample>& dataset,
                                   double learning_rate = 1e-5, int epochs = 10) {
  if (dataset.empty()) throw Error(errc::empty_input, "sgd_fit needs a non-empty dataset");
  std::vector<double> trace;
  trace.reserve(static_cast<std::size_t>(epochs));
  for (int epoch = 0; epoch < epochs; ++epoch) {
    double total = 0.0;
    for (const TrainSample& sample : dataset) {
      const double loss = sample_loss(layer, sample.x, sample.target);
      if (!std::isfinite(loss))
        throw Error(errc::non_finite_loss, "loss diverged at epoch " + std::to_string(epoch));
      total += loss;
      const Gradients grad = lora_gradients(layer, sample.x, sample.target);
      for (std::size_t i = 0; i < layer.A.data.size(); ++i)
        layer.A.data[i] -= learning_rate * grad.dA.data[i];
      for (std::size_t i = 0; i < layer.B.data.size(); ++i)
        layer.B.data[i] -= learning_rate * grad.dB.data[i];
    }
    trace.push_back(total / static_cast<double>(dataset.size()));
  }
  return trace;
}

struct ParamSavings {
  std::size_t trainable = 0;  // r * (d + k)
  std::size_t full = 0;       // d * k
  double ratio = 0.0;
};

inline ParamSavings param_savings(std::size_t d, std::size_t k, std::size_t r) {
  LoraLayer::check_rank(d, k, r);
  ParamSavings s;
  s.trainable = r * (d + k);
  s.full = d * k;
  s.ratio = static_cast<double>(s.trainable) / static_cast<double>(s.full);
  return s;
}

}  // namespace ecta::lora
