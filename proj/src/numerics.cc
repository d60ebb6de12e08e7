/*
 * Copyright 2026 The SMITE Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "smite/numerics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include <Eigen/Core>

#include "smite/errors.h"

namespace smite {
namespace {

using RowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstView = Eigen::Map<const RowMajor>;
using MutableView = Eigen::Map<RowMajor>;

ConstView View(const Matrix& m) {
  return ConstView(m.values().data(), static_cast<Eigen::Index>(m.rows()),
                   static_cast<Eigen::Index>(m.cols()));
}

MutableView View(Matrix& m) {
  return MutableView(m.values().data(), static_cast<Eigen::Index>(m.rows()),
                     static_cast<Eigen::Index>(m.cols()));
}

void CheckSameLength(std::span<const double> a, std::span<const double> b,
                     const char* op) {
  if (a.size() != b.size()) {
    throw ShapeError(std::string(op) + ": length mismatch " +
                     std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()));
  }
}

void CheckSameShape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + a.ShapeString() +
                     " vs " + b.ShapeString());
  }
}

template <typename F>
Vector Zip(std::span<const double> a, std::span<const double> b, const char* op,
           F f) {
  CheckSameLength(a, b, op);
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = f(a[i], b[i]);
  CheckFinite(out, op);
  return out;
}

template <typename F>
Vector MapValues(std::span<const double> a, const char* op, F f) {
  Vector out(a.size());
  std::transform(a.begin(), a.end(), out.begin(), f);
  CheckFinite(out, op);
  return out;
}

template <typename F>
Matrix ZipMatrix(const Matrix& a, const Matrix& b, const char* op, F f) {
  CheckSameShape(a, b, op);
  return Matrix(a.rows(), a.cols(), Zip(a.values(), b.values(), op, f));
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw ShapeError("Matrix: " + std::to_string(data_.size()) +
                     " values cannot fill a " + std::to_string(rows) + "x" +
                     std::to_string(cols) + " matrix");
  }
}

Matrix Matrix::FromRows(
    std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t n = rows.size();
  const std::size_t m = n == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(n * m);
  for (const auto& row : rows) {
    if (row.size() != m) throw ShapeError("Matrix::FromRows: ragged rows");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Matrix(n, m, std::move(data));
}

Matrix Matrix::SelectRows(std::span<const std::size_t> indices) const {
  Matrix out(indices.size(), cols_);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= rows_) {
      throw ShapeError("Matrix::SelectRows: row " + std::to_string(indices[i]) +
                       " out of range for " + ShapeString());
    }
    const auto src = Row(indices[i]);
    std::copy(src.begin(), src.end(), out.Row(i).begin());
  }
  return out;
}

std::string Matrix::ShapeString() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

void CheckFinite(std::span<const double> values, const std::string& what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw NumericError(what + ": non-finite value at index " +
                         std::to_string(i));
    }
  }
}

Matrix MatMul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("MatMul: cannot multiply " + a.ShapeString() + " by " +
                     b.ShapeString());
  }
  Matrix out(a.rows(), b.cols());
  if (!out.empty() && a.cols() > 0) View(out).noalias() = View(a) * View(b);
  CheckFinite(out.values(), "MatMul");
  return out;
}

Matrix MatMulTransposeA(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) {
    throw ShapeError("MatMulTransposeA: cannot multiply transpose of " +
                     a.ShapeString() + " by " + b.ShapeString());
  }
  Matrix out(a.cols(), b.cols());
  if (!out.empty() && a.rows() > 0) {
    View(out).noalias() = View(a).transpose() * View(b);
  }
  CheckFinite(out.values(), "MatMulTransposeA");
  return out;
}

Matrix MatMulTransposeB(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw ShapeError("MatMulTransposeB: cannot multiply " + a.ShapeString() +
                     " by transpose of " + b.ShapeString());
  }
  Matrix out(a.rows(), b.rows());
  if (!out.empty() && a.cols() > 0) {
    View(out).noalias() = View(a) * View(b).transpose();
  }
  CheckFinite(out.values(), "MatMulTransposeB");
  return out;
}

double Sigmoid(double x) {
  // Saturated tails are pulled back inside the open interval.
  static constexpr double kLow = std::numeric_limits<double>::min();
  static const double kHigh = std::nextafter(1.0, 0.0);
  double s;
  if (x >= 0) {
    s = 1.0 / (1.0 + std::exp(-x));
  } else {
    const double e = std::exp(x);
    s = e / (1.0 + e);
  }
  return std::clamp(s, kLow, kHigh);
}

double LeakyRelu(double x, double slope) { return x >= 0 ? x : slope * x; }

double LeakyReluDerivative(double x, double slope) {
  return x >= 0 ? 1.0 : slope;
}

Vector Add(std::span<const double> a, std::span<const double> b) {
  return Zip(a, b, "Add", std::plus<>());
}
Vector Sub(std::span<const double> a, std::span<const double> b) {
  return Zip(a, b, "Sub", std::minus<>());
}
Vector Mul(std::span<const double> a, std::span<const double> b) {
  return Zip(a, b, "Mul", std::multiplies<>());
}
Matrix Add(const Matrix& a, const Matrix& b) {
  return ZipMatrix(a, b, "Add", std::plus<>());
}
Matrix Sub(const Matrix& a, const Matrix& b) {
  return ZipMatrix(a, b, "Sub", std::minus<>());
}
Matrix Mul(const Matrix& a, const Matrix& b) {
  return ZipMatrix(a, b, "Mul", std::multiplies<>());
}

Vector Sigmoid(std::span<const double> a) {
  return MapValues(a, "Sigmoid", [](double x) { return Sigmoid(x); });
}

Vector LeakyRelu(std::span<const double> a, double slope) {
  return MapValues(a, "LeakyRelu",
                   [slope](double x) { return LeakyRelu(x, slope); });
}

Vector Log(std::span<const double> a) {
  return MapValues(a, "Log", [](double x) { return std::log(x); });
}

Vector Clamp(std::span<const double> a, double lo, double hi) {
  return MapValues(a, "Clamp",
                   [lo, hi](double x) { return std::clamp(x, lo, hi); });
}

Matrix Sigmoid(const Matrix& a) {
  return Matrix(a.rows(), a.cols(), Sigmoid(a.values()));
}

Matrix LeakyRelu(const Matrix& a, double slope) {
  return Matrix(a.rows(), a.cols(), LeakyRelu(a.values(), slope));
}

Vector FiniteDifferenceGradient(
    const std::function<double(std::span<const double>)>& loss,
    std::span<const double> theta, double h) {
  if (!(h > 0)) throw UsageError("FiniteDifferenceGradient: step must be > 0");
  Vector probe(theta.begin(), theta.end());
  Vector gradient(theta.size());
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const double original = probe[i];
    probe[i] = original + h;
    const double up = loss(probe);
    probe[i] = original - h;
    const double down = loss(probe);
    probe[i] = original;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw NumericError("FiniteDifferenceGradient: non-finite loss probing "
                         "coordinate " + std::to_string(i));
    }
    gradient[i] = (up - down) / (2.0 * h);
  }
  return gradient;
}

double Mean(std::span<const double> values) {
  // Running update keeps the mean of identical values exact.
  double mean = 0.0;
  std::size_t k = 0;
  for (double v : values) mean += (v - mean) / static_cast<double>(++k);
  return mean;
}

double SampleStdDev(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double mean = Mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

}  // namespace smite
