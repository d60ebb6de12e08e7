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

// Dense real arithmetic used by the twin network, the losses and the
// logistic baselines. Everything is 64-bit; public operations reject NaN/Inf
// results with a NumericError.

#ifndef SMITE_NUMERICS_H_
#define SMITE_NUMERICS_H_

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace smite {

using Vector = std::vector<double>;

// Row-major dense matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  // Throws ShapeError unless data.size() == rows * cols.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix FromRows(
      std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<double> Row(std::size_t r) {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> Row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  // Copies the listed rows, in order, into a new matrix.
  Matrix SelectRows(std::span<const std::size_t> indices) const;

  // "RxC" for error messages.
  std::string ShapeString() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Throws NumericError naming `what` if any entry is NaN or infinite.
void CheckFinite(std::span<const double> values, const std::string& what);

// a * b.
Matrix MatMul(const Matrix& a, const Matrix& b);
// transpose(a) * b.
Matrix MatMulTransposeA(const Matrix& a, const Matrix& b);
// a * transpose(b).
Matrix MatMulTransposeB(const Matrix& a, const Matrix& b);

// Scalar activations.
double Sigmoid(double x);
double LeakyRelu(double x, double slope);
double LeakyReluDerivative(double x, double slope);

// Entrywise operations. Binary forms throw ShapeError on mismatched shapes.
Vector Add(std::span<const double> a, std::span<const double> b);
Vector Sub(std::span<const double> a, std::span<const double> b);
Vector Mul(std::span<const double> a, std::span<const double> b);
Matrix Add(const Matrix& a, const Matrix& b);
Matrix Sub(const Matrix& a, const Matrix& b);
Matrix Mul(const Matrix& a, const Matrix& b);

Vector Sigmoid(std::span<const double> a);
Vector LeakyRelu(std::span<const double> a, double slope);
// Throws NumericError on non-positive entries.
Vector Log(std::span<const double> a);
Vector Clamp(std::span<const double> a, double lo, double hi);
Matrix Sigmoid(const Matrix& a);
Matrix LeakyRelu(const Matrix& a, double slope);

// Central finite-difference gradient of `loss` at `theta`:
//   (loss(theta + h e_i) - loss(theta - h e_i)) / (2h)  for every i.
// Used as a test oracle for the analytic gradients.
Vector FiniteDifferenceGradient(
    const std::function<double(std::span<const double>)>& loss,
    std::span<const double> theta, double h);

double Mean(std::span<const double> values);
// Sample standard deviation (n - 1 denominator). Zero for fewer than 2 values.
double SampleStdDev(std::span<const double> values);

}  // namespace smite

#endif  // SMITE_NUMERICS_H_
