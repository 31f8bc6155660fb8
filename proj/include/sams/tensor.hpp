#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "sams/error.hpp"

namespace sams {

/// Dense row-major array of doubles with at most two extents.
///
/// A Tensor is a plain value: copying copies the data. Vectors have shape
/// {n}, matrices {rows, cols}. Every operation in the toolkit keeps entries
/// finite; `checkFinite` is the guard used at module boundaries.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);
  Tensor(std::vector<std::size_t> shape, std::vector<double> data);

  static Tensor vector(std::initializer_list<double> values);
  static Tensor vector(std::vector<double> values);
  static Tensor zeros(std::size_t n) { return Tensor({n}); }
  static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  std::size_t rank() const { return shape_.size(); }
  std::size_t rows() const { return shape_.empty() ? 0 : shape_[0]; }
  std::size_t cols() const { return shape_.size() < 2 ? 1 : shape_[1]; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& at(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }

  std::span<double> span() { return data_; }
  std::span<const double> span() const { return data_; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols(), cols()}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols(), cols()};
  }
  /// Copies row `r` of a matrix out as a vector tensor.
  Tensor rowTensor(std::size_t r) const;

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  void fill(double v);
  bool sameShape(const Tensor& other) const { return shape_ == other.shape_; }
  bool allFinite() const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

std::string shapeString(const std::vector<std::size_t>& shape);
void checkFinite(const Tensor& t, const std::string& where);

// Elementwise and BLAS-1 style helpers over spans.
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
void axpy(double alpha, std::span<const double> x, std::span<double> y);

Tensor operator+(const Tensor& a, const Tensor& b);
Tensor operator-(const Tensor& a, const Tensor& b);
Tensor operator*(double k, const Tensor& a);
Tensor& operator+=(Tensor& a, const Tensor& b);

/// y = W x for a {rows, cols} matrix and a {cols} vector.
Tensor matvec(const Tensor& w, const Tensor& x);
Tensor concat(const Tensor& a, const Tensor& b);

/// a.b / (|a| |b|). Throws ZeroVector when either norm is zero.
double cosine(const Tensor& a, const Tensor& b);
double cosine(std::span<const double> a, std::span<const double> b);

/// Numerically stable softmax (max subtraction).
Tensor softmax(const Tensor& scores);
Tensor tanhApply(const Tensor& x);
Tensor sigmoidApply(const Tensor& x);
double sigmoid(double x);

/// Elementwise mean of a non-empty set of equally shaped vectors.
Tensor mean(std::span<const Tensor> xs);

}  // namespace sams
