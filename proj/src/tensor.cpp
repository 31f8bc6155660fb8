#include "sams/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

namespace sams {

namespace {

std::size_t product(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

void requireSameShape(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.sameShape(b)) {
    throw dimensionMismatch(std::string(op) + ": " + shapeString(a.shape()) + " vs " +
                            shapeString(b.shape()));
  }
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape, double fill)
    : shape_(std::move(shape)), data_(product(shape_), fill) {
  if (shape_.empty() || shape_.size() > 2) {
    throw UsageError("ShapeError", "tensors have rank 1 or 2");
  }
}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_.empty() || shape_.size() > 2) {
    throw UsageError("ShapeError", "tensors have rank 1 or 2");
  }
  if (product(shape_) != data_.size()) {
    throw dimensionMismatch("shape " + shapeString(shape_) + " holds " +
                            std::to_string(product(shape_)) + " values, got " +
                            std::to_string(data_.size()));
  }
}

Tensor Tensor::vector(std::initializer_list<double> values) {
  return Tensor({values.size()}, std::vector<double>(values));
}

Tensor Tensor::vector(std::vector<double> values) {
  const std::size_t n = values.size();
  return Tensor({n}, std::move(values));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> data) {
  return Tensor({rows, cols}, std::move(data));
}

Tensor Tensor::rowTensor(std::size_t r) const {
  auto src = row(r);
  return Tensor::vector(std::vector<double>(src.begin(), src.end()));
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Tensor::allFinite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

std::string shapeString(const std::vector<std::size_t>& shape) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out << 'x';
    out << shape[i];
  }
  out << ']';
  return out.str();
}

void checkFinite(const Tensor& t, const std::string& where) {
  if (!t.allFinite()) throw DataError("NonFinite", "non-finite value in " + where);
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw dimensionMismatch("dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw dimensionMismatch("axpy");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

Tensor operator+(const Tensor& a, const Tensor& b) {
  requireSameShape(a, b, "add");
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

Tensor operator-(const Tensor& a, const Tensor& b) {
  requireSameShape(a, b, "sub");
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
  return out;
}

Tensor operator*(double k, const Tensor& a) {
  Tensor out = a;
  for (double& v : out.data()) v *= k;
  return out;
}

Tensor& operator+=(Tensor& a, const Tensor& b) {
  requireSameShape(a, b, "add");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

Tensor matvec(const Tensor& w, const Tensor& x) {
  if (w.rank() != 2 || x.rank() != 1 || w.cols() != x.size()) {
    throw dimensionMismatch("matvec " + shapeString(w.shape()) + " * " + shapeString(x.shape()));
  }
  Tensor out = Tensor::zeros(w.rows());
  for (std::size_t r = 0; r < w.rows(); ++r) out[r] = dot(w.row(r), x.span());
  return out;
}

Tensor concat(const Tensor& a, const Tensor& b) {
  std::vector<double> data(a.data());
  data.insert(data.end(), b.data().begin(), b.data().end());
  return Tensor::vector(std::move(data));
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw dimensionMismatch("cosine");
  const double na = norm2(a);
  const double nb = norm2(b);
  if (na == 0.0 || nb == 0.0) throw DataError("ZeroVector", "cosine of a zero vector");
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

double cosine(const Tensor& a, const Tensor& b) { return cosine(a.span(), b.span()); }

Tensor softmax(const Tensor& scores) {
  if (scores.size() == 0) throw UsageError("EmptyInput", "softmax of an empty tensor");
  const double mx = *std::max_element(scores.data().begin(), scores.data().end());
  Tensor out = scores;
  double total = 0.0;
  for (double& v : out.data()) {
    v = std::exp(v - mx);
    total += v;
  }
  for (double& v : out.data()) v /= total;
  return out;
}

double sigmoid(double x) {
  // Branching keeps exp() from overflowing for large |x|.
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Tensor tanhApply(const Tensor& x) {
  Tensor out = x;
  for (double& v : out.data()) v = std::tanh(v);
  return out;
}

Tensor sigmoidApply(const Tensor& x) {
  Tensor out = x;
  for (double& v : out.data()) v = sigmoid(v);
  return out;
}

Tensor mean(std::span<const Tensor> xs) {
  if (xs.empty()) throw UsageError("EmptyInput", "mean of no vectors");
  Tensor out = xs.front();
  for (std::size_t i = 1; i < xs.size(); ++i) out += xs[i];
  return (1.0 / static_cast<double>(xs.size())) * out;
}

}  // namespace sams
