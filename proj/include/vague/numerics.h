#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace vague {

using Vector = std::vector<double>;

// Dense row-major matrix. Biases are stored as n x 1 matrices so every
// trainable tensor shares one type.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }
  std::string shape() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }
  bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// W x + b. Throws DimensionError naming both shapes on mismatch.
Vector affine(const Matrix& w, std::span<const double> x, std::span<const double> b);

// out += W x
void matvec_add(const Matrix& w, std::span<const double> x, std::span<double> out);
// out += W^T y
void matvec_transposed_add(const Matrix& w, std::span<const double> y, std::span<double> out);
// G += a b^T
void outer_add(Matrix& g, std::span<const double> a, std::span<const double> b);

double sigmoid(double x);
Vector sigmoid(std::span<const double> v);
Vector tanh_act(std::span<const double> v);
Vector elem_mul(std::span<const double> a, std::span<const double> b);

// Max-subtracted softmax.
Vector softmax(std::span<const double> logits);
// log softmax(logits)[index] via log-sum-exp; finite for any finite logits.
double log_softmax_at(std::span<const double> logits, std::size_t index);
std::size_t argmax(std::span<const double> v);

bool all_finite(std::span<const double> v);

// One parameter tensor together with its analytic gradient.
struct GradCheckBlock {
  std::string name;
  std::span<double> values;
  std::span<const double> analytic;
};

struct GradCheckEntry {
  std::string name;
  double max_rel_error = 0.0;
  std::size_t argmax = 0;        // flat index of the worst coordinate
  std::size_t coordinates = 0;   // coordinates actually checked
  double analytic_at_max = 0.0;
  double numeric_at_max = 0.0;
};

struct GradCheckReport {
  double epsilon = 0.0;
  std::vector<GradCheckEntry> entries;

  double max_rel_error() const;
};

struct GradCheckOptions {
  double epsilon = 1e-4;
  // Blocks larger than this are checked on a seeded random sample.
  std::size_t full_check_limit = 10000;
  std::size_t sample_size = 200;
  std::uint64_t seed = 7;
};

// |a - n| / max(|a|, |n|, 1e-8)
double relative_error(double analytic, double numeric);

// Central differences (f(x+e) - f(x-e)) / 2e against the analytic gradient.
// `loss` must read the current contents of every block. Values are restored
// after each probe. Throws PreconditionError when epsilon lies outside
// [1e-6, 1e-3] and DataError when the loss becomes non-finite.
GradCheckReport grad_check(const std::function<double()>& loss, std::span<GradCheckBlock> blocks,
                           const GradCheckOptions& options = {});

}  // namespace vague
