#include "vague/numerics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "vague/error.h"

namespace vague {
namespace {

std::string vec_shape(std::size_t n) { return std::to_string(n) + "x1"; }

}  // namespace

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vector affine(const Matrix& w, std::span<const double> x, std::span<const double> b) {
  if (w.cols() != x.size() || w.rows() != b.size()) {
    throw DimensionError("affine: W is " + w.shape() + ", x is " + vec_shape(x.size()) + ", b is " +
                         vec_shape(b.size()));
  }
  Vector out(b.begin(), b.end());
  matvec_add(w, x, out);
  return out;
}

void matvec_add(const Matrix& w, std::span<const double> x, std::span<double> out) {
  if (w.cols() != x.size() || w.rows() != out.size()) {
    throw DimensionError("matvec: W is " + w.shape() + ", x is " + vec_shape(x.size()) + ", out is " +
                         vec_shape(out.size()));
  }
  for (std::size_t r = 0; r < w.rows(); ++r) {
    const auto row = w.row(r);
    double acc = 0.0;
    for (std::size_t c = 0; c < row.size(); ++c) acc += row[c] * x[c];
    out[r] += acc;
  }
}

void matvec_transposed_add(const Matrix& w, std::span<const double> y, std::span<double> out) {
  if (w.rows() != y.size() || w.cols() != out.size()) {
    throw DimensionError("matvec_transposed: W is " + w.shape() + ", y is " + vec_shape(y.size()) +
                         ", out is " + vec_shape(out.size()));
  }
  for (std::size_t r = 0; r < w.rows(); ++r) {
    const double yr = y[r];
    if (yr == 0.0) continue;
    const auto row = w.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) out[c] += row[c] * yr;
  }
}

void outer_add(Matrix& g, std::span<const double> a, std::span<const double> b) {
  if (g.rows() != a.size() || g.cols() != b.size()) {
    throw DimensionError("outer: G is " + g.shape() + ", a is " + vec_shape(a.size()) + ", b is " +
                         vec_shape(b.size()));
  }
  for (std::size_t r = 0; r < g.rows(); ++r) {
    const double ar = a[r];
    if (ar == 0.0) continue;
    auto row = g.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] += ar * b[c];
  }
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Vector sigmoid(std::span<const double> v) {
  Vector out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](double x) { return sigmoid(x); });
  return out;
}

Vector tanh_act(std::span<const double> v) {
  Vector out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](double x) { return std::tanh(x); });
  return out;
}

Vector elem_mul(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DimensionError("elem_mul: " + vec_shape(a.size()) + " vs " + vec_shape(b.size()));
  }
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

Vector softmax(std::span<const double> logits) {
  if (logits.empty()) return {};
  const double m = *std::max_element(logits.begin(), logits.end());
  Vector out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - m);
    sum += out[i];
  }
  for (auto& p : out) p /= sum;
  return out;
}

double log_softmax_at(std::span<const double> logits, std::size_t index) {
  const double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double z : logits) sum += std::exp(z - m);
  return logits[index] - m - std::log(sum);
}

std::size_t argmax(std::span<const double> v) {
  return static_cast<std::size_t>(std::distance(v.begin(), std::max_element(v.begin(), v.end())));
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / denom;
}

double GradCheckReport::max_rel_error() const {
  double worst = 0.0;
  for (const auto& e : entries) worst = std::max(worst, e.max_rel_error);
  return worst;
}

GradCheckReport grad_check(const std::function<double()>& loss, std::span<GradCheckBlock> blocks,
                           const GradCheckOptions& options) {
  if (!(options.epsilon >= 1e-6 && options.epsilon <= 1e-3)) {
    throw PreconditionError("grad_check: epsilon " + std::to_string(options.epsilon) +
                            " outside [1e-6, 1e-3]");
  }
  if (!std::isfinite(loss())) throw DataError("grad_check: loss is non-finite at the unperturbed point");
  std::mt19937_64 rng(options.seed);
  GradCheckReport report;
  report.epsilon = options.epsilon;
  for (auto& block : blocks) {
    if (block.values.size() != block.analytic.size()) {
      throw DimensionError("grad_check: block '" + block.name + "' has " +
                           std::to_string(block.values.size()) + " values but " +
                           std::to_string(block.analytic.size()) + " gradients");
    }
    std::vector<std::size_t> coords(block.values.size());
    std::iota(coords.begin(), coords.end(), std::size_t{0});
    if (coords.size() > options.full_check_limit) {
      // Partial Fisher-Yates: the first sample_size entries become the sample.
      const auto n = std::min(options.sample_size, coords.size());
      for (std::size_t i = 0; i < n; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, coords.size() - 1);
        std::swap(coords[i], coords[pick(rng)]);
      }
      coords.resize(n);
      std::sort(coords.begin(), coords.end());
    }

    GradCheckEntry entry;
    entry.name = block.name;
    entry.coordinates = coords.size();
    for (auto idx : coords) {
      const double saved = block.values[idx];
      block.values[idx] = saved + options.epsilon;
      const double plus = loss();
      block.values[idx] = saved - options.epsilon;
      const double minus = loss();
      block.values[idx] = saved;
      if (!std::isfinite(plus) || !std::isfinite(minus)) {
        throw DataError("grad_check: non-finite loss while probing " + block.name + "[" +
                        std::to_string(idx) + "]");
      }
      const double numeric = (plus - minus) / (2.0 * options.epsilon);
      const double err = relative_error(block.analytic[idx], numeric);
      if (err > entry.max_rel_error) {
        entry.max_rel_error = err;
        entry.argmax = idx;
        entry.analytic_at_max = block.analytic[idx];
        entry.numeric_at_max = numeric;
      }
    }
    report.entries.push_back(std::move(entry));
  }
  return report;
}

}  // namespace vague
