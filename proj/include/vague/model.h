#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vague/numerics.h"

namespace vague {

enum class GruVariant {
  // Candidate state ignores the reset gate entirely.
  kAsPrinted,
  // Conventional GRU: candidate sees r_t (.) h_{t-1}.
  kStandardReset,
};

std::string_view variant_name(GruVariant variant);
GruVariant parse_variant(std::string_view name);  // throws PreconditionError

// Class indices of the vagueness head.
inline constexpr std::size_t kVagueClass = 0;
inline constexpr std::size_t kNotVagueClass = 1;

struct ModelConfig {
  static constexpr std::size_t kClasses = 2;

  std::size_t vocab_size = 5000;
  std::size_t embed_dim = 300;
  std::size_t hidden_dim = 512;
  std::size_t fusion_dim = 200;
  std::size_t max_len = 50;
  double alpha = 1.0;  // weight of the next-word term
  double beta = 2.0;   // weight of the vagueness term
  GruVariant variant = GruVariant::kStandardReset;
  bool freeze_embeddings = false;

  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

struct GruParams {
  Matrix w_input, u_input, b_input;  // update ("input") gate
  Matrix w_reset, u_reset, b_reset;
  Matrix w_cell, u_cell, b_cell;

  static GruParams zeros(std::size_t input_dim, std::size_t hidden_dim);

  template <class F>
  void for_each(F&& f) { visit(*this, f); }
  template <class F>
  void for_each(F&& f) const { visit(*this, f); }

  bool operator==(const GruParams&) const = default;

 private:
  template <class Self, class F>
  static void visit(Self& self, F& f) {
    f("w_input", self.w_input);
    f("u_input", self.u_input);
    f("b_input", self.b_input);
    f("w_reset", self.w_reset);
    f("u_reset", self.u_reset);
    f("b_reset", self.b_reset);
    f("w_cell", self.w_cell);
    f("u_cell", self.u_cell);
    f("b_cell", self.b_cell);
  }
};

// All trainable tensors, in checkpoint order.
struct ModelParams {
  Matrix embedding;   // V x D
  GruParams forward;  // left to right
  GruParams backward; // right to left
  Matrix fusion_w;    // l x 2d
  Matrix fusion_b;    // l x 1
  Matrix word_head;   // V x l
  Matrix vague_head;  // 2 x l

  static ModelParams zeros(const ModelConfig& config);
  // uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases,
  // standard normal embeddings, zero padding row.
  static ModelParams initialize(const ModelConfig& config, std::uint64_t seed);

  // Visits (name, tensor) pairs in declared order.
  template <class F>
  void for_each(F&& f) { visit(*this, f); }
  template <class F>
  void for_each(F&& f) const { visit(*this, f); }

  void set_zero();
  bool all_finite() const;
  // Throws DimensionError when any tensor disagrees with `config`.
  void check_shapes(const ModelConfig& config) const;

  bool operator==(const ModelParams&) const = default;

 private:
  template <class Self, class F>
  static void visit(Self& self, F& f) {
    f(std::string("embedding"), self.embedding);
    self.forward.for_each([&](std::string_view n, auto& m) { f("forward." + std::string(n), m); });
    self.backward.for_each([&](std::string_view n, auto& m) { f("backward." + std::string(n), m); });
    f(std::string("fusion_w"), self.fusion_w);
    f(std::string("fusion_b"), self.fusion_b);
    f(std::string("word_head"), self.word_head);
    f(std::string("vague_head"), self.vague_head);
  }
};

// One recurrent step, kept for backpropagation.
struct GruStep {
  Vector h_prev;
  Vector input_gate;
  Vector reset_gate;
  Vector cell;      // candidate state
  Vector gated_prev;  // r_t (.) h_{t-1}; equals h_prev for the as-printed variant
  Vector hidden;
};

// A padded id sequence: `ids` has max_len entries, the first `length` real.
struct Sequence {
  std::vector<std::int32_t> ids;
  std::vector<std::uint8_t> vague;  // 1 when the token is vague
  std::size_t length = 0;

  std::vector<std::uint8_t> mask() const;
  bool operator==(const Sequence&) const = default;
};

// Everything the forward pass computed for one sequence.
struct ForwardRecord {
  std::size_t padded_length = 0;
  std::size_t length = 0;
  std::vector<std::uint8_t> mask;
  std::vector<Vector> embeddings;
  std::vector<GruStep> forward;   // index t: state after reading token t left to right
  std::vector<GruStep> backward;  // index t: state after reading token t right to left
  std::vector<Vector> fused;      // g_t
  std::vector<Vector> word_logits;
  std::vector<Vector> vague_logits;
  std::vector<Vector> word_dist;
  std::vector<Vector> vague_dist;
};

// Row lookup; the padding id maps to the zero vector.
Vector embed(std::int32_t vocab_id, const ModelParams& params);

GruStep gru_cell(const GruParams& params, std::span<const double> h_prev, std::span<const double> x,
                 GruVariant variant);

// Backpropagates `d_hidden` through one step: accumulates parameter
// gradients into `grads`, adds the input gradient into `d_x` and writes the
// gradient w.r.t. h_{t-1} into `d_h_prev`.
void gru_cell_backward(const GruParams& params, std::span<const double> x, const GruStep& step,
                       GruVariant variant, std::span<const double> d_hidden, GruParams& grads,
                       std::span<double> d_x, std::span<double> d_h_prev);

// Runs both GRUs over the real positions of `sequence` (initial states are
// zero, padding is skipped) and applies the fusion layer and both heads.
ForwardRecord encode(const Sequence& sequence, const ModelParams& params, const ModelConfig& config);

// (word distribution over V, vagueness distribution over 2); no biases.
std::pair<Vector, Vector> heads(std::span<const double> fused, const ModelParams& params);

// Next-word target at position t, or -1 for the end-of-sentence position.
std::int32_t word_target(const Sequence& sequence, std::size_t t);
std::size_t vague_target(const Sequence& sequence, std::size_t t);

// alpha * sum -log p(next word) + beta * sum -log p(vagueness class), over
// real positions of every record.
double joint_loss(std::span<const ForwardRecord> records, std::span<const Sequence> sequences,
                  const ModelConfig& config);

// Full backward pass for one sequence; accumulates into `grads` and returns
// the sequence's loss.
double backpropagate(const Sequence& sequence, const ForwardRecord& record, const ModelParams& params,
                     const ModelConfig& config, ModelParams& grads);

// Loss of the batch; when `grads` is non-null it is overwritten with the
// gradient, accumulated in batch order.
double loss_and_gradient(std::span<const Sequence> batch, const ModelParams& params,
                         const ModelConfig& config, ModelParams* grads);

}  // namespace vague
