#include "vague/model.h"

#include <cmath>
#include <random>

#include "vague/error.h"

namespace vague {
namespace {

void add_into(std::span<double> dst, std::span<const double> src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

Vector concat(std::span<const double> a, std::span<const double> b) {
  Vector out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

// Gradient of alpha * -log softmax(logits)[target] w.r.t. the logits.
Vector cross_entropy_grad(std::span<const double> dist, std::size_t target, double weight) {
  Vector out(dist.size());
  for (std::size_t j = 0; j < dist.size(); ++j) out[j] = weight * dist[j];
  out[target] -= weight;
  return out;
}

}  // namespace

std::string_view variant_name(GruVariant variant) {
  return variant == GruVariant::kAsPrinted ? "as_printed" : "standard_reset";
}

GruVariant parse_variant(std::string_view name) {
  if (name == "as_printed") return GruVariant::kAsPrinted;
  if (name == "standard_reset") return GruVariant::kStandardReset;
  throw PreconditionError("unknown gru variant '" + std::string(name) + "' (expected as_printed or standard_reset)");
}

void ModelConfig::validate() const {
  if (vocab_size < 1 || embed_dim < 1 || hidden_dim < 1 || fusion_dim < 1 || max_len < 1) {
    throw PreconditionError("model dimensions must all be >= 1");
  }
  if (!(alpha >= 0.0) || !(beta >= 0.0)) throw PreconditionError("loss weights alpha and beta must be >= 0");
}

GruParams GruParams::zeros(std::size_t input_dim, std::size_t hidden_dim) {
  GruParams p;
  for (auto* w : {&p.w_input, &p.w_reset, &p.w_cell}) *w = Matrix(hidden_dim, input_dim);
  for (auto* u : {&p.u_input, &p.u_reset, &p.u_cell}) *u = Matrix(hidden_dim, hidden_dim);
  for (auto* b : {&p.b_input, &p.b_reset, &p.b_cell}) *b = Matrix(hidden_dim, 1);
  return p;
}

ModelParams ModelParams::zeros(const ModelConfig& config) {
  config.validate();
  ModelParams p;
  p.embedding = Matrix(config.vocab_size, config.embed_dim);
  p.forward = GruParams::zeros(config.embed_dim, config.hidden_dim);
  p.backward = GruParams::zeros(config.embed_dim, config.hidden_dim);
  p.fusion_w = Matrix(config.fusion_dim, 2 * config.hidden_dim);
  p.fusion_b = Matrix(config.fusion_dim, 1);
  p.word_head = Matrix(config.vocab_size, config.fusion_dim);
  p.vague_head = Matrix(ModelConfig::kClasses, config.fusion_dim);
  return p;
}

ModelParams ModelParams::initialize(const ModelConfig& config, std::uint64_t seed) {
  auto p = zeros(config);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto& v : p.embedding.values()) v = normal(rng);
  for (auto& v : p.embedding.row(0)) v = 0.0;

  auto uniform_fill = [&](Matrix& m, std::size_t fan_in) {
    const double s = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-s, s);
    for (auto& v : m.values()) v = dist(rng);
  };
  for (auto* gru : {&p.forward, &p.backward}) {
    uniform_fill(gru->w_input, config.embed_dim);
    uniform_fill(gru->u_input, config.hidden_dim);
    uniform_fill(gru->b_input, config.embed_dim);
    uniform_fill(gru->w_reset, config.embed_dim);
    uniform_fill(gru->u_reset, config.hidden_dim);
    uniform_fill(gru->b_reset, config.embed_dim);
    uniform_fill(gru->w_cell, config.embed_dim);
    uniform_fill(gru->u_cell, config.hidden_dim);
    uniform_fill(gru->b_cell, config.embed_dim);
  }
  uniform_fill(p.fusion_w, 2 * config.hidden_dim);
  uniform_fill(p.fusion_b, 2 * config.hidden_dim);
  uniform_fill(p.word_head, config.fusion_dim);
  uniform_fill(p.vague_head, config.fusion_dim);
  return p;
}

void ModelParams::set_zero() {
  for_each([](const std::string&, Matrix& m) { m.fill(0.0); });
}

bool ModelParams::all_finite() const {
  bool ok = true;
  for_each([&](const std::string&, const Matrix& m) { ok = ok && vague::all_finite(m.values()); });
  return ok;
}

void ModelParams::check_shapes(const ModelConfig& config) const {
  const auto expected = zeros(config);
  std::vector<std::pair<std::string, std::string>> want;
  expected.for_each([&](const std::string& name, const Matrix& m) { want.emplace_back(name, m.shape()); });
  std::size_t i = 0;
  for_each([&](const std::string& name, const Matrix& m) {
    if (m.shape() != want[i].second) {
      throw DimensionError("parameter " + name + " is " + m.shape() + ", expected " + want[i].second);
    }
    ++i;
  });
}

std::vector<std::uint8_t> Sequence::mask() const {
  std::vector<std::uint8_t> m(ids.size(), 0);
  for (std::size_t t = 0; t < length && t < m.size(); ++t) m[t] = 1;
  return m;
}

Vector embed(std::int32_t vocab_id, const ModelParams& params) {
  if (vocab_id < 0 || static_cast<std::size_t>(vocab_id) >= params.embedding.rows()) {
    throw PreconditionError("embed: id " + std::to_string(vocab_id) + " out of range [0, " +
                            std::to_string(params.embedding.rows()) + ")");
  }
  if (vocab_id == 0) return Vector(params.embedding.cols(), 0.0);
  const auto row = params.embedding.row(static_cast<std::size_t>(vocab_id));
  return Vector(row.begin(), row.end());
}

GruStep gru_cell(const GruParams& p, std::span<const double> h_prev, std::span<const double> x,
                 GruVariant variant) {
  if (h_prev.size() != p.u_input.cols()) {
    throw DimensionError("gru_cell: h_prev is " + std::to_string(h_prev.size()) + "x1, U is " + p.u_input.shape());
  }
  GruStep s;
  s.h_prev.assign(h_prev.begin(), h_prev.end());

  auto pre_i = affine(p.w_input, x, p.b_input.values());
  matvec_add(p.u_input, h_prev, pre_i);
  s.input_gate = sigmoid(pre_i);

  auto pre_r = affine(p.w_reset, x, p.b_reset.values());
  matvec_add(p.u_reset, h_prev, pre_r);
  s.reset_gate = sigmoid(pre_r);

  s.gated_prev = variant == GruVariant::kStandardReset ? elem_mul(s.reset_gate, h_prev) : s.h_prev;
  auto pre_c = affine(p.w_cell, x, p.b_cell.values());
  matvec_add(p.u_cell, s.gated_prev, pre_c);
  s.cell = tanh_act(pre_c);

  s.hidden.resize(h_prev.size());
  for (std::size_t k = 0; k < h_prev.size(); ++k) {
    s.hidden[k] = s.input_gate[k] * s.cell[k] + (1.0 - s.input_gate[k]) * h_prev[k];
  }
  return s;
}

void gru_cell_backward(const GruParams& p, std::span<const double> x, const GruStep& s, GruVariant variant,
                       std::span<const double> d_hidden, GruParams& g, std::span<double> d_x,
                       std::span<double> d_h_prev) {
  const auto d = d_hidden.size();
  Vector d_pre_i(d), d_pre_c(d);
  for (std::size_t k = 0; k < d; ++k) {
    const double i = s.input_gate[k];
    d_pre_i[k] = d_hidden[k] * (s.cell[k] - s.h_prev[k]) * i * (1.0 - i);
    d_pre_c[k] = d_hidden[k] * i * (1.0 - s.cell[k] * s.cell[k]);
    d_h_prev[k] = d_hidden[k] * (1.0 - i);
  }

  outer_add(g.w_cell, d_pre_c, x);
  outer_add(g.u_cell, d_pre_c, s.gated_prev);
  add_into(g.b_cell.values(), d_pre_c);
  matvec_transposed_add(p.w_cell, d_pre_c, d_x);

  Vector d_gated(d, 0.0);
  matvec_transposed_add(p.u_cell, d_pre_c, d_gated);
  Vector d_pre_r(d, 0.0);
  if (variant == GruVariant::kStandardReset) {
    for (std::size_t k = 0; k < d; ++k) {
      const double r = s.reset_gate[k];
      d_pre_r[k] = d_gated[k] * s.h_prev[k] * r * (1.0 - r);
      d_h_prev[k] += d_gated[k] * r;
    }
  } else {
    add_into(d_h_prev, d_gated);
  }

  outer_add(g.w_reset, d_pre_r, x);
  outer_add(g.u_reset, d_pre_r, s.h_prev);
  add_into(g.b_reset.values(), d_pre_r);
  matvec_transposed_add(p.w_reset, d_pre_r, d_x);
  matvec_transposed_add(p.u_reset, d_pre_r, d_h_prev);

  outer_add(g.w_input, d_pre_i, x);
  outer_add(g.u_input, d_pre_i, s.h_prev);
  add_into(g.b_input.values(), d_pre_i);
  matvec_transposed_add(p.w_input, d_pre_i, d_x);
  matvec_transposed_add(p.u_input, d_pre_i, d_h_prev);
}

std::pair<Vector, Vector> heads(std::span<const double> fused, const ModelParams& params) {
  Vector word(params.word_head.rows(), 0.0);
  matvec_add(params.word_head, fused, word);
  Vector vague(params.vague_head.rows(), 0.0);
  matvec_add(params.vague_head, fused, vague);
  return {softmax(word), softmax(vague)};
}

ForwardRecord encode(const Sequence& seq, const ModelParams& params, const ModelConfig& config) {
  if (seq.ids.size() > config.max_len) {
    throw PreconditionError("encode: sequence of " + std::to_string(seq.ids.size()) +
                            " ids exceeds max_len " + std::to_string(config.max_len));
  }
  if (seq.length > seq.ids.size()) throw PreconditionError("encode: length exceeds padded size");
  const auto length = seq.length;
  const auto d = config.hidden_dim;

  ForwardRecord rec;
  rec.padded_length = seq.ids.size();
  rec.length = length;
  rec.mask = seq.mask();
  rec.embeddings.reserve(length);
  for (std::size_t t = 0; t < length; ++t) rec.embeddings.push_back(embed(seq.ids[t], params));

  rec.forward.resize(length);
  Vector h(d, 0.0);
  for (std::size_t t = 0; t < length; ++t) {
    rec.forward[t] = gru_cell(params.forward, h, rec.embeddings[t], config.variant);
    h = rec.forward[t].hidden;
  }
  rec.backward.resize(length);
  h.assign(d, 0.0);
  for (std::size_t t = length; t-- > 0;) {
    rec.backward[t] = gru_cell(params.backward, h, rec.embeddings[t], config.variant);
    h = rec.backward[t].hidden;
  }

  for (std::size_t t = 0; t < length; ++t) {
    const auto joint = concat(rec.forward[t].hidden, rec.backward[t].hidden);
    rec.fused.push_back(tanh_act(affine(params.fusion_w, joint, params.fusion_b.values())));
    Vector word(params.word_head.rows(), 0.0);
    matvec_add(params.word_head, rec.fused[t], word);
    Vector vague(params.vague_head.rows(), 0.0);
    matvec_add(params.vague_head, rec.fused[t], vague);
    rec.word_dist.push_back(softmax(word));
    rec.vague_dist.push_back(softmax(vague));
    rec.word_logits.push_back(std::move(word));
    rec.vague_logits.push_back(std::move(vague));
  }
  return rec;
}

std::int32_t word_target(const Sequence& seq, std::size_t t) {
  return t + 1 < seq.length ? seq.ids[t + 1] : -1;
}

std::size_t vague_target(const Sequence& seq, std::size_t t) {
  return seq.vague[t] != 0 ? kVagueClass : kNotVagueClass;
}

double joint_loss(std::span<const ForwardRecord> records, std::span<const Sequence> sequences,
                  const ModelConfig& config) {
  if (records.size() != sequences.size()) throw PreconditionError("joint_loss: records/targets count mismatch");
  double word_nll = 0.0;
  double vague_nll = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    for (std::size_t t = 0; t < rec.length; ++t) {
      if (const auto y = word_target(sequences[i], t); y >= 0) {
        word_nll -= log_softmax_at(rec.word_logits[t], static_cast<std::size_t>(y));
      }
      vague_nll -= log_softmax_at(rec.vague_logits[t], vague_target(sequences[i], t));
    }
  }
  return config.alpha * word_nll + config.beta * vague_nll;
}

double backpropagate(const Sequence& seq, const ForwardRecord& rec, const ModelParams& params,
                     const ModelConfig& config, ModelParams& grads) {
  const auto length = rec.length;
  const auto d = config.hidden_dim;
  const auto l = config.fusion_dim;
  std::vector<Vector> d_fwd(length, Vector(d, 0.0));
  std::vector<Vector> d_bwd(length, Vector(d, 0.0));
  double loss = 0.0;

  for (std::size_t t = 0; t < length; ++t) {
    const auto& g = rec.fused[t];
    Vector d_g(l, 0.0);
    if (const auto y = word_target(seq, t); y >= 0) {
      const auto target = static_cast<std::size_t>(y);
      loss -= config.alpha * log_softmax_at(rec.word_logits[t], target);
      const auto d_logits = cross_entropy_grad(rec.word_dist[t], target, config.alpha);
      outer_add(grads.word_head, d_logits, g);
      matvec_transposed_add(params.word_head, d_logits, d_g);
    }
    const auto k = vague_target(seq, t);
    loss -= config.beta * log_softmax_at(rec.vague_logits[t], k);
    const auto d_vlogits = cross_entropy_grad(rec.vague_dist[t], k, config.beta);
    outer_add(grads.vague_head, d_vlogits, g);
    matvec_transposed_add(params.vague_head, d_vlogits, d_g);

    Vector d_pre(l);
    for (std::size_t j = 0; j < l; ++j) d_pre[j] = d_g[j] * (1.0 - g[j] * g[j]);
    const auto joint = concat(rec.forward[t].hidden, rec.backward[t].hidden);
    outer_add(grads.fusion_w, d_pre, joint);
    add_into(grads.fusion_b.values(), d_pre);
    Vector d_joint(2 * d, 0.0);
    matvec_transposed_add(params.fusion_w, d_pre, d_joint);
    std::copy(d_joint.begin(), d_joint.begin() + static_cast<std::ptrdiff_t>(d), d_fwd[t].begin());
    std::copy(d_joint.begin() + static_cast<std::ptrdiff_t>(d), d_joint.end(), d_bwd[t].begin());
  }

  std::vector<Vector> d_emb(length, Vector(config.embed_dim, 0.0));
  Vector carry(d, 0.0);
  Vector d_h_prev(d);
  for (std::size_t t = length; t-- > 0;) {
    add_into(d_fwd[t], carry);
    gru_cell_backward(params.forward, rec.embeddings[t], rec.forward[t], config.variant, d_fwd[t],
                      grads.forward, d_emb[t], d_h_prev);
    carry = d_h_prev;
  }
  carry.assign(d, 0.0);
  for (std::size_t t = 0; t < length; ++t) {
    add_into(d_bwd[t], carry);
    gru_cell_backward(params.backward, rec.embeddings[t], rec.backward[t], config.variant, d_bwd[t],
                      grads.backward, d_emb[t], d_h_prev);
    carry = d_h_prev;
  }

  if (!config.freeze_embeddings) {
    for (std::size_t t = 0; t < length; ++t) {
      const auto id = seq.ids[t];
      if (id == 0) continue;
      add_into(grads.embedding.row(static_cast<std::size_t>(id)), d_emb[t]);
    }
  }
  return loss;
}

double loss_and_gradient(std::span<const Sequence> batch, const ModelParams& params, const ModelConfig& config,
                         ModelParams* grads) {
  if (grads != nullptr) {
    if (!grads->embedding.same_shape(params.embedding)) *grads = ModelParams::zeros(config);
    grads->set_zero();
  }
  double loss = 0.0;
  for (const auto& seq : batch) {
    const auto rec = encode(seq, params, config);
    if (grads != nullptr) {
      loss += backpropagate(seq, rec, params, config, *grads);
    } else {
      loss += joint_loss(std::span(&rec, 1), std::span(&seq, 1), config);
    }
  }
  return loss;
}

}  // namespace vague
