#include "vague/training.h"

#include <cmath>
#include <iostream>
#include <sstream>

#include "vague/error.h"

namespace vague {

void TrainConfig::validate() const {
  if (epochs < 1) throw PreconditionError("epochs must be >= 1");
  if (batch_size < 1) throw PreconditionError("batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw PreconditionError("learning_rate must be > 0");
  if (!(rmsprop_decay > 0.0 && rmsprop_decay < 1.0)) throw PreconditionError("rmsprop_decay must lie in (0, 1)");
  if (!(rmsprop_epsilon > 0.0)) throw PreconditionError("rmsprop_epsilon must be > 0");
  if (!(holdout_fraction >= 0.0 && holdout_fraction < 1.0)) {
    throw PreconditionError("holdout_fraction must lie in [0, 1)");
  }
}

Sequence to_sequence(const Sentence& sentence, std::size_t max_len) {
  if (max_len < 1) throw PreconditionError("max_len must be >= 1");
  Sequence seq;
  seq.ids.assign(max_len, kPadId);
  seq.vague.assign(max_len, 0);
  const auto& tokens = sentence.tokens;
  seq.length = std::min(tokens.size(), max_len);
  for (std::size_t t = 0; t < seq.length; ++t) {
    // When truncating, the last kept slot holds the end-of-sentence token.
    const auto& tok = (t + 1 == seq.length) ? tokens.back() : tokens[t];
    seq.ids[t] = tok.vocab_id;
    seq.vague[t] = tok.is_vague ? 1 : 0;
  }
  return seq;
}

BatchStream::BatchStream(const Corpus& corpus, std::size_t max_len, const TrainConfig& config)
    : batch_size_(config.batch_size), shuffle_(config.shuffle), rng_(config.seed) {
  if (batch_size_ < 1) throw PreconditionError("batch_size must be >= 1");
  sequences_.reserve(corpus.sentences.size());
  for (const auto& s : corpus.sentences) sequences_.push_back(to_sequence(s, max_len));
}

std::vector<Batch> BatchStream::next_epoch() {
  std::vector<std::size_t> order(sequences_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  if (shuffle_) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i - 1);
      std::swap(order[i - 1], order[pick(rng_)]);
    }
  }
  std::vector<Batch> batches;
  for (std::size_t start = 0; start < order.size(); start += batch_size_) {
    Batch batch;
    for (std::size_t k = start; k < std::min(order.size(), start + batch_size_); ++k) {
      batch.push_back(sequences_[order[k]]);
    }
    batches.push_back(std::move(batch));
  }
  return batches;
}

std::vector<Batch> make_batches(const Corpus& corpus, std::size_t max_len, const TrainConfig& config) {
  BatchStream stream(corpus, max_len, config);
  return stream.next_epoch();
}

RmsPropState RmsPropState::zeros(const ModelConfig& config) { return {ModelParams::zeros(config)}; }

void rmsprop_update(std::span<double> param, std::span<const double> grad, std::span<double> mean_square,
                    const TrainConfig& config) {
  const double rho = config.rmsprop_decay;
  for (std::size_t i = 0; i < param.size(); ++i) {
    const double g = grad[i];
    mean_square[i] = rho * mean_square[i] + (1.0 - rho) * g * g;
    param[i] -= config.learning_rate * g / (std::sqrt(mean_square[i]) + config.rmsprop_epsilon);
  }
}

bool rmsprop_step(ModelParams& params, const ModelParams& grads, RmsPropState& state, const TrainConfig& config,
                  bool freeze_embeddings) {
  if (!grads.all_finite()) return false;
  std::vector<std::span<double>> p, v;
  std::vector<std::span<const double>> g;
  params.for_each([&](const std::string&, Matrix& m) { p.push_back(m.values()); });
  state.mean_square.for_each([&](const std::string&, Matrix& m) { v.push_back(m.values()); });
  grads.for_each([&](const std::string&, const Matrix& m) { g.push_back(m.values()); });
  // Index 0 is the embedding table in declared order.
  for (std::size_t i = freeze_embeddings ? 1 : 0; i < p.size(); ++i) rmsprop_update(p[i], g[i], v[i], config);
  return true;
}

void AccuracyCounter::add(const ForwardRecord& rec, const Sequence& seq) {
  for (std::size_t t = 0; t < rec.length; ++t) {
    if (const auto y = word_target(seq, t); y >= 0) {
      ++word_total;
      if (argmax(rec.word_logits[t]) == static_cast<std::size_t>(y)) ++word_correct;
    }
    ++vague_total;
    if (argmax(rec.vague_logits[t]) == vague_target(seq, t)) ++vague_correct;
  }
}

double AccuracyCounter::word() const {
  return word_total == 0 ? 0.0 : static_cast<double>(word_correct) / static_cast<double>(word_total);
}

double AccuracyCounter::vagueness() const {
  return vague_total == 0 ? 0.0 : static_cast<double>(vague_correct) / static_cast<double>(vague_total);
}

double accuracy_word(std::span<const ForwardRecord> records, std::span<const Sequence> sequences) {
  AccuracyCounter c;
  for (std::size_t i = 0; i < records.size(); ++i) c.add(records[i], sequences[i]);
  return c.word();
}

double accuracy_vagueness(std::span<const ForwardRecord> records, std::span<const Sequence> sequences) {
  AccuracyCounter c;
  for (std::size_t i = 0; i < records.size(); ++i) c.add(records[i], sequences[i]);
  return c.vagueness();
}

std::pair<Corpus, Corpus> holdout_split(const Corpus& corpus, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction < 1.0)) throw PreconditionError("holdout fraction must lie in [0, 1)");
  const auto n = corpus.sentences.size();
  const auto held = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed ^ 0x5bd1e995u);
  for (std::size_t i = n; i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(order[i - 1], order[pick(rng)]);
  }
  std::vector<std::uint8_t> is_held(n, 0);
  for (std::size_t k = 0; k < held; ++k) is_held[order[k]] = 1;

  std::pair<Corpus, Corpus> out;
  for (auto* part : {&out.first, &out.second}) {
    part->vocabulary = corpus.vocabulary;
    part->doc_ids = corpus.doc_ids;
  }
  for (std::size_t i = 0; i < n; ++i) (is_held[i] ? out.second : out.first).sentences.push_back(corpus.sentences[i]);
  return out;
}

TrainResult train(const Corpus& full_corpus, const ModelConfig& model_config, const TrainConfig& train_config,
                  ModelParams initial, const EpochCallback& on_epoch) {
  model_config.validate();
  train_config.validate();
  if (full_corpus.sentences.empty()) throw PreconditionError("train: corpus has no sentences");
  const bool heldout = train_config.holdout_fraction > 0.0;
  std::pair<Corpus, Corpus> parts;
  if (heldout) parts = holdout_split(full_corpus, train_config.holdout_fraction, train_config.seed);
  const Corpus& corpus = heldout ? parts.first : full_corpus;
  if (corpus.sentences.empty()) throw PreconditionError("train: holdout leaves no training sentences");
  std::vector<Sequence> heldout_seqs;
  for (const auto& s : parts.second.sentences) heldout_seqs.push_back(to_sequence(s, model_config.max_len));
  if (corpus.vocabulary.size() > model_config.vocab_size) {
    throw PreconditionError("train: corpus vocabulary (" + std::to_string(corpus.vocabulary.size()) +
                            ") exceeds model vocab_size (" + std::to_string(model_config.vocab_size) + ")");
  }
  initial.check_shapes(model_config);

  TrainResult result{std::move(initial), {}};
  auto& params = result.params;
  auto state = RmsPropState::zeros(model_config);
  auto grads = ModelParams::zeros(model_config);
  BatchStream stream(corpus, model_config.max_len, train_config);

  for (std::size_t epoch = 1; epoch <= train_config.epochs; ++epoch) {
    EpochMetrics m;
    m.epoch = epoch;
    AccuracyCounter acc;
    double loss_sum = 0.0;
    for (const auto& batch : stream.next_epoch()) {
      grads.set_zero();
      for (const auto& seq : batch) {
        const auto rec = encode(seq, params, model_config);
        acc.add(rec, seq);
        loss_sum += backpropagate(seq, rec, params, model_config, grads);
      }
      if (!rmsprop_step(params, grads, state, train_config, model_config.freeze_embeddings)) {
        ++m.skipped_steps;
        std::cerr << "warning: epoch " << epoch << ": non-finite gradient, step skipped\n";
      }
    }
    m.mean_loss = loss_sum / static_cast<double>(stream.sequence_count());
    m.accuracy_word = acc.word();
    m.accuracy_vagueness = acc.vagueness();
    if (heldout) {
      AccuracyCounter held;
      double held_loss = 0.0;
      for (const auto& seq : heldout_seqs) {
        const auto rec = encode(seq, params, model_config);
        held.add(rec, seq);
        held_loss += joint_loss(std::span(&rec, 1), std::span(&seq, 1), model_config);
      }
      m.has_heldout = true;
      m.heldout_loss = heldout_seqs.empty() ? 0.0 : held_loss / static_cast<double>(heldout_seqs.size());
      m.heldout_accuracy_word = held.word();
      m.heldout_accuracy_vagueness = held.vagueness();
    }
    result.metrics.push_back(m);
    if (on_epoch) on_epoch(m, params);
  }
  return result;
}

TrainResult train(const Corpus& corpus, const ModelConfig& model_config, const TrainConfig& train_config) {
  return train(corpus, model_config, train_config, ModelParams::initialize(model_config, train_config.seed));
}

std::string metrics_csv_row(const EpochMetrics& m) {
  std::ostringstream os;
  os.precision(17);
  os << m.epoch << ',' << m.mean_loss << ',' << m.accuracy_word << ',' << m.accuracy_vagueness;
  if (m.has_heldout) {
    os << ',' << m.heldout_loss << ',' << m.heldout_accuracy_word << ',' << m.heldout_accuracy_vagueness;
  }
  return os.str();
}

std::string metrics_csv_header(bool heldout) {
  return heldout ? "epoch,loss,acc_word,acc_vague,heldout_loss,heldout_acc_word,heldout_acc_vague"
                 : "epoch,loss,acc_word,acc_vague";
}

void write_metrics_csv(std::ostream& out, std::span<const EpochMetrics> metrics) {
  out << metrics_csv_header(!metrics.empty() && metrics.front().has_heldout) << '\n';
  for (const auto& m : metrics) out << metrics_csv_row(m) << '\n';
}

}  // namespace vague
