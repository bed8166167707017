#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include "vague/corpus.h"
#include "vague/model.h"

namespace vague {

struct TrainConfig {
  std::size_t epochs = 25;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  double rmsprop_decay = 0.9;
  double rmsprop_epsilon = 1e-8;
  std::uint64_t seed = 1;
  bool shuffle = true;
  // Fraction of sentences set aside (seeded) and only evaluated, never
  // trained on. 0 keeps every sentence for training.
  double holdout_fraction = 0.0;

  void validate() const;
};

struct EpochMetrics {
  std::size_t epoch = 0;  // 1-based
  double mean_loss = 0.0;  // per sentence
  double accuracy_word = 0.0;
  double accuracy_vagueness = 0.0;
  std::size_t skipped_steps = 0;
  // Filled only when a holdout split is configured.
  bool has_heldout = false;
  double heldout_loss = 0.0;
  double heldout_accuracy_word = 0.0;
  double heldout_accuracy_vagueness = 0.0;

  bool operator==(const EpochMetrics&) const = default;
};

// Truncates to max_len tokens (the final token stays the end-of-sentence
// symbol), pads with the padding id and records the real length.
Sequence to_sequence(const Sentence& sentence, std::size_t max_len);

using Batch = std::vector<Sequence>;

// Produces one epoch's batches at a time. Order is reshuffled every epoch
// from a generator seeded once, so the stream depends only on the seed.
class BatchStream {
 public:
  BatchStream(const Corpus& corpus, std::size_t max_len, const TrainConfig& config);

  std::vector<Batch> next_epoch();
  std::size_t sequence_count() const { return sequences_.size(); }

 private:
  std::vector<Sequence> sequences_;
  std::size_t batch_size_;
  bool shuffle_;
  std::mt19937_64 rng_;
};

// Convenience wrapper: the batches of the first epoch.
std::vector<Batch> make_batches(const Corpus& corpus, std::size_t max_len, const TrainConfig& config);

// Per-tensor mean-square accumulators, zero-initialized.
struct RmsPropState {
  ModelParams mean_square;

  static RmsPropState zeros(const ModelConfig& config);
};

// v <- decay v + (1 - decay) g^2;  p <- p - lr g / (sqrt(v) + eps)
void rmsprop_update(std::span<double> param, std::span<const double> grad, std::span<double> mean_square,
                    const TrainConfig& config);

// Applies rmsprop_update to every tensor (the embedding table is skipped when
// frozen). Returns false and leaves everything untouched when any gradient
// is non-finite.
bool rmsprop_step(ModelParams& params, const ModelParams& grads, RmsPropState& state, const TrainConfig& config,
                  bool freeze_embeddings);

struct AccuracyCounter {
  std::size_t word_correct = 0;
  std::size_t word_total = 0;
  std::size_t vague_correct = 0;
  std::size_t vague_total = 0;

  void add(const ForwardRecord& record, const Sequence& sequence);
  double word() const;
  double vagueness() const;
};

// Fraction of positions with a next-word target where the word head's argmax
// equals the target.
double accuracy_word(std::span<const ForwardRecord> records, std::span<const Sequence> sequences);
// Fraction of real positions where the vagueness head's argmax equals the label.
double accuracy_vagueness(std::span<const ForwardRecord> records, std::span<const Sequence> sequences);

struct TrainResult {
  ModelParams params;
  std::vector<EpochMetrics> metrics;
};

// Called after every epoch with the metrics and current parameters.
using EpochCallback = std::function<void(const EpochMetrics&, const ModelParams&)>;

// Splits off round(fraction * n) sentences chosen by a seeded shuffle; both
// parts keep corpus order. Returns (training part, held-out part).
std::pair<Corpus, Corpus> holdout_split(const Corpus& corpus, double fraction, std::uint64_t seed);

// Mini-batch RMSProp on the joint loss. Metrics are accumulated over the
// training set during each epoch's pass. Throws PreconditionError on an
// empty corpus or invalid config.
TrainResult train(const Corpus& corpus, const ModelConfig& model_config, const TrainConfig& train_config,
                  ModelParams initial, const EpochCallback& on_epoch = {});
TrainResult train(const Corpus& corpus, const ModelConfig& model_config, const TrainConfig& train_config);

// `epoch,loss,acc_word,acc_vague` header plus one row per epoch; three
// heldout_* columns are appended when the metrics carry a held-out part.
std::string metrics_csv_header(bool heldout);
void write_metrics_csv(std::ostream& out, std::span<const EpochMetrics> metrics);
std::string metrics_csv_row(const EpochMetrics& m);

}  // namespace vague
