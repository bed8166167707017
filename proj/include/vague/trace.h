#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vague/corpus.h"
#include "vague/model.h"

namespace vague {

struct TraceToken {
  std::string surface;
  bool is_vague = false;
  bool is_boundary = false;  // the end-of-sentence symbol

  bool operator==(const TraceToken&) const = default;
};

// The concatenated corpus sequence with one fused vector per token.
// Immutable once constructed.
class HiddenTrace {
 public:
  HiddenTrace() = default;
  // `values` is row-major tokens.size() x dim. Throws DataError when the
  // sizes disagree.
  HiddenTrace(std::vector<TraceToken> tokens, std::size_t dim, std::vector<float> values);

  std::size_t size() const { return tokens_.size(); }
  std::size_t dim() const { return dim_; }
  const std::vector<TraceToken>& tokens() const { return tokens_; }
  const TraceToken& token(std::size_t t) const { return tokens_.at(t); }
  std::span<const float> vector(std::size_t t) const { return {values_.data() + t * dim_, dim_}; }
  float value(std::size_t t, std::size_t j) const { return values_[t * dim_ + j]; }
  const std::vector<float>& values() const { return values_; }
  std::size_t vague_count() const;

  bool operator==(const HiddenTrace&) const = default;

 private:
  std::vector<TraceToken> tokens_;
  std::size_t dim_ = 0;
  std::vector<float> values_;
};

// Encodes every sentence (truncated to max_len exactly as in training) and
// collects g_t for each kept token, in corpus order.
HiddenTrace build_trace(const ModelParams& params, const ModelConfig& config, const Corpus& corpus);

// Checks that the checkpoint and corpus agree (vocabulary size, and the
// expected max_len / fusion_dim when given), builds the trace and writes it.
// Throws DataError on mismatch.
HiddenTrace export_trace(const ModelParams& params, const ModelConfig& config, const Corpus& corpus,
                         const std::string& out_path, std::optional<std::size_t> expected_max_len = {},
                         std::optional<std::size_t> expected_dim = {});

// Layout: magic "VLTRACE1", u32 l, u64 T, T token records (u32 length +
// UTF-8 surface, u8 flags: bit 0 vague, bit 1 boundary), then T x l float32
// row-major, all little-endian.
std::string serialize_trace(const HiddenTrace& trace);
HiddenTrace parse_trace(std::string_view bytes);
void save_trace(const HiddenTrace& trace, const std::string& path);
HiddenTrace load_trace(const std::string& path);

// Human-readable dump for debugging; vectors are printed with float precision.
void write_trace_json(std::ostream& out, const HiddenTrace& trace);

}  // namespace vague
