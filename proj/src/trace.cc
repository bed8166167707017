#include "vague/trace.h"

#include <ostream>

#include "json.hpp"

#include "vague/binary_io.h"
#include "vague/error.h"
#include "vague/training.h"

namespace vague {
namespace {

constexpr std::string_view kTraceMagic = "VLTRACE1";
constexpr std::uint8_t kFlagVague = 1;
constexpr std::uint8_t kFlagBoundary = 2;

}  // namespace

HiddenTrace::HiddenTrace(std::vector<TraceToken> tokens, std::size_t dim, std::vector<float> values)
    : tokens_(std::move(tokens)), dim_(dim), values_(std::move(values)) {
  if (values_.size() != tokens_.size() * dim_) {
    throw DataError("trace: " + std::to_string(tokens_.size()) + " tokens x " + std::to_string(dim_) +
                    " dims needs " + std::to_string(tokens_.size() * dim_) + " values, got " +
                    std::to_string(values_.size()));
  }
}

std::size_t HiddenTrace::vague_count() const {
  std::size_t n = 0;
  for (const auto& t : tokens_) n += t.is_vague ? 1 : 0;
  return n;
}

HiddenTrace build_trace(const ModelParams& params, const ModelConfig& config, const Corpus& corpus) {
  std::vector<TraceToken> tokens;
  std::vector<float> values;
  for (const auto& sentence : corpus.sentences) {
    const auto seq = to_sequence(sentence, config.max_len);
    const auto rec = encode(seq, params, config);
    for (std::size_t t = 0; t < seq.length; ++t) {
      const auto& tok = (t + 1 == seq.length) ? sentence.tokens.back() : sentence.tokens[t];
      tokens.push_back({tok.surface, tok.is_vague, tok.surface == kEosToken});
      for (double v : rec.fused[t]) values.push_back(static_cast<float>(v));
    }
  }
  return HiddenTrace(std::move(tokens), config.fusion_dim, std::move(values));
}

HiddenTrace export_trace(const ModelParams& params, const ModelConfig& config, const Corpus& corpus,
                         const std::string& out_path, std::optional<std::size_t> expected_max_len,
                         std::optional<std::size_t> expected_dim) {
  if (corpus.vocabulary.size() != config.vocab_size) {
    throw DataError("export: corpus vocabulary has " + std::to_string(corpus.vocabulary.size()) +
                    " entries but the checkpoint was trained with V=" + std::to_string(config.vocab_size));
  }
  if (expected_max_len && *expected_max_len != config.max_len) {
    throw DataError("export: requested N=" + std::to_string(*expected_max_len) + " but the checkpoint has N=" +
                    std::to_string(config.max_len));
  }
  if (expected_dim && *expected_dim != config.fusion_dim) {
    throw DataError("export: requested l=" + std::to_string(*expected_dim) + " but the checkpoint has l=" +
                    std::to_string(config.fusion_dim));
  }
  auto trace = build_trace(params, config, corpus);
  save_trace(trace, out_path);
  return trace;
}

std::string serialize_trace(const HiddenTrace& trace) {
  ByteWriter w;
  w.raw(kTraceMagic);
  w.u32(static_cast<std::uint32_t>(trace.dim()));
  w.u64(trace.size());
  for (const auto& t : trace.tokens()) {
    w.str(t.surface);
    w.u8(static_cast<std::uint8_t>((t.is_vague ? kFlagVague : 0) | (t.is_boundary ? kFlagBoundary : 0)));
  }
  for (float v : trace.values()) w.f32(v);
  return w.take();
}

HiddenTrace parse_trace(std::string_view bytes) {
  ByteReader r(bytes, "trace");
  if (r.remaining() < kTraceMagic.size() || r.raw(kTraceMagic.size()) != kTraceMagic) {
    throw DataError("trace: bad header magic (expected VLTRACE1)");
  }
  const std::size_t dim = r.u32();
  const auto count = r.u64();
  // Each token record is at least 5 bytes.
  if (count > r.remaining() / 5) throw DataError("trace: truncated data (token count exceeds file size)");
  std::vector<TraceToken> tokens(count);
  for (auto& t : tokens) {
    t.surface = r.str();
    const auto flags = r.u8();
    if (flags > (kFlagVague | kFlagBoundary)) throw DataError("trace: invalid token flag byte");
    t.is_vague = (flags & kFlagVague) != 0;
    t.is_boundary = (flags & kFlagBoundary) != 0;
  }
  if (dim != 0 && count > r.remaining() / 4 / dim) {
    throw DataError("trace: truncated data (" + std::to_string(count) + " x " + std::to_string(dim) +
                    " vectors need " + std::to_string(count * dim * 4) + " bytes, have " +
                    std::to_string(r.remaining()) + ")");
  }
  std::vector<float> values(count * dim);
  for (auto& v : values) v = r.f32();
  if (!r.at_end()) throw DataError("trace: length inconsistency, " + std::to_string(r.remaining()) + " trailing bytes");
  return HiddenTrace(std::move(tokens), dim, std::move(values));
}

void save_trace(const HiddenTrace& trace, const std::string& path) { write_file(path, serialize_trace(trace)); }

HiddenTrace load_trace(const std::string& path) { return parse_trace(read_file(path)); }

void write_trace_json(std::ostream& out, const HiddenTrace& trace) {
  nlohmann::json tokens = nlohmann::json::array();
  for (std::size_t t = 0; t < trace.size(); ++t) {
    const auto& tok = trace.token(t);
    const auto vec = trace.vector(t);
    tokens.push_back({{"surface", tok.surface},
                      {"is_vague", tok.is_vague},
                      {"is_boundary", tok.is_boundary},
                      {"vector", std::vector<float>(vec.begin(), vec.end())}});
  }
  nlohmann::json doc = {{"format", "VLTRACE1"}, {"l", trace.dim()}, {"token_count", trace.size()}, {"tokens", tokens}};
  out << doc.dump(1) << '\n';
}

}  // namespace vague
