#include "vague/checkpoint.h"

#include "vague/binary_io.h"
#include "vague/error.h"

namespace vague {
namespace {

constexpr std::string_view kModelMagic = "VLMODEL1";

}  // namespace

std::string serialize_checkpoint(const ModelConfig& config, const ModelParams& params) {
  config.validate();
  params.check_shapes(config);
  ByteWriter w;
  w.raw(kModelMagic);
  for (auto dim : {config.vocab_size, config.embed_dim, config.hidden_dim, config.fusion_dim, config.max_len,
                   ModelConfig::kClasses}) {
    w.u32(static_cast<std::uint32_t>(dim));
  }
  w.f64(config.alpha);
  w.f64(config.beta);
  w.u8(config.variant == GruVariant::kAsPrinted ? 0 : 1);
  w.u8(config.freeze_embeddings ? 1 : 0);
  params.for_each([&](const std::string&, const Matrix& m) {
    w.u32(static_cast<std::uint32_t>(m.rows()));
    w.u32(static_cast<std::uint32_t>(m.cols()));
    for (double v : m.values()) w.f32(static_cast<float>(v));
  });
  return w.take();
}

Checkpoint parse_checkpoint(std::string_view bytes) {
  ByteReader r(bytes, "checkpoint");
  if (r.remaining() < kModelMagic.size() || r.raw(kModelMagic.size()) != kModelMagic) {
    throw DataError("checkpoint: bad header magic (expected VLMODEL1)");
  }
  Checkpoint ck;
  auto& c = ck.config;
  c.vocab_size = r.u32();
  c.embed_dim = r.u32();
  c.hidden_dim = r.u32();
  c.fusion_dim = r.u32();
  c.max_len = r.u32();
  if (const auto classes = r.u32(); classes != ModelConfig::kClasses) {
    throw DataError("checkpoint: class count " + std::to_string(classes) + " (expected 2)");
  }
  c.alpha = r.f64();
  c.beta = r.f64();
  const auto variant = r.u8();
  if (variant > 1) throw DataError("checkpoint: unknown gru variant code " + std::to_string(variant));
  c.variant = variant == 0 ? GruVariant::kAsPrinted : GruVariant::kStandardReset;
  c.freeze_embeddings = r.u8() != 0;
  try {
    c.validate();
  } catch (const PreconditionError& e) {
    throw DataError(std::string("checkpoint: invalid config: ") + e.what());
  }

  // Reject headers whose tensors could not fit in the remaining bytes before allocating.
  const double V = c.vocab_size, D = c.embed_dim, d = c.hidden_dim, l = c.fusion_dim;
  const double values = V * D + 2 * (3 * d * D + 3 * d * d + 3 * d) + l * 2 * d + l + V * l + 2 * l;
  if (values * 4 > static_cast<double>(r.remaining())) {
    throw DataError("checkpoint: truncated data (config implies " + std::to_string(static_cast<std::uint64_t>(values)) +
                    " parameters)");
  }
  ck.params = ModelParams::zeros(c);
  ck.params.for_each([&](const std::string& name, Matrix& m) {
    const auto rows = r.u32();
    const auto cols = r.u32();
    if (rows != m.rows() || cols != m.cols()) {
      throw DataError("checkpoint: tensor " + name + " is " + std::to_string(rows) + "x" + std::to_string(cols) +
                      ", config implies " + m.shape());
    }
    r.require(m.size() * 4);
    for (auto& v : m.values()) v = static_cast<double>(r.f32());
  });
  if (!r.at_end()) throw DataError("checkpoint: " + std::to_string(r.remaining()) + " trailing bytes");
  return ck;
}

void save_checkpoint(const std::string& path, const ModelConfig& config, const ModelParams& params) {
  write_file(path, serialize_checkpoint(config, params));
}

Checkpoint load_checkpoint(const std::string& path) { return parse_checkpoint(read_file(path)); }

}  // namespace vague
