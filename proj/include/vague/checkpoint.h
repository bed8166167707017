#pragma once

#include <string>
#include <string_view>

#include "vague/model.h"

namespace vague {

struct Checkpoint {
  ModelConfig config;
  ModelParams params;
};

// Layout: magic "VLMODEL1", config block (u32 V, D, d, l, N, C; f64 alpha,
// beta; u8 variant, u8 freeze), then each tensor in ModelParams order as
// u32 rows, u32 cols and row-major float32 values, all little-endian.
// Values are narrowed to float32, so save(load(save(p))) == save(p).
std::string serialize_checkpoint(const ModelConfig& config, const ModelParams& params);
Checkpoint parse_checkpoint(std::string_view bytes);

void save_checkpoint(const std::string& path, const ModelConfig& config, const ModelParams& params);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace vague
