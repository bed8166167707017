#pragma once

// Small random models and sequences for gradient and oracle checks.

#include <cstdint>
#include <random>
#include <vector>

#include "vague/model.h"
#include "vague/numerics.h"

namespace vague::testing {

inline ModelConfig tiny_config(GruVariant variant) {
  ModelConfig c;
  c.vocab_size = 12;
  c.embed_dim = 4;
  c.hidden_dim = 6;
  c.fusion_dim = 5;
  c.max_len = 6;
  c.variant = variant;
  return c;
}

// Sentence of `length` real ids in [3, V) ending with id 2, padded to max_len.
inline Sequence random_sequence(const ModelConfig& c, std::size_t length, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::int32_t> word(3, static_cast<std::int32_t>(c.vocab_size) - 1);
  std::bernoulli_distribution vague(0.3);
  Sequence s;
  s.ids.assign(c.max_len, 0);
  s.vague.assign(c.max_len, 0);
  s.length = length;
  for (std::size_t t = 0; t + 1 < length; ++t) {
    s.ids[t] = word(rng);
    s.vague[t] = vague(rng) ? 1 : 0;
  }
  s.ids[length - 1] = 2;
  return s;
}

// Random parameters with a larger spread than the initializer so every gate
// is exercised away from its linear region.
inline ModelParams random_params(const ModelConfig& c, std::uint64_t seed, double scale = 0.8) {
  auto p = ModelParams::zeros(c);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  p.for_each([&](const std::string&, Matrix& m) {
    for (auto& v : m.values()) v = u(rng);
  });
  for (auto& v : p.embedding.row(0)) v = 0.0;
  return p;
}

inline std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace vague::testing
