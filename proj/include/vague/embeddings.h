#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "vague/corpus.h"
#include "vague/numerics.h"

namespace vague {

struct EmbeddingTable {
  Matrix table;             // vocabulary.size() x dim, padding row zero
  std::size_t matched = 0;  // non-padding words found in the file
  std::size_t unmatched = 0;
};

// Reads `word v_1 ... v_dim` lines (an optional word2vec "count dim" header
// line is accepted). Vocabulary words found in the file take its vector;
// multi-word surfaces also match their underscore-joined form. All other
// rows are standard normal draws from `seed`. Throws DataError when a row's
// width differs from `dim`.
EmbeddingTable parse_embeddings(std::string_view text, const Vocabulary& vocabulary, std::size_t dim,
                                std::uint64_t seed);
EmbeddingTable load_embeddings(const std::string& path, const Vocabulary& vocabulary, std::size_t dim,
                               std::uint64_t seed);

}  // namespace vague
