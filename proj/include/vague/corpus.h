#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "vague/lexicon.h"

namespace vague {

inline constexpr std::int32_t kPadId = 0;
inline constexpr std::int32_t kUnkId = 1;
inline constexpr std::int32_t kEosId = 2;
inline constexpr std::string_view kPadToken = "<pad>";
inline constexpr std::string_view kUnkToken = "<unk>";
inline constexpr std::string_view kEosToken = "</s>";

// Sentences with this many content tokens or fewer are dropped.
inline constexpr std::size_t kMinContentTokensExclusive = 3;

struct Token {
  std::string surface;  // lowercased; multi-word lexicon matches joined by one space
  std::int32_t vocab_id = kUnkId;
  bool is_vague = false;
  std::size_t position = 0;  // offset in the concatenated corpus sequence

  bool operator==(const Token&) const = default;
};

struct Sentence {
  std::vector<Token> tokens;  // ends with the end-of-sentence token
  std::string doc_id;

  std::size_t content_length() const { return tokens.empty() ? 0 : tokens.size() - 1; }
  bool operator==(const Sentence&) const = default;
};

// Frequency-ranked word list: ids 0..2 are reserved for padding, unknown
// words and the end-of-sentence symbol.
class Vocabulary {
 public:
  Vocabulary();
  // `words` must start with the three reserved entries. Throws DataError.
  explicit Vocabulary(std::vector<std::string> words);

  std::int32_t id(std::string_view word) const;  // kUnkId when absent
  bool contains(std::string_view word) const;
  const std::string& word(std::int32_t id) const;
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }

  bool operator==(const Vocabulary& other) const { return words_ == other.words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::int32_t> ids_;
};

struct Corpus {
  Vocabulary vocabulary;
  std::vector<std::string> doc_ids;  // every ingested policy, including ones left with no sentences
  std::vector<Sentence> sentences;

  std::size_t token_count() const;  // all tokens including end-of-sentence markers
  bool operator==(const Corpus&) const = default;
};

struct CorpusStats {
  std::size_t n_policies = 0;
  std::size_t n_sentences = 0;
  std::size_t n_tokens = 0;  // word tokens, end-of-sentence markers excluded
  std::size_t n_vague_tokens = 0;
  double pct_vague = 0.0;  // exact percentage; rounded only when formatted
  std::size_t n_sentences_with_vague = 0;
  double pct_sentences_with_vague = 0.0;
};

struct RawDocument {
  std::string id;
  std::string text;
};

struct IngestResult {
  std::vector<RawDocument> documents;
  std::vector<std::string> errors;    // one per skipped document
  std::vector<std::string> warnings;
};

// Reads a manifest of `doc_id<TAB>path` lines. Unreadable or non-UTF-8
// documents are skipped and reported; a missing manifest throws DataError.
IngestResult ingest(const std::string& manifest_path);

// Rule-based split on '.', '?', '!' and line breaks. A '.' between two digits
// does not end a sentence. Whitespace inside each sentence is collapsed.
std::vector<std::string> split_sentences(std::string_view text);

// Lowercases, splits into words, greedily merges the longest lexicon phrase
// at each position and appends the end-of-sentence token. Vocabulary ids are
// left as kUnkId until index_corpus runs.
std::vector<Token> tokenize(std::string_view sentence, const VagueLexicon& lexicon);

std::vector<Sentence> filter_short(std::vector<Sentence> sentences);

// Reserved ids, then the top (max_size - 3) surfaces by descending frequency,
// ties broken lexicographically. Requires max_size >= 4.
Vocabulary build_vocabulary(const std::vector<Sentence>& sentences, std::size_t max_size);

// Assigns vocabulary ids and meta-sequence positions in place.
void index_corpus(Corpus& corpus);

// Full pipeline over already-ingested documents.
Corpus preprocess(const std::vector<RawDocument>& documents, const VagueLexicon& lexicon,
                  std::size_t vocab_size);

CorpusStats corpus_stats(const Corpus& corpus);

// Plain-text table with the dataset statistics row labels.
std::string format_stats(const CorpusStats& stats);

// Binary container with header magic "VLCORP1".
std::string serialize_corpus(const Corpus& corpus);
Corpus parse_corpus(std::string_view bytes);
void save_corpus(const Corpus& corpus, const std::string& path);
Corpus load_corpus(const std::string& path);

}  // namespace vague
