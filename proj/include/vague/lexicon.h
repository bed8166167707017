#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace vague {

enum class VagueCategory { kCondition, kGeneralization, kModality, kNumericQuantifier };

std::string_view category_name(VagueCategory category);
std::optional<VagueCategory> parse_category(std::string_view name);

struct LexiconEntry {
  std::vector<std::string> words;  // lowercase, nonempty
  VagueCategory category;

  std::string phrase() const;  // words joined by single spaces
};

// Set of vague terms, possibly multi-word, with greedy longest-match lookup.
class VagueLexicon {
 public:
  VagueLexicon() = default;

  // Normalizes every phrase (lowercase, punctuation split) and validates it.
  // Throws DataError on an empty or duplicate phrase.
  explicit VagueLexicon(std::vector<LexiconEntry> entries);

  // The 40 expert-identified terms: 9 condition, 12 generalization,
  // 8 modality and 11 numeric-quantifier phrases.
  static VagueLexicon builtin();

  // Parses the text format:
  //
  //   # comment
  //   [Condition]
  //   as needed
  //   [Modality]
  //   may
  //
  // Throws DataError naming the offending line on malformed input,
  // unknown categories or duplicate phrases.
  static VagueLexicon parse(std::string_view text);
  static VagueLexicon load(const std::string& path);

  std::string serialize() const;

  const std::vector<LexiconEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::size_t count(VagueCategory category) const;
  std::size_t max_phrase_words() const { return max_words_; }

  bool contains(std::string_view phrase) const { return index_.count(std::string(phrase)) > 0; }

  // Number of words of the longest phrase starting at words[pos], or 0.
  std::size_t longest_match(std::span<const std::string> words, std::size_t pos) const;

 private:
  std::vector<LexiconEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t max_words_ = 0;
};

// Loads `path` when given, otherwise returns the built-in lexicon.
VagueLexicon load_lexicon(const std::optional<std::string>& path);

}  // namespace vague
