#include "vague/lexicon.h"

#include <algorithm>
#include <sstream>

#include "vague/binary_io.h"
#include "vague/error.h"
#include "vague/text.h"

namespace vague {
namespace {

struct BuiltinGroup {
  VagueCategory category;
  std::vector<std::string_view> phrases;
};

const std::vector<BuiltinGroup>& builtin_groups() {
  static const std::vector<BuiltinGroup> groups = {
      {VagueCategory::kCondition,
       {"depending", "necessary", "appropriate", "inappropriate", "as needed", "as applicable",
        "otherwise reasonably", "sometimes", "from time to time"}},
      {VagueCategory::kGeneralization,
       {"generally", "mostly", "widely", "general", "commonly", "usually", "normally", "typically",
        "largely", "often", "primarily", "among other things"}},
      {VagueCategory::kModality,
       {"may", "might", "can", "could", "would", "likely", "possible", "possibly"}},
      {VagueCategory::kNumericQuantifier,
       {"anyone", "certain", "everyone", "numerous", "some", "most", "few", "much", "many",
        "various", "including but not limited to"}},
  };
  return groups;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

}  // namespace

std::string_view category_name(VagueCategory category) {
  switch (category) {
    case VagueCategory::kCondition:
      return "Condition";
    case VagueCategory::kGeneralization:
      return "Generalization";
    case VagueCategory::kModality:
      return "Modality";
    case VagueCategory::kNumericQuantifier:
      return "NumericQuantifier";
  }
  return "?";
}

std::optional<VagueCategory> parse_category(std::string_view name) {
  std::string key;
  for (char c : name) {
    if (c != ' ' && c != '_' && c != '-') key.push_back(c);
  }
  key = to_lower(key);
  if (key == "condition") return VagueCategory::kCondition;
  if (key == "generalization") return VagueCategory::kGeneralization;
  if (key == "modality") return VagueCategory::kModality;
  if (key == "numericquantifier") return VagueCategory::kNumericQuantifier;
  return std::nullopt;
}

std::string LexiconEntry::phrase() const { return join(words, " "); }

VagueLexicon::VagueLexicon(std::vector<LexiconEntry> entries) {
  entries_.reserve(entries.size());
  for (auto& entry : entries) {
    // Normalize through the tokenizer's own word splitter so lookups agree.
    entry.words = split_words(to_lower(join(entry.words, " ")));
    if (entry.words.empty()) throw DataError("lexicon: empty phrase");
    auto phrase = entry.phrase();
    if (!index_.emplace(phrase, entries_.size()).second) {
      throw DataError("lexicon: duplicate phrase '" + phrase + "'");
    }
    max_words_ = std::max(max_words_, entry.words.size());
    entries_.push_back(std::move(entry));
  }
}

VagueLexicon VagueLexicon::builtin() {
  std::vector<LexiconEntry> entries;
  for (const auto& group : builtin_groups()) {
    for (auto phrase : group.phrases) {
      entries.push_back({split_words(phrase), group.category});
    }
  }
  return VagueLexicon(std::move(entries));
}

VagueLexicon VagueLexicon::parse(std::string_view text) {
  std::vector<LexiconEntry> entries;
  std::optional<VagueCategory> current;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto where = "lexicon line " + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') throw DataError(where + ": unterminated category header '" + line + "'");
      const auto name = trim(std::string_view(line).substr(1, line.size() - 2));
      current = parse_category(name);
      if (!current) throw DataError(where + ": unknown category '" + name + "'");
      continue;
    }
    if (!current) throw DataError(where + ": phrase '" + line + "' appears before any category header");
    auto words = split_words(to_lower(line));
    if (words.empty()) throw DataError(where + ": phrase '" + line + "' has no words");
    entries.push_back({std::move(words), *current});
  }
  return VagueLexicon(std::move(entries));
}

VagueLexicon VagueLexicon::load(const std::string& path) { return parse(read_file(path)); }

std::string VagueLexicon::serialize() const {
  std::string out;
  for (auto category : {VagueCategory::kCondition, VagueCategory::kGeneralization,
                        VagueCategory::kModality, VagueCategory::kNumericQuantifier}) {
    if (count(category) == 0) continue;
    out += "[" + std::string(category_name(category)) + "]\n";
    for (const auto& e : entries_) {
      if (e.category == category) out += e.phrase() + "\n";
    }
  }
  return out;
}

std::size_t VagueLexicon::count(VagueCategory category) const {
  return static_cast<std::size_t>(std::count_if(
      entries_.begin(), entries_.end(), [&](const auto& e) { return e.category == category; }));
}

std::size_t VagueLexicon::longest_match(std::span<const std::string> words, std::size_t pos) const {
  const auto limit = std::min(max_words_, words.size() - std::min(pos, words.size()));
  for (auto len = limit; len >= 1; --len) {
    std::string candidate = words[pos];
    for (std::size_t k = 1; k < len; ++k) {
      candidate += ' ';
      candidate += words[pos + k];
    }
    if (index_.count(candidate) > 0) return len;
  }
  return 0;
}

VagueLexicon load_lexicon(const std::optional<std::string>& path) {
  return path ? VagueLexicon::load(*path) : VagueLexicon::builtin();
}

}  // namespace vague
