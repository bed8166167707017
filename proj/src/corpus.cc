#include "vague/corpus.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "vague/binary_io.h"
#include "vague/error.h"
#include "vague/text.h"

namespace vague {
namespace {

constexpr std::string_view kCorpusMagic{"VLCORP1\0", 8};

bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::string normalize_whitespace(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::string with_thousands(std::size_t n) {
  auto digits = std::to_string(n);
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i > 0 && (digits.size() - i) % 3 == 0) out.push_back(',');
    out.push_back(digits[i]);
  }
  return out;
}

std::string one_decimal(double pct) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(1);
  os << pct;
  return os.str();
}

}  // namespace

Vocabulary::Vocabulary()
    : Vocabulary(std::vector<std::string>{std::string(kPadToken), std::string(kUnkToken),
                                          std::string(kEosToken)}) {}

Vocabulary::Vocabulary(std::vector<std::string> words) : words_(std::move(words)) {
  if (words_.size() < 3 || words_[kPadId] != kPadToken || words_[kUnkId] != kUnkToken ||
      words_[kEosId] != kEosToken) {
    throw DataError("vocabulary: reserved entries <pad>, <unk>, </s> must occupy ids 0-2");
  }
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!ids_.emplace(words_[i], static_cast<std::int32_t>(i)).second) {
      throw DataError("vocabulary: duplicate word '" + words_[i] + "'");
    }
  }
}

std::int32_t Vocabulary::id(std::string_view word) const {
  auto it = ids_.find(std::string(word));
  return it == ids_.end() ? kUnkId : it->second;
}

bool Vocabulary::contains(std::string_view word) const { return ids_.count(std::string(word)) > 0; }

const std::string& Vocabulary::word(std::int32_t id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= words_.size()) {
    throw PreconditionError("vocabulary id " + std::to_string(id) + " out of range [0, " +
                            std::to_string(words_.size()) + ")");
  }
  return words_[static_cast<std::size_t>(id)];
}

std::size_t Corpus::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.tokens.size();
  return n;
}

IngestResult ingest(const std::string& manifest_path) {
  std::ifstream manifest(manifest_path);
  if (!manifest) throw DataError("cannot open manifest '" + manifest_path + "'");

  IngestResult result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(manifest, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      result.errors.push_back("manifest line " + std::to_string(line_no) + ": expected doc_id<TAB>path");
      continue;
    }
    RawDocument doc{line.substr(0, tab), {}};
    const auto path = line.substr(tab + 1);
    try {
      doc.text = read_file(path);
    } catch (const DataError& e) {
      result.errors.push_back(doc.id + ": " + e.what());
      continue;
    }
    if (!is_valid_utf8(doc.text)) {
      result.errors.push_back(doc.id + ": '" + path + "' is not valid UTF-8");
      continue;
    }
    result.documents.push_back(std::move(doc));
  }
  if (line_no == 0 || (result.documents.empty() && result.errors.empty())) {
    result.warnings.push_back("manifest '" + manifest_path + "' lists no documents");
  }
  return result;
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  auto flush = [&](std::size_t end) {
    auto s = normalize_whitespace(text.substr(start, end - start));
    if (!s.empty()) out.push_back(std::move(s));
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    bool boundary = c == '?' || c == '!' || c == '\n';
    if (c == '.') {
      const bool decimal = i > 0 && i + 1 < text.size() && is_digit(text[i - 1]) && is_digit(text[i + 1]);
      boundary = !decimal;
    }
    if (boundary) {
      flush(c == '\n' ? i : i + 1);
      start = i + 1;
    }
  }
  flush(text.size());
  return out;
}

std::vector<Token> tokenize(std::string_view sentence, const VagueLexicon& lexicon) {
  const auto words = split_words(to_lower(sentence));
  std::vector<Token> tokens;
  tokens.reserve(words.size() + 1);
  std::size_t pos = 0;
  while (pos < words.size()) {
    const auto len = lexicon.longest_match(words, pos);
    if (len == 0) {
      tokens.push_back({words[pos], kUnkId, false, 0});
      ++pos;
      continue;
    }
    std::string surface = words[pos];
    for (std::size_t k = 1; k < len; ++k) surface += " " + words[pos + k];
    tokens.push_back({std::move(surface), kUnkId, true, 0});
    pos += len;
  }
  tokens.push_back({std::string(kEosToken), kEosId, false, 0});
  return tokens;
}

std::vector<Sentence> filter_short(std::vector<Sentence> sentences) {
  std::erase_if(sentences, [](const Sentence& s) { return s.content_length() <= kMinContentTokensExclusive; });
  return sentences;
}

Vocabulary build_vocabulary(const std::vector<Sentence>& sentences, std::size_t max_size) {
  if (max_size < 4) throw PreconditionError("vocabulary size must be at least 4, got " + std::to_string(max_size));
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& s : sentences) {
    for (const auto& t : s.tokens) {
      if (t.surface == kEosToken || t.surface == kPadToken || t.surface == kUnkToken) continue;
      ++counts[t.surface];
    }
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::vector<std::string> words{std::string(kPadToken), std::string(kUnkToken), std::string(kEosToken)};
  for (std::size_t i = 0; i < ranked.size() && words.size() < max_size; ++i) {
    words.push_back(ranked[i].first);
  }
  return Vocabulary(std::move(words));
}

void index_corpus(Corpus& corpus) {
  std::size_t position = 0;
  for (auto& s : corpus.sentences) {
    for (auto& t : s.tokens) {
      t.vocab_id = corpus.vocabulary.id(t.surface);
      t.position = position++;
    }
  }
}

Corpus preprocess(const std::vector<RawDocument>& documents, const VagueLexicon& lexicon,
                  std::size_t vocab_size) {
  Corpus corpus;
  std::vector<Sentence> sentences;
  for (const auto& doc : documents) {
    corpus.doc_ids.push_back(doc.id);
    for (const auto& raw : split_sentences(doc.text)) {
      sentences.push_back({tokenize(raw, lexicon), doc.id});
    }
  }
  corpus.sentences = filter_short(std::move(sentences));
  corpus.vocabulary = build_vocabulary(corpus.sentences, vocab_size);
  index_corpus(corpus);
  return corpus;
}

CorpusStats corpus_stats(const Corpus& corpus) {
  CorpusStats stats;
  stats.n_policies = corpus.doc_ids.size();
  stats.n_sentences = corpus.sentences.size();
  for (const auto& s : corpus.sentences) {
    bool any_vague = false;
    for (const auto& t : s.tokens) {
      if (t.surface == kEosToken || t.surface == kPadToken) continue;
      ++stats.n_tokens;
      if (t.is_vague) {
        ++stats.n_vague_tokens;
        any_vague = true;
      }
    }
    if (any_vague) ++stats.n_sentences_with_vague;
  }
  if (stats.n_tokens > 0) {
    stats.pct_vague = 100.0 * static_cast<double>(stats.n_vague_tokens) / static_cast<double>(stats.n_tokens);
  }
  if (stats.n_sentences > 0) {
    stats.pct_sentences_with_vague =
        100.0 * static_cast<double>(stats.n_sentences_with_vague) / static_cast<double>(stats.n_sentences);
  }
  return stats;
}

std::string format_stats(const CorpusStats& stats) {
  const std::vector<std::pair<std::string, std::string>> rows = {
      {"total # of web privacy policies", with_thousands(stats.n_policies)},
      {"total # of sentences", with_thousands(stats.n_sentences)},
      {"total # of word tokens", with_thousands(stats.n_tokens)},
      {"total # and % of vague tokens",
       with_thousands(stats.n_vague_tokens) + " (" + one_decimal(stats.pct_vague) + "%)"},
      {"total # and % of sentences that contain at least one vague token",
       with_thousands(stats.n_sentences_with_vague) + " (" + one_decimal(stats.pct_sentences_with_vague) + "%)"},
  };
  std::size_t width = 0;
  for (const auto& [label, _] : rows) width = std::max(width, label.size());
  std::string out;
  for (const auto& [label, value] : rows) {
    out += label + std::string(width - label.size() + 2, ' ') + value + "\n";
  }
  return out;
}

std::string serialize_corpus(const Corpus& corpus) {
  ByteWriter w;
  w.raw(kCorpusMagic);
  w.u32(static_cast<std::uint32_t>(corpus.vocabulary.size()));
  for (const auto& word : corpus.vocabulary.words()) w.str(word);
  w.u32(static_cast<std::uint32_t>(corpus.doc_ids.size()));
  for (const auto& id : corpus.doc_ids) w.str(id);

  std::unordered_map<std::string, std::uint32_t> surface_index;
  std::vector<const std::string*> surfaces;
  std::unordered_map<std::string, std::uint32_t> doc_index;
  for (std::size_t i = 0; i < corpus.doc_ids.size(); ++i) {
    doc_index.emplace(corpus.doc_ids[i], static_cast<std::uint32_t>(i));
  }
  for (const auto& s : corpus.sentences) {
    for (const auto& t : s.tokens) {
      if (surface_index.emplace(t.surface, static_cast<std::uint32_t>(surfaces.size())).second) {
        surfaces.push_back(&t.surface);
      }
    }
  }
  w.u32(static_cast<std::uint32_t>(surfaces.size()));
  for (const auto* s : surfaces) w.str(*s);

  w.u64(corpus.sentences.size());
  for (const auto& s : corpus.sentences) {
    auto it = doc_index.find(s.doc_id);
    if (it == doc_index.end()) throw PreconditionError("sentence refers to unknown document '" + s.doc_id + "'");
    w.u32(it->second);
    w.u32(static_cast<std::uint32_t>(s.tokens.size()));
    for (const auto& t : s.tokens) {
      w.u32(surface_index.at(t.surface));
      w.u8(t.is_vague ? 1 : 0);
    }
  }
  return w.take();
}

Corpus parse_corpus(std::string_view bytes) {
  ByteReader r(bytes, "corpus");
  if (r.remaining() < kCorpusMagic.size() || r.raw(kCorpusMagic.size()) != kCorpusMagic) {
    throw DataError("corpus: bad header magic (expected VLCORP1)");
  }
  Corpus corpus;
  std::vector<std::string> words(r.u32());
  for (auto& w : words) w = r.str();
  corpus.vocabulary = Vocabulary(std::move(words));
  corpus.doc_ids.resize(r.u32());
  for (auto& id : corpus.doc_ids) id = r.str();
  std::vector<std::string> surfaces(r.u32());
  for (auto& s : surfaces) s = r.str();

  const auto n_sentences = r.u64();
  // Each sentence record is at least 8 bytes.
  if (n_sentences > r.remaining() / 8) throw DataError("corpus: truncated data (sentence count exceeds file size)");
  corpus.sentences.reserve(n_sentences);
  for (std::uint64_t i = 0; i < n_sentences; ++i) {
    Sentence s;
    const auto doc = r.u32();
    if (doc >= corpus.doc_ids.size()) throw DataError("corpus: sentence " + std::to_string(i) + " has bad document index");
    s.doc_id = corpus.doc_ids[doc];
    const auto n_tokens = r.u32();
    r.require(std::size_t{n_tokens} * 5);
    s.tokens.resize(n_tokens);
    for (auto& t : s.tokens) {
      const auto surface = r.u32();
      if (surface >= surfaces.size()) throw DataError("corpus: sentence " + std::to_string(i) + " has bad surface index");
      t.surface = surfaces[surface];
      const auto flags = r.u8();
      if (flags > 1) throw DataError("corpus: invalid token flag byte");
      t.is_vague = flags == 1;
    }
    if (s.tokens.empty() || s.tokens.back().surface != kEosToken) {
      throw DataError("corpus: sentence " + std::to_string(i) + " does not end with </s>");
    }
    corpus.sentences.push_back(std::move(s));
  }
  if (!r.at_end()) throw DataError("corpus: " + std::to_string(r.remaining()) + " trailing bytes");
  index_corpus(corpus);
  return corpus;
}

void save_corpus(const Corpus& corpus, const std::string& path) { write_file(path, serialize_corpus(corpus)); }

Corpus load_corpus(const std::string& path) { return parse_corpus(read_file(path)); }

}  // namespace vague
