#include "vague/embeddings.h"

#include <charconv>
#include <random>
#include <unordered_map>
#include <vector>

#include "vague/binary_io.h"
#include "vague/error.h"

namespace vague {
namespace {

std::vector<std::string_view> fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const auto start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

bool parse_double(std::string_view s, double& out) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool is_count_header(const std::vector<std::string_view>& f) {
  if (f.size() != 2) return false;
  for (auto s : f) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string_view::npos) return false;
  }
  return true;
}

}  // namespace

EmbeddingTable parse_embeddings(std::string_view text, const Vocabulary& vocabulary, std::size_t dim,
                                std::uint64_t seed) {
  std::unordered_map<std::string, std::vector<double>> file_vectors;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    const auto f = fields(line);
    if (f.empty()) continue;
    if (line_no == 1 && is_count_header(f)) {
      if (std::stoul(std::string(f[1])) != dim) {
        throw DataError("embeddings: header declares dimension " + std::string(f[1]) + ", model expects " +
                        std::to_string(dim));
      }
      continue;
    }
    if (f.size() - 1 != dim) {
      throw DataError("embeddings line " + std::to_string(line_no) + ": " + std::to_string(f.size() - 1) +
                      " values, model expects " + std::to_string(dim));
    }
    std::vector<double> v(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      if (!parse_double(f[k + 1], v[k])) {
        throw DataError("embeddings line " + std::to_string(line_no) + ": bad number '" + std::string(f[k + 1]) + "'");
      }
    }
    file_vectors.emplace(std::string(f[0]), std::move(v));
  }

  EmbeddingTable out;
  out.table = Matrix(vocabulary.size(), dim);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  // Every row draws from the stream, so a word's random vector does not
  // depend on which other words the file covers.
  for (auto& v : out.table.values()) v = normal(rng);
  for (auto& v : out.table.row(kPadId)) v = 0.0;

  for (std::size_t id = 1; id < vocabulary.size(); ++id) {
    const auto& word = vocabulary.word(static_cast<std::int32_t>(id));
    auto it = file_vectors.find(word);
    if (it == file_vectors.end() && word.find(' ') != std::string::npos) {
      auto underscored = word;
      for (auto& c : underscored) c = c == ' ' ? '_' : c;
      it = file_vectors.find(underscored);
    }
    if (it == file_vectors.end()) {
      ++out.unmatched;
      continue;
    }
    ++out.matched;
    std::copy(it->second.begin(), it->second.end(), out.table.row(id).begin());
  }
  return out;
}

EmbeddingTable load_embeddings(const std::string& path, const Vocabulary& vocabulary, std::size_t dim,
                               std::uint64_t seed) {
  return parse_embeddings(read_file(path), vocabulary, dim, seed);
}

}  // namespace vague
