#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vague/trace.h"

namespace vague {

inline constexpr double kDefaultThreshold = 0.3;

// Inclusive token range [first, last].
struct TokenSpan {
  std::size_t first = 0;
  std::size_t last = 0;

  std::size_t length() const { return last - first + 1; }
  bool contains(const TokenSpan& o) const { return first <= o.first && o.last <= last; }
  bool operator==(const TokenSpan&) const = default;
};

// Sorted, unique dimension indices.
using DimensionSet = std::vector<std::size_t>;

enum class QueryMode {
  kIntersection,  // S1 and S2
  kPhraseOnly,    // S1 minus S2
};

std::string_view mode_name(QueryMode mode);
QueryMode parse_mode(std::string_view name);  // throws PreconditionError

struct Selection {
  TokenSpan phrase;
  TokenSpan context;  // must contain `phrase`
  double threshold = kDefaultThreshold;
};

struct QueryResult {
  DimensionSet phrase_dims;   // S1
  DimensionSet context_dims;  // S2
  DimensionSet query;
};

struct MatchOptions {
  double threshold = kDefaultThreshold;
  std::size_t max_len = 10;
  std::size_t top_k = 50;
  bool within_sentence = false;  // do not let regions run past an end-of-sentence token
};

struct MatchResult {
  TokenSpan region;
  std::size_t extra_on_count = 0;  // non-query dims above threshold over the whole region
  std::size_t rank = 0;            // 1-based
  bool truncated = false;          // the underlying run was longer than max_len

  std::size_t length() const { return region.length(); }
  bool operator==(const MatchResult&) const = default;
};

// Dimensions whose value exceeds `threshold` at every position of `span`.
// Throws PreconditionError when the span is empty or out of bounds.
DimensionSet on_dimensions(const HiddenTrace& trace, TokenSpan span, double threshold);

QueryResult query_dimensions(const HiddenTrace& trace, const Selection& selection,
                             QueryMode mode = QueryMode::kIntersection);

// Maximal runs where every query dimension exceeds the threshold, cut to
// their first max_len tokens, ranked by (extra_on_count, length, position).
// Throws PreconditionError for an empty query or max_len == 0.
std::vector<MatchResult> find_matches(const HiddenTrace& trace, const DimensionSet& query,
                                      const MatchOptions& options = {});

std::map<std::size_t, std::size_t> length_histogram(std::span<const MatchResult> results);

// Surfaces of the span joined by single spaces.
std::string span_text(const HiddenTrace& trace, TokenSpan span);

// Header `rank\tspan\textra_on_count\ttext`, then one row per match with the
// span written as `first-last`.
std::string format_matches_tsv(const HiddenTrace& trace, std::span<const MatchResult> matches);

}  // namespace vague
