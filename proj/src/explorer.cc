#include "vague/explorer.h"

#include <algorithm>
#include <iterator>

#include "vague/error.h"

namespace vague {
namespace {

void check_span(const HiddenTrace& trace, TokenSpan span, std::string_view what) {
  if (span.first > span.last || span.last >= trace.size()) {
    throw PreconditionError(std::string(what) + " span [" + std::to_string(span.first) + ", " +
                            std::to_string(span.last) + "] is not within [0, " + std::to_string(trace.size()) + ")");
  }
}

void check_threshold(double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw PreconditionError("threshold " + std::to_string(threshold) + " must lie in (0, 1)");
  }
}

bool all_above(const HiddenTrace& trace, std::size_t t, const DimensionSet& dims, double threshold) {
  for (auto j : dims) {
    if (!(trace.value(t, j) > threshold)) return false;
  }
  return true;
}

}  // namespace

std::string_view mode_name(QueryMode mode) {
  return mode == QueryMode::kIntersection ? "intersection" : "phrase_only";
}

QueryMode parse_mode(std::string_view name) {
  if (name == "intersection") return QueryMode::kIntersection;
  if (name == "phrase_only") return QueryMode::kPhraseOnly;
  throw PreconditionError("unknown query mode '" + std::string(name) + "' (expected intersection or phrase_only)");
}

DimensionSet on_dimensions(const HiddenTrace& trace, TokenSpan span, double threshold) {
  check_span(trace, span, "selection");
  DimensionSet out;
  for (std::size_t j = 0; j < trace.dim(); ++j) {
    bool on = true;
    for (auto t = span.first; t <= span.last && on; ++t) on = trace.value(t, j) > threshold;
    if (on) out.push_back(j);
  }
  return out;
}

QueryResult query_dimensions(const HiddenTrace& trace, const Selection& selection, QueryMode mode) {
  check_threshold(selection.threshold);
  check_span(trace, selection.phrase, "phrase");
  check_span(trace, selection.context, "context");
  if (!selection.context.contains(selection.phrase)) {
    throw PreconditionError("context span must contain the phrase span");
  }
  QueryResult r;
  r.phrase_dims = on_dimensions(trace, selection.phrase, selection.threshold);
  r.context_dims = on_dimensions(trace, selection.context, selection.threshold);
  if (mode == QueryMode::kIntersection) {
    std::set_intersection(r.phrase_dims.begin(), r.phrase_dims.end(), r.context_dims.begin(), r.context_dims.end(),
                          std::back_inserter(r.query));
  } else {
    std::set_difference(r.phrase_dims.begin(), r.phrase_dims.end(), r.context_dims.begin(), r.context_dims.end(),
                        std::back_inserter(r.query));
  }
  return r;
}

std::vector<MatchResult> find_matches(const HiddenTrace& trace, const DimensionSet& query,
                                      const MatchOptions& options) {
  if (query.empty()) throw PreconditionError("find_matches: query dimension set is empty");
  if (options.max_len < 1) throw PreconditionError("find_matches: max_len must be >= 1");
  check_threshold(options.threshold);
  for (auto j : query) {
    if (j >= trace.dim()) {
      throw PreconditionError("find_matches: dimension " + std::to_string(j) + " out of range [0, " +
                              std::to_string(trace.dim()) + ")");
    }
  }
  if (!std::is_sorted(query.begin(), query.end()) ||
      std::adjacent_find(query.begin(), query.end()) != query.end()) {
    throw PreconditionError("find_matches: query dimensions must be sorted and unique");
  }

  // Non-query dimensions: candidates for the extra-on count.
  DimensionSet others;
  for (std::size_t j = 0, q = 0; j < trace.dim(); ++j) {
    if (q < query.size() && query[q] == j) {
      ++q;
    } else {
      others.push_back(j);
    }
  }

  std::vector<MatchResult> results;
  auto emit = [&](std::size_t p, std::size_t q) {
    MatchResult m;
    m.truncated = q - p + 1 > options.max_len;
    m.region = {p, m.truncated ? p + options.max_len - 1 : q};
    for (auto j : others) {
      bool on = true;
      for (auto t = m.region.first; t <= m.region.last && on; ++t) on = trace.value(t, j) > options.threshold;
      if (on) ++m.extra_on_count;
    }
    results.push_back(m);
  };

  const auto n = trace.size();
  std::size_t t = 0;
  while (t < n) {
    if (!all_above(trace, t, query, options.threshold)) {
      ++t;
      continue;
    }
    const auto start = t;
    while (t + 1 < n && all_above(trace, t + 1, query, options.threshold) &&
           !(options.within_sentence && trace.token(t).is_boundary)) {
      ++t;
    }
    emit(start, t);
    ++t;
  }

  std::stable_sort(results.begin(), results.end(), [](const MatchResult& a, const MatchResult& b) {
    if (a.extra_on_count != b.extra_on_count) return a.extra_on_count < b.extra_on_count;
    if (a.length() != b.length()) return a.length() < b.length();
    return a.region.first < b.region.first;
  });
  if (results.size() > options.top_k) results.resize(options.top_k);
  for (std::size_t i = 0; i < results.size(); ++i) results[i].rank = i + 1;
  return results;
}

std::map<std::size_t, std::size_t> length_histogram(std::span<const MatchResult> results) {
  std::map<std::size_t, std::size_t> hist;
  for (const auto& r : results) ++hist[r.length()];
  return hist;
}

std::string span_text(const HiddenTrace& trace, TokenSpan span) {
  check_span(trace, span, "text");
  std::string out;
  for (auto t = span.first; t <= span.last; ++t) {
    if (t > span.first) out += ' ';
    out += trace.token(t).surface;
  }
  return out;
}

std::string format_matches_tsv(const HiddenTrace& trace, std::span<const MatchResult> matches) {
  std::string out = "rank\tspan\textra_on_count\ttext\n";
  for (const auto& m : matches) {
    out += std::to_string(m.rank) + '\t' + std::to_string(m.region.first) + '-' + std::to_string(m.region.last) +
           '\t' + std::to_string(m.extra_on_count) + '\t' + span_text(trace, m.region) + '\n';
  }
  return out;
}

}  // namespace vague
