#include <doctest.h>

#include <filesystem>
#include <random>

#include "support/oracles.h"
#include "support/synthetic.h"
#include "vague/error.h"
#include "vague/explorer.h"
#include "vague/trace.h"
#include "vague/training.h"

using namespace vague;

namespace {

HiddenTrace trace_from_rows(const std::vector<std::vector<float>>& rows) {
  std::vector<TraceToken> toks;
  std::vector<float> values;
  for (std::size_t t = 0; t < rows.size(); ++t) {
    toks.push_back({"t" + std::to_string(t), false, t + 1 == rows.size()});
    values.insert(values.end(), rows[t].begin(), rows[t].end());
  }
  return HiddenTrace(std::move(toks), rows.empty() ? 0 : rows[0].size(), std::move(values));
}

Corpus two_sentence_corpus() {
  const std::vector<RawDocument> docs = {
      {"a", "We may share data.\nWe collect your email and contacts."}};
  return preprocess(docs, VagueLexicon::builtin(), 20);
}

ModelConfig trace_model(const Corpus& corpus) {
  ModelConfig c;
  c.vocab_size = corpus.vocabulary.size();
  c.embed_dim = 4;
  c.hidden_dim = 5;
  c.fusion_dim = 6;
  c.max_len = 10;
  return c;
}

}  // namespace

TEST_CASE("trace construction and file format") {
  const auto corpus = two_sentence_corpus();
  REQUIRE(corpus.sentences.size() == 2);
  REQUIRE(corpus.sentences[0].tokens.size() == 5);
  REQUIRE(corpus.sentences[1].tokens.size() == 7);
  const auto c = trace_model(corpus);
  const auto p = ModelParams::initialize(c, 3);
  const auto trace = build_trace(p, c, corpus);
  CHECK(trace.size() == 12);
  CHECK(trace.dim() == 6);
  CHECK(trace.values().size() == 72);
  CHECK(trace.vague_count() == 1);
  CHECK(trace.token(4).is_boundary);
  CHECK(trace.token(1).surface == "may");

  SUBCASE("vectors equal the fused states of encode") {
    const auto rec = encode(to_sequence(corpus.sentences[1], c.max_len), p, c);
    for (std::size_t j = 0; j < 6; ++j) CHECK(trace.value(5 + 2, j) == static_cast<float>(rec.fused[2][j]));
  }
  SUBCASE("zero fusion parameters give zero vectors") {
    auto z = p;
    z.fusion_w.fill(0.0);
    z.fusion_b.fill(0.0);
    const auto zt = build_trace(z, c, corpus);
    for (float v : zt.values()) CHECK(v == 0.0f);
  }
  SUBCASE("round trip is bitwise") {
    const auto bytes = serialize_trace(trace);
    CHECK(bytes.substr(0, 8) == "VLTRACE1");
    CHECK(parse_trace(bytes) == trace);
    CHECK_THROWS_AS(parse_trace(bytes.substr(0, bytes.size() - 2)), DataError);
    auto bad = bytes;
    bad[0] = 'W';
    CHECK_THROWS_AS(parse_trace(bad), DataError);
  }
  SUBCASE("export checks agreement with the corpus") {
    const auto path = (std::filesystem::temp_directory_path() / "vague_trace_test.bin").string();
    const auto exported = export_trace(p, c, corpus, path, 10, 6);
    CHECK(load_trace(path) == exported);
    CHECK_THROWS_AS(export_trace(p, c, corpus, path, 50, 6), DataError);
    CHECK_THROWS_AS(export_trace(p, c, corpus, path, 10, 200), DataError);
    auto wide = c;
    wide.vocab_size = c.vocab_size + 1;
    CHECK_THROWS_AS(export_trace(ModelParams::initialize(wide, 1), wide, corpus, path), DataError);
    std::filesystem::remove(path);
  }
  SUBCASE("size mismatch") {
    CHECK_THROWS_AS(HiddenTrace({TraceToken{}}, 3, std::vector<float>(2)), DataError);
  }
}

TEST_CASE("on_dimensions and query_dimensions") {
  const auto trace = trace_from_rows({{0.5f, 0.1f, 0.4f}, {0.6f, 0.2f, 0.35f}, {-0.5f, 0.9f, 0.95f}});
  CHECK(on_dimensions(trace, {0, 1}, 0.3) == DimensionSet{0, 2});
  CHECK(on_dimensions(trace, {2, 2}, 0.3) == DimensionSet{1, 2});
  CHECK(on_dimensions(trace, {0, 2}, 0.99).empty());
  CHECK_THROWS_AS(on_dimensions(trace, {1, 3}, 0.3), PreconditionError);
  CHECK_THROWS_AS(on_dimensions(trace, {2, 1}, 0.3), PreconditionError);

  SUBCASE("context equal to phrase") {
    const auto r = query_dimensions(trace, {{0, 1}, {0, 1}, 0.3});
    CHECK(r.query == r.phrase_dims);
  }
  SUBCASE("set algebra") {
    // dims 0..7: phrase token on {1,2,5}, context adds a token on {2,5,7}
    std::vector<float> a(8, 0.0f), b(8, 0.0f);
    for (int j : {1, 2, 5}) a[j] = 0.8f;
    for (int j : {2, 5, 7}) b[j] = 0.8f;
    const auto t = trace_from_rows({a, b});
    const Selection sel{{0, 0}, {0, 1}, 0.3};
    const auto r = query_dimensions(t, sel);
    CHECK(r.phrase_dims == DimensionSet{1, 2, 5});
    CHECK(r.context_dims == DimensionSet{2, 5});
    CHECK(r.query == DimensionSet{2, 5});
    CHECK(query_dimensions(t, sel, QueryMode::kPhraseOnly).query == DimensionSet{1});
  }
  SUBCASE("preconditions") {
    CHECK_THROWS_AS(query_dimensions(trace, {{0, 1}, {1, 2}, 0.3}), PreconditionError);
    CHECK_THROWS_AS(query_dimensions(trace, {{0, 1}, {0, 1}, 1.0}), PreconditionError);
    CHECK_THROWS_AS(parse_mode("union"), PreconditionError);
  }
}

TEST_CASE("find_matches examples") {
  // query dim 0; runs at [0,1] and [3,3]; dim 1 is also on over [3,3]
  const auto trace = trace_from_rows({{0.9f, 0.0f}, {0.8f, 0.5f}, {0.1f, 0.9f}, {0.7f, 0.6f}, {0.0f, 0.0f}});
  const auto m = find_matches(trace, {0});
  REQUIRE(m.size() == 2);
  CHECK(m[0].region == TokenSpan{0, 1});
  CHECK(m[0].extra_on_count == 0);
  CHECK(m[0].rank == 1);
  CHECK(m[1].region == TokenSpan{3, 3});
  CHECK(m[1].extra_on_count == 1);
  CHECK(format_matches_tsv(trace, m) == "rank\tspan\textra_on_count\ttext\n1\t0-1\t0\tt0 t1\n2\t3-3\t1\tt3\n");

  MatchOptions top1;
  top1.top_k = 1;
  CHECK(find_matches(trace, {0}, top1).size() == 1);
  CHECK(find_matches(trace, {0, 1}).size() == 2);
  CHECK_THROWS_AS(find_matches(trace, {}), PreconditionError);
  CHECK_THROWS_AS(find_matches(trace, {2}), PreconditionError);
  CHECK_THROWS_AS(find_matches(trace, {1, 0}), PreconditionError);
  MatchOptions zero;
  zero.max_len = 0;
  CHECK_THROWS_AS(find_matches(trace, {0}, zero), PreconditionError);

  SUBCASE("self match only") {
    const auto t = trace_from_rows({{0.0f, 0.0f}, {0.9f, 0.4f}, {0.9f, 0.5f}, {0.0f, 0.0f}});
    const auto q = query_dimensions(t, {{1, 2}, {1, 2}, 0.3}).query;
    const auto r = find_matches(t, q);
    REQUIRE(r.size() == 1);
    CHECK(r[0].region == TokenSpan{1, 2});
    CHECK(r[0].extra_on_count == 0);
  }
  SUBCASE("long runs are truncated to max_len") {
    std::vector<std::vector<float>> rows(15, {0.9f, 0.0f});
    const auto r = find_matches(trace_from_rows(rows), {0});
    REQUIRE(r.size() == 1);
    CHECK(r[0].region == TokenSpan{0, 9});
    CHECK(r[0].truncated);
  }
}

TEST_CASE("length_histogram") {
  std::vector<MatchResult> r(3);
  r[0].region = {0, 1};
  r[1].region = {4, 5};
  r[2].region = {7, 9};
  CHECK(length_histogram(r) == std::map<std::size_t, std::size_t>{{2, 2}, {3, 1}});
  CHECK(length_histogram({}).empty());
  CHECK(length_histogram(std::span(r).first(1)).size() == 1);
}

TEST_CASE("find_matches equals the brute-force oracle") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<std::size_t> len(1, 200), dim(1, 8);
  for (int trial = 0; trial < 30; ++trial) {
    const auto trace = testing::random_trace(len(rng), dim(rng), rng(), 6);
    for (double tau : {0.1, 0.3, 0.5}) {
      for (bool within : {false, true}) {
        MatchOptions opt;
        opt.threshold = tau;
        opt.within_sentence = within;
        opt.max_len = 1 + trial % 10;
        DimensionSet q;
        for (std::size_t j = 0; j < trace.dim(); ++j)
          if (rng() % 3 == 0) q.push_back(j);
        if (q.empty()) q.push_back(0);
        CHECK(find_matches(trace, q, opt) == testing::brute_force_matches(trace, q, opt));
      }
    }
  }
}

TEST_CASE("raising the threshold never grows S1") {
  std::mt19937_64 rng(23);
  const auto trace = testing::random_trace(300, 8, 5);
  std::uniform_int_distribution<std::size_t> start(0, 299), width(0, 4);
  for (int i = 0; i < 300; ++i) {
    const auto a = start(rng);
    const TokenSpan span{a, std::min<std::size_t>(299, a + width(rng))};
    const auto lo = on_dimensions(trace, span, 0.1), hi = on_dimensions(trace, span, 0.5);
    CHECK(std::includes(lo.begin(), lo.end(), hi.begin(), hi.end()));
  }
}
