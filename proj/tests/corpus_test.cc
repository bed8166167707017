#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "support/synthetic.h"
#include "vague/binary_io.h"
#include "vague/corpus.h"
#include "vague/error.h"
#include "vague/lexicon.h"
#include "vague/text.h"

namespace fs = std::filesystem;
using namespace vague;

namespace {

std::vector<std::string> surfaces(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens) out.push_back(t.surface);
  return out;
}

Sentence make_sentence(std::vector<std::pair<std::string, bool>> words, std::string doc = "d") {
  Sentence s;
  s.doc_id = std::move(doc);
  for (auto& [w, v] : words) s.tokens.push_back({w, kUnkId, v, 0});
  s.tokens.push_back({std::string(kEosToken), kEosId, false, 0});
  return s;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("vague_corpus_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name, const std::string& content) const {
    auto p = (path / name).string();
    std::ofstream(p, std::ios::binary) << content;
    return p;
  }
};

}  // namespace

TEST_CASE("builtin lexicon has 40 terms in four categories") {
  const auto lex = VagueLexicon::builtin();
  CHECK(lex.size() == 40);
  CHECK(lex.count(VagueCategory::kCondition) == 9);
  CHECK(lex.count(VagueCategory::kGeneralization) == 12);
  CHECK(lex.count(VagueCategory::kModality) == 8);
  CHECK(lex.count(VagueCategory::kNumericQuantifier) == 11);
  CHECK(lex.max_phrase_words() == 5);
  for (const auto& e : lex.entries()) {
    CHECK(!e.words.empty());
    CHECK(to_lower(e.phrase()) == e.phrase());
  }
  CHECK(lex.contains("including but not limited to"));
  CHECK(lex.contains("as needed"));
  CHECK_FALSE(lex.contains("among"));
}

TEST_CASE("lexicon file parsing") {
  SUBCASE("single entry") {
    const auto lex = VagueLexicon::parse("[Modality]\nmay\n");
    CHECK(lex.size() == 1);
    CHECK(lex.entries()[0].category == VagueCategory::kModality);
  }
  SUBCASE("duplicate phrase names the entry") {
    try {
      VagueLexicon::parse("[Modality]\nmay\n[Condition]\nMay\n");
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("'may'") != std::string::npos);
    }
  }
  SUBCASE("unknown category") {
    CHECK_THROWS_AS(VagueLexicon::parse("[Hedges]\nmaybe\n"), DataError);
  }
  SUBCASE("phrase before header") {
    CHECK_THROWS_AS(VagueLexicon::parse("may\n"), DataError);
  }
  SUBCASE("category spelled with a space, comments and blank lines") {
    const auto lex = VagueLexicon::parse("# terms\n\n[Numeric Quantifier]\n  Some  \n");
    CHECK(lex.count(VagueCategory::kNumericQuantifier) == 1);
    CHECK(lex.contains("some"));
  }
  SUBCASE("builtin serializes and reparses to the same entries") {
    const auto lex = VagueLexicon::builtin();
    const auto again = VagueLexicon::parse(lex.serialize());
    REQUIRE(again.size() == lex.size());
    for (std::size_t i = 0; i < lex.size(); ++i) {
      CHECK(again.entries()[i].phrase() == lex.entries()[i].phrase());
      CHECK(again.entries()[i].category == lex.entries()[i].category);
    }
  }
  SUBCASE("default when no path") { CHECK(load_lexicon(std::nullopt).size() == 40); }
}

TEST_CASE("split_sentences") {
  CHECK(split_sentences("We collect data. We share it.") ==
        std::vector<std::string>{"We collect data.", "We share it."});
  CHECK(split_sentences("Back to Top") == std::vector<std::string>{"Back to Top"});
  CHECK(split_sentences("").empty());
  CHECK(split_sentences("Really?  Yes!\nNext   line") ==
        std::vector<std::string>{"Really?", "Yes!", "Next line"});
  CHECK(split_sentences("It costs 3.50 dollars. Done") ==
        std::vector<std::string>{"It costs 3.50 dollars.", "Done"});
}

TEST_CASE("tokenize merges lexicon phrases greedily") {
  const auto lex = VagueLexicon::builtin();
  SUBCASE("among other things is one vague token") {
    const auto toks = tokenize("We use it for billing, among other things.", lex);
    CHECK(surfaces(toks) ==
          std::vector<std::string>{"we", "use", "it", "for", "billing", "among other things", "</s>"});
    CHECK(toks[5].is_vague);
  }
  SUBCASE("among alone is not vague") {
    const auto toks = tokenize("Popular among consumers", lex);
    CHECK(surfaces(toks) == std::vector<std::string>{"popular", "among", "consumers", "</s>"});
    for (const auto& t : toks) CHECK_FALSE(t.is_vague);
  }
  SUBCASE("modality and condition") {
    const auto toks = tokenize("We may, from time to time, share data", lex);
    CHECK(surfaces(toks) == std::vector<std::string>{"we", "may", "from time to time", "share", "data", "</s>"});
    const std::vector<bool> vague = {false, true, true, false, false, false};
    for (std::size_t i = 0; i < toks.size(); ++i) CHECK(toks[i].is_vague == vague[i]);
  }
  SUBCASE("longest match wins over a shorter prefix") {
    const auto custom = VagueLexicon::parse("[Condition]\nas\nas needed\nas needed by law\n");
    const auto toks = tokenize("as needed by law as needed as", custom);
    CHECK(surfaces(toks) == std::vector<std::string>{"as needed by law", "as needed", "as", "</s>"});
  }
  SUBCASE("hyphens split words") {
    const auto toks = tokenize("Third-party e-mail", lex);
    CHECK(surfaces(toks) == std::vector<std::string>{"third", "party", "e", "mail", "</s>"});
  }
  SUBCASE("deterministic") { CHECK(tokenize("Some users may opt out.", lex) == tokenize("Some users may opt out.", lex)); }
}

TEST_CASE("vagueness flag matches lexicon membership on random sentences") {
  const auto lex = VagueLexicon::builtin();
  std::mt19937_64 rng(11);
  const auto filler = testing::pseudo_words(30, 5);
  const std::vector<std::string> tricky = {"among", "other", "things", "as", "needed", "from", "time", "to",
                                           "including", "but", "not", "limited", "otherwise", "reasonably"};
  std::uniform_int_distribution<int> kind(0, 2), len(1, 15);
  std::uniform_int_distribution<std::size_t> f(0, filler.size() - 1), tr(0, tricky.size() - 1),
      ph(0, lex.size() - 1);
  for (int n = 0; n < 1000; ++n) {
    std::string text;
    for (int k = len(rng); k > 0; --k) {
      const int which = kind(rng);
      text += (which == 0 ? filler[f(rng)] : which == 1 ? tricky[tr(rng)] : lex.entries()[ph(rng)].phrase());
      text += k % 3 == 0 ? ", " : " ";
    }
    for (const auto& t : tokenize(text, lex)) {
      if (t.surface == kEosToken) continue;
      CHECK(t.is_vague == lex.contains(t.surface));
    }
  }
}

TEST_CASE("filter_short drops sentences with three or fewer content tokens") {
  std::vector<Sentence> in = {
      make_sentence({{"back", false}, {"to", false}, {"top", false}}),
      make_sentence({{"a", false}, {"b", false}, {"c", false}, {"d", false}}),
      make_sentence({}),
  };
  const auto out = filter_short(in);
  REQUIRE(out.size() == 1);
  CHECK(out[0].content_length() == 4);
}

TEST_CASE("build_vocabulary") {
  std::vector<Sentence> sents = {
      make_sentence({{"information", false}, {"we", false}, {"information", false}, {"may", true}}),
      make_sentence({{"information", false}, {"share", false}, {"we", false}, {"zeta", false}}),
  };
  SUBCASE("reserved ids then frequency order, ties lexicographic") {
    const auto v = build_vocabulary(sents, 100);
    CHECK(v.words() == std::vector<std::string>{"<pad>", "<unk>", "</s>", "information", "we", "may", "share", "zeta"});
    CHECK(v.id("information") == 3);
  }
  SUBCASE("V=4 keeps only the top word") {
    const auto v = build_vocabulary(sents, 4);
    CHECK(v.size() == 4);
    CHECK(v.word(3) == "information");
    CHECK(v.id("we") == kUnkId);
  }
  SUBCASE("V<4 rejected") { CHECK_THROWS_AS(build_vocabulary(sents, 3), PreconditionError); }
  SUBCASE("out-of-vocabulary tokens keep their vague flag") {
    Corpus c;
    c.doc_ids = {"d"};
    c.sentences = sents;
    c.vocabulary = build_vocabulary(sents, 4);
    index_corpus(c);
    const auto& may = c.sentences[0].tokens[3];
    CHECK(may.vocab_id == kUnkId);
    CHECK(may.is_vague);
    CHECK(c.sentences[1].tokens[0].position == 5);
  }
}

TEST_CASE("corpus_stats on a hand-counted corpus") {
  Corpus c;
  c.doc_ids = {"a", "b"};
  c.sentences = {
      make_sentence({{"we", false}, {"may", true}, {"share", false}, {"your", false}, {"data", false}}, "a"),
      make_sentence({{"we", false}, {"collect", false}, {"your", false}, {"email", false}, {"address", false}}, "b"),
  };
  const auto s = corpus_stats(c);
  CHECK(s.n_policies == 2);
  CHECK(s.n_sentences == 2);
  CHECK(s.n_tokens == 10);
  CHECK(s.n_vague_tokens == 1);
  CHECK(s.pct_vague == doctest::Approx(10.0));
  CHECK(s.n_sentences_with_vague == 1);
  CHECK(s.pct_sentences_with_vague == doctest::Approx(50.0));

  const auto empty = corpus_stats(Corpus{});
  CHECK(empty.n_tokens == 0);
  CHECK(empty.pct_vague == 0.0);
  CHECK(empty.pct_sentences_with_vague == 0.0);
}

TEST_CASE("stats table uses the dataset row labels and one decimal") {
  CorpusStats s{1010, 107076, 2534094, 59026, 100.0 * 59026 / 2534094, 41033, 100.0 * 41033 / 107076};
  const auto table = format_stats(s);
  CHECK(table.find("total # of web privacy policies") != std::string::npos);
  CHECK(table.find("1,010") != std::string::npos);
  CHECK(table.find("107,076") != std::string::npos);
  CHECK(table.find("2,534,094") != std::string::npos);
  CHECK(table.find("59,026 (2.3%)") != std::string::npos);
  CHECK(table.find("total # and % of sentences that contain at least one vague token") != std::string::npos);
  CHECK(table.find("41,033 (38.3%)") != std::string::npos);
}

TEST_CASE("stats percentages equal exact ratios on random corpora") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    testing::SyntheticConfig gen;
    gen.sentences = 20 + trial;
    gen.seed = rng();
    gen.vague_rate = 0.05 + 0.01 * trial;
    const auto c = preprocess(testing::synthetic_documents(gen), VagueLexicon::builtin(), 300);
    const auto s = corpus_stats(c);
    std::size_t tokens = 0, vague = 0, with_vague = 0;
    for (const auto& sent : c.sentences) {
      tokens += sent.content_length();
      std::size_t v = 0;
      for (const auto& t : sent.tokens) v += t.is_vague ? 1 : 0;
      vague += v;
      with_vague += v > 0 ? 1 : 0;
    }
    CHECK(s.n_tokens == tokens);
    CHECK(s.pct_vague == doctest::Approx(100.0 * static_cast<double>(vague) / static_cast<double>(tokens)).epsilon(1e-12));
    CHECK(s.pct_sentences_with_vague ==
          doctest::Approx(100.0 * static_cast<double>(with_vague) / static_cast<double>(c.sentences.size())).epsilon(1e-12));
  }
}

TEST_CASE("ingest reads the manifest in order and reports bad documents") {
  TempDir dir;
  const auto a = dir.file("a.txt", "We collect your data. Back to Top\n");
  const auto b = dir.file("b.txt", "We may share it with partners.");
  const auto bad = dir.file("bad.txt", std::string("caf\xC3", 4));
  SUBCASE("two readable files") {
    const auto m = dir.file("m.tsv", "doc-a\t" + a + "\ndoc-b\t" + b + "\n");
    const auto r = ingest(m);
    REQUIRE(r.documents.size() == 2);
    CHECK(r.documents[0].id == "doc-a");
    CHECK(r.documents[1].id == "doc-b");
    CHECK(r.errors.empty());
  }
  SUBCASE("missing and non-UTF-8 files are skipped") {
    const auto m = dir.file("m.tsv", "x\t" + (dir.path / "nope.txt").string() + "\ny\t" + bad + "\nz\t" + b + "\n");
    const auto r = ingest(m);
    REQUIRE(r.documents.size() == 1);
    CHECK(r.documents[0].id == "z");
    CHECK(r.errors.size() == 2);
  }
  SUBCASE("empty manifest warns") {
    const auto r = ingest(dir.file("m.tsv", ""));
    CHECK(r.documents.empty());
    CHECK(r.warnings.size() == 1);
  }
  SUBCASE("missing manifest throws") { CHECK_THROWS_AS(ingest((dir.path / "none.tsv").string()), DataError); }
}

TEST_CASE("preprocessed corpus round-trips through VLCORP1") {
  testing::SyntheticConfig gen;
  gen.sentences = 60;
  const auto corpus = preprocess(testing::synthetic_documents(gen), VagueLexicon::builtin(), 50);
  REQUIRE(!corpus.sentences.empty());
  const auto bytes = serialize_corpus(corpus);
  CHECK(bytes.substr(0, 7) == "VLCORP1");
  const auto back = parse_corpus(bytes);
  CHECK(back == corpus);
  CHECK(serialize_corpus(back) == bytes);

  SUBCASE("truncation is detected") {
    CHECK_THROWS_AS(parse_corpus(std::string_view(bytes).substr(0, bytes.size() - 3)), DataError);
  }
  SUBCASE("wrong magic") {
    auto broken = bytes;
    broken[0] = 'X';
    CHECK_THROWS_AS(parse_corpus(broken), DataError);
  }
}

TEST_CASE("preprocess drops noisy short sentences") {
  const std::vector<RawDocument> docs = {{"p1", "Back to Top\nWe may share your information with partners."}};
  const auto c = preprocess(docs, VagueLexicon::builtin(), 100);
  REQUIRE(c.sentences.size() == 1);
  CHECK(c.sentences[0].tokens.back().surface == "</s>");
  CHECK(c.doc_ids == std::vector<std::string>{"p1"});
}
