// vaguetool: ingest -> train -> export -> match / serve

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

#include "vague/checkpoint.h"
#include "vague/corpus.h"
#include "vague/embeddings.h"
#include "vague/error.h"
#include "vague/explorer.h"
#include "vague/lexicon.h"
#include "vague/server.h"
#include "vague/trace.h"
#include "vague/training.h"

namespace {

using namespace vague;

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

struct IngestArgs {
  std::string manifest;
  std::string lexicon;
  std::string out;
  std::size_t vocab_size = 5000;
};

struct TrainArgs {
  std::string corpus;
  std::string out_model;
  std::string metrics;
  std::string embeddings;
  std::string variant = "standard_reset";
  std::size_t checkpoint_every = 0;
  ModelConfig model;
  TrainConfig train;
  bool no_shuffle = false;
};

struct ExportArgs {
  std::string model;
  std::string corpus;
  std::string out_trace;
  std::string json;
  std::optional<std::size_t> max_len;
  std::optional<std::size_t> fusion_dim;
};

struct MatchArgs {
  std::string trace;
  std::vector<std::size_t> span;
  std::vector<std::size_t> context;
  double tau = kDefaultThreshold;
  std::string mode = "intersection";
  MatchOptions options;
  bool json = false;
};

struct ServeArgs {
  std::string trace;
  std::string host = "127.0.0.1";
  int port = 8080;
  double tau = kDefaultThreshold;
  std::string static_dir;
};

std::string join_dims(const DimensionSet& dims) {
  std::string out;
  for (auto d : dims) out += (out.empty() ? "" : ",") + std::to_string(d);
  return out.empty() ? "(none)" : out;
}

int run_ingest(const IngestArgs& a) {
  const auto lexicon = load_lexicon(a.lexicon.empty() ? std::nullopt : std::optional<std::string>(a.lexicon));
  const auto raw = ingest(a.manifest);
  for (const auto& w : raw.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& e : raw.errors) std::cerr << "error: " << e << '\n';
  const auto corpus = preprocess(raw.documents, lexicon, a.vocab_size);
  save_corpus(corpus, a.out);
  std::cout << format_stats(corpus_stats(corpus));
  std::cerr << "vocabulary: " << corpus.vocabulary.size() << " entries; " << raw.documents.size() << " of "
            << raw.documents.size() + raw.errors.size() << " documents read; wrote " << a.out << '\n';
  return kOk;
}

int run_train(TrainArgs a) {
  const auto corpus = load_corpus(a.corpus);
  a.model.vocab_size = corpus.vocabulary.size();
  a.model.variant = parse_variant(a.variant);
  a.train.shuffle = !a.no_shuffle;
  a.model.validate();
  a.train.validate();

  auto params = ModelParams::initialize(a.model, a.train.seed);
  if (!a.embeddings.empty()) {
    auto table = load_embeddings(a.embeddings, corpus.vocabulary, a.model.embed_dim, a.train.seed);
    params.embedding = std::move(table.table);
    std::cerr << "embeddings: " << table.matched << " matched, " << table.unmatched << " drawn at random\n";
  }

  std::optional<std::ofstream> csv;
  if (!a.metrics.empty()) {
    csv.emplace(a.metrics);
    if (!*csv) throw DataError("cannot write metrics file '" + a.metrics + "'");
    *csv << metrics_csv_header(a.train.holdout_fraction > 0.0) << '\n';
  }
  auto on_epoch = [&](const EpochMetrics& m, const ModelParams& p) {
    std::cerr << "epoch " << m.epoch << "/" << a.train.epochs << "  loss " << m.mean_loss << "  acc_word "
              << m.accuracy_word << "  acc_vague " << m.accuracy_vagueness;
    if (m.has_heldout) {
      std::cerr << "  | held-out loss " << m.heldout_loss << "  acc_word " << m.heldout_accuracy_word
                << "  acc_vague " << m.heldout_accuracy_vagueness;
    }
    std::cerr << '\n';
    if (csv) *csv << metrics_csv_row(m) << '\n' << std::flush;
    if (a.checkpoint_every > 0 && m.epoch % a.checkpoint_every == 0 && m.epoch < a.train.epochs) {
      save_checkpoint(a.out_model + ".epoch" + std::to_string(m.epoch), a.model, p);
    }
  };
  const auto result = train(corpus, a.model, a.train, std::move(params), on_epoch);
  save_checkpoint(a.out_model, a.model, result.params);
  std::cerr << "wrote " << a.out_model << '\n';
  return kOk;
}

int run_export(const ExportArgs& a) {
  const auto ckpt = load_checkpoint(a.model);
  const auto corpus = load_corpus(a.corpus);
  const auto trace = export_trace(ckpt.params, ckpt.config, corpus, a.out_trace, a.max_len, a.fusion_dim);
  if (!a.json.empty()) {
    std::ofstream out(a.json);
    if (!out) throw DataError("cannot write '" + a.json + "'");
    write_trace_json(out, trace);
  }
  std::cerr << "trace: " << trace.size() << " tokens x " << trace.dim() << " dims; wrote " << a.out_trace << '\n';
  return kOk;
}

int run_match(const MatchArgs& a) {
  const auto trace = load_trace(a.trace);
  Selection sel;
  sel.phrase = {a.span[0], a.span[1]};
  sel.context = a.context.empty() ? sel.phrase : TokenSpan{a.context[0], a.context[1]};
  sel.threshold = a.tau;
  const auto q = query_dimensions(trace, sel, parse_mode(a.mode));
  std::cerr << "S1: " << join_dims(q.phrase_dims) << "\nS2: " << join_dims(q.context_dims)
            << "\nquery: " << join_dims(q.query) << '\n';
  if (q.query.empty()) throw PreconditionError("query dimension set is empty; lower --tau or change the selection");
  auto opts = a.options;
  opts.threshold = a.tau;
  const auto matches = find_matches(trace, q.query, opts);
  if (a.json) {
    std::cout << match_response_json(trace, matches, q.query.size()) << '\n';
  } else {
    std::cout << format_matches_tsv(trace, matches);
  }
  return kOk;
}

int run_serve(const ServeArgs& a) {
  const auto trace = load_trace(a.trace);
  const ExplorerApi api(trace, a.tau);
  ExplorerServer server(api, a.static_dir);
  const int port = server.bind(a.host, a.port);
  std::cerr << "serving " << trace.size() << " tokens on http://" << a.host << ":" << port << '\n';
  server.listen();
  return kOk;
}

// Fills options not given on the command line from a key=value file. Keys
// are long option names without the dashes.
void apply_config(CLI::App* cmd, const std::string& path) {
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) throw DataError("cannot read config file '" + path + "'");
  for (const auto& item : CLI::ConfigINI().from_config(in)) {
    if (item.name == "++" || item.name == "--") continue;  // section markers
    auto* op = cmd->get_option_no_throw("--" + item.name);
    if (op == nullptr || item.name == "config") {
      throw PreconditionError("config file '" + path + "': unknown key '" + item.name + "'");
    }
    if (op->count() > 0) continue;
    op->add_result(item.inputs);
    op->run_callback();
  }
}

void add_model_options(CLI::App* cmd, TrainArgs& a) {
  auto& m = a.model;
  auto& t = a.train;
  cmd->add_option("--embed-dim,--embed_dim", m.embed_dim, "word embedding size D")->capture_default_str();
  cmd->add_option("--hidden-dim,--hidden_dim", m.hidden_dim, "GRU state size d")->capture_default_str();
  cmd->add_option("--fusion-dim,--fusion_dim", m.fusion_dim, "fused vector size l")->capture_default_str();
  cmd->add_option("--max-len,--max_len", m.max_len, "sentence length N (longer ones are truncated)")
      ->capture_default_str();
  cmd->add_option("--alpha", m.alpha, "weight of the next-word loss")->capture_default_str();
  cmd->add_option("--beta", m.beta, "weight of the vagueness loss")->capture_default_str();
  cmd->add_option("--variant", a.variant, "GRU cell: standard_reset or as_printed")
      ->check(CLI::IsMember({"standard_reset", "as_printed"}))
      ->capture_default_str();
  cmd->add_flag("--freeze-embeddings,--freeze_embeddings", m.freeze_embeddings, "keep the embedding table fixed");
  cmd->add_option("--epochs", t.epochs, "training epochs")->capture_default_str();
  cmd->add_option("--batch-size,--batch_size", t.batch_size, "sentences per RMSProp step")->capture_default_str();
  cmd->add_option("--learning-rate,--learning_rate", t.learning_rate, "RMSProp step size")->capture_default_str();
  cmd->add_option("--rmsprop-decay,--rmsprop_decay", t.rmsprop_decay, "RMSProp decay rho")->capture_default_str();
  cmd->add_option("--rmsprop-epsilon,--rmsprop_epsilon", t.rmsprop_epsilon, "RMSProp epsilon")
      ->capture_default_str();
  cmd->add_option("--seed", t.seed, "seed for initialization and shuffling")->capture_default_str();
  cmd->add_flag("--no-shuffle,--no_shuffle", a.no_shuffle, "keep corpus order in every epoch");
  cmd->add_option("--holdout", t.holdout_fraction, "fraction of sentences held out for evaluation only")
      ->check(CLI::Range(0.0, 0.99))
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vague-phrase language model: preprocessing, training, trace export and exploration"};
  app.require_subcommand(1);

  IngestArgs ingest_args;
  auto* ingest_cmd = app.add_subcommand("ingest", "split, tokenize and index a policy collection");
  std::string ingest_config;
  ingest_cmd->add_option("--config", ingest_config, "key=value file with defaults for the flags below")
      ->check(CLI::ExistingFile);
  ingest_cmd->add_option("--manifest", ingest_args.manifest, "TSV of doc_id<TAB>path lines")
      ->required()
      ->check(CLI::ExistingFile);
  ingest_cmd->add_option("--lexicon", ingest_args.lexicon, "vague-term list (default: built-in 40 terms)")
      ->check(CLI::ExistingFile);
  ingest_cmd->add_option("--out", ingest_args.out, "output corpus file (VLCORP1)")->required();
  ingest_cmd->add_option("--vocab-size,--vocab_size", ingest_args.vocab_size, "vocabulary size V incl. reserved ids")
      ->check(CLI::Range(std::size_t{4}, std::size_t{1} << 31))
      ->capture_default_str();

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "train the joint next-word / vagueness model");
  std::string train_config;
  train_cmd->add_option("--config", train_config, "key=value file with defaults for the flags below")
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--corpus", train_args.corpus, "corpus file from ingest")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--out-model,--out_model", train_args.out_model, "output checkpoint (VLMODEL1)")->required();
  train_cmd->add_option("--metrics", train_args.metrics, "per-epoch CSV: epoch,loss,acc_word,acc_vague");
  train_cmd->add_option("--embeddings", train_args.embeddings, "pre-trained vectors, one 'word v1 .. vD' per line")
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--checkpoint-every,--checkpoint_every", train_args.checkpoint_every,
                        "also save <out-model>.epochK every K epochs (0: off)");
  add_model_options(train_cmd, train_args);

  ExportArgs export_args;
  auto* export_cmd = app.add_subcommand("export", "write the fused hidden vector of every corpus token");
  export_cmd->add_option("--model", export_args.model, "checkpoint from train")->required()->check(CLI::ExistingFile);
  export_cmd->add_option("--corpus", export_args.corpus, "corpus file from ingest")->required()->check(CLI::ExistingFile);
  export_cmd->add_option("--out-trace,--out_trace", export_args.out_trace, "output trace (VLTRACE1)")->required();
  export_cmd->add_option("--json", export_args.json, "also write a JSON dump of the trace");
  export_cmd->add_option("--max-len", export_args.max_len, "fail unless the checkpoint uses this N");
  export_cmd->add_option("--fusion-dim", export_args.fusion_dim, "fail unless the checkpoint uses this l");

  MatchArgs match_args;
  auto* match_cmd = app.add_subcommand("match", "select a phrase and list regions with the same active dimensions");
  match_cmd->add_option("--trace", match_args.trace, "trace file from export")->required()->check(CLI::ExistingFile);
  match_cmd->add_option("--span", match_args.span, "phrase token range a b (inclusive)")->required()->expected(2);
  match_cmd->add_option("--context", match_args.context, "context range a b containing the span (default: the span)")
      ->expected(2);
  match_cmd->add_option("--tau", match_args.tau, "activation threshold in (0,1)")->capture_default_str();
  match_cmd->add_option("--mode", match_args.mode, "intersection (S1 and S2) or phrase_only (S1 minus S2)")
      ->check(CLI::IsMember({"intersection", "phrase_only"}))
      ->capture_default_str();
  match_cmd->add_option("--top-k", match_args.options.top_k, "number of ranked regions")->capture_default_str();
  match_cmd->add_option("--max-len", match_args.options.max_len, "regions are cut to this many tokens")
      ->capture_default_str();
  match_cmd->add_flag("--within-sentence", match_args.options.within_sentence,
                      "do not let a region run past an end-of-sentence token");
  match_cmd->add_flag("--json", match_args.json, "print the /api/match JSON body instead of TSV");

  ServeArgs serve_args;
  auto* serve_cmd = app.add_subcommand("serve", "HTTP JSON API over a trace");
  serve_cmd->add_option("--trace", serve_args.trace, "trace file from export")->required()->check(CLI::ExistingFile);
  serve_cmd->add_option("--port", serve_args.port, "TCP port (0: any free port)")
      ->check(CLI::Range(0, 65535))
      ->capture_default_str();
  serve_cmd->add_option("--host", serve_args.host, "bind address")->capture_default_str();
  serve_cmd->add_option("--tau", serve_args.tau, "default threshold for requests that omit tau")
      ->capture_default_str();
  serve_cmd->add_option("--static-dir", serve_args.static_dir, "also serve files from this directory at /")
      ->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*ingest_cmd) {
      apply_config(ingest_cmd, ingest_config);
      return run_ingest(ingest_args);
    }
    if (*train_cmd) {
      apply_config(train_cmd, train_config);
      return run_train(train_args);
    }
    if (*export_cmd) return run_export(export_args);
    if (*match_cmd) return run_match(match_args);
    if (*serve_cmd) return run_serve(serve_args);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const BindError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kInternal;
}
