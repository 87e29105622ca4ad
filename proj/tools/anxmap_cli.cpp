// anxmap: train, evaluate and sweep the anxiety classifier; ingest geotagged
// corpora into a store and serve it to the dashboard.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <csignal>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <pthread.h>

#include "CLI11.hpp"

#include "anxmap/classifier.hpp"
#include "anxmap/corpus.hpp"
#include "anxmap/error.hpp"
#include "anxmap/evaluation.hpp"
#include "anxmap/geostore.hpp"
#include "anxmap/json_io.hpp"
#include "anxmap/service.hpp"
#include "anxmap/synth.hpp"

namespace {

using namespace anxmap;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::map<std::string, Smoothing> kSmoothingNames{{"on", Smoothing::On}, {"off", Smoothing::Off}};
const std::map<std::string, Method> kMethodNames{{"ml", Method::MlRatio}, {"map", Method::Map}};

struct Options {
  std::string corpus, out, model, test, store, text, tokens, grid = "0.5:5.0:0.5";
  std::string method = "ml", format = "text", bind = "127.0.0.1:8080", ui_dir, cors_origin;
  std::optional<std::string> smoothing;
  std::optional<double> threshold;
  bool no_smoothing = false;
  std::vector<std::string> pos_filter;
  GridConfig cells;
  synth::CorpusParams gen;
  std::uint64_t seed = 1;
};

Smoothing smoothing_or(const Options& o, Smoothing fallback) {
  return o.smoothing ? kSmoothingNames.at(*o.smoothing) : fallback;
}

int run_train(const Options& o) {
  DecisionConfig config;
  config.smoothing = o.no_smoothing ? Smoothing::Off : Smoothing::On;
  config.threshold = o.threshold.value_or(2.5);
  if (!o.pos_filter.empty()) config.pos_filter = PosFilter(o.pos_filter.begin(), o.pos_filter.end());
  const auto records = read_corpus_file(o.corpus);
  const auto docs = labeled_sequences(records, config.pos_filter);
  const auto model = train(docs, config);
  save_model_file(model, o.out);
  std::cout << "documents: NonAnxiety=" << model.doc_count(ClassLabel::NonAnxiety)
            << " Anxiety=" << model.doc_count(ClassLabel::Anxiety) << "\n"
            << "total_tokens: NonAnxiety=" << model.total_tokens(ClassLabel::NonAnxiety)
            << " Anxiety=" << model.total_tokens(ClassLabel::Anxiety) << "\n"
            << "vocabulary: " << model.vocab_size() << "\n"
            << "threshold: " << model.config().threshold
            << " smoothing: " << (model.config().smoothing == Smoothing::On ? "on" : "off") << "\n";
  return 0;
}

int run_eval(const Options& o) {
  const auto model = load_model_file(o.model);
  const auto test = labeled_sequences(read_corpus_file(o.test), model.config().pos_filter);
  const EvalMethod method = kMethodNames.at(o.method) == Method::Map
                                ? EvalMethod::map()
                                : EvalMethod::ml_ratio(o.threshold.value_or(model.config().threshold));
  const auto report = evaluate(model, test, method, smoothing_or(o, model.config().smoothing));
  if (o.format == "json") {
    std::cout << json_io::eval_report(report).dump(2) << "\n";
  } else {
    std::cout << "method: " << o.method;
    if (method.kind == Method::MlRatio) std::cout << " threshold: " << method.threshold;
    std::cout << "\n" << json_io::report_table(report);
  }
  return 0;
}

int run_sweep(const Options& o) {
  const auto model = load_model_file(o.model);
  const auto test = labeled_sequences(read_corpus_file(o.test), model.config().pos_filter);
  const auto grid = parse_threshold_grid(o.grid);
  const auto points = sweep(model, test, grid, smoothing_or(o, model.config().smoothing));
  const auto best = select_threshold(points);
  if (o.format == "json") {
    std::cout << json_io::sweep(points, best).dump(2) << "\n";
  } else {
    std::cout << json_io::sweep_table(points) << "selected threshold=" << best.threshold
              << " product=" << best.product << "\n";
  }
  return 0;
}

int run_classify(const Options& o, bool has_text, bool has_tokens) {
  if (has_text == has_tokens) throw UsageError("exactly one of --text or --tokens is required");
  const auto model = load_model_file(o.model);
  TokenSequence seq = has_text ? fallback_tokenize(o.text) : parse_tagged_text(o.tokens);
  seq = filter_significant(seq, model.config().pos_filter);
  const Smoothing smoothing = smoothing_or(o, model.config().smoothing);
  const auto result = kMethodNames.at(o.method) == Method::Map
                          ? classify_map(model, seq, smoothing)
                          : classify_ratio(model, seq, o.threshold.value_or(model.config().threshold),
                                           smoothing);
  std::cout << json_io::classification(result).dump() << "\n";
  return 0;
}

int run_ingest(const Options& o) {
  auto model = std::make_shared<const ClassifierModel>(load_model_file(o.model));
  auto store = Store::open(o.store, model, o.cells);
  const auto report = store->ingest_file(o.corpus);
  std::cout << json_io::ingest_report(report).dump(2) << "\n";
  return 0;
}

int run_serve(const Options& o) {
  auto model = std::make_shared<const ClassifierModel>(load_model_file(o.model));
  std::shared_ptr<const Store> store = Store::open(o.store, model, o.cells);
  Service service(store, model);

  ServerOptions opts;
  std::tie(opts.host, opts.port) = parse_bind_address(o.bind);
  opts.cors_origin = o.cors_origin;
  if (!o.ui_dir.empty()) opts.ui_dir = o.ui_dir;
  opts.logger = [](const std::string& line) { std::cerr << line << std::endl; };

  // SIGINT/SIGTERM are taken synchronously by a waiter thread; worker
  // threads inherit the blocked mask.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  HttpServer server(service, opts);
  const int port = server.bind();
  std::cout << "listening on http://" << opts.host << ":" << port << std::endl;

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    while (!server.running()) std::this_thread::yield();
    server.stop();
  });
  server.listen();
  waiter.join();
  return 0;
}

int run_gen(const Options& o) {
  const auto records = synth::generate_corpus(o.gen, o.seed);
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!o.out.empty() && o.out != "-") {
    file.open(o.out, std::ios::binary);
    if (!file) throw Error(ErrorCode::Io, "cannot write " + o.out);
    out = &file;
  }
  for (const auto& r : records) *out << serialize_corpus_line(r) << '\n';
  return 0;
}

void add_grid_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--province-size", o.cells.province_size, "Province cell size in degrees")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--county-size", o.cells.county_size, "County cell size in degrees")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anxiety classification and spatio-temporal exploration of geotagged messages"};
  app.require_subcommand(1, 1);
  Options o;
  std::function<int()> action;

  auto* train_cmd = app.add_subcommand("train", "Build a model from a labeled corpus");
  train_cmd->add_option("--corpus", o.corpus, "Labeled corpus (one JSON record per line)")->required();
  train_cmd->add_option("--out", o.out, "Model file to write")->required();
  train_cmd->add_flag("--no-smoothing", o.no_smoothing, "Disable Add-One smoothing");
  train_cmd->add_option("--threshold", o.threshold, "Likelihood-ratio threshold (default 2.5)")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--pos-filter", o.pos_filter, "POS tags to keep (default NNG VV VA MM MAG)");
  train_cmd->callback([&] { action = [&] { return run_train(o); }; });

  auto add_scoring = [&](CLI::App* cmd) {
    cmd->add_option("--smoothing", o.smoothing, "Override the model's smoothing (on|off)")
        ->check(CLI::IsMember({"on", "off"}));
  };

  auto* eval_cmd = app.add_subcommand("eval", "Recall per class and accuracy on a test corpus");
  eval_cmd->add_option("--model", o.model, "Model file")->required();
  eval_cmd->add_option("--test", o.test, "Labeled test corpus")->required();
  eval_cmd->add_option("--method", o.method, "ml (ratio criterion) or map")->check(CLI::IsMember({"ml", "map"}));
  eval_cmd->add_option("--threshold", o.threshold, "Ratio threshold (default: model's)")
      ->check(CLI::PositiveNumber);
  eval_cmd->add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  add_scoring(eval_cmd);
  eval_cmd->callback([&] { action = [&] { return run_eval(o); }; });

  auto* sweep_cmd = app.add_subcommand("sweep", "Evaluate over a threshold grid and pick the best");
  sweep_cmd->add_option("--model", o.model, "Model file")->required();
  sweep_cmd->add_option("--test", o.test, "Labeled test corpus")->required();
  sweep_cmd->add_option("--grid", o.grid, "first:last:step")->capture_default_str();
  sweep_cmd->add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  add_scoring(sweep_cmd);
  sweep_cmd->callback([&] { action = [&] { return run_sweep(o); }; });

  auto* classify_cmd = app.add_subcommand("classify", "Classify one message");
  classify_cmd->add_option("--model", o.model, "Model file")->required();
  auto* text_opt = classify_cmd->add_option("--text", o.text, "Plain text (every word tagged NNG)");
  auto* tokens_opt = classify_cmd->add_option("--tokens", o.tokens, "Tagged tokens, e.g. \"a/NNG b/VV\"");
  text_opt->excludes(tokens_opt);
  classify_cmd->add_option("--method", o.method, "ml or map")->check(CLI::IsMember({"ml", "map"}));
  classify_cmd->add_option("--threshold", o.threshold, "Ratio threshold (default: model's)")
      ->check(CLI::PositiveNumber);
  add_scoring(classify_cmd);
  classify_cmd->callback([&] {
    action = [&, text_opt, tokens_opt] { return run_classify(o, text_opt->count() > 0, tokens_opt->count() > 0); };
  });

  auto* ingest_cmd = app.add_subcommand("ingest", "Classify and index a geotagged corpus into a store");
  ingest_cmd->add_option("--model", o.model, "Model file")->required();
  ingest_cmd->add_option("--corpus", o.corpus, "Corpus file")->required();
  ingest_cmd->add_option("--store", o.store, "Store directory")->required();
  add_grid_options(ingest_cmd, o);
  ingest_cmd->callback([&] { action = [&] { return run_ingest(o); }; });

  auto* serve_cmd = app.add_subcommand("serve", "Serve the query API (and optionally the dashboard)");
  serve_cmd->add_option("--store", o.store, "Store directory")->envname("ANXMAP_STORE")->required();
  serve_cmd->add_option("--model", o.model, "Model file")->envname("ANXMAP_MODEL")->required();
  serve_cmd->add_option("--bind", o.bind, "host:port (port 0 picks a free one)")
      ->envname("ANXMAP_BIND")
      ->capture_default_str();
  serve_cmd->add_option("--ui-dir", o.ui_dir, "Static dashboard assets")->check(CLI::ExistingDirectory);
  serve_cmd->add_option("--cors-origin", o.cors_origin, "Access-Control-Allow-Origin value")
      ->envname("ANXMAP_CORS_ORIGIN");
  add_grid_options(serve_cmd, o);
  serve_cmd->callback([&] { action = [&] { return run_serve(o); }; });

  auto* gen_cmd = app.add_subcommand("gen", "Write a seeded synthetic corpus");
  gen_cmd->group("");
  gen_cmd->add_option("--out", o.out, "Output file (default stdout)");
  gen_cmd->add_option("--seed", o.seed, "RNG seed");
  gen_cmd->add_option("--documents", o.gen.documents, "Number of records");
  gen_cmd->add_option("--anxious-fraction", o.gen.anxious_fraction)->check(CLI::Range(0.0, 1.0));
  gen_cmd->add_option("--vocabulary", o.gen.vocabulary)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--cue-words", o.gen.cue_words);
  gen_cmd->add_option("--cue-boost", o.gen.cue_boost)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--min-length", o.gen.min_length);
  gen_cmd->add_option("--max-length", o.gen.max_length);
  gen_cmd->add_option("--boundary-fraction", o.gen.boundary_fraction)->check(CLI::Range(0.0, 1.0));
  gen_cmd->add_option("--id-prefix", o.gen.id_prefix);
  gen_cmd->callback([&] { action = [&] { return run_gen(o); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    return action();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
