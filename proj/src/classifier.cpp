#include "anxmap/classifier.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "anxmap/error.hpp"

namespace anxmap {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kPosInf = std::numeric_limits<double>::infinity();
constexpr std::string_view kModelVersion = "1";

constexpr std::array<ClassLabel, kNumClasses> kClasses{ClassLabel::NonAnxiety,
                                                       ClassLabel::Anxiety};

std::uint64_t denominator(const ClassifierModel& model, ClassLabel c, Smoothing smoothing) {
  std::uint64_t den = model.total_tokens(c);
  if (smoothing == Smoothing::On) den += model.vocab_size();
  return den;
}

// log(num/den) summed over the sequence, as (sum of log numerators) - n*log(den).
double log_likelihood_impl(const ClassifierModel& model, const TokenSequence& seq, ClassLabel c,
                           Smoothing smoothing) {
  const std::uint64_t add = smoothing == Smoothing::On ? 1 : 0;
  double log_num = 0.0;
  std::size_t n = 0;
  for (const auto& tok : seq) {
    auto it = model.frequencies().find(tok);
    if (it == model.frequencies().end()) continue;
    std::uint64_t num = it->second[index_of(c)] + add;
    if (num == 0) return kNegInf;
    log_num += std::log(static_cast<double>(num));
    ++n;
  }
  if (n == 0) return 0.0;
  std::uint64_t den = denominator(model, c, smoothing);
  if (den == 0) return kNegInf;
  return log_num - static_cast<double>(n) * std::log(static_cast<double>(den));
}

}  // namespace

std::string_view to_string(ClassLabel c) {
  return c == ClassLabel::Anxiety ? "Anxiety" : "NonAnxiety";
}

std::string_view to_string(Method m) { return m == Method::Map ? "MAP" : "ML-ratio"; }

ClassifierModel ClassifierModel::from_counts(FrequencyTable freq, ClassCounts doc_count,
                                             DecisionConfig config) {
  ClassifierModel m;
  for (auto it = freq.begin(); it != freq.end();) {
    if (it->second[0] == 0 && it->second[1] == 0) {
      it = freq.erase(it);
      continue;
    }
    m.total_tokens_[0] += it->second[0];
    m.total_tokens_[1] += it->second[1];
    ++it;
  }
  m.freq_ = std::move(freq);
  m.doc_count_ = doc_count;
  m.config_ = std::move(config);
  return m;
}

std::uint64_t ClassifierModel::count(const Token& w, ClassLabel c) const {
  auto it = freq_.find(w);
  return it == freq_.end() ? 0 : it->second[index_of(c)];
}

ClassifierModel train(std::span<const LabeledSequence> corpus, DecisionConfig config) {
  if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "training corpus has no documents");
  ClassifierModel::FrequencyTable freq;
  ClassCounts docs{};
  for (const auto& doc : corpus) {
    const auto c = index_of(doc.label);
    ++docs[c];
    for (const auto& tok : doc.tokens) ++freq[tok][c];
  }
  return ClassifierModel::from_counts(std::move(freq), docs, std::move(config));
}

double word_likelihood(const ClassifierModel& model, const Token& w, ClassLabel c,
                       Smoothing smoothing) {
  const std::uint64_t den = denominator(model, c, smoothing);
  if (den == 0) {
    throw Error(ErrorCode::ZeroDenominator,
                "class " + std::string(to_string(c)) + " has no token mass");
  }
  const std::uint64_t num = model.count(w, c) + (smoothing == Smoothing::On ? 1 : 0);
  return static_cast<double>(num) / static_cast<double>(den);
}

double sequence_log_likelihood(const ClassifierModel& model, const TokenSequence& seq,
                               ClassLabel c, Smoothing smoothing) {
  return log_likelihood_impl(model, seq, c, smoothing);
}

ClassLabel label_at(const ClassificationResult& scored, double threshold) {
  const double la = scored.log_lik[index_of(ClassLabel::Anxiety)];
  const double ln = scored.log_lik[index_of(ClassLabel::NonAnxiety)];
  if (scored.degenerate || la == kNegInf) return ClassLabel::NonAnxiety;
  if (ln == kNegInf) return ClassLabel::Anxiety;
  return (la - ln) > std::log(threshold) + kTieTolerance ? ClassLabel::Anxiety
                                                         : ClassLabel::NonAnxiety;
}

ClassificationResult classify_ratio(const ClassifierModel& model, const TokenSequence& seq,
                                    double threshold, Smoothing smoothing) {
  ClassificationResult r;
  r.method = Method::MlRatio;
  for (auto c : kClasses) r.log_lik[index_of(c)] = log_likelihood_impl(model, seq, c, smoothing);
  const double la = r.log_lik[index_of(ClassLabel::Anxiety)];
  const double ln = r.log_lik[index_of(ClassLabel::NonAnxiety)];
  if (la == kNegInf && ln == kNegInf) {
    r.degenerate = true;
    r.ratio = 0.0;
  } else if (la == kNegInf) {
    r.ratio = 0.0;
  } else if (ln == kNegInf) {
    r.ratio = kPosInf;
  } else {
    r.ratio = std::exp(la - ln);
  }
  r.label = label_at(r, threshold);
  return r;
}

ClassificationResult classify_map(const ClassifierModel& model, const TokenSequence& seq,
                                  Smoothing smoothing) {
  const auto& docs = model.doc_counts();
  const std::uint64_t total_docs = docs[0] + docs[1];
  if (total_docs == 0) throw Error(ErrorCode::NoPrior, "model has no training documents");

  ClassificationResult r = classify_ratio(model, seq, 1.0, smoothing);
  r.method = Method::Map;
  std::array<double, kNumClasses> score{};
  for (auto c : kClasses) {
    const auto i = index_of(c);
    const double prior = docs[i] == 0 ? kNegInf
                                      : std::log(static_cast<double>(docs[i])) -
                                            std::log(static_cast<double>(total_docs));
    score[i] = prior + r.log_lik[i];
  }
  const double sa = score[index_of(ClassLabel::Anxiety)];
  const double sn = score[index_of(ClassLabel::NonAnxiety)];
  if (sa == kNegInf && sn == kNegInf) {
    r.degenerate = true;
    r.label = ClassLabel::NonAnxiety;
  } else if (sn == kNegInf) {
    r.label = ClassLabel::Anxiety;
  } else if (sa == kNegInf) {
    r.label = ClassLabel::NonAnxiety;
  } else {
    r.label = sa > sn + kTieTolerance ? ClassLabel::Anxiety : ClassLabel::NonAnxiety;
  }
  return r;
}

ClassificationResult classify(const ClassifierModel& model, const TokenSequence& seq) {
  return classify_ratio(model, seq, model.config().threshold, model.config().smoothing);
}

std::string save_model(const ClassifierModel& model) {
  ordered_json doc;
  doc["version"] = kModelVersion;
  doc["classes"] = {"NonAnxiety", "Anxiety"};
  auto vocab = ordered_json::array();
  for (const auto& [tok, counts] : model.frequencies()) {
    ordered_json entry;
    entry["surface"] = tok.surface;
    entry["pos"] = tok.pos;
    entry["counts"] = {counts[0], counts[1]};
    vocab.push_back(std::move(entry));
  }
  doc["vocab"] = std::move(vocab);
  doc["total_tokens"] = {model.total_tokens()[0], model.total_tokens()[1]};
  doc["doc_count"] = {model.doc_counts()[0], model.doc_counts()[1]};
  ordered_json config;
  config["smoothing"] = model.config().smoothing == Smoothing::On;
  config["threshold"] = model.config().threshold;
  config["pos_filter"] = model.config().pos_filter;
  doc["config"] = std::move(config);
  return doc.dump(2) + "\n";
}

namespace {

[[noreturn]] void corrupt(const std::string& what) { throw Error(ErrorCode::CorruptModel, what); }

ClassCounts read_pair(const ordered_json& j, const char* what) {
  if (!j.is_array() || j.size() != 2) corrupt(std::string(what) + " must be a 2-element array");
  ClassCounts out{};
  for (std::size_t i = 0; i < 2; ++i) {
    if (!j[i].is_number_unsigned()) corrupt(std::string(what) + " entries must be non-negative integers");
    out[i] = j[i].get<std::uint64_t>();
  }
  return out;
}

}  // namespace

ClassifierModel load_model(std::string_view bytes) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    corrupt(e.what());
  }
  if (!doc.is_object()) corrupt("model file must be an object");
  if (!doc.contains("version")) corrupt("missing version");
  const auto& version = doc["version"];
  if (!version.is_string()) corrupt("version must be a string");
  if (version.get<std::string>() != kModelVersion) {
    throw Error(ErrorCode::VersionMismatch, "unsupported model version '" +
                                                version.get<std::string>() + "'");
  }
  try {
    if (doc.at("classes") != ordered_json({"NonAnxiety", "Anxiety"})) corrupt("unexpected classes");
    ClassifierModel::FrequencyTable freq;
    for (const auto& entry : doc.at("vocab")) {
      Token tok{entry.at("surface").get<std::string>(), entry.at("pos").get<std::string>()};
      if (tok.surface.empty() || !is_valid_pos(tok.pos)) corrupt("invalid vocabulary token");
      ClassCounts counts = read_pair(entry.at("counts"), "counts");
      if (counts[0] == 0 && counts[1] == 0) corrupt("vocabulary entry with zero counts");
      if (!freq.emplace(std::move(tok), counts).second) corrupt("duplicate vocabulary entry");
    }
    ClassCounts totals = read_pair(doc.at("total_tokens"), "total_tokens");
    ClassCounts docs = read_pair(doc.at("doc_count"), "doc_count");
    const auto& cfg = doc.at("config");
    DecisionConfig config;
    config.smoothing = cfg.at("smoothing").get<bool>() ? Smoothing::On : Smoothing::Off;
    config.threshold = cfg.at("threshold").get<double>();
    if (!(config.threshold > 0.0) || !std::isfinite(config.threshold)) corrupt("threshold must be positive");
    config.pos_filter.clear();
    for (const auto& tag : cfg.at("pos_filter")) config.pos_filter.insert(tag.get<std::string>());
    auto model = ClassifierModel::from_counts(std::move(freq), docs, std::move(config));
    if (model.total_tokens() != totals) corrupt("total_tokens does not match vocabulary counts");
    return model;
  } catch (const nlohmann::json::exception& e) {
    corrupt(e.what());
  }
}

void save_model_file(const ClassifierModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << save_model(model);
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

ClassifierModel load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_model(ss.str());
}

}  // namespace anxmap
