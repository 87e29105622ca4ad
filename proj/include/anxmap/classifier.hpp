#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>

#include "anxmap/token.hpp"

namespace anxmap {

enum class ClassLabel : std::uint8_t { NonAnxiety = 0, Anxiety = 1 };
inline constexpr std::size_t kNumClasses = 2;

constexpr std::size_t index_of(ClassLabel c) { return static_cast<std::size_t>(c); }
std::string_view to_string(ClassLabel c);

enum class Smoothing : bool { Off = false, On = true };
enum class Method { MlRatio, Map };
std::string_view to_string(Method m);

using ClassCounts = std::array<std::uint64_t, kNumClasses>;

struct DecisionConfig {
  Smoothing smoothing = Smoothing::On;
  double threshold = 2.5;
  PosFilter pos_filter = default_pos_filter();

  friend bool operator==(const DecisionConfig&, const DecisionConfig&) = default;
};

struct LabeledSequence {
  TokenSequence tokens;
  ClassLabel label;
};

// Per-class frequency dictionaries plus the derived totals. Immutable once
// built; every constructor path re-derives totals and vocabulary from `freq`.
class ClassifierModel {
 public:
  using FrequencyTable = std::map<Token, ClassCounts>;

  ClassifierModel() = default;

  // Entries whose counts are zero in both classes are dropped.
  static ClassifierModel from_counts(FrequencyTable freq, ClassCounts doc_count,
                                     DecisionConfig config = {});

  const FrequencyTable& frequencies() const noexcept { return freq_; }
  std::uint64_t count(const Token& w, ClassLabel c) const;
  std::uint64_t total_tokens(ClassLabel c) const { return total_tokens_[index_of(c)]; }
  std::uint64_t doc_count(ClassLabel c) const { return doc_count_[index_of(c)]; }
  const ClassCounts& total_tokens() const noexcept { return total_tokens_; }
  const ClassCounts& doc_counts() const noexcept { return doc_count_; }
  std::size_t vocab_size() const noexcept { return freq_.size(); }
  bool in_vocabulary(const Token& w) const { return freq_.contains(w); }
  const DecisionConfig& config() const noexcept { return config_; }

  friend bool operator==(const ClassifierModel&, const ClassifierModel&) = default;

 private:
  FrequencyTable freq_;
  ClassCounts total_tokens_{};
  ClassCounts doc_count_{};
  DecisionConfig config_;
};

struct ClassificationResult {
  // Natural-log likelihoods indexed by ClassLabel; may be -inf.
  std::array<double, kNumClasses> log_lik{};
  // P(seq|Anxiety) / P(seq|NonAnxiety); +inf when only NonAnxiety is zero,
  // 0 when Anxiety is zero or both are.
  double ratio = 1.0;
  ClassLabel label = ClassLabel::NonAnxiety;
  Method method = Method::MlRatio;
  bool degenerate = false;
};

// Log-space slack under which two scores are considered equal.
inline constexpr double kTieTolerance = 1e-9;

// Sequences are expected to be POS-filtered already. Throws EmptyCorpus.
ClassifierModel train(std::span<const LabeledSequence> corpus, DecisionConfig config = {});

// Throws ZeroDenominator when the class (plus vocabulary, if smoothing) has no mass.
double word_likelihood(const ClassifierModel& model, const Token& w, ClassLabel c,
                       Smoothing smoothing);

// Sum of log P(w|c) over in-vocabulary tokens; OOV tokens are skipped.
double sequence_log_likelihood(const ClassifierModel& model, const TokenSequence& seq,
                               ClassLabel c, Smoothing smoothing);

ClassificationResult classify_ratio(const ClassifierModel& model, const TokenSequence& seq,
                                    double threshold, Smoothing smoothing);

// Prior-weighted argmax with priors from document counts. Throws NoPrior.
ClassificationResult classify_map(const ClassifierModel& model, const TokenSequence& seq,
                                  Smoothing smoothing);

// Ratio criterion with the model's own threshold and smoothing.
ClassificationResult classify(const ClassifierModel& model, const TokenSequence& seq);

// Re-applies the ratio criterion to an already scored result at another
// threshold. Strict inequality: ratio == threshold is NonAnxiety.
ClassLabel label_at(const ClassificationResult& scored, double threshold);

std::string save_model(const ClassifierModel& model);
ClassifierModel load_model(std::string_view bytes);

void save_model_file(const ClassifierModel& model, const std::string& path);
ClassifierModel load_model_file(const std::string& path);

}  // namespace anxmap
