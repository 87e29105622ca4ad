#pragma once

#include <random>
#include <string>
#include <vector>

#include "anxmap/classifier.hpp"

namespace anxmap::testing {

inline Token w(const char* name) {
  static const std::map<std::string, std::string> pos{{"w_A", "NNG"}, {"w_B", "VV"}, {"w_C", "VA"},
                                                      {"w_D", "NNG"}, {"w_E", "VV"}, {"w_F", "MAG"}};
  return {name, pos.at(name)};
}

inline TokenSequence seq(std::initializer_list<const char*> names) {
  TokenSequence out;
  for (auto n : names) out.push_back(w(n));
  return out;
}

// The two frequency dictionaries of the worked example: non-anxious column
// totals 1,000, anxious column totals 100.
inline ClassifierModel::FrequencyTable table_counts() {
  return {
      {w("w_A"), {200, 30}}, {w("w_B"), {100, 10}}, {w("w_C"), {200, 0}},
      {w("w_D"), {100, 20}}, {w("w_E"), {0, 30}},   {w("w_F"), {400, 10}},
  };
}

inline ClassifierModel table_model(Smoothing smoothing = Smoothing::Off, double threshold = 1.0,
                                   ClassCounts docs = {1000, 100}) {
  DecisionConfig config;
  config.smoothing = smoothing;
  config.threshold = threshold;
  return ClassifierModel::from_counts(table_counts(), docs, config);
}

// A labeled corpus whose token counts reproduce table_counts(): documents of
// ten tokens each, cycling through the words.
inline std::vector<LabeledSequence> table_corpus() {
  std::vector<LabeledSequence> out;
  for (ClassLabel c : {ClassLabel::NonAnxiety, ClassLabel::Anxiety}) {
    TokenSequence all;
    for (const auto& [tok, counts] : table_counts()) {
      for (std::uint64_t i = 0; i < counts[index_of(c)]; ++i) all.push_back(tok);
    }
    for (std::size_t i = 0; i < all.size(); i += 10) {
      out.push_back({TokenSequence(all.begin() + i, all.begin() + std::min(i + 10, all.size())), c});
    }
  }
  return out;
}

}  // namespace anxmap::testing
