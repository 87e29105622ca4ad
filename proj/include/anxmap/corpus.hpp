#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "anxmap/classifier.hpp"
#include "anxmap/timeutil.hpp"
#include "anxmap/token.hpp"

namespace anxmap {

// One line of the corpus / persistence-log format:
//   {"id":..,"text":..,"tokens":[[surface,pos],..],"label":0|1|null,"lat":..,"lon":..,"ts":"..Z"}
struct CorpusRecord {
  std::string id;
  std::string text;
  TokenSequence tokens;
  std::optional<ClassLabel> label;
  double lat = 0.0;
  double lon = 0.0;
  Instant ts{};

  friend bool operator==(const CorpusRecord&, const CorpusRecord&) = default;
};

// Throws MalformedLine, BadCoordinates, BadTimestamp or MalformedToken.
CorpusRecord parse_corpus_line(std::string_view line);
std::string serialize_corpus_line(const CorpusRecord& record);

// Whole-file helpers for train/eval: every line must parse and carry a label.
// Blank lines are skipped; errors carry the 1-based line number as index.
std::vector<CorpusRecord> read_corpus(std::istream& in);
std::vector<CorpusRecord> read_corpus_file(const std::string& path);
std::vector<LabeledSequence> labeled_sequences(const std::vector<CorpusRecord>& records,
                                               const PosFilter& keep);

}  // namespace anxmap
