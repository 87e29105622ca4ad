#include "anxmap/corpus.hpp"

#include <cmath>
#include <fstream>

#include "json.hpp"

#include "anxmap/error.hpp"

namespace anxmap {

namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::MalformedLine, what); }

double read_degrees(const ordered_json& obj, const char* key, double bound) {
  if (!obj.contains(key) || !obj[key].is_number()) malformed(std::string("missing numeric ") + key);
  const double v = obj[key].get<double>();
  if (!std::isfinite(v) || v < -bound || v > bound) {
    throw Error(ErrorCode::BadCoordinates, std::string(key) + " out of range");
  }
  return v;
}

TokenSequence read_tokens(const ordered_json& j) {
  if (j.is_string()) return parse_tagged_text(j.get<std::string>());
  if (!j.is_array()) malformed("tokens must be an array or a tagged string");
  TokenSequence out;
  for (const auto& pair : j) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_string()) {
      malformed("token entries must be [surface, pos]");
    }
    Token tok{pair[0].get<std::string>(), pair[1].get<std::string>()};
    if (tok.surface.empty() || !is_valid_pos(tok.pos)) {
      throw Error(ErrorCode::MalformedToken, "invalid token", out.size());
    }
    out.push_back(std::move(tok));
  }
  return out;
}

}  // namespace

CorpusRecord parse_corpus_line(std::string_view line) {
  ordered_json obj;
  try {
    obj = ordered_json::parse(line);
  } catch (const nlohmann::json::parse_error&) {
    malformed("not a JSON object");
  }
  if (!obj.is_object()) malformed("not a JSON object");

  CorpusRecord r;
  if (!obj.contains("id") || !obj["id"].is_string() || obj["id"].get<std::string>().empty()) {
    malformed("missing id");
  }
  r.id = obj["id"].get<std::string>();
  if (obj.contains("text")) {
    if (!obj["text"].is_string()) malformed("text must be a string");
    r.text = obj["text"].get<std::string>();
  }
  r.tokens = obj.contains("tokens") && !obj["tokens"].is_null() ? read_tokens(obj["tokens"])
                                                                 : fallback_tokenize(r.text);
  if (obj.contains("label") && !obj["label"].is_null()) {
    const auto& l = obj["label"];
    if (!l.is_number_integer() || (l.get<int>() != 0 && l.get<int>() != 1)) {
      malformed("label must be 0, 1 or null");
    }
    r.label = l.get<int>() == 1 ? ClassLabel::Anxiety : ClassLabel::NonAnxiety;
  }
  r.lat = read_degrees(obj, "lat", 90.0);
  r.lon = read_degrees(obj, "lon", 180.0);
  if (!obj.contains("ts") || !obj["ts"].is_string()) {
    throw Error(ErrorCode::BadTimestamp, "missing ts");
  }
  r.ts = parse_utc(obj["ts"].get<std::string>());
  return r;
}

std::string serialize_corpus_line(const CorpusRecord& record) {
  ordered_json obj;
  obj["id"] = record.id;
  obj["text"] = record.text;
  auto tokens = ordered_json::array();
  for (const auto& tok : record.tokens) tokens.push_back({tok.surface, tok.pos});
  obj["tokens"] = std::move(tokens);
  if (record.label) {
    obj["label"] = *record.label == ClassLabel::Anxiety ? 1 : 0;
  } else {
    obj["label"] = nullptr;
  }
  obj["lat"] = record.lat;
  obj["lon"] = record.lon;
  obj["ts"] = format_utc(record.ts);
  return obj.dump();
}

std::vector<CorpusRecord> read_corpus(std::istream& in) {
  std::vector<CorpusRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse_corpus_line(line));
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(lineno) + ": " + e.what(), lineno);
    }
    if (!out.back().label) {
      throw Error(ErrorCode::MalformedLine, "line " + std::to_string(lineno) + ": record has no label",
                  lineno);
    }
  }
  return out;
}

std::vector<CorpusRecord> read_corpus_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::UnreadableSource, "cannot read " + path);
  return read_corpus(in);
}

std::vector<LabeledSequence> labeled_sequences(const std::vector<CorpusRecord>& records,
                                               const PosFilter& keep) {
  std::vector<LabeledSequence> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    out.push_back({filter_significant(r.tokens, keep), r.label.value_or(ClassLabel::NonAnxiety)});
  }
  return out;
}

}  // namespace anxmap
