#include "anxmap/token.hpp"

#include "anxmap/error.hpp"

namespace anxmap {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

template <typename Fn>
void for_each_item(std::string_view raw, Fn&& fn) {
  std::size_t i = 0;
  while (i < raw.size()) {
    while (i < raw.size() && is_space(raw[i])) ++i;
    std::size_t start = i;
    while (i < raw.size() && !is_space(raw[i])) ++i;
    if (i > start) fn(raw.substr(start, i - start));
  }
}

Token parse_item(std::string_view item, std::size_t index) {
  std::string surface;
  std::size_t sep = std::string_view::npos;
  for (std::size_t i = 0; i < item.size(); ++i) {
    char c = item[i];
    if (c == '\\' && i + 1 < item.size() && (item[i + 1] == '/' || item[i + 1] == '\\')) {
      if (sep != std::string_view::npos) {
        throw Error(ErrorCode::MalformedToken, "escape inside POS tag", index);
      }
      surface.push_back(item[++i]);
    } else if (c == '/') {
      if (sep != std::string_view::npos) {
        throw Error(ErrorCode::MalformedToken, "more than one unescaped '/'", index);
      }
      sep = i;
    } else if (sep == std::string_view::npos) {
      surface.push_back(c);
    }
  }
  if (sep == std::string_view::npos) {
    throw Error(ErrorCode::MalformedToken, "no '/' separator in item", index);
  }
  std::string pos(item.substr(sep + 1));
  if (surface.empty()) {
    throw Error(ErrorCode::MalformedToken, "empty surface", index);
  }
  if (!is_valid_pos(pos)) {
    throw Error(ErrorCode::MalformedToken, "invalid POS tag '" + pos + "'", index);
  }
  return {std::move(surface), std::move(pos)};
}

}  // namespace

const PosFilter& default_pos_filter() {
  static const PosFilter tags{"NNG", "VV", "VA", "MM", "MAG"};
  return tags;
}

bool is_valid_pos(std::string_view pos) {
  if (pos.empty() || pos.size() > 8) return false;
  for (char c : pos) {
    if (c < 'A' || c > 'Z') return false;
  }
  return true;
}

TokenSequence parse_tagged_text(std::string_view raw) {
  TokenSequence out;
  std::size_t index = 0;
  for_each_item(raw, [&](std::string_view item) { out.push_back(parse_item(item, index++)); });
  return out;
}

std::string escape_surface(std::string_view surface) {
  std::string out;
  out.reserve(surface.size());
  for (char c : surface) {
    if (c == '/' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

std::string serialize_tagged_text(const TokenSequence& seq) {
  std::string out;
  for (const auto& tok : seq) {
    if (!out.empty()) out.push_back(' ');
    out += escape_surface(tok.surface);
    out.push_back('/');
    out += tok.pos;
  }
  return out;
}

TokenSequence filter_significant(const TokenSequence& seq, const PosFilter& keep) {
  TokenSequence out;
  for (const auto& tok : seq) {
    if (keep.contains(tok.pos)) out.push_back(tok);
  }
  return out;
}

TokenSequence fallback_tokenize(std::string_view text) {
  TokenSequence out;
  for_each_item(text, [&](std::string_view item) { out.push_back({std::string(item), "NNG"}); });
  return out;
}

}  // namespace anxmap
