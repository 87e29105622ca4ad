#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace anxmap {

// A morpheme surface form with its POS tag. All counting is done over these.
struct Token {
  std::string surface;
  std::string pos;

  friend bool operator==(const Token&, const Token&) = default;
  friend auto operator<=>(const Token&, const Token&) = default;
};

using TokenSequence = std::vector<Token>;

using PosFilter = std::set<std::string, std::less<>>;

// NNG, VV, VA, MM, MAG: the tags that carry the speaker's emotion.
const PosFilter& default_pos_filter();

// Uppercase ASCII, 1-8 characters.
bool is_valid_pos(std::string_view pos);

// Parses whitespace-separated `surface/POS` items. Inside a surface, '/' is
// written as "\/" and '\' as "\\". Throws Error{MalformedToken, index} on the
// first bad item.
TokenSequence parse_tagged_text(std::string_view raw);

// Inverse of parse_tagged_text. Surfaces must not contain whitespace.
std::string serialize_tagged_text(const TokenSequence& seq);
std::string escape_surface(std::string_view surface);

TokenSequence filter_significant(const TokenSequence& seq,
                                 const PosFilter& keep = default_pos_filter());

// Whitespace split; every token is tagged NNG.
TokenSequence fallback_tokenize(std::string_view text);

}  // namespace anxmap
