#include "anxmap/synth.hpp"

#include <algorithm>
#include <string>

#include "anxmap/error.hpp"

namespace anxmap::synth {

namespace {

constexpr std::int64_t kLatMin = 33'000'000, kLatMax = 38'600'000;
constexpr std::int64_t kLonMin = 124'500'000, kLonMax = 131'000'000;
constexpr std::int64_t kCountyE6 = 200'000;
// 2016-02-01T00:00:00Z .. 2017-12-01T00:00:00Z
constexpr std::int64_t kTsMin = 1454284800, kTsMax = 1512086400;
constexpr std::int64_t kDay = 86400;

const char* const kSignificant[] = {"NNG", "VV", "VA", "MM", "MAG"};
const char* const kNoise[] = {"JKS", "EF"};

struct Lexicon {
  std::vector<Token> words;
  // cumulative weights per class
  std::vector<double> cdf[2];
};

Lexicon make_lexicon(const CorpusParams& p) {
  Lexicon lex;
  const std::size_t V = p.vocabulary;
  const std::size_t step = p.cue_words == 0 ? 0 : std::max<std::size_t>(1, V / p.cue_words);
  std::vector<double> weight[2];
  for (std::size_t i = 0; i < V; ++i) {
    std::string pos = (p.noise_every != 0 && i % p.noise_every == p.noise_every - 1)
                          ? kNoise[(i / p.noise_every) % 2]
                          : kSignificant[i % 5];
    lex.words.push_back({"w" + std::to_string(i), std::move(pos)});
    double base = 1.0 / static_cast<double>(i + 1);
    weight[0].push_back(base);
    weight[1].push_back(base);
  }
  for (std::size_t c = 0; c < p.cue_words && step != 0; ++c) {
    const std::size_t w = (c * step) % V;
    // first half boosts the anxious class, second half the non-anxious one
    weight[c < p.cue_words / 2 ? 1 : 0][w] *= p.cue_boost;
  }
  for (int c = 0; c < 2; ++c) {
    double acc = 0.0;
    for (double w : weight[c]) lex.cdf[c].push_back(acc += w);
  }
  return lex;
}

std::size_t draw(const std::vector<double>& cdf, std::mt19937_64& rng) {
  const double u = uniform01(rng) * cdf.back();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

std::int64_t draw_between(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(uniform_index(rng, static_cast<std::uint64_t>(hi - lo)));
}

}  // namespace

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) { return rng() % n; }

std::vector<CorpusRecord> generate_corpus(const CorpusParams& p, std::uint64_t seed) {
  if (p.vocabulary == 0 || p.min_length > p.max_length) {
    throw Error(ErrorCode::InvalidArgument, "synthetic corpus needs a vocabulary and min <= max length");
  }
  const Lexicon lex = make_lexicon(p);
  std::mt19937_64 rng(seed);
  std::vector<CorpusRecord> out;
  out.reserve(p.documents);
  for (std::size_t d = 0; d < p.documents; ++d) {
    CorpusRecord r;
    r.id = p.id_prefix + std::to_string(seed) + "-" + std::to_string(d);
    const bool anxious = uniform01(rng) < p.anxious_fraction;
    r.label = anxious ? ClassLabel::Anxiety : ClassLabel::NonAnxiety;
    const std::size_t len =
        p.min_length + static_cast<std::size_t>(uniform_index(rng, p.max_length - p.min_length + 1));
    for (std::size_t i = 0; i < len; ++i) {
      const auto& w = lex.words[draw(lex.cdf[anxious ? 1 : 0], rng)];
      if (!r.text.empty()) r.text.push_back(' ');
      r.text += w.surface;
      r.tokens.push_back(w);
    }
    std::int64_t lat = draw_between(rng, kLatMin, kLatMax);
    std::int64_t lon = draw_between(rng, kLonMin, kLonMax);
    std::int64_t ts = draw_between(rng, kTsMin, kTsMax);
    if (uniform01(rng) < p.boundary_fraction) {
      lat -= lat % kCountyE6;
      lon -= lon % kCountyE6;
      ts -= ts % kDay;
    }
    r.lat = static_cast<double>(lat) / 1e6;
    r.lon = static_cast<double>(lon) / 1e6;
    r.ts = Instant{std::chrono::seconds{ts}};
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace anxmap::synth
