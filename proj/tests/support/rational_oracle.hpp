#pragma once

// Exact-rational Naive Bayes used as an independent check on the log-space
// classifier. Counts its own dictionaries from the raw corpus; shares only
// the Token/ClassLabel vocabulary with the implementation.

#include <array>
#include <map>
#include <span>

#include <boost/multiprecision/cpp_int.hpp>

#include "anxmap/classifier.hpp"

namespace anxmap::oracle {

using Rational = boost::multiprecision::cpp_rational;

struct Counts {
  std::map<Token, std::array<long long, 2>> freq;
  std::array<long long, 2> totals{};
  std::array<long long, 2> docs{};
  long long vocab = 0;
};

inline Counts count(std::span<const LabeledSequence> corpus) {
  Counts c;
  for (const auto& doc : corpus) {
    const int k = doc.label == ClassLabel::Anxiety ? 1 : 0;
    c.docs[k] += 1;
    for (const auto& t : doc.tokens) {
      c.freq[t][k] += 1;
      c.totals[k] += 1;
    }
  }
  c.vocab = static_cast<long long>(c.freq.size());
  return c;
}

// P(seq | class) with OOV tokens skipped.
inline Rational likelihood(const Counts& c, const TokenSequence& seq, int k, bool smoothing) {
  Rational p = 1;
  const long long add = smoothing ? 1 : 0;
  const long long den = c.totals[k] + (smoothing ? c.vocab : 0);
  for (const auto& t : seq) {
    auto it = c.freq.find(t);
    if (it == c.freq.end()) continue;
    if (den == 0) return 0;
    p *= Rational(it->second[k] + add, den);
  }
  return p;
}

inline ClassLabel ratio_label(const Counts& c, const TokenSequence& seq, const Rational& threshold,
                              bool smoothing) {
  const Rational pa = likelihood(c, seq, 1, smoothing);
  const Rational pn = likelihood(c, seq, 0, smoothing);
  if (pa == 0) return ClassLabel::NonAnxiety;
  if (pn == 0) return ClassLabel::Anxiety;
  return pa > threshold * pn ? ClassLabel::Anxiety : ClassLabel::NonAnxiety;
}

inline ClassLabel map_label(const Counts& c, const TokenSequence& seq, bool smoothing) {
  const long long n = c.docs[0] + c.docs[1];
  const Rational sa = Rational(c.docs[1], n) * likelihood(c, seq, 1, smoothing);
  const Rational sn = Rational(c.docs[0], n) * likelihood(c, seq, 0, smoothing);
  return sa > sn ? ClassLabel::Anxiety : ClassLabel::NonAnxiety;
}

inline double to_double(const Rational& r) { return static_cast<double>(r); }

}  // namespace anxmap::oracle
