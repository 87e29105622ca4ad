#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "anxmap/corpus.hpp"

// Seeded synthetic corpora. Draws use only std::mt19937_64 output (whose
// sequence is fixed by the standard), so a seed gives the same corpus on any
// platform.
namespace anxmap::synth {

struct CorpusParams {
  std::size_t documents = 1000;
  double anxious_fraction = 1.0 / 11.0;
  std::size_t vocabulary = 200;
  // Words whose rate differs between classes; the first half lean anxious.
  std::size_t cue_words = 20;
  double cue_boost = 2.0;
  std::size_t min_length = 3;
  std::size_t max_length = 10;
  // Every `noise_every`-th word carries a non-significant POS (0 = none).
  std::size_t noise_every = 10;
  // Share of records snapped to a county-cell corner and a midnight timestamp.
  double boundary_fraction = 0.05;
  std::string id_prefix = "s";
};

std::vector<CorpusRecord> generate_corpus(const CorpusParams& params, std::uint64_t seed);

double uniform01(std::mt19937_64& rng);
std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n);

}  // namespace anxmap::synth
