#pragma once

#include <cstdint>
#include <string>

namespace wba {

struct SynthConfig {
  int num_languages = 3;
  int vocab = 500;
  int dim = 20;
  double noise_sigma = 1e-2;
  std::uint64_t seed = 1;
  bool shuffle_rows = true;  // give each language its own file order
};

// Writes one word2vec-format file per synthetic language (l0.vec, l1.vec, ...)
// plus identity gold dictionaries for every ordered pair (l0-l1.dict, ...).
// Each language is the same Gaussian base cloud under a random rotation plus
// isotropic noise; token wK names base point K in every language.
void generate_synthetic(const std::string& dir, const SynthConfig& cfg);

}  // namespace wba
