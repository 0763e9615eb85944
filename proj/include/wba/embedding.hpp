#pragma once

#include <map>
#include <string>
#include <vector>

#include "wba/distribution.hpp"

namespace wba {

// A monolingual embedding space: vocabulary plus its n x d vector matrix.
struct EmbeddingSpace {
  std::string language_id;
  std::vector<std::string> words;  // ordered, unique
  Matrix vectors;                  // n x d, rows are word embeddings

  Eigen::Index size() const { return vectors.rows(); }
  Eigen::Index dim() const { return vectors.cols(); }

  // Index of a token, or -1 when absent.
  Eigen::Index index_of(const std::string& token) const;
};

struct LoadStats {
  std::size_t duplicates_skipped = 0;
  std::size_t rows_read = 0;
};

// Reads a word2vec-format text file: header "count dim", then one
// "token v1 ... vd" line per word. Keeps the first max_vocab rows in file
// order; duplicated tokens after the first occurrence are skipped and counted.
EmbeddingSpace load_embeddings(const std::string& path, std::size_t max_vocab,
                               const std::string& language_id = "",
                               LoadStats* stats = nullptr);

// Subtracts the column mean from every row.
EmbeddingSpace center_embeddings(const EmbeddingSpace& space);
void center_in_place(Matrix& vectors);

enum class MassModel { Uniform, Zipf };

// Word-occurrence mass for a vocabulary of size n. Zipf uses 1/(rank+10),
// normalized; ranks follow file order (frequency order in fastText files).
Vector word_mass(Eigen::Index n, MassModel model);

DiscreteDistribution to_distribution(const EmbeddingSpace& space, MassModel model);

struct GoldDictionary {
  std::string source_language;
  std::string target_language;
  std::multimap<std::string, std::string> entries;
  std::size_t dropped_lines = 0;  // pairs outside the loaded vocabularies

  std::size_t query_count() const;
};

// Loads whitespace-separated word pairs, keeping only pairs whose source is in
// src's vocabulary and whose target is in tgt's vocabulary.
GoldDictionary load_gold_dictionary(const std::string& path, const EmbeddingSpace& src,
                                    const EmbeddingSpace& tgt);

}  // namespace wba
