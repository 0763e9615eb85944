#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "wba/embedding.hpp"
#include "wba/sinkhorn.hpp"

namespace wba {

struct Ranking {
  std::string source;
  std::vector<std::pair<std::string, double>> targets;  // scores non-increasing
};

struct Lexicon {
  std::string source_language;
  std::string target_language;
  std::vector<Ranking> rankings;                      // one per source word, vocab order
  std::unordered_map<std::string, std::size_t> index; // source token -> ranking position
  std::size_t empty_rows = 0;                         // rows with all-zero scores

  const Ranking* find(const std::string& source) const {
    auto it = index.find(source);
    return it == index.end() ? nullptr : &rankings[it->second];
  }
};

struct EvalReport {
  std::string source_language;
  std::string target_language;
  std::map<int, double> precision_at;
  double mean_average_precision = 0.0;
  std::size_t query_count = 0;
  std::size_t dropped_queries = 0;
};

// Scores S = Pi_src * Pi_tgt^T and keeps the top-k targets per source word
// (lowest index wins ties). Rows with no coupling mass yield empty rankings
// unless fallback matrices (rotated-space coordinates) are supplied, in which
// case those rows are scored by cosine similarity.
Lexicon infer_translations(const Coupling& src_coupling, const Coupling& tgt_coupling,
                           const EmbeddingSpace& src_space, const EmbeddingSpace& tgt_space,
                           int k, const Matrix* src_coords = nullptr,
                           const Matrix* tgt_coords = nullptr);

double precision_at_k(const Lexicon& lexicon, const GoldDictionary& gold, int k,
                      std::size_t* dropped_queries = nullptr);

double mean_average_precision(const Lexicon& lexicon, const GoldDictionary& gold,
                              std::size_t* dropped_queries = nullptr);

// Per-query top-1 hit indicators, in sorted query order. Queries missing from
// the lexicon count as misses so that two systems stay index-aligned.
std::vector<bool> top1_hits(const Lexicon& lexicon, const GoldDictionary& gold);

// Exact one-sided binomial McNemar test on discordant pairs: with b = a-only
// hits and c = b-only hits, p = P(X >= b | X ~ Binomial(b+c, 1/2)).
double mcnemar_one_sided(const std::vector<bool>& hits_a, const std::vector<bool>& hits_b);

EvalReport evaluate_pair(const Lexicon& lexicon, const GoldDictionary& gold,
                         const std::vector<int>& ks);

}  // namespace wba
