#include "wba/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_set>

namespace wba {

namespace {

std::vector<std::pair<std::string, double>> top_k_row(const Vector& scores,
                                                      const std::vector<std::string>& words,
                                                      int k) {
  const Eigen::Index n = scores.size();
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  const auto better = [&](Eigen::Index a, Eigen::Index b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;  // lowest index wins ties
  };
  const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(k),
                                                 static_cast<std::size_t>(n));
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(keep), idx.end(),
                    better);
  std::vector<std::pair<std::string, double>> out;
  out.reserve(keep);
  for (std::size_t r = 0; r < keep; ++r) out.emplace_back(words[idx[r]], scores[idx[r]]);
  return out;
}

}  // namespace

Lexicon infer_translations(const Coupling& src_coupling, const Coupling& tgt_coupling,
                           const EmbeddingSpace& src_space, const EmbeddingSpace& tgt_space,
                           int k, const Matrix* src_coords, const Matrix* tgt_coords) {
  if (src_coupling.matrix.cols() != tgt_coupling.matrix.cols())
    throw std::invalid_argument("infer_translations: barycenter dimension mismatch");
  if (k < 1) throw std::invalid_argument("infer_translations: k must be >= 1");

  const Matrix scores = src_coupling.matrix * tgt_coupling.matrix.transpose();

  Lexicon lex;
  lex.source_language = src_space.language_id;
  lex.target_language = tgt_space.language_id;
  lex.rankings.reserve(static_cast<std::size_t>(scores.rows()));

  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    Ranking r;
    r.source = src_space.words[static_cast<std::size_t>(i)];
    if (scores.row(i).maxCoeff() > 0.0) {
      r.targets = top_k_row(scores.row(i).transpose(), tgt_space.words, k);
    } else {
      ++lex.empty_rows;
      if (src_coords && tgt_coords) {
        Vector q = src_coords->row(i).transpose();
        const double qn = q.norm();
        if (qn > 0.0) {
          Vector cos = (*tgt_coords * q).array() /
                       (tgt_coords->rowwise().norm().array() * qn).max(1e-300);
          r.targets = top_k_row(cos, tgt_space.words, k);
        }
      }
    }
    lex.index[r.source] = lex.rankings.size();
    lex.rankings.push_back(std::move(r));
  }
  return lex;
}

namespace {

// Distinct queries with their gold target sets, sorted by query token.
std::vector<std::pair<std::string, std::unordered_set<std::string>>> gold_queries(
    const GoldDictionary& gold) {
  std::vector<std::pair<std::string, std::unordered_set<std::string>>> out;
  for (auto it = gold.entries.begin(); it != gold.entries.end();) {
    auto range_end = gold.entries.upper_bound(it->first);
    std::unordered_set<std::string> targets;
    for (auto jt = it; jt != range_end; ++jt) targets.insert(jt->second);
    out.emplace_back(it->first, std::move(targets));
    it = range_end;
  }
  return out;
}

}  // namespace

double precision_at_k(const Lexicon& lexicon, const GoldDictionary& gold, int k,
                      std::size_t* dropped_queries) {
  const auto queries = gold_queries(gold);
  if (queries.empty()) throw std::invalid_argument("precision_at_k: empty query set");
  std::size_t hits = 0, scored = 0, dropped = 0;
  for (const auto& [query, targets] : queries) {
    const Ranking* r = lexicon.find(query);
    if (!r) {
      ++dropped;
      continue;
    }
    ++scored;
    const std::size_t depth = std::min<std::size_t>(static_cast<std::size_t>(k),
                                                    r->targets.size());
    for (std::size_t i = 0; i < depth; ++i)
      if (targets.count(r->targets[i].first)) {
        ++hits;
        break;
      }
  }
  if (dropped_queries) *dropped_queries = dropped;
  if (scored == 0) throw std::invalid_argument("precision_at_k: no scorable queries");
  return static_cast<double>(hits) / static_cast<double>(scored);
}

double mean_average_precision(const Lexicon& lexicon, const GoldDictionary& gold,
                              std::size_t* dropped_queries) {
  const auto queries = gold_queries(gold);
  if (queries.empty()) throw std::invalid_argument("mean_average_precision: empty query set");
  double total = 0.0;
  std::size_t scored = 0, dropped = 0;
  for (const auto& [query, targets] : queries) {
    const Ranking* r = lexicon.find(query);
    if (!r) {
      ++dropped;
      continue;
    }
    ++scored;
    double ap = 0.0;
    std::size_t found = 0;
    for (std::size_t rank = 0; rank < r->targets.size(); ++rank) {
      if (targets.count(r->targets[rank].first)) {
        ++found;
        ap += static_cast<double>(found) / static_cast<double>(rank + 1);
      }
    }
    total += ap / static_cast<double>(targets.size());  // unranked golds contribute 0
  }
  if (dropped_queries) *dropped_queries = dropped;
  if (scored == 0) throw std::invalid_argument("mean_average_precision: no scorable queries");
  return total / static_cast<double>(scored);
}

std::vector<bool> top1_hits(const Lexicon& lexicon, const GoldDictionary& gold) {
  std::vector<bool> hits;
  for (const auto& [query, targets] : gold_queries(gold)) {
    const Ranking* r = lexicon.find(query);
    hits.push_back(r && !r->targets.empty() && targets.count(r->targets.front().first) > 0);
  }
  return hits;
}

double mcnemar_one_sided(const std::vector<bool>& hits_a, const std::vector<bool>& hits_b) {
  if (hits_a.size() != hits_b.size())
    throw std::invalid_argument("mcnemar_one_sided: length mismatch");
  long b = 0, c = 0;
  for (std::size_t i = 0; i < hits_a.size(); ++i) {
    if (hits_a[i] && !hits_b[i]) ++b;
    if (!hits_a[i] && hits_b[i]) ++c;
  }
  const long n = b + c;
  if (n == 0) return 1.0;
  // exact binomial tail P(X >= b), p = 1/2, via log binomials
  double p = 0.0;
  for (long x = b; x <= n; ++x) {
    const double log_choose = std::lgamma(static_cast<double>(n) + 1.0) -
                              std::lgamma(static_cast<double>(x) + 1.0) -
                              std::lgamma(static_cast<double>(n - x) + 1.0);
    p += std::exp(log_choose - static_cast<double>(n) * std::log(2.0));
  }
  return std::min(p, 1.0);
}

EvalReport evaluate_pair(const Lexicon& lexicon, const GoldDictionary& gold,
                         const std::vector<int>& ks) {
  EvalReport report;
  report.source_language = lexicon.source_language;
  report.target_language = lexicon.target_language;
  report.query_count = gold.query_count();
  for (int k : ks) report.precision_at[k] = precision_at_k(lexicon, gold, k);
  report.mean_average_precision = mean_average_precision(lexicon, gold, &report.dropped_queries);
  return report;
}

}  // namespace wba
