#include "wba/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace wba {

Eigen::Index EmbeddingSpace::index_of(const std::string& token) const {
  auto it = std::find(words.begin(), words.end(), token);
  if (it == words.end()) return -1;
  return static_cast<Eigen::Index>(it - words.begin());
}

EmbeddingSpace load_embeddings(const std::string& path, std::size_t max_vocab,
                               const std::string& language_id, LoadStats* stats) {
  if (max_vocab < 1) throw std::invalid_argument("load_embeddings: max_vocab must be >= 1");
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_embeddings: cannot open " + path);

  std::string header;
  if (!std::getline(in, header))
    throw std::runtime_error("load_embeddings: empty file " + path);
  std::istringstream hs(header);
  long long count = 0, dim = 0;
  if (!(hs >> count >> dim) || count < 1 || dim < 1)
    throw std::runtime_error("load_embeddings: malformed header in " + path);

  EmbeddingSpace space;
  space.language_id = language_id;
  const std::size_t keep = std::min<std::size_t>(max_vocab, static_cast<std::size_t>(count));
  space.vectors.resize(static_cast<Eigen::Index>(keep), dim);
  std::unordered_set<std::string> seen;
  seen.reserve(keep * 2);

  LoadStats local;
  std::string line;
  while (space.words.size() < keep && std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string token;
    ls >> token;
    ++local.rows_read;
    if (!seen.insert(token).second) {
      ++local.duplicates_skipped;
      continue;
    }
    const Eigen::Index row = static_cast<Eigen::Index>(space.words.size());
    for (long long j = 0; j < dim; ++j) {
      double v;
      if (!(ls >> v))
        throw std::runtime_error("load_embeddings: dimension mismatch for token '" + token +
                                 "' in " + path);
      if (!std::isfinite(v))
        throw std::runtime_error("load_embeddings: non-finite value for token '" + token + "'");
      space.vectors(row, static_cast<Eigen::Index>(j)) = v;
    }
    double extra;
    if (ls >> extra)
      throw std::runtime_error("load_embeddings: row longer than declared dimension for '" +
                               token + "'");
    space.words.push_back(token);
  }

  if (space.words.empty()) throw std::runtime_error("load_embeddings: zero usable rows in " + path);
  space.vectors.conservativeResize(static_cast<Eigen::Index>(space.words.size()), dim);
  if (stats) *stats = local;
  return space;
}

void center_in_place(Matrix& vectors) {
  vectors.rowwise() -= vectors.colwise().mean();
}

EmbeddingSpace center_embeddings(const EmbeddingSpace& space) {
  EmbeddingSpace out = space;
  center_in_place(out.vectors);
  return out;
}

Vector word_mass(Eigen::Index n, MassModel model) {
  Vector p(n);
  if (model == MassModel::Uniform) {
    p.setConstant(1.0 / static_cast<double>(n));
  } else {
    for (Eigen::Index r = 0; r < n; ++r) p[r] = 1.0 / (static_cast<double>(r) + 10.0);
    p /= p.sum();
  }
  return p;
}

DiscreteDistribution to_distribution(const EmbeddingSpace& space, MassModel model) {
  return {space.vectors, word_mass(space.size(), model)};
}

std::size_t GoldDictionary::query_count() const {
  std::size_t n = 0;
  for (auto it = entries.begin(); it != entries.end(); it = entries.upper_bound(it->first)) ++n;
  return n;
}

GoldDictionary load_gold_dictionary(const std::string& path, const EmbeddingSpace& src,
                                    const EmbeddingSpace& tgt) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_gold_dictionary: cannot open " + path);

  std::unordered_set<std::string> src_vocab(src.words.begin(), src.words.end());
  std::unordered_set<std::string> tgt_vocab(tgt.words.begin(), tgt.words.end());

  GoldDictionary dict;
  dict.source_language = src.language_id;
  dict.target_language = tgt.language_id;

  std::set<std::pair<std::string, std::string>> unique_pairs;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string s, t;
    if (!(ls >> s >> t)) continue;
    if (!src_vocab.count(s) || !tgt_vocab.count(t)) {
      ++dict.dropped_lines;
      continue;
    }
    if (unique_pairs.emplace(s, t).second) dict.entries.emplace(s, t);
  }
  if (dict.entries.empty())
    throw std::runtime_error("load_gold_dictionary: no usable pairs in " + path);
  return dict;
}

}  // namespace wba
