#include "wba/synth.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <vector>

#include "wba/random.hpp"

namespace wba {

void generate_synthetic(const std::string& dir, const SynthConfig& cfg) {
  if (cfg.num_languages < 2) throw std::invalid_argument("synth: need at least 2 languages");
  std::filesystem::create_directories(dir);

  Rng rng(cfg.seed);
  const Eigen::MatrixXd base = gaussian_matrix(cfg.vocab, cfg.dim, rng);

  std::vector<std::string> tags;
  for (int i = 0; i < cfg.num_languages; ++i) tags.push_back("l" + std::to_string(i));

  for (int i = 0; i < cfg.num_languages; ++i) {
    Eigen::MatrixXd x = base;
    if (i > 0) x *= random_orthogonal(cfg.dim, rng);
    x += cfg.noise_sigma * gaussian_matrix(cfg.vocab, cfg.dim, rng);

    std::vector<int> order(static_cast<std::size_t>(cfg.vocab));
    std::iota(order.begin(), order.end(), 0);
    if (cfg.shuffle_rows && i > 0) std::shuffle(order.begin(), order.end(), rng);

    std::ofstream out(std::filesystem::path(dir) / (tags[static_cast<std::size_t>(i)] + ".vec"));
    out << cfg.vocab << ' ' << cfg.dim << '\n';
    out << std::setprecision(17);
    for (int row : order) {
      out << 'w' << row;
      for (int j = 0; j < cfg.dim; ++j) out << ' ' << x(row, j);
      out << '\n';
    }
    if (!out) throw std::runtime_error("synth: write failed in " + dir);
  }

  for (int i = 0; i < cfg.num_languages; ++i)
    for (int j = 0; j < cfg.num_languages; ++j) {
      if (i == j) continue;
      std::ofstream out(std::filesystem::path(dir) /
                        (tags[static_cast<std::size_t>(i)] + "-" +
                         tags[static_cast<std::size_t>(j)] + ".dict"));
      for (int w = 0; w < cfg.vocab; ++w) out << 'w' << w << '\t' << 'w' << w << '\n';
    }
}

}  // namespace wba
