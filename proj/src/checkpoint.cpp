#include "wba/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include <json.hpp>

namespace wba {

namespace {

using nlohmann::json;

constexpr char kMagic[8] = {'W', 'B', 'A', 'C', 'H', 'K', '0', '1'};

class Writer {
 public:
  explicit Writer(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("checkpoint: cannot write " + path);
  }

  void add(const std::string& name, const Matrix& m) {
    registry_.push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}});
    blobs_.push_back(&m);
  }

  void finish(json header) {
    header["matrices"] = registry_;
    const std::string text = header.dump();
    out_.write(kMagic, sizeof(kMagic));
    const std::uint64_t len = text.size();
    out_.write(reinterpret_cast<const char*>(&len), sizeof(len));
    out_.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const Matrix* m : blobs_)
      out_.write(reinterpret_cast<const char*>(m->data()),
                 static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(m->size())));
    if (!out_) throw std::runtime_error("checkpoint: write failed");
  }

 private:
  std::ofstream out_;
  json registry_ = json::array();
  std::vector<const Matrix*> blobs_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : in_(path, std::ios::binary) {
    if (!in_) throw std::runtime_error("checkpoint: cannot open " + path);
    char magic[8];
    in_.read(magic, sizeof(magic));
    if (!in_ || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
      throw std::runtime_error("checkpoint: bad magic in " + path);
    std::uint64_t len = 0;
    in_.read(reinterpret_cast<char*>(&len), sizeof(len));
    std::string text(len, '\0');
    in_.read(text.data(), static_cast<std::streamsize>(len));
    if (!in_) throw std::runtime_error("checkpoint: truncated header in " + path);
    header_ = json::parse(text);
  }

  const json& header() const { return header_; }

  // Blobs must be consumed in registry order.
  Matrix next_matrix(const std::string& expect_name) {
    const json& entry = header_["matrices"].at(cursor_++);
    if (entry.at("name").get<std::string>() != expect_name)
      throw std::runtime_error("checkpoint: expected matrix '" + expect_name + "', found '" +
                               entry.at("name").get<std::string>() + "'");
    Matrix m(entry.at("rows").get<Eigen::Index>(), entry.at("cols").get<Eigen::Index>());
    in_.read(reinterpret_cast<char*>(m.data()),
             static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(m.size())));
    if (!in_) throw std::runtime_error("checkpoint: truncated matrix blob");
    return m;
  }

 private:
  std::ifstream in_;
  json header_;
  std::size_t cursor_ = 0;
};

json metadata_json(const std::map<std::string, std::string>& metadata) {
  json j = json::object();
  for (const auto& [k, v] : metadata) j[k] = v;
  return j;
}

void read_metadata(const json& header, std::map<std::string, std::string>* metadata) {
  if (!metadata) return;
  metadata->clear();
  if (header.contains("metadata"))
    for (const auto& [k, v] : header["metadata"].items()) (*metadata)[k] = v.get<std::string>();
}

Coupling make_coupling(Matrix m) {
  Coupling c;
  c.row_marginal = m.rowwise().sum();
  c.col_marginal = m.colwise().sum().transpose();
  c.matrix = std::move(m);
  return c;
}

}  // namespace

void save_checkpoint(const std::string& path, const AlignmentState& state,
                     const std::map<std::string, std::string>& metadata) {
  Writer w(path);
  json header;
  header["kind"] = "alignment";
  header["metadata"] = metadata_json(metadata);
  header["history"] = state.history;
  header["round_regressions"] = state.round_regressions;
  header["gw_converged"] = state.gw_converged;
  header["objective"] = state.barycenter.objective;

  json langs = json::array();
  std::vector<Matrix> mass_cols;
  for (std::size_t i = 0; i < state.spaces.size(); ++i) {
    langs.push_back({{"tag", state.spaces[i].language_id}, {"words", state.spaces[i].words}});
    mass_cols.push_back(state.masses[i]);
  }
  header["languages"] = langs;

  for (std::size_t i = 0; i < state.spaces.size(); ++i) {
    const std::string p = "lang" + std::to_string(i) + ".";
    w.add(p + "vectors", state.spaces[i].vectors);
    w.add(p + "map", state.maps[i]);
    w.add(p + "mass", mass_cols[i]);
    w.add(p + "coupling", state.barycenter.couplings[i].matrix);
  }
  Matrix bary_mass = state.barycenter.distribution.mass;
  w.add("barycenter.support", state.barycenter.distribution.support);
  w.add("barycenter.mass", bary_mass);
  w.finish(std::move(header));
}

AlignmentState load_checkpoint(const std::string& path,
                               std::map<std::string, std::string>* metadata) {
  Reader r(path);
  const json& header = r.header();
  if (header.value("kind", "") != "alignment")
    throw std::runtime_error("checkpoint: not an alignment checkpoint: " + path);
  read_metadata(header, metadata);

  AlignmentState state;
  state.history = header.value("history", std::vector<double>{});
  state.round_regressions = header.value("round_regressions", std::vector<bool>{});
  state.gw_converged = header.value("gw_converged", std::vector<bool>{});

  const json& langs = header.at("languages");
  for (std::size_t i = 0; i < langs.size(); ++i) {
    const std::string p = "lang" + std::to_string(i) + ".";
    EmbeddingSpace sp;
    sp.language_id = langs[i].at("tag").get<std::string>();
    sp.words = langs[i].at("words").get<std::vector<std::string>>();
    sp.vectors = r.next_matrix(p + "vectors");
    state.spaces.push_back(std::move(sp));
    state.maps.push_back(r.next_matrix(p + "map"));
    state.masses.push_back(r.next_matrix(p + "mass"));
    state.barycenter.couplings.push_back(make_coupling(r.next_matrix(p + "coupling")));
  }
  state.barycenter.distribution.support = r.next_matrix("barycenter.support");
  state.barycenter.distribution.mass = r.next_matrix("barycenter.mass");
  state.barycenter.objective = header.value("objective", 0.0);
  return state;
}

void save_tree_checkpoint(const std::string& path, const LanguageTree& tree,
                          const std::map<std::string, std::string>& metadata) {
  Writer w(path);
  json header;
  header["kind"] = "tree";
  header["metadata"] = metadata_json(metadata);
  header["root"] = tree.root;

  json nodes = json::array();
  for (const auto& n : tree.nodes)
    nodes.push_back({{"label", n.label}, {"children", n.children}, {"parent", n.parent}});
  header["nodes"] = nodes;

  std::vector<Matrix> masses;
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) masses.push_back(tree.nodes[i].dist.mass);
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const std::string p = "node" + std::to_string(i) + ".";
    w.add(p + "support", tree.nodes[i].dist.support);
    w.add(p + "mass", masses[i]);
    if (tree.nodes[i].parent != -1) {
      w.add(p + "to_parent", tree.nodes[i].to_parent.matrix);
      w.add(p + "map_to_parent", tree.nodes[i].map_to_parent);
    }
  }
  w.finish(std::move(header));
}

LanguageTree load_tree_checkpoint(const std::string& path,
                                  std::map<std::string, std::string>* metadata) {
  Reader r(path);
  const json& header = r.header();
  if (header.value("kind", "") != "tree")
    throw std::runtime_error("checkpoint: not a tree checkpoint: " + path);
  read_metadata(header, metadata);

  LanguageTree tree;
  tree.root = header.at("root").get<int>();
  for (const auto& jn : header.at("nodes")) {
    TreeNode n;
    n.label = jn.at("label").get<std::string>();
    n.children = jn.at("children").get<std::vector<int>>();
    n.parent = jn.at("parent").get<int>();
    tree.nodes.push_back(std::move(n));
  }
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const std::string p = "node" + std::to_string(i) + ".";
    tree.nodes[i].dist.support = r.next_matrix(p + "support");
    tree.nodes[i].dist.mass = r.next_matrix(p + "mass");
    if (tree.nodes[i].parent != -1) {
      tree.nodes[i].to_parent = make_coupling(r.next_matrix(p + "to_parent"));
      tree.nodes[i].map_to_parent = r.next_matrix(p + "map_to_parent");
    }
  }
  return tree;
}

}  // namespace wba
