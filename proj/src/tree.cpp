#include "wba/tree.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace wba {

int LanguageTree::find_leaf(const std::string& tag) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].children.empty() && nodes[i].label == tag) return static_cast<int>(i);
  return -1;
}

std::vector<std::string> LanguageTree::leaf_tags() const {
  std::vector<std::string> tags;
  for (const auto& n : nodes)
    if (n.children.empty()) tags.push_back(n.label);
  return tags;
}

namespace {

// node := tag | '(' node (',' node)+ ')'
int parse_node(const std::string& s, std::size_t& pos, LanguageTree& tree) {
  while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  if (pos >= s.size()) throw std::invalid_argument("tree spec: unexpected end");

  if (s[pos] == '(') {
    ++pos;
    std::vector<int> children;
    while (true) {
      children.push_back(parse_node(s, pos, tree));
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
      if (pos >= s.size()) throw std::invalid_argument("tree spec: unbalanced parentheses");
      if (s[pos] == ',') {
        ++pos;
        continue;
      }
      if (s[pos] == ')') {
        ++pos;
        break;
      }
      throw std::invalid_argument("tree spec: expected ',' or ')'");
    }
    if (children.size() < 2) throw std::invalid_argument("tree spec: internal node needs >= 2 children");
    TreeNode node;
    node.label = "node" + std::to_string(tree.nodes.size());
    node.children = children;
    tree.nodes.push_back(node);
    const int idx = static_cast<int>(tree.nodes.size()) - 1;
    for (int c : children) tree.nodes[static_cast<std::size_t>(c)].parent = idx;
    return idx;
  }

  std::string tag;
  while (pos < s.size() && s[pos] != ',' && s[pos] != ')' && s[pos] != '(' &&
         !std::isspace(static_cast<unsigned char>(s[pos])))
    tag += s[pos++];
  if (tag.empty()) throw std::invalid_argument("tree spec: empty leaf tag");
  TreeNode node;
  node.label = tag;
  tree.nodes.push_back(node);
  return static_cast<int>(tree.nodes.size()) - 1;
}

}  // namespace

LanguageTree parse_tree_spec(const std::string& spec) {
  LanguageTree tree;
  std::size_t pos = 0;
  tree.root = parse_node(spec, pos, tree);
  while (pos < spec.size() && std::isspace(static_cast<unsigned char>(spec[pos]))) ++pos;
  if (pos != spec.size()) throw std::invalid_argument("tree spec: trailing input");
  if (tree.nodes[static_cast<std::size_t>(tree.root)].children.empty())
    throw std::invalid_argument("tree spec: root must be internal");
  auto tags = tree.leaf_tags();
  std::sort(tags.begin(), tags.end());
  if (std::adjacent_find(tags.begin(), tags.end()) != tags.end())
    throw std::invalid_argument("tree spec: duplicate leaf tag");
  return tree;
}

std::string tree_preset(const std::string& name, const std::vector<std::string>& tags) {
  if (name == "star") {
    std::ostringstream out;
    out << '(';
    for (std::size_t i = 0; i < tags.size(); ++i) out << (i ? "," : "") << tags[i];
    out << ')';
    return out.str();
  }
  if (name == "indo-european") {
    // Germanic / Romance split over the six MUSE languages
    std::vector<std::string> sorted = tags;
    std::sort(sorted.begin(), sorted.end());
    if (sorted == std::vector<std::string>{"de", "en", "es", "fr", "it", "pt"})
      return "((en,de),((es,pt),(it,fr)))";
    throw std::invalid_argument("tree preset 'indo-european' needs languages {en,fr,es,it,pt,de}");
  }
  throw std::invalid_argument("unknown tree preset: " + name);
}

LanguageTree hierarchical_align(const std::vector<EmbeddingSpace>& spaces,
                                const std::string& tree_spec, const PipelineConfig& cfg) {
  LanguageTree tree = parse_tree_spec(tree_spec);

  std::vector<std::string> want, have = tree.leaf_tags();
  for (const auto& sp : spaces) want.push_back(sp.language_id);
  std::sort(want.begin(), want.end());
  std::sort(have.begin(), have.end());
  if (want != have)
    throw std::invalid_argument("hierarchical_align: tree leaves do not match the input languages");

  AlignmentState init = gw_initialize(spaces, cfg);
  for (auto& node : tree.nodes) {
    if (!node.children.empty()) continue;
    const Eigen::Index li = init.language_index(node.label);
    node.dist = {init.spaces[static_cast<std::size_t>(li)].vectors,
                 init.masses[static_cast<std::size_t>(li)]};
    node.map_to_parent = init.maps[static_cast<std::size_t>(li)];
  }

  // post-order: every internal node is the barycenter of its settled children
  std::function<void(int)> build = [&](int idx) {
    TreeNode& node = tree.nodes[static_cast<std::size_t>(idx)];
    if (node.children.empty()) return;
    for (int c : node.children) build(c);

    std::vector<DiscreteDistribution> dists;
    for (int c : node.children) dists.push_back(tree.nodes[static_cast<std::size_t>(c)].dist);

    PipelineConfig local = cfg;
    local.bary.lambda = Vector();  // uniform over this node's children
    RefineResult res = refine_to_barycenter(dists, local);

    node.dist = res.bary.distribution;
    for (std::size_t ci = 0; ci < node.children.size(); ++ci) {
      TreeNode& child = tree.nodes[static_cast<std::size_t>(node.children[ci])];
      child.dist = dists[ci];  // rotated in place by the refinement
      child.to_parent = res.bary.couplings[ci];
      child.map_to_parent = res.rotations[ci];
    }
  };
  build(tree.root);
  return tree;
}

Coupling translate_via_tree(const LanguageTree& tree, const std::string& src,
                            const std::string& tgt) {
  const int s = tree.find_leaf(src);
  const int t = tree.find_leaf(tgt);
  if (s < 0) throw std::invalid_argument("translate_via_tree: unknown language " + src);
  if (t < 0) throw std::invalid_argument("translate_via_tree: unknown language " + tgt);

  const auto& nodes = tree.nodes;
  if (s == t) {
    const Vector& mass = nodes[static_cast<std::size_t>(s)].dist.mass;
    Coupling self{Matrix(mass.asDiagonal()), mass, mass};
    return self;
  }

  // ancestor chains up to the root, then trim to the LCA
  auto chain = [&](int leaf) {
    std::vector<int> path;
    for (int n = leaf; n != -1; n = nodes[static_cast<std::size_t>(n)].parent) path.push_back(n);
    return path;
  };
  std::vector<int> up = chain(s), down = chain(t);
  while (up.size() > 1 && down.size() > 1 && up[up.size() - 2] == down[down.size() - 2]) {
    up.pop_back();
    down.pop_back();
  }

  Matrix product = nodes[static_cast<std::size_t>(up[0])].to_parent.matrix;
  for (std::size_t i = 1; i + 1 < up.size(); ++i)
    product *= nodes[static_cast<std::size_t>(up[i])].to_parent.matrix;
  // descend: transposed couplings, from just below the LCA down to the target leaf
  for (std::size_t i = down.size() - 1; i-- > 0;)
    product *= nodes[static_cast<std::size_t>(down[i])].to_parent.matrix.transpose();

  const double total = product.sum();
  if (total > 0.0) product /= total;
  Coupling out;
  out.matrix = product;
  out.row_marginal = product.rowwise().sum();
  out.col_marginal = product.colwise().sum().transpose();
  return out;
}

}  // namespace wba
