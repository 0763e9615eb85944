#pragma once

#include <string>
#include <vector>

#include "wba/align.hpp"

namespace wba {

struct TreeNode {
  std::string label;          // leaf: language tag; internal: generated
  std::vector<int> children;  // empty for leaves
  int parent = -1;
  DiscreteDistribution dist;  // leaf: aligned language; internal: barycenter
  Coupling to_parent;         // child distribution -> parent barycenter
  Matrix map_to_parent;       // rotation applied to the child during the parent solve
};

struct LanguageTree {
  std::vector<TreeNode> nodes;
  int root = -1;

  int find_leaf(const std::string& tag) const;
  std::vector<std::string> leaf_tags() const;
};

// Parses a nested-parenthesis topology, e.g. "((en,de),((es,pt),(it,fr)))".
// Returns the node list with leaves carrying their tags.
LanguageTree parse_tree_spec(const std::string& spec);

// Named topology presets ("star", "indo-european") over the given tags.
std::string tree_preset(const std::string& name, const std::vector<std::string>& tags);

// Depth-first hierarchical alignment: GW-initializes the leaves, then builds
// each internal node as the barycenter of its children, storing the edge
// couplings and rotations.
LanguageTree hierarchical_align(const std::vector<EmbeddingSpace>& spaces,
                                const std::string& tree_spec, const PipelineConfig& cfg);

// Coupling product along the unique src -> tgt leaf path (transposed on
// down-edges), renormalized to a joint distribution.
Coupling translate_via_tree(const LanguageTree& tree, const std::string& src,
                            const std::string& tgt);

}  // namespace wba
