#pragma once

#include <map>
#include <string>

#include "wba/align.hpp"
#include "wba/tree.hpp"

namespace wba {

// Container format: magic "WBACHK01", little-endian u64 header length, JSON
// header (structure, vocabularies, metadata, matrix registry), then raw
// column-major double blobs in registry order.

void save_checkpoint(const std::string& path, const AlignmentState& state,
                     const std::map<std::string, std::string>& metadata = {});

AlignmentState load_checkpoint(const std::string& path,
                               std::map<std::string, std::string>* metadata = nullptr);

void save_tree_checkpoint(const std::string& path, const LanguageTree& tree,
                          const std::map<std::string, std::string>& metadata = {});

LanguageTree load_tree_checkpoint(const std::string& path,
                                  std::map<std::string, std::string>* metadata = nullptr);

}  // namespace wba
