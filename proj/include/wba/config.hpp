#pragma once

#include <map>
#include <string>
#include <vector>

#include "wba/align.hpp"

namespace wba {

// Flat key-value configuration: one "key = value" per line, '#' comments,
// nested settings via dotted keys (e.g. "sinkhorn.tolerance = 1e-6").
class ConfigMap {
 public:
  ConfigMap() = default;
  static ConfigMap from_file(const std::string& path);
  static ConfigMap from_string(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

struct LanguageInput {
  std::string tag;
  std::string path;
};

// Resolved run settings for the CLI commands.
struct RunConfig {
  std::vector<LanguageInput> languages;
  std::size_t vocab_size = 5000;
  PipelineConfig pipeline;
  std::string tree_spec;    // empty unless hierarchical
  std::string out_dir = ".";
  std::uint64_t seed = 0;

  // Every resolved setting, for the run manifest.
  std::map<std::string, std::string> manifest() const;
};

RunConfig parse_run_config(const ConfigMap& cfg);

}  // namespace wba
