#include "wba/config.hpp"

#include <fstream>
#include <sstream>

namespace wba {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) parts.push_back(trim(item));
  return parts;
}

}  // namespace

ConfigMap ConfigMap::from_string(const std::string& text) {
  ConfigMap cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: missing '=' on line " + std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw std::runtime_error("config: empty key on line " + std::to_string(lineno));
    cfg.values_[key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

ConfigMap ConfigMap::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return from_string(text.str());
}

std::string ConfigMap::get(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  return std::stod(it->second);
}

long ConfigMap::get_int(const std::string& key, long fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  return std::stol(it->second);
}

bool ConfigMap::get_bool(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::runtime_error("config: bad boolean for " + key + ": " + v);
}

RunConfig parse_run_config(const ConfigMap& cfg) {
  RunConfig run;

  for (const auto& entry : split(cfg.get("languages", ""), ',')) {
    if (entry.empty()) continue;
    const auto colon = entry.find(':');
    if (colon == std::string::npos)
      throw std::runtime_error("config: languages entries must be tag:path, got " + entry);
    run.languages.push_back({trim(entry.substr(0, colon)), trim(entry.substr(colon + 1))});
  }
  if (run.languages.size() < 2)
    throw std::runtime_error("config: need at least 2 languages");
  for (std::size_t i = 0; i < run.languages.size(); ++i)
    for (std::size_t j = i + 1; j < run.languages.size(); ++j)
      if (run.languages[i].path == run.languages[j].path)
        throw std::runtime_error("config: duplicate embedding path " + run.languages[i].path);

  run.vocab_size = static_cast<std::size_t>(cfg.get_int("vocab_size", 5000));
  run.out_dir = cfg.get("out", ".");
  run.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 0));
  run.tree_spec = cfg.get("tree", "");

  PipelineConfig& p = run.pipeline;
  const std::string mass = cfg.get("mass_model", "uniform");
  if (mass == "uniform")
    p.mass_model = MassModel::Uniform;
  else if (mass == "zipf")
    p.mass_model = MassModel::Zipf;
  else
    throw std::runtime_error("config: unknown mass_model " + mass);

  p.outer_iters = static_cast<int>(cfg.get_int("outer_iters", 10));
  p.pivot_index = static_cast<std::size_t>(cfg.get_int("pivot_index", 0));
  p.objective_rel_tolerance = cfg.get_double("objective_rel_tolerance", 1e-4);
  p.warm_start_support = cfg.get_bool("warm_start_support", true);

  p.gw.epsilon = cfg.get_double("gw.epsilon", 5e-5);
  p.gw.max_outer_iters = static_cast<int>(cfg.get_int("gw.max_iters", 200));
  p.gw.tolerance = cfg.get_double("gw.tolerance", 1e-7);
  p.gw.inner.max_iters = static_cast<int>(cfg.get_int("gw.inner_iters", 500));

  p.ot.epsilon = cfg.get_double("sinkhorn.epsilon", 1e-2);
  p.ot.epsilon_relative_to_median = cfg.get_bool("sinkhorn.epsilon_relative", true);
  p.ot.max_iters = static_cast<int>(cfg.get_int("sinkhorn.max_iters", 1000));
  p.ot.tolerance = cfg.get_double("sinkhorn.tolerance", 1e-6);

  p.bary.support_size = cfg.get_int("barycenter.support_size", 0);
  p.bary.max_iters = static_cast<int>(cfg.get_int("barycenter.max_iters", 10));
  p.bary.location_tolerance = cfg.get_double("barycenter.location_tolerance", 1e-4);
  p.bary.optimize_weights = cfg.get_bool("barycenter.optimize_weights", true);
  p.bary.weight_step = cfg.get_double("barycenter.weight_step", 0.0);
  p.bary.seed = run.seed;
  const std::string lambda = cfg.get("barycenter.lambda", "");
  if (!lambda.empty()) {
    const auto parts = split(lambda, ',');
    p.bary.lambda.resize(static_cast<Eigen::Index>(parts.size()));
    for (std::size_t i = 0; i < parts.size(); ++i)
      p.bary.lambda[static_cast<Eigen::Index>(i)] = std::stod(parts[i]);
  }
  return run;
}

std::map<std::string, std::string> RunConfig::manifest() const {
  std::map<std::string, std::string> m;
  std::string langs;
  for (const auto& l : languages) langs += (langs.empty() ? "" : ",") + l.tag + ":" + l.path;
  m["languages"] = langs;
  m["vocab_size"] = std::to_string(vocab_size);
  m["seed"] = std::to_string(seed);
  m["out"] = out_dir;
  if (!tree_spec.empty()) m["tree"] = tree_spec;
  m["mass_model"] = pipeline.mass_model == MassModel::Uniform ? "uniform" : "zipf";
  m["outer_iters"] = std::to_string(pipeline.outer_iters);
  m["pivot_index"] = std::to_string(pipeline.pivot_index);
  m["objective_rel_tolerance"] = std::to_string(pipeline.objective_rel_tolerance);
  m["warm_start_support"] = pipeline.warm_start_support ? "true" : "false";
  m["gw.epsilon"] = std::to_string(pipeline.gw.epsilon);
  m["gw.max_iters"] = std::to_string(pipeline.gw.max_outer_iters);
  m["gw.tolerance"] = std::to_string(pipeline.gw.tolerance);
  m["sinkhorn.epsilon"] = std::to_string(pipeline.ot.epsilon);
  m["sinkhorn.epsilon_relative"] = pipeline.ot.epsilon_relative_to_median ? "true" : "false";
  m["sinkhorn.max_iters"] = std::to_string(pipeline.ot.max_iters);
  m["sinkhorn.tolerance"] = std::to_string(pipeline.ot.tolerance);
  m["barycenter.support_size"] = std::to_string(pipeline.bary.support_size);
  m["barycenter.max_iters"] = std::to_string(pipeline.bary.max_iters);
  m["barycenter.location_tolerance"] = std::to_string(pipeline.bary.location_tolerance);
  m["barycenter.optimize_weights"] = pipeline.bary.optimize_weights ? "true" : "false";
  m["barycenter.weight_step"] = std::to_string(pipeline.bary.weight_step);
  std::string lam;
  for (Eigen::Index i = 0; i < pipeline.bary.lambda.size(); ++i)
    lam += (lam.empty() ? "" : ",") + std::to_string(pipeline.bary.lambda[i]);
  m["barycenter.lambda"] = lam.empty() ? "uniform" : lam;
  return m;
}

}  // namespace wba
