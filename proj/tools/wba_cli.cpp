#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>

#include <CLI11.hpp>

#include "wba/checkpoint.hpp"
#include "wba/config.hpp"
#include "wba/eval.hpp"
#include "wba/synth.hpp"

namespace fs = std::filesystem;
using namespace wba;

namespace {

std::vector<EmbeddingSpace> load_spaces(const RunConfig& run) {
  std::vector<EmbeddingSpace> spaces;
  for (const auto& lang : run.languages)
    spaces.push_back(load_embeddings(lang.path, run.vocab_size, lang.tag));
  return spaces;
}

void write_manifest(const fs::path& path, const std::map<std::string, std::string>& entries) {
  std::ofstream out(path);
  for (const auto& [k, v] : entries) out << k << " = " << v << '\n';
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

void write_convergence(const fs::path& dir, const AlignmentState& state) {
  {
    std::ofstream out(dir / "convergence.tsv");
    out << "round\tobjective\tregressed\n";
    for (std::size_t r = 0; r < state.history.size(); ++r)
      out << (r + 1) << '\t' << state.history[r] << '\t'
          << (state.round_regressions[r] ? 1 : 0) << '\n';
  }
  {
    std::ofstream out(dir / "barycenter_convergence.tsv");
    out << "iteration\tobjective\tmax_displacement\n";
    const auto& bs = state.barycenter;
    for (std::size_t i = 0; i < bs.displacement_history.size(); ++i)
      out << (i + 1) << '\t' << bs.objective_history[i] << '\t' << bs.displacement_history[i]
          << '\n';
  }
}

AlignmentState run_alignment(const RunConfig& run) {
  auto spaces = load_spaces(run);
  AlignmentState state = gw_initialize(spaces, run.pipeline);
  barycenter_align(state, run.pipeline);
  return state;
}

Lexicon pair_lexicon(const AlignmentState& state, Eigen::Index si, Eigen::Index ti, int depth) {
  return infer_translations(state.barycenter.couplings[static_cast<std::size_t>(si)],
                            state.barycenter.couplings[static_cast<std::size_t>(ti)],
                            state.spaces[static_cast<std::size_t>(si)],
                            state.spaces[static_cast<std::size_t>(ti)], depth,
                            &state.spaces[static_cast<std::size_t>(si)].vectors,
                            &state.spaces[static_cast<std::size_t>(ti)].vectors);
}

std::optional<fs::path> find_dictionary(const fs::path& dir, const std::string& src,
                                        const std::string& tgt) {
  for (const char* pattern : {"%s-%s.dict", "%s-%s.txt", "%s-%s.5000-6500.txt"}) {
    char name[256];
    std::snprintf(name, sizeof(name), pattern, src.c_str(), tgt.c_str());
    if (fs::exists(dir / name)) return dir / name;
  }
  return std::nullopt;
}

// P@1/P@10/MAP rows for every ordered pair with a resolvable dictionary.
void evaluate_state(const AlignmentState& state, const fs::path& dict_dir, int depth,
                    std::ostream& out, const AlignmentState* baseline) {
  out << "src\ttgt\tp@1\tp@10\tmap\tqueries\tdropped";
  if (baseline) out << "\tmcnemar_p";
  out << '\n';

  double sum_p1 = 0, sum_p10 = 0, sum_map = 0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < state.spaces.size(); ++i)
    for (std::size_t j = 0; j < state.spaces.size(); ++j) {
      if (i == j) continue;
      const std::string &src = state.spaces[i].language_id, &tgt = state.spaces[j].language_id;
      const auto dict_path = find_dictionary(dict_dir, src, tgt);
      if (!dict_path) {
        std::cerr << "note: no dictionary for " << src << "-" << tgt << ", pair skipped\n";
        continue;
      }
      const GoldDictionary gold =
          load_gold_dictionary(dict_path->string(), state.spaces[i], state.spaces[j]);
      const Lexicon lex = pair_lexicon(state, static_cast<Eigen::Index>(i),
                                       static_cast<Eigen::Index>(j), depth);
      const EvalReport rep = evaluate_pair(lex, gold, {1, 10});
      out << src << '\t' << tgt << '\t' << rep.precision_at.at(1) << '\t'
          << rep.precision_at.at(10) << '\t' << rep.mean_average_precision << '\t'
          << rep.query_count << '\t' << rep.dropped_queries;
      if (baseline) {
        const Eigen::Index bi = baseline->language_index(src);
        const Eigen::Index bj = baseline->language_index(tgt);
        if (bi < 0 || bj < 0)
          throw std::runtime_error("baseline checkpoint lacks language " + src + " or " + tgt);
        const Lexicon blex = pair_lexicon(*baseline, bi, bj, depth);
        out << '\t' << mcnemar_one_sided(top1_hits(lex, gold), top1_hits(blex, gold));
      }
      out << '\n';
      sum_p1 += rep.precision_at.at(1);
      sum_p10 += rep.precision_at.at(10);
      sum_map += rep.mean_average_precision;
      ++pairs;
    }
  if (pairs > 0)
    out << "average\t-\t" << sum_p1 / static_cast<double>(pairs) << '\t'
        << sum_p10 / static_cast<double>(pairs) << '\t' << sum_map / static_cast<double>(pairs)
        << "\t-\t-" << (baseline ? "\t-" : "") << '\n';
}

int cmd_align(const std::string& config_path) {
  const RunConfig run = parse_run_config(ConfigMap::from_file(config_path));
  fs::create_directories(run.out_dir);

  AlignmentState state;
  try {
    state = run_alignment(run);
  } catch (const std::exception& e) {
    std::cerr << "align: pipeline failed: " << e.what() << '\n';
    return 1;
  }

  auto manifest = run.manifest();
  manifest["format_version"] = "1";
  save_checkpoint((fs::path(run.out_dir) / "checkpoint.wba").string(), state, manifest);
  write_manifest(fs::path(run.out_dir) / "manifest.txt", manifest);
  write_convergence(run.out_dir, state);
  std::cout << "align: wrote " << run.out_dir << "/checkpoint.wba ("
            << state.history.size() << " rounds, final objective "
            << (state.history.empty() ? 0.0 : state.history.back()) << ")\n";
  return 0;
}

int cmd_translate(const std::string& checkpoint, const std::string& src, const std::string& tgt,
                  int topk, const std::string& words_file, const std::string& out_path) {
  const AlignmentState state = load_checkpoint(checkpoint);
  const Eigen::Index si = state.language_index(src);
  const Eigen::Index ti = state.language_index(tgt);
  if (si < 0 || ti < 0) {
    std::cerr << "translate: unknown language tag\n";
    return 1;
  }
  const Lexicon lex = pair_lexicon(state, si, ti, topk);

  std::set<std::string> restrict_to;
  std::size_t missing = 0;
  if (!words_file.empty()) {
    std::ifstream in(words_file);
    if (!in) {
      std::cerr << "translate: cannot open " << words_file << '\n';
      return 1;
    }
    std::string w;
    while (in >> w) {
      if (lex.find(w))
        restrict_to.insert(w);
      else
        ++missing;
    }
  }

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) {
      std::cerr << "translate: cannot write " << out_path << '\n';
      return 1;
    }
    out = &file;
  }
  for (const auto& r : lex.rankings) {
    if (!restrict_to.empty() && !restrict_to.count(r.source)) continue;
    for (std::size_t rank = 0; rank < r.targets.size(); ++rank)
      *out << r.source << '\t' << r.targets[rank].first << '\t' << (rank + 1) << '\t'
           << r.targets[rank].second << '\n';
  }
  if (missing > 0) std::cerr << "translate: " << missing << " query words not in vocabulary\n";
  return 0;
}

int cmd_evaluate(const std::string& checkpoint, const std::string& dict_dir, int depth,
                 const std::string& baseline_path, const std::string& out_path) {
  const AlignmentState state = load_checkpoint(checkpoint);
  std::optional<AlignmentState> baseline;
  if (!baseline_path.empty()) baseline = load_checkpoint(baseline_path);

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    out = &file;
  }
  evaluate_state(state, dict_dir, depth, *out, baseline ? &*baseline : nullptr);
  return 0;
}

int cmd_ablate(const std::string& config_path, const std::string& mode,
               const std::string& params, const std::string& dict_dir, int depth) {
  const ConfigMap base_cfg = ConfigMap::from_file(config_path);
  RunConfig base = parse_run_config(base_cfg);
  fs::create_directories(base.out_dir);
  std::ofstream out(fs::path(base.out_dir) / ("ablation_" + mode + ".tsv"));
  out << "setting\treport\n";

  auto run_and_report = [&](const std::string& setting, const RunConfig& run) {
    const AlignmentState state = run_alignment(run);
    std::ostringstream block;
    evaluate_state(state, dict_dir, depth, block, nullptr);
    out << "# setting = " << setting << '\n' << block.str();
    std::cout << "ablate: finished setting " << setting << '\n';
  };

  if (mode == "support-size") {
    std::istringstream in(params);
    std::string item;
    while (std::getline(in, item, ',')) {
      RunConfig run = base;
      run.pipeline.bary.support_size = std::stol(item);
      run_and_report("support_size=" + item, run);
    }
  } else if (mode == "language-subset") {
    std::istringstream in(params);
    std::string subset;
    while (std::getline(in, subset, ';')) {
      RunConfig run = base;
      run.languages.clear();
      std::istringstream tags(subset);
      std::string tag;
      while (std::getline(tags, tag, ',')) {
        bool found = false;
        for (const auto& l : base.languages)
          if (l.tag == tag) {
            run.languages.push_back(l);
            found = true;
          }
        if (!found) throw std::runtime_error("ablate: unknown language " + tag);
      }
      if (run.languages.size() < 2) throw std::runtime_error("ablate: subset needs >= 2 languages");
      run_and_report("subset=" + subset, run);
    }
  } else if (mode == "pivot-robustness") {
    for (std::size_t pivot = 0; pivot < base.languages.size(); ++pivot) {
      RunConfig run = base;
      run.pipeline.pivot_index = pivot;
      run_and_report("pivot=" + base.languages[pivot].tag, run);
    }
  } else {
    std::cerr << "ablate: unknown mode " << mode << '\n';
    return 1;
  }
  return 0;
}

int cmd_hierarchical(const std::string& config_path, const std::string& preset,
                     const std::string& dict_dir, int depth) {
  const ConfigMap cfg = ConfigMap::from_file(config_path);
  RunConfig run = parse_run_config(cfg);
  fs::create_directories(run.out_dir);

  if (run.tree_spec.empty()) {
    std::vector<std::string> tags;
    for (const auto& l : run.languages) tags.push_back(l.tag);
    run.tree_spec = tree_preset(preset.empty() ? "star" : preset, tags);
  }

  const auto spaces = load_spaces(run);
  const LanguageTree tree = hierarchical_align(spaces, run.tree_spec, run.pipeline);

  auto manifest = run.manifest();
  manifest["tree"] = run.tree_spec;
  manifest["format_version"] = "1";
  save_tree_checkpoint((fs::path(run.out_dir) / "tree_checkpoint.wba").string(), tree, manifest);
  write_manifest(fs::path(run.out_dir) / "manifest.txt", manifest);

  // leaf-pair evaluation through the tree
  std::ofstream report(fs::path(run.out_dir) / "hierarchical_report.tsv");
  report << "src\ttgt\tp@1\tp@10\tmap\tqueries\tdropped\n";
  std::map<std::string, const EmbeddingSpace*> space_of;
  for (const auto& sp : spaces) space_of[sp.language_id] = &sp;
  for (const auto& src : tree.leaf_tags())
    for (const auto& tgt : tree.leaf_tags()) {
      if (src == tgt) continue;
      std::optional<fs::path> dict_path;
      if (!dict_dir.empty()) dict_path = find_dictionary(dict_dir, src, tgt);
      if (!dict_path) continue;
      const Coupling joint = translate_via_tree(tree, src, tgt);
      // score directly from the path coupling; marginals act as self couplings
      Coupling src_side{joint.matrix, joint.row_marginal, joint.col_marginal};
      Coupling identity;
      const Eigen::Index nt = joint.matrix.cols();
      identity.matrix = Matrix::Identity(nt, nt);
      identity.row_marginal = Vector::Ones(nt);
      identity.col_marginal = Vector::Ones(nt);
      const Lexicon lex =
          infer_translations(src_side, identity, *space_of[src], *space_of[tgt], depth);
      const GoldDictionary gold =
          load_gold_dictionary(dict_path->string(), *space_of[src], *space_of[tgt]);
      const EvalReport rep = evaluate_pair(lex, gold, {1, 10});
      report << src << '\t' << tgt << '\t' << rep.precision_at.at(1) << '\t'
             << rep.precision_at.at(10) << '\t' << rep.mean_average_precision << '\t'
             << rep.query_count << '\t' << rep.dropped_queries << '\n';
    }
  std::cout << "hierarchical: wrote " << run.out_dir << "/tree_checkpoint.wba\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multilingual embedding alignment via Wasserstein barycenters"};
  app.require_subcommand(1);

  std::string config_path, checkpoint, src, tgt, words_file, out_path, dict_dir, baseline;
  std::string mode, params, preset, synth_dir;
  int topk = 10, depth = 100;
  SynthConfig synth;

  auto* align = app.add_subcommand("align", "Run the full alignment pipeline");
  align->add_option("config", config_path, "run configuration file")->required();

  auto* translate = app.add_subcommand("translate", "Infer a lexicon from a checkpoint");
  translate->add_option("checkpoint", checkpoint)->required();
  translate->add_option("--src", src)->required();
  translate->add_option("--tgt", tgt)->required();
  translate->add_option("--topk", topk);
  translate->add_option("--words", words_file, "restrict to words from this file");
  translate->add_option("--out", out_path);

  auto* evaluate = app.add_subcommand("evaluate", "Score a checkpoint against gold dictionaries");
  evaluate->add_option("checkpoint", checkpoint)->required();
  evaluate->add_option("dicts", dict_dir, "directory of gold dictionaries")->required();
  evaluate->add_option("--depth", depth, "ranking depth for MAP");
  evaluate->add_option("--baseline", baseline, "checkpoint for McNemar comparison");
  evaluate->add_option("--out", out_path);

  auto* ablate = app.add_subcommand("ablate", "Re-run alignment across ablation settings");
  ablate->add_option("config", config_path)->required();
  ablate->add_option("--mode", mode, "support-size | language-subset | pivot-robustness")
      ->required();
  ablate->add_option("--params", params, "mode parameters (sizes or subsets)");
  ablate->add_option("--dicts", dict_dir)->required();
  ablate->add_option("--depth", depth);

  auto* hier = app.add_subcommand("hierarchical", "Hierarchical (language-tree) alignment");
  hier->add_option("config", config_path)->required();
  hier->add_option("--preset", preset, "tree preset when config has no tree");
  hier->add_option("--dicts", dict_dir);
  hier->add_option("--depth", depth);

  auto* gen = app.add_subcommand("synth-gen", "Generate synthetic languages + gold dictionaries");
  gen->add_option("dir", synth_dir)->required();
  gen->add_option("--languages", synth.num_languages);
  gen->add_option("--vocab", synth.vocab);
  gen->add_option("--dim", synth.dim);
  gen->add_option("--noise", synth.noise_sigma);
  gen->add_option("--seed", synth.seed);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*align) return cmd_align(config_path);
    if (*translate) return cmd_translate(checkpoint, src, tgt, topk, words_file, out_path);
    if (*evaluate) return cmd_evaluate(checkpoint, dict_dir, depth, baseline, out_path);
    if (*ablate) return cmd_ablate(config_path, mode, params, dict_dir, depth);
    if (*hier) return cmd_hierarchical(config_path, preset, dict_dir, depth);
    if (*gen) {
      generate_synthetic(synth_dir, synth);
      std::cout << "synth-gen: wrote " << synth.num_languages << " languages to " << synth_dir
                << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << app.get_subcommands().front()->get_name() << ": " << e.what() << '\n';
    return 1;
  }
  return 0;
}
