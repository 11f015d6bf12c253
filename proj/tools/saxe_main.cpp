// saxe: command-line driver for the semantic axes pipeline.
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "saxe/pipeline.hpp"

namespace {

struct GlobalFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::size_t> threads;
  std::vector<std::string> settings;
  bool quiet = false;
};

saxe::RunConfig resolve_config(const GlobalFlags& g) {
  saxe::RunConfig config = g.config.empty() ? saxe::RunConfig{} : saxe::load_config(g.config);
  for (const auto& kv : g.settings) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw saxe::InputError("--set expects key=value, got '" + kv + "'");
    saxe::apply_setting(config, saxe::trim(kv.substr(0, eq)), saxe::trim(kv.substr(eq + 1)));
  }
  if (g.seed) config.seed = *g.seed;
  if (!g.out.empty()) config.out = g.out;
  if (g.threads) config.threads = *g.threads;
  saxe::validate_config(config);
  return config;
}

// Per-subcommand flags, each a shorthand for one config key.
struct StageFlag {
  const char* flag;
  const char* key;
  const char* help;
};

const std::map<std::string, std::vector<StageFlag>>& stage_flags() {
  static const std::map<std::string, std::vector<StageFlag>> table{
      {"build-lexicon",
       {{"--db", "db", "synset database (JSON lines)"},
        {"--vocab", "vocab", "adjective vocabulary, one word per line"},
        {"--min-pole", "min_pole", "minimum adjectives per pole"}}},
      {"select-contexts",
       {{"--pool", "contexts", "context records with probabilities"},
        {"--axes", "axes", "axis specs (JSON lines)"},
        {"--method", "method", "prob | default | glove"},
        {"--k", "context_k", "contexts per pole"}}},
      {"build-axes",
       {{"--pool", "contexts", "context records with probabilities"},
        {"--axes", "axes", "axis specs (JSON lines)"},
        {"--embeddings", "embeddings", "SAXE embeddings"},
        {"--stats", "stats", "z-score statistics JSON"},
        {"--method", "method", "prob | default | glove"}}},
      {"validate",
       {{"--axes", "axes", "axis specs (JSON lines)"},
        {"--embeddings", "embeddings", "SAXE embeddings"},
        {"--stats", "stats", "z-score statistics JSON"}}},
      {"project",
       {{"--axes", "axes", "axis specs (JSON lines)"},
        {"--targets", "targets", "SAXE target embeddings"},
        {"--top-k", "top_k", "poles listed per target"}}},
      {"contrast",
       {{"--axes", "axes", "axis specs (JSON lines)"},
        {"--targets", "targets", "SAXE target embeddings"},
        {"--categories", "categories", "term<TAB>category"},
        {"--background", "background", "background terms, one per line"},
        {"--alpha", "alpha", "significance level"},
        {"--bootstrap", "bootstrap", "bootstrap resamples"}}},
      {"ingest", {{"--corpus", "corpus", "corpus JSON lines"}}},
      {"vocab",
       {{"--terms", "terms", "candidate terms, one per line"},
        {"--pronouns", "pronouns", "pronoun cluster counts TSV"},
        {"--min-count", "vocab_min", "minimum term count"}}},
      {"sample",
       {{"--ideology", "ideology", "community<TAB>ideology"},
        {"--cap", "sample_cap", "occurrences per stratum"}}},
      {"cluster",
       {{"--series", "series", "frequency series TSV"},
        {"--k", "k", "number of clusters"},
        {"--restarts", "restarts", "random restarts"}}},
      {"variants",
       {{"--group-a", "group_a", "comma separated variants of group A"},
        {"--group-b", "group_b", "comma separated variants of group B"},
        {"--alpha", "alpha", "significance level"},
        {"--bootstrap", "bootstrap", "bootstrap resamples"}}},
  };
  return table;
}

std::string flag_value(const std::string& key, const std::string& value) {
  if (key != "method") return value;
  if (value == "prob") return "bert-prob";
  if (value == "default") return "bert-default";
  return value;
}

void report(const std::vector<saxe::StageRecord>& records, bool quiet) {
  if (quiet) return;
  for (const auto& r : records) {
    std::cerr << r.name << ": " << r.outputs.size() << " output(s)";
    if (!r.warnings.empty()) std::cerr << ", " << r.warnings.size() << " warning(s)";
    std::cerr << '\n';
    for (const auto& w : r.warnings) std::cerr << "  warning: " << w << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contextualized semantic axes toolkit"};
  app.require_subcommand(1);
  GlobalFlags g;
  app.add_option("--config", g.config, "flat key = value config file");
  app.add_option("--seed", g.seed, "root seed (overrides config)");
  app.add_option("--out", g.out, "output directory (overrides config)");
  app.add_option("--threads", g.threads, "worker threads where a stage supports them");
  app.add_option("--set", g.settings, "extra key=value config override (repeatable)");
  app.add_flag("-q,--quiet", g.quiet, "suppress the per-stage summary");

  // Subcommands inherit this, so global options may follow the subcommand.
  app.fallthrough();

  std::string selected;
  // (stage, config key) -> flag value
  std::map<std::pair<std::string, std::string>, std::string> flag_values;
  for (const auto& name : saxe::stage_names()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " stage (and any missing prerequisites)");
    sub->callback([&selected, name] { selected = name; });
    if (auto it = stage_flags().find(name); it != stage_flags().end()) {
      for (const auto& f : it->second) sub->add_option(f.flag, flag_values[{name, f.key}], f.help);
    }
  }
  app.add_subcommand("run", "run every configured stage")->callback([&selected] {
    selected = "run";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    for (const auto& [stage_key, value] : flag_values) {
      if (stage_key.first != selected || value.empty()) continue;
      g.settings.push_back(stage_key.second + "=" + flag_value(stage_key.second, value));
    }
    const auto config = resolve_config(g);
    const auto records = selected == "run" ? saxe::run_pipeline(config)
                                           : saxe::run_with_prerequisites(selected, config);
    report(records, g.quiet);
    return 0;
  } catch (const saxe::StageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.input_error() ? 2 : 1;
  } catch (const saxe::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
}
