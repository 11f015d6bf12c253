#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "saxe/axis_build.hpp"

namespace saxe {

/// Bad configuration or command-line input; the CLI maps it to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat `key = value` settings. '#' starts a comment; blank lines ignored.
/// Relative paths are resolved against `base_dir` when the config is loaded
/// from a file.
struct RunConfig {
  // inputs
  std::string db;
  std::string vocab;
  std::string wordpiece_vocab;
  std::string contexts;
  std::string embeddings;
  std::string stats;
  std::string axes;  // AxisSpec JSONL; defaults to the build-lexicon output
  std::string targets;
  std::string categories;
  std::string background;  // term list; contrast background defaults to every target
  std::string corpus;
  std::string terms;
  std::string pronouns;
  std::string ideology;
  std::string series;  // defaults to the vocab stage output
  std::string occurrence_embeddings;
  std::string variant_embeddings;
  std::string group_a;  // comma separated variants
  std::string group_b;
  std::string out = "out";

  Method method = Method::kBertProb;
  bool zscored = true;
  PoleMeanMode pole_mean = PoleMeanMode::kContexts;
  std::uint64_t seed = 0;
  std::size_t threads = 1;

  // thresholds
  std::size_t min_pole = 3;
  std::size_t context_k = 100;
  std::size_t pool_cap = 1000;
  std::size_t bootstrap = 1000;
  double alpha = 0.001;
  std::size_t k = 6;
  int smoothing = 3;
  double fem_threshold = 0.75;
  std::uint64_t vocab_min = 500;
  std::uint64_t min_clusters = 10;
  std::size_t top_k = 10;
  std::size_t restarts = 10;
  std::size_t max_iters = 100;
  std::size_t sample_cap = 500;
  std::size_t reservoir_k = 1000;
  std::size_t bot_ngram = 10;
  std::size_t bot_max_repeats = 100;
  double freq_percentile = 50.0;
  /// Monthly series denominator: "documents" or "tokens".
  std::string series_denominator = "documents";
};

/// Applies one setting; throws InputError for unknown keys or bad values.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value,
                   const std::string& base_dir = "");

RunConfig parse_config(std::string_view text, const std::string& base_dir = "");
RunConfig load_config(const std::string& path);

/// Throws InputError unless every threshold is positive, alpha is in (0,1),
/// fem_threshold in (0,1], the smoothing kernel odd and the percentile in (0,100).
void validate_config(const RunConfig& config);

/// Every setting except `out` as sorted `key=value` lines; the config hash
/// covers this.
std::string canonical_config(const RunConfig& config);

}  // namespace saxe
