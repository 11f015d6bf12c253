#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "saxe/axis_build.hpp"
#include "saxe/stats.hpp"

namespace saxe {

struct AxisScore {
  std::string target;
  std::string axis_id;
  double score = 0.0;
  Side assigned_pole = Side::kRight;  // left iff score > 0
};

inline Side assign_pole(double score) { return score > 0.0 ? Side::kLeft : Side::kRight; }

/// Cosine of the target against the axis vector. Targets are z-scored first
/// when the axis is; throws PreconditionError if stats are then missing or
/// either vector has zero norm.
AxisScore axis_score(const std::string& target_key, const Embedding& target, const Axis& axis,
                     const ZScoreStats* stats = nullptr);

struct PoleRank {
  std::string axis_id;
  Side pole = Side::kRight;
  double magnitude = 0.0;
  double score = 0.0;
};

/// Sorted by |score| descending, ties by axis_id; at most top_k entries.
std::vector<PoleRank> rank_scores(std::span<const AxisScore> scores, std::size_t top_k);
std::vector<PoleRank> rank_poles(const Embedding& target, std::span<const Axis> axes,
                                 std::size_t top_k, const ZScoreStats* stats = nullptr);

struct BootstrapResult {
  double mean = 0.0;  // mean of resample means
  double ci_low = 0.0;
  double ci_high = 0.0;
};

inline constexpr std::size_t kBootstrapSamples = 1000;
inline constexpr double kContrastAlpha = 0.001;

/// `resamples` draws of size n with replacement; percentile 2.5/97.5
/// interval (linear interpolation between order statistics).
BootstrapResult bootstrap_mean(std::span<const double> scores,
                               std::size_t resamples = kBootstrapSamples,
                               std::uint64_t seed = 0);

/// Linear-interpolation quantile of sorted data, q in [0,1].
double quantile_sorted(std::span<const double> sorted, double q);

struct AxisSamples {
  std::string axis_id;
  std::vector<double> category;
  std::vector<double> background;
};

struct ContrastResult {
  std::string axis_id;
  double category_mean = 0.0;
  double background_mean = 0.0;
  double difference = 0.0;
  char direction = '+';
  double t = 0.0;
  double p_value = 1.0;
  BootstrapResult bootstrap;
  bool significant = false;
};

struct ContrastOptions {
  std::size_t bootstrap = kBootstrapSamples;
  double alpha = kContrastAlpha;
  std::uint64_t seed = 0;
  /// Overrides the background mean as the t-test null value.
  std::optional<double> null_value;
  /// Keep non-significant axes (still ranked by |difference|).
  bool keep_all = false;
};

/// Per axis: one-sample t-test of the category's per-term scores against the
/// background mean, plus a bootstrap interval on the category mean (seeded
/// per axis_id). Axes with fewer than 2 category scores are skipped with a
/// warning. Returns significant axes ranked by |difference| descending.
std::vector<ContrastResult> contrast_experiment(std::span<const AxisSamples> samples,
                                                const ContrastOptions& options = {},
                                                Diagnostics* diag = nullptr);

struct GroupPair {
  std::string axis_id;
  std::vector<double> a;
  std::vector<double> b;
};

struct MeanDifference {
  std::string axis_id;
  double mean_a = 0.0;
  double ci_a = 0.0;  // 95% half-width
  double mean_b = 0.0;
  double ci_b = 0.0;
  double difference = 0.0;  // mean_a - mean_b
};

/// Ranked by |mean_a - mean_b| descending, ties by axis_id.
std::vector<MeanDifference> mean_difference_ranking(std::span<const GroupPair> groups);

std::string scores_to_tsv(std::span<const AxisScore> scores);
std::string contrast_to_tsv(const std::string& category, std::span<const ContrastResult> results);
std::string mean_differences_to_tsv(std::span<const MeanDifference> ranking);

}  // namespace saxe
