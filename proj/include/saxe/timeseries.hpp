#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "saxe/common.hpp"

namespace saxe {

/// Month keys are "YYYY-MM".
using MonthCounts = std::map<std::string, std::uint64_t>;

struct FrequencySeries {
  std::string term;
  std::vector<std::string> months;
  std::vector<double> values;
  /// False for an all-zero series, which cannot be clustered.
  bool usable = true;
};

/// Every month from `first` to `last` inclusive.
std::vector<std::string> month_range(const std::string& first, const std::string& last);
/// Month after `month`.
std::string next_month(const std::string& month);

/// value[m] = doc_counts[m] / totals[m] over `months`. Months with a zero or
/// missing total yield 0 with a warning.
FrequencySeries build_series(const std::string& term, const MonthCounts& doc_counts,
                             const MonthCounts& totals, const std::vector<std::string>& months,
                             Diagnostics* diag = nullptr);

/// Centered moving average; edge windows average over in-range months only.
/// Throws PreconditionError for an even or non-positive kernel.
FrequencySeries smooth(const FrequencySeries& series, int kernel = 3);
std::vector<double> smooth_values(std::span<const double> values, int kernel = 3);

/// ||x - a*y|| / ||x|| with a = x.y / ||y||^2. Throws on zero-norm input or
/// length mismatch.
double ksc_distance(std::span<const double> x, std::span<const double> y);

/// Unit vector minimizing the summed squared distance to `members`: the
/// principal eigenvector of sum(x_hat x_hat^T), oriented so its sum is >= 0.
std::vector<double> ksc_centroid(std::span<const std::vector<double>> members);

struct KscOptions {
  std::size_t k = 6;
  std::size_t max_iters = 100;
  std::uint64_t seed = 0;
  std::size_t restarts = 10;
  std::size_t threads = 1;
};

struct ClusterModel {
  std::size_t k = 0;
  std::vector<std::vector<double>> centroids;
  /// Cluster index per input series.
  std::vector<std::size_t> assignments;
  std::size_t iterations = 0;
  bool converged = false;
  /// Sum of squared distances to assigned centroids.
  double objective = 0.0;
  /// Objective after each assignment step of the kept run.
  std::vector<double> objective_trace;
};

/// One alternating run from the given initial centroids (need not be unit
/// norm). Assignment ties go to the lowest cluster index; an emptied
/// cluster is reseeded with the series farthest from its centroid.
ClusterModel ksc_run(std::span<const std::vector<double>> series,
                     std::vector<std::vector<double>> initial_centroids, std::size_t max_iters);

/// Best of `restarts` runs (lowest objective, earliest on ties), each seeded
/// with k distinct series drawn uniformly. Requires at least k series, all
/// with positive norm.
ClusterModel ksc_cluster(std::span<const std::vector<double>> series, const KscOptions& options);

/// Initial series indices used by restart `restart` under `seed`.
std::vector<std::size_t> ksc_initial_indices(std::size_t n, std::size_t k, std::uint64_t seed,
                                             std::size_t restart);

/// Population variance of per-term axis scores (>= 2 scores).
double axis_variance(std::span<const double> scores);

struct ProfileCell {
  std::size_t cluster = 0;
  bool high_frequency = false;
  std::string axis_id;
  std::size_t n = 0;
  double mean = 0.0;
  std::optional<double> ci95;  // half-width; absent when n < 2
};

/// term -> axis_id -> score
using TermAxisScores = std::map<std::string, std::map<std::string, double>>;

/// Per (cluster, frequency half, axis) mean with a normal 95% interval.
/// Terms at or above the `percentile` of overall frequency form the high
/// half. `terms[i]` is the term clustered as series i.
std::vector<ProfileCell> cluster_axis_profile(const ClusterModel& model,
                                              std::span<const std::string> terms,
                                              const TermAxisScores& scores,
                                              const std::map<std::string, double>& frequency,
                                              double percentile = 50.0);

// --- files ----------------------------------------------------------------------

/// TSV rows (term, month, value); months absent for a term are zero-filled
/// over the union of months.
std::vector<FrequencySeries> parse_series_tsv(std::string_view tsv);
std::string series_to_tsv(std::span<const FrequencySeries> series);

/// {K, months, terms, centroids[][], assignments{term: cluster}, ...}
std::string cluster_model_to_json(const ClusterModel& model, std::span<const std::string> terms,
                                  std::span<const std::string> months);
struct LoadedClusters {
  ClusterModel model;
  std::vector<std::string> terms;
  std::vector<std::string> months;
};
LoadedClusters cluster_model_from_json(std::string_view text);

}  // namespace saxe
