#include "saxe/project.hpp"

#include <algorithm>
#include <cmath>

namespace saxe {

AxisScore axis_score(const std::string& target_key, const Embedding& target, const Axis& axis,
                     const ZScoreStats* stats) {
  if (target.dim() != axis.vector.dim()) {
    throw PreconditionError("axis_score: target dim " + std::to_string(target.dim()) +
                            " != axis dim " + std::to_string(axis.vector.dim()));
  }
  AxisScore s;
  s.target = target_key;
  s.axis_id = axis.spec.axis_id;
  if (axis.zscored) {
    if (!stats) throw PreconditionError("axis_score: z-scored axis needs stats");
    s.score = cosine(zscore(target, *stats), axis.vector);
  } else {
    s.score = cosine(target, axis.vector);
  }
  s.assigned_pole = assign_pole(s.score);
  return s;
}

std::vector<PoleRank> rank_scores(std::span<const AxisScore> scores, std::size_t top_k) {
  std::vector<PoleRank> out;
  out.reserve(scores.size());
  for (const auto& s : scores) out.push_back({s.axis_id, s.assigned_pole, std::fabs(s.score), s.score});
  std::sort(out.begin(), out.end(), [](const PoleRank& a, const PoleRank& b) {
    if (a.magnitude != b.magnitude) return a.magnitude > b.magnitude;
    return a.axis_id < b.axis_id;
  });
  if (out.size() > top_k) out.resize(top_k);
  return out;
}

std::vector<PoleRank> rank_poles(const Embedding& target, std::span<const Axis> axes,
                                 std::size_t top_k, const ZScoreStats* stats) {
  std::vector<AxisScore> scores;
  scores.reserve(axes.size());
  for (const auto& a : axes) scores.push_back(axis_score("", target, a, stats));
  return rank_scores(scores, top_k);
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw PreconditionError("quantile of empty data");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

BootstrapResult bootstrap_mean(std::span<const double> scores, std::size_t resamples,
                               std::uint64_t seed) {
  if (scores.empty()) throw PreconditionError("bootstrap_mean: empty scores");
  if (resamples == 0) throw PreconditionError("bootstrap_mean: need at least one resample");
  const std::size_t n = scores.size();
  Rng rng(seed);
  std::vector<double> means(resamples);
  for (auto& m : means) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += scores[rng.uniform_index(n)];
    m = s / static_cast<double>(n);
  }
  BootstrapResult r;
  r.mean = mean(means);
  std::sort(means.begin(), means.end());
  r.ci_low = quantile_sorted(means, 0.025);
  r.ci_high = quantile_sorted(means, 0.975);
  return r;
}

std::vector<ContrastResult> contrast_experiment(std::span<const AxisSamples> samples,
                                                const ContrastOptions& options,
                                                Diagnostics* diag) {
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) {
    throw PreconditionError("contrast_experiment: alpha must be in (0,1)");
  }
  std::vector<ContrastResult> out;
  for (const auto& s : samples) {
    if (s.category.size() < 2) {
      warn(diag, "axis " + s.axis_id + " excluded: fewer than 2 category scores");
      continue;
    }
    if (s.background.empty() && !options.null_value) {
      warn(diag, "axis " + s.axis_id + " excluded: no background scores");
      continue;
    }
    ContrastResult r;
    r.axis_id = s.axis_id;
    r.category_mean = mean(s.category);
    r.background_mean = options.null_value ? *options.null_value : mean(s.background);
    r.difference = r.category_mean - r.background_mean;
    r.direction = r.difference < 0.0 ? '-' : '+';
    const auto test = one_sample_t_test(s.category, r.background_mean);
    r.t = test.t;
    r.p_value = test.p_value;
    r.significant = r.p_value < options.alpha;
    r.bootstrap = bootstrap_mean(s.category, options.bootstrap,
                                 derive_seed(options.seed, "bootstrap:" + s.axis_id));
    if (r.significant || options.keep_all) out.push_back(std::move(r));
  }
  std::sort(out.begin(), out.end(), [](const ContrastResult& a, const ContrastResult& b) {
    const double da = std::fabs(a.difference);
    const double db = std::fabs(b.difference);
    if (da != db) return da > db;
    return a.axis_id < b.axis_id;
  });
  return out;
}

std::vector<MeanDifference> mean_difference_ranking(std::span<const GroupPair> groups) {
  std::vector<MeanDifference> out;
  for (const auto& g : groups) {
    if (g.a.empty() || g.b.empty()) {
      throw PreconditionError("mean_difference_ranking: empty group for axis " + g.axis_id);
    }
    MeanDifference d;
    d.axis_id = g.axis_id;
    d.mean_a = mean(g.a);
    d.ci_a = ci95_half_width(g.a);
    d.mean_b = mean(g.b);
    d.ci_b = ci95_half_width(g.b);
    d.difference = d.mean_a - d.mean_b;
    out.push_back(std::move(d));
  }
  std::sort(out.begin(), out.end(), [](const MeanDifference& x, const MeanDifference& y) {
    const double dx = std::fabs(x.difference);
    const double dy = std::fabs(y.difference);
    if (dx != dy) return dx > dy;
    return x.axis_id < y.axis_id;
  });
  return out;
}

std::string scores_to_tsv(std::span<const AxisScore> scores) {
  std::string out = "target\taxis_id\tscore\tpole\n";
  for (const auto& s : scores) {
    out += s.target + '\t' + s.axis_id + '\t' + format_double(s.score) + '\t' +
           std::string(side_name(s.assigned_pole)) + '\n';
  }
  return out;
}

std::string contrast_to_tsv(const std::string& category, std::span<const ContrastResult> results) {
  std::string out;
  for (const auto& r : results) {
    out += category + '\t' + r.axis_id + '\t' + format_double(r.category_mean) + '\t' +
           format_double(r.background_mean) + '\t' + format_double(r.difference) + '\t' +
           r.direction + '\t' + format_double(r.t) + '\t' + format_double(r.p_value) + '\t' +
           format_double(r.bootstrap.mean) + '\t' + format_double(r.bootstrap.ci_low) + '\t' +
           format_double(r.bootstrap.ci_high) + '\t' + (r.significant ? "1" : "0") + '\n';
  }
  return out;
}

std::string mean_differences_to_tsv(std::span<const MeanDifference> ranking) {
  std::string out = "rank\taxis_id\tmean_a\tci95_a\tmean_b\tci95_b\tdifference\n";
  std::size_t rank = 1;
  for (const auto& d : ranking) {
    out += std::to_string(rank++) + '\t' + d.axis_id + '\t' + format_double(d.mean_a) + '\t' +
           format_double(d.ci_a) + '\t' + format_double(d.mean_b) + '\t' +
           format_double(d.ci_b) + '\t' + format_double(d.difference) + '\n';
  }
  return out;
}

}  // namespace saxe
