#pragma once

#include <string>
#include <vector>

#include "saxe/axis_build.hpp"
#include "saxe/stats.hpp"

namespace saxe {

struct LooCosine {
  std::string adjective;
  Side side = Side::kLeft;
  double cosine = 0.0;
};

/// Cosine between the held-out adjective's (averaged) embedding and the axis
/// rebuilt without that adjective. The remainder axis uses `mode` for pole
/// means. A zero-norm held-out vector or remainder axis scores 0.
/// Throws PreconditionError if the adjective is absent or is the only one on
/// its side.
double loo_cosine(const PoleEmbeddings& left, const PoleEmbeddings& right,
                  const std::string& held_out, Side side,
                  PoleMeanMode mode = PoleMeanMode::kContexts);

/// Mean leave-one-out cosine over a pole's adjectives, negated for the right
/// pole. Exactly 0 when only one adjective contributed embeddings.
double pole_consistency(const PoleEmbeddings& left, const PoleEmbeddings& right, Side side,
                        PoleMeanMode mode = PoleMeanMode::kContexts,
                        std::vector<LooCosine>* details = nullptr);

struct ConsistencyReport {
  std::string axis_id;
  Method method = Method::kGlove;  // as requested; see `backoff`
  bool zscored = false;
  bool backoff = false;
  double left_c = 0.0;
  double right_c = 0.0;
  std::vector<LooCosine> loo;
  bool consistent = false;
};

ConsistencyReport consistency_report(const std::string& axis_id, Method method, bool zscored,
                                     const PoleEmbeddings& left, const PoleEmbeddings& right,
                                     PoleMeanMode mode = PoleMeanMode::kContexts);

/// Recovers the axis' source embeddings (z-scored when the axis is) and
/// reports its consistency.
ConsistencyReport validate_axis(const Axis& axis, const EmbeddingSet& embeddings,
                                const ZScoreStats* stats);

struct MethodSummary {
  std::string label;       // e.g. "bert-prob^z"
  std::size_t axes = 0;
  std::size_t poles = 0;
  double mean_c = 0.0;     // over all pole-level C values
  double ci95 = 0.0;       // 1.96 * standard error
  std::size_t consistent_count = 0;
  std::size_t backoff_count = 0;
};

/// All zeros (and an empty label) for no reports.
MethodSummary summarize_method(std::span<const ConsistencyReport> reports);

/// Every pole-level C value, left then right per report.
std::vector<double> pole_values(std::span<const ConsistencyReport> reports);

/// Compares the pole-level C distributions of two methods.
MannWhitneyResult compare_methods(std::span<const ConsistencyReport> a,
                                  std::span<const ConsistencyReport> b);

std::string method_label(Method m, bool zscored);

/// axis_id, method, zscored, left_C, right_C, consistent
std::string reports_to_tsv(std::span<const ConsistencyReport> reports);
/// Per-adjective leave-one-out cosines: axis_id, side, adjective, cosine.
std::string loo_to_tsv(std::span<const ConsistencyReport> reports);
std::string summary_to_json(const MethodSummary& summary);

}  // namespace saxe
