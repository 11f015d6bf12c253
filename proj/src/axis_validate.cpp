#include "saxe/axis_validate.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace saxe {

namespace {

double cosine_or_zero(const Embedding& a, const Embedding& b) {
  if (a.norm() == 0.0 || b.norm() == 0.0) return 0.0;
  return cosine(a, b);
}

std::size_t populated(const PoleEmbeddings& pole) {
  return static_cast<std::size_t>(std::count_if(
      pole.begin(), pole.end(), [](const auto& g) { return !g.embeddings.empty(); }));
}

}  // namespace

double loo_cosine(const PoleEmbeddings& left, const PoleEmbeddings& right,
                  const std::string& held_out, Side side, PoleMeanMode mode) {
  const PoleEmbeddings& own = side == Side::kLeft ? left : right;
  const PoleEmbeddings& other = side == Side::kLeft ? right : left;

  PoleEmbeddings remainder;
  const AdjectiveEmbeddings* target = nullptr;
  for (const auto& g : own) {
    if (g.adjective == held_out) {
      target = &g;
    } else if (!g.embeddings.empty()) {
      remainder.push_back(g);
    }
  }
  if (!target || target->embeddings.empty()) {
    throw PreconditionError("loo_cosine: '" + held_out + "' has no embeddings on the " +
                            std::string(side_name(side)) + " pole");
  }
  if (remainder.empty()) {
    throw PreconditionError("loo_cosine: holding out '" + held_out + "' empties the " +
                            std::string(side_name(side)) + " pole");
  }
  const Embedding axis = side == Side::kLeft ? axis_vector(remainder, other, mode)
                                             : axis_vector(other, remainder, mode);
  return cosine_or_zero(mean_pool(target->embeddings), axis);
}

double pole_consistency(const PoleEmbeddings& left, const PoleEmbeddings& right, Side side,
                        PoleMeanMode mode, std::vector<LooCosine>* details) {
  const PoleEmbeddings& own = side == Side::kLeft ? left : right;
  const std::size_t n = populated(own);
  if (n == 0) {
    throw PreconditionError("pole_consistency: " + std::string(side_name(side)) +
                            " pole has no embeddings");
  }
  if (n == 1) return 0.0;
  double sum = 0.0;
  for (const auto& g : own) {
    if (g.embeddings.empty()) continue;
    const double c = loo_cosine(left, right, g.adjective, side, mode);
    if (details) details->push_back({g.adjective, side, c});
    sum += c;
  }
  const double avg = sum / static_cast<double>(n);
  return side == Side::kLeft ? avg : -avg;
}

ConsistencyReport consistency_report(const std::string& axis_id, Method method, bool zscored,
                                     const PoleEmbeddings& left, const PoleEmbeddings& right,
                                     PoleMeanMode mode) {
  ConsistencyReport r;
  r.axis_id = axis_id;
  r.method = method;
  r.zscored = zscored;
  r.left_c = pole_consistency(left, right, Side::kLeft, mode, &r.loo);
  r.right_c = pole_consistency(left, right, Side::kRight, mode, &r.loo);
  r.consistent = r.left_c >= 0.0 && r.right_c >= 0.0;
  return r;
}

ConsistencyReport validate_axis(const Axis& axis, const EmbeddingSet& embeddings,
                                const ZScoreStats* stats) {
  if (axis.zscored && !stats) {
    throw PreconditionError("validate_axis: " + axis.spec.axis_id + " is z-scored but no stats given");
  }
  const ZScoreStats* s = axis.zscored ? stats : nullptr;
  const auto left = gather_pole(axis.left_sources, embeddings, s);
  const auto right = gather_pole(axis.right_sources, embeddings, s);
  auto report = consistency_report(axis.spec.axis_id, axis.requested_method, axis.zscored, left,
                                   right, axis.pole_mean);
  report.backoff = axis.backoff;
  return report;
}

std::vector<double> pole_values(std::span<const ConsistencyReport> reports) {
  std::vector<double> out;
  out.reserve(reports.size() * 2);
  for (const auto& r : reports) {
    out.push_back(r.left_c);
    out.push_back(r.right_c);
  }
  return out;
}

std::string method_label(Method m, bool zscored) {
  return std::string(method_name(m)) + (zscored ? "^z" : "");
}

MethodSummary summarize_method(std::span<const ConsistencyReport> reports) {
  MethodSummary s;
  if (reports.empty()) return s;
  s.label = method_label(reports.front().method, reports.front().zscored);
  s.axes = reports.size();
  const auto values = pole_values(reports);
  s.poles = values.size();
  s.mean_c = mean(values);
  s.ci95 = ci95_half_width(values);
  for (const auto& r : reports) {
    if (r.consistent) ++s.consistent_count;
    if (r.backoff) ++s.backoff_count;
  }
  return s;
}

MannWhitneyResult compare_methods(std::span<const ConsistencyReport> a,
                                  std::span<const ConsistencyReport> b) {
  const auto va = pole_values(a);
  const auto vb = pole_values(b);
  return mann_whitney_u(va, vb);
}

std::string reports_to_tsv(std::span<const ConsistencyReport> reports) {
  std::string out = "axis_id\tmethod\tzscored\tleft_C\tright_C\tconsistent\n";
  for (const auto& r : reports) {
    out += r.axis_id + '\t' + std::string(method_name(r.method)) + '\t' +
           (r.zscored ? "1" : "0") + '\t' + format_double(r.left_c) + '\t' +
           format_double(r.right_c) + '\t' + (r.consistent ? "1" : "0") + '\n';
  }
  return out;
}

std::string loo_to_tsv(std::span<const ConsistencyReport> reports) {
  std::string out = "axis_id\tside\tadjective\tcosine\n";
  for (const auto& r : reports) {
    for (const auto& l : r.loo) {
      out += r.axis_id + '\t' + std::string(side_name(l.side)) + '\t' + l.adjective + '\t' +
             format_double(l.cosine) + '\n';
    }
  }
  return out;
}

std::string summary_to_json(const MethodSummary& s) {
  nlohmann::ordered_json j;
  j["method"] = s.label;
  j["axes"] = s.axes;
  j["poles"] = s.poles;
  j["mean_C"] = s.mean_c;
  j["ci95"] = s.ci95;
  j["ci_method"] = "normal approximation, 1.96 x standard error of the pole mean";
  j["consistent_axes"] = s.consistent_count;
  j["backoff_axes"] = s.backoff_count;
  return j.dump(2) + "\n";
}

}  // namespace saxe
