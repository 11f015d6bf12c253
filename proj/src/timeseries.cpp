#include "saxe/timeseries.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <numeric>
#include <set>

#include <Eigen/Dense>
#include <json.hpp>

namespace saxe {

namespace {

int parse_month(const std::string& month, int* year) {
  int y = 0, m = 0;
  if (month.size() != 7 || std::sscanf(month.c_str(), "%4d-%2d", &y, &m) != 2 || m < 1 || m > 12) {
    throw PreconditionError("bad month key (want YYYY-MM): " + month);
  }
  *year = y;
  return m;
}

std::string month_key(int year, int month) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d", year, month);
  return buf;
}

double norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

std::vector<double> normalized(std::span<const double> x) {
  const double n = norm(x);
  if (n == 0.0) throw PreconditionError("cannot normalize a zero series");
  std::vector<double> out(x.begin(), x.end());
  for (double& v : out) v /= n;
  return out;
}

}  // namespace

std::string next_month(const std::string& month) {
  int y = 0;
  const int m = parse_month(month, &y);
  return m == 12 ? month_key(y + 1, 1) : month_key(y, m + 1);
}

std::vector<std::string> month_range(const std::string& first, const std::string& last) {
  int y0 = 0, y1 = 0;
  parse_month(first, &y0);
  parse_month(last, &y1);
  if (last < first) throw PreconditionError("month range reversed: " + first + " > " + last);
  std::vector<std::string> out{first};
  while (out.back() != last) out.push_back(next_month(out.back()));
  return out;
}

FrequencySeries build_series(const std::string& term, const MonthCounts& doc_counts,
                             const MonthCounts& totals, const std::vector<std::string>& months,
                             Diagnostics* diag) {
  FrequencySeries s;
  s.term = term;
  s.months = months;
  s.values.assign(months.size(), 0.0);
  for (std::size_t i = 0; i < months.size(); ++i) {
    auto t = totals.find(months[i]);
    if (t == totals.end() || t->second == 0) {
      warn(diag, "month " + months[i] + " has no documents; value set to 0");
      continue;
    }
    auto c = doc_counts.find(months[i]);
    if (c != doc_counts.end()) {
      s.values[i] = static_cast<double>(c->second) / static_cast<double>(t->second);
    }
  }
  s.usable = std::any_of(s.values.begin(), s.values.end(), [](double v) { return v > 0.0; });
  if (!s.usable) warn(diag, "term " + term + " never occurs; series unusable");
  return s;
}

std::vector<double> smooth_values(std::span<const double> values, int kernel) {
  if (kernel < 1 || kernel % 2 == 0) {
    throw PreconditionError("smoothing kernel must be a positive odd integer");
  }
  const auto half = static_cast<std::ptrdiff_t>(kernel / 2);
  const auto n = static_cast<std::ptrdiff_t>(values.size());
  std::vector<double> out(values.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto lo = std::max<std::ptrdiff_t>(0, i - half);
    const auto hi = std::min<std::ptrdiff_t>(n - 1, i + half);
    double s = 0.0;
    for (auto j = lo; j <= hi; ++j) s += values[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = s / static_cast<double>(hi - lo + 1);
  }
  return out;
}

FrequencySeries smooth(const FrequencySeries& series, int kernel) {
  FrequencySeries out = series;
  out.values = smooth_values(series.values, kernel);
  return out;
}

double ksc_distance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw PreconditionError("ksc_distance: length mismatch");
  const double nx = norm(x);
  const double ny = norm(y);
  if (nx == 0.0 || ny == 0.0) throw PreconditionError("ksc_distance: zero-norm series");
  const double alpha = dot(x, y) / (ny * ny);
  double r = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - alpha * y[i];
    r += d * d;
  }
  return std::min(1.0, std::sqrt(r) / nx);
}

std::vector<double> ksc_centroid(std::span<const std::vector<double>> members) {
  if (members.empty()) throw PreconditionError("ksc_centroid: no members");
  const auto len = static_cast<Eigen::Index>(members.front().size());
  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(len, len);
  for (const auto& m : members) {
    const auto unit = normalized(m);
    const Eigen::Map<const Eigen::VectorXd> v(unit.data(), len);
    scatter.selfadjointView<Eigen::Lower>().rankUpdate(v);
  }
  scatter = scatter.selfadjointView<Eigen::Lower>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(scatter);
  if (solver.info() != Eigen::Success) throw std::runtime_error("ksc_centroid: eigensolver failed");
  Eigen::VectorXd top = solver.eigenvectors().col(len - 1);
  if (top.sum() < 0.0) top = -top;
  top.normalize();
  return {top.data(), top.data() + len};
}

namespace {

double squared_distance(std::span<const double> x, std::span<const double> c) {
  const double d = ksc_distance(x, c);
  return d * d;
}

}  // namespace

ClusterModel ksc_run(std::span<const std::vector<double>> series,
                     std::vector<std::vector<double>> initial_centroids, std::size_t max_iters) {
  const std::size_t n = series.size();
  const std::size_t k = initial_centroids.size();
  if (k == 0 || n < k) throw PreconditionError("ksc_run: need at least k series");

  ClusterModel model;
  model.k = k;
  for (auto& c : initial_centroids) c = normalized(c);
  model.centroids = std::move(initial_centroids);

  std::vector<std::size_t> assign(n, 0), previous;
  std::vector<double> dist(n, 0.0);
  for (std::size_t iter = 1; iter <= std::max<std::size_t>(max_iters, 1); ++iter) {
    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = squared_distance(series[i], model.centroids[0]);
      for (std::size_t c = 1; c < k; ++c) {
        const double d = squared_distance(series[i], model.centroids[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      assign[i] = best;
      dist[i] = best_d;
      objective += best_d;
    }
    model.objective_trace.push_back(objective);
    model.iterations = iter;
    model.assignments = assign;
    model.objective = objective;
    if (assign == previous) {
      model.converged = true;
      break;
    }
    previous = assign;
    if (iter == max_iters) break;

    std::vector<std::size_t> sizes(k, 0);
    for (auto a : assign) ++sizes[a];
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] != 0) continue;
      // Farthest series among clusters that can spare a member.
      std::optional<std::size_t> far;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[assign[i]] < 2) continue;
        if (!far || dist[i] > dist[*far]) far = i;
      }
      if (!far) break;
      --sizes[assign[*far]];
      assign[*far] = c;
      sizes[c] = 1;
      dist[*far] = 0.0;
      model.centroids[c] = normalized(series[*far]);
    }

    for (std::size_t c = 0; c < k; ++c) {
      std::vector<std::vector<double>> members;
      for (std::size_t i = 0; i < n; ++i) {
        if (assign[i] == c) members.push_back(series[i]);
      }
      if (!members.empty()) model.centroids[c] = ksc_centroid(members);
    }
  }
  return model;
}

std::vector<std::size_t> ksc_initial_indices(std::size_t n, std::size_t k, std::uint64_t seed,
                                             std::size_t restart) {
  if (n < k) throw PreconditionError("ksc: fewer series than clusters");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(derive_seed(seed, "ksc-restart:" + std::to_string(restart)));
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.uniform_index(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

ClusterModel ksc_cluster(std::span<const std::vector<double>> series, const KscOptions& options) {
  if (options.k == 0) throw PreconditionError("ksc_cluster: k must be positive");
  if (series.size() < options.k) {
    throw PreconditionError("ksc_cluster: " + std::to_string(series.size()) +
                            " series for k = " + std::to_string(options.k));
  }
  for (const auto& s : series) {
    if (norm(s) == 0.0) throw PreconditionError("ksc_cluster: zero-norm series");
  }
  const std::size_t restarts = std::max<std::size_t>(options.restarts, 1);

  auto run = [&](std::size_t r) {
    std::vector<std::vector<double>> init;
    for (auto i : ksc_initial_indices(series.size(), options.k, options.seed, r)) {
      init.push_back(series[i]);
    }
    return ksc_run(series, std::move(init), options.max_iters);
  };

  std::vector<ClusterModel> runs(restarts);
  if (options.threads > 1) {
    std::vector<std::future<ClusterModel>> futures;
    for (std::size_t r = 0; r < restarts; ++r) futures.push_back(std::async(std::launch::async, run, r));
    for (std::size_t r = 0; r < restarts; ++r) runs[r] = futures[r].get();
  } else {
    for (std::size_t r = 0; r < restarts; ++r) runs[r] = run(r);
  }
  std::size_t best = 0;
  for (std::size_t r = 1; r < restarts; ++r) {
    if (runs[r].objective < runs[best].objective) best = r;
  }
  return std::move(runs[best]);
}

double axis_variance(std::span<const double> scores) {
  if (scores.size() < 2) throw PreconditionError("axis_variance: need at least 2 scores");
  return population_variance(scores);
}

std::vector<ProfileCell> cluster_axis_profile(const ClusterModel& model,
                                              std::span<const std::string> terms,
                                              const TermAxisScores& scores,
                                              const std::map<std::string, double>& frequency,
                                              double percentile) {
  if (terms.size() != model.assignments.size()) {
    throw PreconditionError("cluster_axis_profile: terms do not match assignments");
  }
  std::vector<double> freqs;
  for (const auto& t : terms) {
    auto it = frequency.find(t);
    if (it == frequency.end()) throw PreconditionError("no frequency for term " + t);
    freqs.push_back(it->second);
  }
  std::vector<double> sorted = freqs;
  std::sort(sorted.begin(), sorted.end());
  double threshold = sorted.empty() ? 0.0 : sorted.front();
  if (!sorted.empty()) {
    const double pos = percentile / 100.0 * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    threshold = sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  }

  // (cluster, high, axis) -> scores
  std::map<std::tuple<std::size_t, bool, std::string>, std::vector<double>> cells;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    auto it = scores.find(terms[i]);
    if (it == scores.end()) throw PreconditionError("no axis scores for term " + terms[i]);
    const bool high = freqs[i] >= threshold;
    for (const auto& [axis_id, score] : it->second) {
      cells[{model.assignments[i], high, axis_id}].push_back(score);
    }
  }
  std::vector<ProfileCell> out;
  for (const auto& [key, values] : cells) {
    ProfileCell cell;
    cell.cluster = std::get<0>(key);
    cell.high_frequency = std::get<1>(key);
    cell.axis_id = std::get<2>(key);
    cell.n = values.size();
    cell.mean = mean(values);
    if (values.size() >= 2) cell.ci95 = ci95_half_width(values);
    out.push_back(std::move(cell));
  }
  return out;
}

std::vector<FrequencySeries> parse_series_tsv(std::string_view tsv) {
  std::map<std::string, std::map<std::string, double>> rows;
  std::set<std::string> months;
  std::uint64_t line_no = 0;
  for (const auto& line : split(tsv, '\n')) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split(line, '\t');
    if (line_no == 1 && !f.empty() && f[0] == "term") continue;
    if (f.size() != 3) {
      throw FormatError("series line " + std::to_string(line_no) + ": expected 3 columns",
                        line_no);
    }
    double v = 0.0;
    try {
      v = std::stod(f[2]);
    } catch (const std::exception&) {
      throw FormatError("series line " + std::to_string(line_no) + ": bad value", line_no);
    }
    if (!(v >= 0.0)) {
      throw FormatError("series line " + std::to_string(line_no) + ": negative value", line_no);
    }
    rows[f[0]][f[1]] = v;
    months.insert(f[1]);
  }
  std::vector<std::string> grid;
  if (!months.empty()) grid = month_range(*months.begin(), *months.rbegin());
  std::vector<FrequencySeries> out;
  for (const auto& [term, by_month] : rows) {
    FrequencySeries s;
    s.term = term;
    s.months = grid;
    s.values.assign(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      auto it = by_month.find(grid[i]);
      if (it != by_month.end()) s.values[i] = it->second;
    }
    s.usable = std::any_of(s.values.begin(), s.values.end(), [](double v) { return v > 0.0; });
    out.push_back(std::move(s));
  }
  return out;
}

std::string series_to_tsv(std::span<const FrequencySeries> series) {
  std::string out = "term\tmonth\tvalue\n";
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.months.size(); ++i) {
      out += s.term + '\t' + s.months[i] + '\t' + format_double(s.values[i]) + '\n';
    }
  }
  return out;
}

std::string cluster_model_to_json(const ClusterModel& model, std::span<const std::string> terms,
                                  std::span<const std::string> months) {
  nlohmann::ordered_json j;
  j["K"] = model.k;
  j["months"] = std::vector<std::string>(months.begin(), months.end());
  j["centroids"] = model.centroids;
  nlohmann::ordered_json assign = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < terms.size(); ++i) assign[terms[i]] = model.assignments[i];
  j["assignments"] = assign;
  j["objective"] = model.objective;
  j["iterations"] = model.iterations;
  j["converged"] = model.converged;
  return j.dump() + "\n";
}

LoadedClusters cluster_model_from_json(std::string_view text) {
  const auto j = nlohmann::ordered_json::parse(text);
  LoadedClusters out;
  out.model.k = j.at("K").get<std::size_t>();
  out.months = j.at("months").get<std::vector<std::string>>();
  out.model.centroids = j.at("centroids").get<std::vector<std::vector<double>>>();
  for (const auto& [term, c] : j.at("assignments").items()) {
    out.terms.push_back(term);
    out.model.assignments.push_back(c.get<std::size_t>());
  }
  out.model.objective = j.value("objective", 0.0);
  out.model.iterations = j.value("iterations", std::size_t{0});
  out.model.converged = j.value("converged", false);
  return out;
}

}  // namespace saxe
