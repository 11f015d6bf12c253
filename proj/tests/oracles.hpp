#pragma once

// Brute-force reference implementations shared by the unit and acceptance
// tests. Each one is written from the definition, without reusing library code
// beyond plain data types.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "saxe/context_select.hpp"

namespace oracle {

inline double plain_mean(const std::map<std::string, double>& m) {
  double s = 0.0;
  for (const auto& [k, v] : m) s += v;
  return s / static_cast<double>(m.size());
}

// Probability-ranked selection written as plain filter, sort, truncate.
inline std::vector<std::string> filter_sort_truncate(const std::vector<saxe::ContextRecord>& records,
                                                     std::size_t k) {
  std::vector<std::pair<double, std::string>> kept;
  for (const auto& r : records) {
    if (r.syn_probs.empty() || r.ant_probs.empty()) continue;
    const double syn = plain_mean(r.syn_probs);
    if (plain_mean(r.ant_probs) > syn) continue;
    kept.emplace_back(-syn, r.context_id);
  }
  std::sort(kept.begin(), kept.end());
  if (kept.size() > k) kept.resize(k);
  std::vector<std::string> ids;
  for (const auto& [neg, id] : kept) ids.push_back(id);
  return ids;
}

// Probability-ranked selection by subset enumeration: the chosen set is the
// unique subset of size min(k, eligible) whose worst member beats the best
// excluded one. Returns context ids, best first. Pools of up to ~20 records.
inline std::vector<std::string> prob_selection(const std::vector<saxe::ContextRecord>& records,
                                               std::size_t k) {
  struct Item {
    std::string id;
    double syn;
  };
  std::vector<Item> eligible;
  for (const auto& r : records) {
    if (r.syn_probs.empty() || r.ant_probs.empty()) continue;
    const double syn = plain_mean(r.syn_probs);
    if (plain_mean(r.ant_probs) > syn) continue;
    eligible.push_back({r.context_id, syn});
  }
  auto better = [](const Item& a, const Item& b) {
    return a.syn > b.syn || (a.syn == b.syn && a.id < b.id);
  };
  const std::size_t n = eligible.size();
  const std::size_t take = std::min(k, n);
  std::vector<Item> chosen;
  int found = 0;
  for (unsigned long mask = 0; mask < (1UL << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcountl(mask)) != take) continue;
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      if (!(mask >> i & 1)) continue;
      for (std::size_t j = 0; j < n && ok; ++j) {
        if (mask >> j & 1) continue;
        if (!better(eligible[i], eligible[j])) ok = false;
      }
    }
    if (!ok) continue;
    ++found;
    chosen.clear();
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) chosen.push_back(eligible[i]);
  }
  if (found != 1) return {"<oracle found " + std::to_string(found) + " subsets>"};
  std::sort(chosen.begin(), chosen.end(), better);
  std::vector<std::string> ids;
  for (const auto& c : chosen) ids.push_back(c.id);
  return ids;
}

using Vec = std::vector<double>;
// One pole: per adjective, its list of embeddings.
using RawPole = std::vector<std::vector<Vec>>;

inline Vec mean_of(const std::vector<Vec>& vs) {
  Vec m(vs.front().size(), 0.0);
  for (const auto& v : vs)
    for (std::size_t d = 0; d < m.size(); ++d) m[d] += v[d];
  for (auto& x : m) x /= static_cast<double>(vs.size());
  return m;
}

inline std::vector<Vec> flatten(const RawPole& pole, std::size_t skip = ~std::size_t{0}) {
  std::vector<Vec> out;
  for (std::size_t i = 0; i < pole.size(); ++i)
    if (i != skip)
      for (const auto& v : pole[i]) out.push_back(v);
  return out;
}

inline double cos_or_zero(const Vec& a, const Vec& b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    ab += a[d] * b[d];
    aa += a[d] * a[d];
    bb += b[d] * b[d];
  }
  if (aa == 0 || bb == 0) return 0.0;
  return ab / std::sqrt(aa * bb);
}

// Cosine of adjective `held` (index into its pole) with the axis rebuilt
// from everything else, pooling contexts without regard to adjective.
inline double loo(const RawPole& left, const RawPole& right, bool held_on_left, std::size_t held) {
  const auto& own = held_on_left ? left : right;
  const auto& other = held_on_left ? right : left;
  const Vec rest = mean_of(flatten(own, held));
  const Vec opp = mean_of(flatten(other));
  Vec axis(rest.size());
  for (std::size_t d = 0; d < axis.size(); ++d)
    axis[d] = held_on_left ? rest[d] - opp[d] : opp[d] - rest[d];
  return cos_or_zero(mean_of(own[held]), axis);
}

inline double pole_c(const RawPole& left, const RawPole& right, bool on_left) {
  const auto& own = on_left ? left : right;
  if (own.size() == 1) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < own.size(); ++i) s += loo(left, right, on_left, i);
  s /= static_cast<double>(own.size());
  return on_left ? s : -s;
}

// Two-sided Student t tail by Simpson integration of the density over [0, |t|].
inline double t_two_sided(double t, double df) {
  const double c = std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2)) / std::sqrt(df * M_PI);
  auto f = [&](double x) { return c * std::pow(1 + x * x / df, -(df + 1) / 2); };
  const double a = std::fabs(t);
  const int n = 20000;
  const double h = a / n;
  double s = f(0) + f(a);
  for (int i = 1; i < n; ++i) s += f(i * h) * (i % 2 ? 4 : 2);
  return std::max(0.0, 1.0 - 2.0 * s * h / 3.0);
}

// U of the first sample by pair counting, ties worth one half.
inline double mw_u(const std::vector<double>& a, const std::vector<double>& b) {
  double u = 0;
  for (double x : a)
    for (double y : b) u += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
  return u;
}

}  // namespace oracle
