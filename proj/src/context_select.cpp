#include "saxe/context_select.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include <json.hpp>

namespace saxe {

using nlohmann::json;
using nlohmann::ordered_json;

double mean_probability(const std::map<std::string, double>& probs) {
  if (probs.empty()) return 0.0;
  double s = 0.0;
  for (const auto& [w, p] : probs) s += p;
  return s / static_cast<double>(probs.size());
}

bool length_ok(std::span<const std::string> tokens) {
  return tokens.size() > 10 && tokens.size() <= 150;
}

bool ContextPool::add(ContextRecord record, Diagnostics* diag) {
  if (!length_ok(record.tokens)) return false;
  auto& list = records_[record.adjective];
  if (list.size() >= cap_) {
    warn(diag, "context pool for '" + record.adjective + "' is full; dropped " +
                   record.context_id);
    return false;
  }
  list.push_back(std::move(record));
  return true;
}

const std::vector<ContextRecord>& ContextPool::for_adjective(const std::string& adjective) const {
  static const std::vector<ContextRecord> kEmpty;
  auto it = records_.find(adjective);
  return it == records_.end() ? kEmpty : it->second;
}

std::size_t ContextPool::size() const {
  std::size_t n = 0;
  for (const auto& [a, list] : records_) n += list.size();
  return n;
}

std::vector<ContextRecord> parse_context_records(std::string_view jsonl) {
  std::vector<ContextRecord> out;
  std::uint64_t line_no = 0;
  for (const auto& line : split(jsonl, '\n')) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fail = [&](const std::string& msg) {
      throw FormatError("context record line " + std::to_string(line_no) + ": " + msg, line_no);
    };
    try {
      const auto j = json::parse(line);
      ContextRecord r;
      r.context_id = j.at("context_id").get<std::string>();
      r.adjective = j.at("adjective").get<std::string>();
      r.tokens = j.at("tokens").get<std::vector<std::string>>();
      const auto idx = j.at("target_index").get<long long>();
      if (idx < 0 || static_cast<std::size_t>(idx) >= r.tokens.size()) {
        fail("target_index out of range");
      }
      r.target_index = static_cast<std::size_t>(idx);
      if (j.contains("syn_probs")) r.syn_probs = j.at("syn_probs").get<std::map<std::string, double>>();
      if (j.contains("ant_probs")) r.ant_probs = j.at("ant_probs").get<std::map<std::string, double>>();
      for (const auto* m : {&r.syn_probs, &r.ant_probs}) {
        for (const auto& [w, p] : *m) {
          if (!(p >= 0.0 && p <= 1.0)) fail("probability for '" + w + "' outside [0,1]");
        }
      }
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      fail(e.what());
    }
  }
  return out;
}

std::string serialize_context_records(std::span<const ContextRecord> records) {
  std::string out;
  for (const auto& r : records) {
    ordered_json j;
    j["context_id"] = r.context_id;
    j["adjective"] = r.adjective;
    j["tokens"] = r.tokens;
    j["target_index"] = r.target_index;
    j["syn_probs"] = r.syn_probs;
    j["ant_probs"] = r.ant_probs;
    out += j.dump();
    out += '\n';
  }
  return out;
}

ContextPool load_context_pool(const std::string& path, std::size_t cap, Diagnostics* diag) {
  ContextPool pool(cap);
  std::size_t screened = 0;
  for (auto& r : parse_context_records(read_file(path))) {
    if (!length_ok(r.tokens)) {
      ++screened;
      continue;
    }
    pool.add(std::move(r), diag);
  }
  if (screened > 0) {
    warn(diag, std::to_string(screened) + " contexts failed the length screen");
  }
  return pool;
}

namespace {

struct Scored {
  const ContextRecord* record;
  double syn;
};

bool scored_before(const Scored& a, const Scored& b) {
  if (a.syn != b.syn) return a.syn > b.syn;
  return a.record->context_id < b.record->context_id;
}

std::vector<Scored> filter_and_sort(std::span<const ContextRecord> records, Diagnostics* diag) {
  std::vector<Scored> kept;
  for (const auto& r : records) {
    if (r.syn_probs.empty() || r.ant_probs.empty()) {
      warn(diag, "context " + r.context_id + " has an empty probability map; excluded");
      continue;
    }
    const double syn = mean_probability(r.syn_probs);
    if (mean_probability(r.ant_probs) > syn) continue;
    kept.push_back({&r, syn});
  }
  std::sort(kept.begin(), kept.end(), scored_before);
  return kept;
}

}  // namespace

std::vector<ContextRecord> select_prob_contexts(std::span<const ContextRecord> records,
                                                std::size_t k, Diagnostics* diag) {
  auto kept = filter_and_sort(records, diag);
  if (kept.size() > k) kept.resize(k);
  std::vector<ContextRecord> out;
  out.reserve(kept.size());
  for (const auto& s : kept) out.push_back(*s.record);
  return out;
}

std::vector<ContextRecord> select_prob_contexts_for_pole(const ContextPool& pool,
                                                         std::span<const std::string> adjectives,
                                                         std::size_t k, Diagnostics* diag) {
  std::set<std::string> ordered(adjectives.begin(), adjectives.end());
  std::vector<Scored> merged;
  for (const auto& adj : ordered) {
    auto per_adj = filter_and_sort(pool.for_adjective(adj), diag);
    if (per_adj.size() > k) per_adj.resize(k);
    merged.insert(merged.end(), per_adj.begin(), per_adj.end());
  }
  std::stable_sort(merged.begin(), merged.end(), scored_before);
  if (merged.size() > k) merged.resize(k);
  std::vector<ContextRecord> out;
  out.reserve(merged.size());
  for (const auto& s : merged) out.push_back(*s.record);
  return out;
}

std::vector<ContextRecord> select_default_contexts(std::span<const ContextRecord> pole_pool,
                                                   std::size_t k, std::uint64_t seed) {
  if (pole_pool.empty()) {
    throw PreconditionError("select_default_contexts: empty pool, pole cannot be represented");
  }
  const std::size_t n = pole_pool.size();
  const std::size_t take = std::min(k, n);
  // Partial Fisher-Yates over indices.
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = 0; i < take; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.uniform_index(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(take);
  std::sort(idx.begin(), idx.end());
  std::vector<ContextRecord> out;
  out.reserve(take);
  for (auto i : idx) out.push_back(pole_pool[i]);
  return out;
}

std::vector<ContextRecord> merged_pole_pool(const ContextPool& pool,
                                            std::span<const std::string> adjectives) {
  std::set<std::string> ordered(adjectives.begin(), adjectives.end());
  std::vector<ContextRecord> out;
  for (const auto& adj : ordered) {
    const auto& list = pool.for_adjective(adj);
    out.insert(out.end(), list.begin(), list.end());
  }
  return out;
}

}  // namespace saxe
