#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "saxe/common.hpp"

namespace saxe {

struct ContextRecord {
  std::string context_id;
  std::string adjective;
  std::vector<std::string> tokens;
  std::size_t target_index = 0;
  std::map<std::string, double> syn_probs;
  std::map<std::string, double> ant_probs;
};

/// Unweighted mean over the candidates present in the map; 0 when empty.
double mean_probability(const std::map<std::string, double>& probs);

/// Contexts must have more than 10 and at most 150 tokens.
bool length_ok(std::span<const std::string> tokens);

inline constexpr std::size_t kPoolCap = 1000;
inline constexpr std::size_t kContextsPerPole = 100;

/// Per-adjective context lists. Records failing the length screen are
/// rejected and each adjective keeps at most `cap` records (first come).
class ContextPool {
 public:
  explicit ContextPool(std::size_t cap = kPoolCap) : cap_(cap) {}

  /// Returns false if the record was screened out or the adjective is full.
  bool add(ContextRecord record, Diagnostics* diag = nullptr);

  const std::vector<ContextRecord>& for_adjective(const std::string& adjective) const;
  const std::map<std::string, std::vector<ContextRecord>>& by_adjective() const {
    return records_;
  }
  std::size_t size() const;
  std::size_t cap() const { return cap_; }

 private:
  std::size_t cap_;
  std::map<std::string, std::vector<ContextRecord>> records_;
};

/// One ContextRecord per line:
/// {context_id, adjective, tokens[], target_index, syn_probs{}, ant_probs{}}.
/// Invariant violations (index out of range, probability outside [0,1])
/// raise FormatError with the line number.
std::vector<ContextRecord> parse_context_records(std::string_view jsonl);
std::string serialize_context_records(std::span<const ContextRecord> records);
ContextPool load_context_pool(const std::string& path, std::size_t cap = kPoolCap,
                              Diagnostics* diag = nullptr);

/// Drops records whose mean antonym probability exceeds the mean synonym
/// probability, sorts by mean synonym probability (descending, ties by
/// context_id), and keeps the first k. Records with an empty probability
/// map are excluded with a warning.
std::vector<ContextRecord> select_prob_contexts(std::span<const ContextRecord> records,
                                                std::size_t k = kContextsPerPole,
                                                Diagnostics* diag = nullptr);

/// bert-prob for a whole pole: per-adjective filter and sort, then the top k
/// across the pole by the same ordering.
std::vector<ContextRecord> select_prob_contexts_for_pole(
    const ContextPool& pool, std::span<const std::string> adjectives,
    std::size_t k = kContextsPerPole, Diagnostics* diag = nullptr);

/// Uniform sample without replacement of min(k, size) records, returned in
/// pool order. Throws PreconditionError on an empty pool.
std::vector<ContextRecord> select_default_contexts(std::span<const ContextRecord> pole_pool,
                                                   std::size_t k, std::uint64_t seed);

/// All records of the given adjectives, adjectives in lexicographic order.
std::vector<ContextRecord> merged_pole_pool(const ContextPool& pool,
                                            std::span<const std::string> adjectives);

}  // namespace saxe
