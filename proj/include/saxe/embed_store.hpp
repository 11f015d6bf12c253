#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "saxe/common.hpp"

namespace saxe {

/// Dense real vector. Values are held in double precision; the SAXE file
/// format stores float32.
class Embedding {
 public:
  Embedding() = default;
  /// Throws PreconditionError on an empty vector or non-finite values.
  explicit Embedding(std::vector<double> values);
  static Embedding zeros(std::size_t dim);

  std::size_t dim() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  double norm() const;
  double dot(const Embedding& other) const;

  Embedding& operator+=(const Embedding& other);
  Embedding& operator-=(const Embedding& other);
  Embedding& operator*=(double s);
  friend Embedding operator+(Embedding a, const Embedding& b) { return a += b; }
  friend Embedding operator-(Embedding a, const Embedding& b) { return a -= b; }
  friend Embedding operator*(Embedding a, double s) { return a *= s; }
  friend Embedding operator*(double s, Embedding a) { return a *= s; }
  Embedding operator-() const { return *this * -1.0; }

  bool operator==(const Embedding&) const = default;

 private:
  std::vector<double> values_;
};

/// Cosine similarity; throws PreconditionError on a zero-norm argument.
double cosine(const Embedding& a, const Embedding& b);

/// Keyed collection of embedding lists sharing one dimensionality.
/// Key order is insertion order.
class EmbeddingSet {
 public:
  explicit EmbeddingSet(std::uint32_t dim);

  std::uint32_t dim() const { return dim_; }
  /// Appends to the key's list, creating the key if needed.
  void add(const std::string& key, Embedding e);

  bool contains(const std::string& key) const;
  /// Throws std::out_of_range for an unknown key.
  const std::vector<Embedding>& at(const std::string& key) const;
  const std::vector<Embedding>* find(const std::string& key) const;

  const std::vector<std::string>& keys() const { return keys_; }
  std::size_t key_count() const { return keys_.size(); }
  std::size_t embedding_count() const { return count_; }

  /// Every embedding in key order.
  std::vector<Embedding> all() const;

 private:
  std::uint32_t dim_;
  std::vector<std::string> keys_;
  std::unordered_map<std::string, std::vector<Embedding>> entries_;
  std::size_t count_ = 0;
};

/// Key for a contextual embedding of `word` in context `context_id`.
std::string context_key(const std::string& word, const std::string& context_id);

struct ZScoreStats {
  std::vector<double> mean;
  std::vector<double> std;
  std::uint64_t sample_count = 0;

  std::size_t dim() const { return mean.size(); }
};

inline constexpr double kStdFloor = 1e-8;
inline constexpr std::uint32_t kSaxeVersion = 1;

// --- SAXE binary format -----------------------------------------------------
//
//   "SAXE" | version u32 | dim u32 | record count u64
//   per record: key length u16 | key bytes | dim x float32
//
// All integers and floats are little-endian.

/// Throws FormatError carrying the byte offset of the first bad field.
EmbeddingSet load_embeddings(const std::string& path);
EmbeddingSet parse_embeddings(std::string_view bytes);

/// Records are emitted sorted by key; a key's embeddings keep their order.
std::string serialize_embeddings(const EmbeddingSet& set);
void write_embeddings(const EmbeddingSet& set, const std::string& path);

// --- pooling and z-scoring ---------------------------------------------------

/// Componentwise mean. Throws PreconditionError on empty or ragged input.
Embedding mean_pool(std::span<const Embedding> parts);

/// Per-dimension mean and population std over every embedding in the set.
/// Std components below kStdFloor are clamped to it.
ZScoreStats compute_zscore_stats(const EmbeddingSet& set);
ZScoreStats compute_zscore_stats(std::span<const Embedding> sample);

Embedding zscore(const Embedding& e, const ZScoreStats& stats);
Embedding zscore_inverse(const Embedding& z, const ZScoreStats& stats);

std::string stats_to_json(const ZScoreStats& stats);
ZScoreStats stats_from_json(std::string_view text);
ZScoreStats load_stats(const std::string& path);

}  // namespace saxe
