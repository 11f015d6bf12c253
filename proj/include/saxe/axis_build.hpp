#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "saxe/axis_lexicon.hpp"
#include "saxe/context_select.hpp"
#include "saxe/embed_store.hpp"

namespace saxe {

enum class Method { kGlove, kBertDefault, kBertProb };

std::string_view method_name(Method m);
/// Accepts "glove", "bert-default", "bert-prob"; throws PreconditionError otherwise.
Method parse_method(std::string_view name);

/// How a pole's embeddings are averaged.
enum class PoleMeanMode {
  kContexts,    // unweighted mean over every selected context embedding
  kAdjectives,  // mean of per-adjective means
};

enum class Side { kLeft, kRight };
std::string_view side_name(Side s);
std::string_view pole_mean_name(PoleMeanMode m);
PoleMeanMode parse_pole_mean(std::string_view name);

struct SourceRef {
  std::string adjective;
  std::string context_id;  // empty for static embeddings

  bool operator==(const SourceRef&) const = default;
  auto operator<=>(const SourceRef&) const = default;
};

struct Axis {
  AxisSpec spec;
  Embedding vector;
  Method method = Method::kGlove;
  Method requested_method = Method::kGlove;
  bool zscored = false;
  bool backoff = false;
  PoleMeanMode pole_mean = PoleMeanMode::kContexts;
  std::vector<SourceRef> left_sources;
  std::vector<SourceRef> right_sources;

  /// "axis:<axis_id>:<method>:<z|raw>"
  std::string storage_key() const;
};

/// One pole's embeddings grouped by adjective, in a fixed adjective order.
struct AdjectiveEmbeddings {
  std::string adjective;
  std::vector<Embedding> embeddings;
};
using PoleEmbeddings = std::vector<AdjectiveEmbeddings>;

/// Pole mean under the given averaging mode. Throws PreconditionError when
/// the pole holds no embeddings.
Embedding pole_mean(const PoleEmbeddings& pole, PoleMeanMode mode);

/// V = mean(left) - mean(right). Throws PreconditionError naming the empty side.
Embedding axis_vector(std::span<const Embedding> left, std::span<const Embedding> right);
Embedding axis_vector(const PoleEmbeddings& left, const PoleEmbeddings& right,
                      PoleMeanMode mode = PoleMeanMode::kContexts);

struct AxisMeta {
  AxisSpec spec;
  Method method = Method::kGlove;
  bool zscored = false;
  std::vector<SourceRef> left_sources;
  std::vector<SourceRef> right_sources;
};

/// Builds one axis. When `meta.zscored`, `stats` must be given and inputs are
/// z-scored before averaging.
Axis build_axis(std::span<const Embedding> left, std::span<const Embedding> right,
                AxisMeta meta, const ZScoreStats* stats = nullptr);

struct EmbeddingSource {
  /// glove: keyed by word. BERT variants: keyed by context_key(adjective, context_id).
  const EmbeddingSet* embeddings = nullptr;
  /// Context pool with masked-token probabilities (BERT variants).
  const ContextPool* pool = nullptr;
  /// Single-wordpiece vocabulary used for the bert-prob backoff check.
  const std::set<std::string>* wordpiece_vocab = nullptr;
};

struct RealizeOptions {
  Method method = Method::kGlove;
  bool zscored = false;
  const ZScoreStats* stats = nullptr;
  std::uint64_t seed = 0;
  std::size_t contexts_per_pole = kContextsPerPole;
  PoleMeanMode pole_mean = PoleMeanMode::kContexts;
};

/// Which contexts represent each side of one spec, and the method that
/// actually produced them after any backoff.
struct PoleSelection {
  Method method = Method::kGlove;
  bool backoff = false;
  std::vector<SourceRef> left;
  std::vector<SourceRef> right;
};

/// Context selection for one spec; std::nullopt when a side has nothing
/// usable. Only sources with an embedding in `source.embeddings` are kept.
std::optional<PoleSelection> select_sources(const AxisSpec& spec, const EmbeddingSource& source,
                                            const RealizeOptions& options,
                                            Diagnostics* diag = nullptr);

/// Looks up (and z-scores, if `stats` is given) the embeddings of `sources`
/// grouped by adjective in first-seen order.
PoleEmbeddings gather_pole(std::span<const SourceRef> sources, const EmbeddingSet& embeddings,
                           const ZScoreStats* stats);

/// Realizes every spec that has usable data on both sides; skipped specs are
/// reported through `diag`.
std::vector<Axis> realize_all(std::span<const AxisSpec> specs, const EmbeddingSource& source,
                              const RealizeOptions& options, Diagnostics* diag = nullptr);

/// Axis vectors in SAXE form keyed by Axis::storage_key().
EmbeddingSet axes_to_embedding_set(std::span<const Axis> axes);

/// JSON lines sidecar: key, spec, method, requested method, z flag, backoff,
/// and sources per side.
std::string serialize_axis_manifest(std::span<const Axis> axes);

/// Reads a manifest and attaches the vectors stored in `vectors`.
std::vector<Axis> load_axes_with_manifest(const std::string& saxe_path,
                                          const std::string& manifest_path);
std::vector<Axis> parse_axis_manifest(std::string_view jsonl, const EmbeddingSet& vectors);

}  // namespace saxe
