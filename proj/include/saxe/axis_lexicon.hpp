#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "saxe/common.hpp"

namespace saxe {

struct Synset {
  std::string id;
  std::string pos;
  /// Lowercased lemmas, source order, underscores kept for multiword lemmas.
  std::vector<std::string> lemmas;
  /// Lowercased lemmas that matched the acronym rule in their source casing.
  std::set<std::string> acronyms;
  std::vector<std::string> similar_to;
  std::optional<std::string> antonym_of;
};

class SynsetDb {
 public:
  /// Throws PreconditionError on a duplicate id or empty lemma list.
  void add(Synset s);
  const Synset* find(const std::string& id) const;
  /// Synsets ordered by id.
  const std::map<std::string, Synset>& synsets() const { return synsets_; }
  std::size_t size() const { return synsets_.size(); }

 private:
  std::map<std::string, Synset> synsets_;
};

/// Parses one synset per line: {id, pos, lemmas[], similar_to[], antonym_of}.
/// Throws FormatError carrying the 1-based line number.
SynsetDb parse_synset_db(std::string_view jsonl);
SynsetDb load_synset_db(const std::string& path);

struct Pole {
  std::string seed;
  std::vector<std::string> adjectives;

  bool operator==(const Pole&) const = default;
};

struct AxisSpec {
  std::string axis_id;
  Pole left;
  Pole right;

  bool operator==(const AxisSpec&) const = default;
};

/// True for lemmas written fully in uppercase, or of length <= 3 with no vowel.
bool is_acronym(std::string_view raw_lemma);

/// Seed lemmas first, then lemmas of synsets one similar_to hop away in
/// synset-id order, deduplicated. Dangling links are skipped with a warning.
Pole expand_pole(const Synset& seed, const SynsetDb& db, Diagnostics* diag = nullptr);

struct LexiconOptions {
  std::size_t min_pole = 3;
};

/// One axis per antonym-linked synset pair (left = lexicographically smaller
/// id). Acronyms are dropped, poles are intersected with `vocab`, shared
/// adjectives are removed from both sides, and the axis is kept only if each
/// side retains at least `min_pole` adjectives. Sorted by axis_id.
std::vector<AxisSpec> build_axes(const SynsetDb& db, const std::set<std::string>& vocab,
                                 const LexiconOptions& options = {},
                                 Diagnostics* diag = nullptr);

/// True iff at least one adjective of the pole is a single wordpiece.
bool single_wordpiece_pole(const Pole& pole, const std::set<std::string>& wp_vocab);

std::string axis_id_for(const std::string& left_seed, const std::string& right_seed);

/// {axis_id, left:{seed, adjectives[]}, right:{seed, adjectives[]}} per line.
std::string serialize_axes(const std::vector<AxisSpec>& axes);
std::vector<AxisSpec> parse_axes(std::string_view jsonl);
std::vector<AxisSpec> load_axes(const std::string& path);

/// One entry per non-empty line, trimmed (and lowercased if requested).
std::set<std::string> load_word_list(const std::string& path, bool lowercase = true);

}  // namespace saxe
