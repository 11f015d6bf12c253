#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "saxe/common.hpp"
#include "saxe/timeseries.hpp"

namespace saxe {

struct Document {
  std::string doc_id;
  std::int64_t timestamp = 0;  // unix seconds
  std::string platform;
  std::string community;
  std::string author;
  std::vector<std::string> tokens;
};

/// UTC month bucket "YYYY-MM" and year of a unix timestamp.
std::string month_of(std::int64_t unix_seconds);
int year_of(std::int64_t unix_seconds);

/// Lowercases, splits on whitespace, and peels leading/trailing punctuation
/// into separate tokens. Apostrophes and hyphens inside words are kept.
std::vector<std::string> tokenize(std::string_view text);

/// Corpus lines: {id, created_utc, platform, community, author, text}.
/// Documents with no tokens are skipped with a warning.
std::vector<Document> parse_corpus(std::string_view jsonl, Diagnostics* diag = nullptr);

/// Documents as JSON lines with a `tokens` array and `month` in place of
/// the raw text.
std::string serialize_documents(std::span<const Document> docs);
std::vector<Document> parse_documents(std::string_view jsonl);

/// Authors whose documents contain some n-gram more than `max_repeats` times.
std::set<std::string> bot_filter(std::span<const Document> docs, std::size_t n = 10,
                                 std::size_t max_repeats = 100);

/// Removes exact duplicate token sequences among documents whose platform
/// is in `platforms` (all platforms when empty); first occurrence wins.
/// Returns the number removed.
std::size_t remove_duplicates(std::vector<Document>& docs,
                              const std::set<std::string>& platforms = {});

struct IngestOptions {
  std::set<std::string> dedupe_platforms;  // empty = every platform
  std::set<std::string> bot_filter_platforms;  // empty = every platform
  std::size_t bot_ngram = 10;
  std::size_t bot_max_repeats = 100;
};

struct IngestResult {
  std::vector<Document> documents;  // sorted by (timestamp, doc_id)
  std::set<std::string> flagged_authors;
  std::size_t duplicates_removed = 0;
  std::size_t bot_documents_removed = 0;
};

IngestResult ingest(std::vector<Document> docs, const IngestOptions& options = {});

// --- vocabulary -------------------------------------------------------------------

/// Each term counted at most once per document. Terms are unigrams or
/// space-joined bigrams.
struct TermCounts {
  std::map<std::string, std::uint64_t> total;
  std::map<std::string, MonthCounts> monthly;
  MonthCounts documents_per_month;
  MonthCounts tokens_per_month;
};

TermCounts count_terms(std::span<const Document> docs, const std::set<std::string>& terms);

inline constexpr std::uint64_t kVocabMinCount = 500;

/// Terms with count >= min_count.
std::set<std::string> vocab_filter(const std::map<std::string, std::uint64_t>& counts,
                                   std::uint64_t min_count = kVocabMinCount);

struct GenderWordList {
  std::set<std::string> feminine;
  std::set<std::string> masculine;
};

/// Semantically gendered nouns (including pronouns "she"/"he").
const GenderWordList& default_gender_words();

struct PronounCounts {
  std::uint64_t feminine = 0;
  std::uint64_t masculine = 0;
};

enum class LeaningSource { kWordlist, kPronouns, kPluralTransfer, kBigramTransfer, kNone };
std::string_view leaning_source_name(LeaningSource s);

struct GenderOptions {
  std::uint64_t min_clusters = 10;
  /// Require min_clusters of each pronoun gender instead of their sum.
  bool require_each = false;
};

struct GenderLeaning {
  std::optional<double> value;  // fraction feminine, in [0,1]
  LeaningSource source = LeaningSource::kNone;
};

/// plural -> singular
using PluralMap = std::map<std::string, std::string>;

/// Rules in order: wordlist hit (1.0 feminine / 0.0 masculine; a term with
/// both kinds of gendered word falls through), pronoun proportion when
/// enough clusters, the singular's leaning for plurals, the head unigram's
/// leaning for bigrams whose modifier is not gendered.
GenderLeaning gender_leaning(const std::string& term,
                             const std::map<std::string, PronounCounts>& pronouns,
                             const GenderWordList& words, const PluralMap& plurals,
                             const GenderOptions& options = {});

/// Pairs each term with a singular form in `vocab` by suffix rules
/// (-ies/-y, -es, -s, -men/-man), applied to the last word.
PluralMap infer_plural_map(const std::set<std::string>& vocab);

struct VocabTerm {
  std::string surface;
  std::uint64_t total_count = 0;
  std::uint64_t fem_pronoun_clusters = 0;
  std::uint64_t masc_pronoun_clusters = 0;
  GenderLeaning leaning;
};

std::vector<VocabTerm> label_vocabulary(const std::set<std::string>& vocab,
                                        const std::map<std::string, std::uint64_t>& counts,
                                        const std::map<std::string, PronounCounts>& pronouns,
                                        const GenderWordList& words, const PluralMap& plurals,
                                        const GenderOptions& options = {});

/// surface, count, leaning ("" when undefined), source
std::string vocab_to_tsv(std::span<const VocabTerm> vocab);
std::vector<VocabTerm> parse_vocab_tsv(std::string_view tsv);
/// term, fem_clusters, masc_clusters
std::map<std::string, PronounCounts> parse_pronoun_tsv(std::string_view tsv);

inline constexpr double kFeminineThreshold = 0.75;

// --- occurrences and sampling ---------------------------------------------------

struct Occurrence {
  std::string doc_id;
  std::string month;
  int year = 0;
  std::string platform;
  std::string community;
  std::string term;  // surface form matched
  std::vector<std::string> tokens;  // the sentence
  std::size_t start = 0;
  std::size_t length = 1;
  bool replaced = false;

  std::string occurrence_id() const;
};

/// Sentences end at ".", "!" or "?" tokens.
std::vector<std::vector<std::string>> split_sentences(std::span<const std::string> tokens);

/// Every match of a target (unigram or bigram) in every sentence, ordered by
/// (doc_id, sentence, start).
std::vector<Occurrence> find_occurrences(std::span<const Document> docs,
                                         const std::set<std::string>& targets);

/// Algorithm R reservoir over a stream; uniform without a second pass.
template <typename T>
class ReservoirSampler {
 public:
  ReservoirSampler(std::size_t capacity, std::uint64_t seed) : capacity_(capacity), rng_(seed) {
    sample_.reserve(capacity);
  }

  void add(const T& item) {
    ++seen_;
    if (sample_.size() < capacity_) {
      sample_.push_back(item);
      return;
    }
    const auto j = rng_.uniform_index(seen_);
    if (j < capacity_) sample_[j] = item;
  }

  const std::vector<T>& sample() const { return sample_; }
  std::vector<T> take() { return std::move(sample_); }
  std::uint64_t seen() const { return seen_; }

 private:
  std::size_t capacity_;
  Rng rng_;
  std::vector<T> sample_;
  std::uint64_t seen_ = 0;
};

template <typename T>
std::vector<T> reservoir_sample(std::span<const T> stream, std::size_t k, std::uint64_t seed) {
  ReservoirSampler<T> sampler(k, seed);
  for (const auto& x : stream) sampler.add(x);
  return sampler.take();
}

using StratumKey = std::function<std::string(const Occurrence&)>;

/// Independent reservoir of size `cap` per stratum, each seeded from
/// (seed, stratum key). Output ordered by stratum key, then reservoir order.
std::vector<Occurrence> stratified_sample(std::span<const Occurrence> occurrences,
                                          const StratumKey& key, std::size_t cap,
                                          std::uint64_t seed);

/// platform|ideology|year, with ideology looked up from community (the
/// community itself when unmapped).
StratumKey platform_ideology_year_key(std::map<std::string, std::string> ideology = {});
StratumKey month_key();

enum class GrammaticalNumber { kSingular, kPlural };
using NumberLexicon = std::map<std::string, GrammaticalNumber>;

/// Irregular plurals and singular nouns ending in "s".
const NumberLexicon& default_number_lexicon();

/// Lexicon lookup of the span's last word, else plural iff it ends in "s".
GrammaticalNumber grammatical_number(const std::string& word, const NumberLexicon& lexicon);

/// Replaces the target span with "person" or "people"; bigram spans
/// collapse to the single replacement token.
Occurrence replace_target(const Occurrence& occ, const NumberLexicon& lexicon);

std::string serialize_occurrences(std::span<const Occurrence> occurrences);
std::vector<Occurrence> parse_occurrences(std::string_view jsonl);

}  // namespace saxe
