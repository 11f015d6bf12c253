#include "saxe/corpus_ingest.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace saxe {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::chrono::year_month_day civil_date(std::int64_t unix_seconds) {
  using namespace std::chrono;
  const auto tp = sys_seconds{seconds{unix_seconds}};
  return year_month_day{floor<days>(tp)};
}

std::string join(std::span<const std::string> words, char sep = ' ') {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out += sep;
    out += words[i];
  }
  return out;
}

bool is_word_char(unsigned char c) {
  return std::isalnum(c) || c == '\'' || c == '-' || c == '_' || c >= 0x80;
}

}  // namespace

std::string month_of(std::int64_t unix_seconds) {
  const auto ymd = civil_date(unix_seconds);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()));
  return buf;
}

int year_of(std::int64_t unix_seconds) { return static_cast<int>(civil_date(unix_seconds).year()); }

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string word;
  auto flush = [&] {
    if (word.empty()) return;
    // Peel apostrophes/hyphens that ended up at the word edges.
    std::size_t b = 0, e = word.size();
    while (b < e && (word[b] == '\'' || word[b] == '-')) ++b;
    while (e > b && (word[e - 1] == '\'' || word[e - 1] == '-')) --e;
    if (b < e) out.push_back(to_lower(std::string_view(word).substr(b, e - b)));
    word.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      flush();
    } else if (is_word_char(c)) {
      word.push_back(ch);
    } else {
      flush();
      out.emplace_back(1, ch);
    }
  }
  flush();
  return out;
}

std::vector<Document> parse_corpus(std::string_view jsonl, Diagnostics* diag) {
  std::vector<Document> out;
  std::uint64_t line_no = 0;
  for (const auto& line : split(jsonl, '\n')) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const auto j = json::parse(line);
      Document d;
      d.doc_id = j.at("id").is_string() ? j.at("id").get<std::string>()
                                        : j.at("id").dump();
      const auto& ts = j.at("created_utc");
      d.timestamp = ts.is_string() ? std::stoll(ts.get<std::string>())
                                   : static_cast<std::int64_t>(ts.get<double>());
      d.platform = j.value("platform", std::string());
      d.community = j.value("community", std::string());
      d.author = j.value("author", std::string());
      d.tokens = tokenize(j.at("text").get<std::string>());
      if (d.tokens.empty()) {
        warn(diag, "document " + d.doc_id + " has no tokens; skipped");
        continue;
      }
      out.push_back(std::move(d));
    } catch (const json::exception& e) {
      throw FormatError("corpus line " + std::to_string(line_no) + ": " + e.what(), line_no);
    } catch (const std::invalid_argument& e) {
      throw FormatError("corpus line " + std::to_string(line_no) + ": bad created_utc", line_no);
    }
  }
  return out;
}

std::string serialize_documents(std::span<const Document> docs) {
  std::string out;
  for (const auto& d : docs) {
    ordered_json j;
    j["id"] = d.doc_id;
    j["created_utc"] = d.timestamp;
    j["month"] = month_of(d.timestamp);
    j["platform"] = d.platform;
    j["community"] = d.community;
    j["author"] = d.author;
    j["tokens"] = d.tokens;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<Document> parse_documents(std::string_view jsonl) {
  std::vector<Document> out;
  std::uint64_t line_no = 0;
  for (const auto& line : split(jsonl, '\n')) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const auto j = json::parse(line);
      Document d;
      d.doc_id = j.at("id").get<std::string>();
      d.timestamp = j.at("created_utc").get<std::int64_t>();
      d.platform = j.at("platform").get<std::string>();
      d.community = j.at("community").get<std::string>();
      d.author = j.at("author").get<std::string>();
      d.tokens = j.at("tokens").get<std::vector<std::string>>();
      out.push_back(std::move(d));
    } catch (const json::exception& e) {
      throw FormatError("documents line " + std::to_string(line_no) + ": " + e.what(), line_no);
    }
  }
  return out;
}

std::set<std::string> bot_filter(std::span<const Document> docs, std::size_t n,
                                 std::size_t max_repeats) {
  std::map<std::string, std::unordered_map<std::string, std::size_t>> grams;
  std::set<std::string> flagged;
  for (const auto& d : docs) {
    if (flagged.contains(d.author) || d.tokens.size() < n) continue;
    auto& counts = grams[d.author];
    for (std::size_t i = 0; i + n <= d.tokens.size(); ++i) {
      std::string key;
      for (std::size_t k = 0; k < n; ++k) {
        key += d.tokens[i + k];
        key += '\x1f';
      }
      if (++counts[key] > max_repeats) {
        flagged.insert(d.author);
        grams.erase(d.author);
        break;
      }
    }
  }
  return flagged;
}

std::size_t remove_duplicates(std::vector<Document>& docs, const std::set<std::string>& platforms) {
  std::unordered_set<std::string> seen;
  const auto before = docs.size();
  std::erase_if(docs, [&](const Document& d) {
    if (!platforms.empty() && !platforms.contains(d.platform)) return false;
    std::string key = d.platform + '\x1e' + join(d.tokens, '\x1f');
    return !seen.insert(std::move(key)).second;
  });
  return before - docs.size();
}

IngestResult ingest(std::vector<Document> docs, const IngestOptions& options) {
  IngestResult r;
  std::stable_sort(docs.begin(), docs.end(), [](const Document& a, const Document& b) {
    if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
    return a.doc_id < b.doc_id;
  });
  r.duplicates_removed = remove_duplicates(docs, options.dedupe_platforms);

  std::vector<Document> screened;
  for (const auto& d : docs) {
    if (options.bot_filter_platforms.empty() || options.bot_filter_platforms.contains(d.platform)) {
      screened.push_back(d);
    }
  }
  r.flagged_authors = bot_filter(screened, options.bot_ngram, options.bot_max_repeats);
  const auto before = docs.size();
  std::erase_if(docs, [&](const Document& d) {
    return r.flagged_authors.contains(d.author) &&
           (options.bot_filter_platforms.empty() || options.bot_filter_platforms.contains(d.platform));
  });
  r.bot_documents_removed = before - docs.size();
  r.documents = std::move(docs);
  return r;
}

TermCounts count_terms(std::span<const Document> docs, const std::set<std::string>& terms) {
  TermCounts c;
  for (const auto& t : terms) c.total[t] = 0;
  for (const auto& d : docs) {
    const auto month = month_of(d.timestamp);
    ++c.documents_per_month[month];
    c.tokens_per_month[month] += d.tokens.size();
    std::set<std::string> present;
    for (std::size_t i = 0; i < d.tokens.size(); ++i) {
      if (terms.contains(d.tokens[i])) present.insert(d.tokens[i]);
      if (i + 1 < d.tokens.size()) {
        auto bigram = d.tokens[i] + ' ' + d.tokens[i + 1];
        if (terms.contains(bigram)) present.insert(std::move(bigram));
      }
    }
    for (const auto& t : present) {
      ++c.total[t];
      ++c.monthly[t][month];
    }
  }
  return c;
}

std::set<std::string> vocab_filter(const std::map<std::string, std::uint64_t>& counts,
                                   std::uint64_t min_count) {
  std::set<std::string> out;
  for (const auto& [term, n] : counts) {
    if (n >= min_count) out.insert(term);
  }
  return out;
}

const GenderWordList& default_gender_words() {
  static const GenderWordList words = [] {
    GenderWordList w;
    w.masculine = {"man", "men", "boy", "boys", "father", "fathers", "son", "sons", "brother",
                   "brothers", "husband", "husbands", "uncle", "uncles", "nephew", "nephews",
                   "emperor", "emperors", "king", "kings", "prince", "princes", "duke", "dukes",
                   "lord", "lords", "knight", "knights", "waiter", "waiters", "actor", "actors",
                   "god", "gods", "policeman", "policemen", "postman", "postmen", "hero", "heros",
                   "wizard", "wizards", "steward", "stewards", "male", "males", "dude", "dudes",
                   "guy", "guys", "boyfriend", "boyfriends", "bf", "bro", "transmen", "he"};
    w.feminine = {"woman", "women", "girl", "girls", "mother", "mothers", "daughter",
                  "daughters", "sister", "sisters", "wife", "wives", "aunt", "aunts", "niece",
                  "nieces", "empress", "empresses", "queen", "queens", "princess", "princesses",
                  "duchess", "duchesses", "lady", "ladies", "dame", "dames", "waitress",
                  "waitresses", "actress", "actresses", "goddess", "goddesses", "policewoman",
                  "policewomen", "postwoman", "postwomen", "heroine", "heroines", "witch",
                  "witches", "stewardess", "stewardesses", "female", "females", "chick", "chicks",
                  "girlfriend", "girlfriends", "gf", "gal", "gals", "transwomen", "she"};
    return w;
  }();
  return words;
}

std::string_view leaning_source_name(LeaningSource s) {
  switch (s) {
    case LeaningSource::kWordlist: return "wordlist";
    case LeaningSource::kPronouns: return "pronouns";
    case LeaningSource::kPluralTransfer: return "plural_transfer";
    case LeaningSource::kBigramTransfer: return "bigram_transfer";
    case LeaningSource::kNone: return "none";
  }
  return "none";
}

namespace {

LeaningSource parse_leaning_source(const std::string& s) {
  for (auto src : {LeaningSource::kWordlist, LeaningSource::kPronouns,
                   LeaningSource::kPluralTransfer, LeaningSource::kBigramTransfer}) {
    if (leaning_source_name(src) == s) return src;
  }
  return LeaningSource::kNone;
}

GenderLeaning wordlist_leaning(const std::string& term, const GenderWordList& words) {
  bool fem = false, masc = false;
  for (const auto& w : split(term, ' ')) {
    fem = fem || words.feminine.contains(w);
    masc = masc || words.masculine.contains(w);
  }
  if (fem == masc) return {};
  return {fem ? 1.0 : 0.0, LeaningSource::kWordlist};
}

GenderLeaning pronoun_leaning(const std::string& term,
                              const std::map<std::string, PronounCounts>& pronouns,
                              const GenderOptions& options) {
  auto it = pronouns.find(term);
  if (it == pronouns.end()) return {};
  const auto [f, m] = it->second;
  const bool enough = options.require_each
                          ? (f >= options.min_clusters && m >= options.min_clusters)
                          : (f + m >= options.min_clusters);
  if (!enough || f + m == 0) return {};
  return {static_cast<double>(f) / static_cast<double>(f + m), LeaningSource::kPronouns};
}

GenderLeaning own_leaning(const std::string& term,
                          const std::map<std::string, PronounCounts>& pronouns,
                          const GenderWordList& words, const GenderOptions& options) {
  auto l = wordlist_leaning(term, words);
  if (l.value) return l;
  return pronoun_leaning(term, pronouns, options);
}

GenderLeaning unigram_leaning(const std::string& term,
                              const std::map<std::string, PronounCounts>& pronouns,
                              const GenderWordList& words, const PluralMap& plurals,
                              const GenderOptions& options) {
  auto l = own_leaning(term, pronouns, words, options);
  if (l.value) return l;
  auto it = plurals.find(term);
  if (it != plurals.end()) {
    auto s = own_leaning(it->second, pronouns, words, options);
    if (s.value) return {s.value, LeaningSource::kPluralTransfer};
  }
  return {};
}

}  // namespace

GenderLeaning gender_leaning(const std::string& term,
                             const std::map<std::string, PronounCounts>& pronouns,
                             const GenderWordList& words, const PluralMap& plurals,
                             const GenderOptions& options) {
  auto l = unigram_leaning(term, pronouns, words, plurals, options);
  if (l.value) return l;
  const auto parts = split(term, ' ');
  if (parts.size() == 2) {
    const auto& modifier = parts[0];
    if (!words.feminine.contains(modifier) && !words.masculine.contains(modifier)) {
      auto head = unigram_leaning(parts[1], pronouns, words, plurals, options);
      if (head.value) return {head.value, LeaningSource::kBigramTransfer};
    }
  }
  return {};
}

PluralMap infer_plural_map(const std::set<std::string>& vocab) {
  PluralMap out;
  auto candidates = [](const std::string& w) {
    std::vector<std::string> c;
    auto ends = [&](std::string_view suf) {
      return w.size() > suf.size() && w.compare(w.size() - suf.size(), suf.size(), suf) == 0;
    };
    if (ends("ies")) c.push_back(w.substr(0, w.size() - 3) + "y");
    if (ends("men") || w == "men") c.push_back(w.substr(0, w.size() - 3) + "man");
    if (ends("es")) c.push_back(w.substr(0, w.size() - 2));
    if (ends("s") && !ends("ss")) c.push_back(w.substr(0, w.size() - 1));
    return c;
  };
  for (const auto& term : vocab) {
    const auto space = term.rfind(' ');
    const std::string prefix = space == std::string::npos ? "" : term.substr(0, space + 1);
    const std::string last = space == std::string::npos ? term : term.substr(space + 1);
    for (const auto& cand : candidates(last)) {
      if (vocab.contains(prefix + cand)) {
        out[term] = prefix + cand;
        break;
      }
    }
  }
  return out;
}

std::vector<VocabTerm> label_vocabulary(const std::set<std::string>& vocab,
                                        const std::map<std::string, std::uint64_t>& counts,
                                        const std::map<std::string, PronounCounts>& pronouns,
                                        const GenderWordList& words, const PluralMap& plurals,
                                        const GenderOptions& options) {
  std::vector<VocabTerm> out;
  for (const auto& term : vocab) {
    VocabTerm v;
    v.surface = term;
    if (auto it = counts.find(term); it != counts.end()) v.total_count = it->second;
    if (auto it = pronouns.find(term); it != pronouns.end()) {
      v.fem_pronoun_clusters = it->second.feminine;
      v.masc_pronoun_clusters = it->second.masculine;
    }
    v.leaning = gender_leaning(term, pronouns, words, plurals, options);
    out.push_back(std::move(v));
  }
  return out;
}

std::string vocab_to_tsv(std::span<const VocabTerm> vocab) {
  std::string out = "surface\tcount\tleaning\tsource\n";
  for (const auto& v : vocab) {
    out += v.surface + '\t' + std::to_string(v.total_count) + '\t' +
           (v.leaning.value ? format_double(*v.leaning.value) : std::string()) + '\t' +
           std::string(leaning_source_name(v.leaning.source)) + '\n';
  }
  return out;
}

std::vector<VocabTerm> parse_vocab_tsv(std::string_view tsv) {
  std::vector<VocabTerm> out;
  std::uint64_t line_no = 0;
  for (const auto& line : split(tsv, '\n')) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split(line, '\t');
    if (line_no == 1 && f[0] == "surface") continue;
    if (f.size() != 4) {
      throw FormatError("vocab line " + std::to_string(line_no) + ": expected 4 columns", line_no);
    }
    VocabTerm v;
    v.surface = f[0];
    v.total_count = std::stoull(f[1]);
    if (!f[2].empty()) v.leaning.value = std::stod(f[2]);
    v.leaning.source = parse_leaning_source(f[3]);
    out.push_back(std::move(v));
  }
  return out;
}

std::map<std::string, PronounCounts> parse_pronoun_tsv(std::string_view tsv) {
  std::map<std::string, PronounCounts> out;
  std::uint64_t line_no = 0;
  for (const auto& line : split(tsv, '\n')) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split(line, '\t');
    if (line_no == 1 && f[0] == "term") continue;
    if (f.size() != 3) {
      throw FormatError("pronoun line " + std::to_string(line_no) + ": expected 3 columns",
                        line_no);
    }
    try {
      out[f[0]] = {std::stoull(f[1]), std::stoull(f[2])};
    } catch (const std::exception&) {
      throw FormatError("pronoun line " + std::to_string(line_no) + ": bad count", line_no);
    }
  }
  return out;
}

// --- occurrences --------------------------------------------------------------------

std::string Occurrence::occurrence_id() const {
  return doc_id + ":" + std::to_string(start) + ":" + term;
}

std::vector<std::vector<std::string>> split_sentences(std::span<const std::string> tokens) {
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> cur;
  for (const auto& t : tokens) {
    cur.push_back(t);
    if (t == "." || t == "!" || t == "?") {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::vector<Occurrence> find_occurrences(std::span<const Document> docs,
                                         const std::set<std::string>& targets) {
  std::vector<const Document*> ordered;
  for (const auto& d : docs) ordered.push_back(&d);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const Document* a, const Document* b) { return a->doc_id < b->doc_id; });
  std::vector<Occurrence> out;
  for (const Document* d : ordered) {
    std::size_t sentence_no = 0;
    for (auto& sentence : split_sentences(d->tokens)) {
      for (std::size_t i = 0; i < sentence.size(); ++i) {
        auto emit = [&](std::string term, std::size_t len) {
          Occurrence o;
          o.doc_id = d->doc_id + "#" + std::to_string(sentence_no);
          o.month = month_of(d->timestamp);
          o.year = year_of(d->timestamp);
          o.platform = d->platform;
          o.community = d->community;
          o.term = std::move(term);
          o.tokens = sentence;
          o.start = i;
          o.length = len;
          out.push_back(std::move(o));
        };
        if (targets.contains(sentence[i])) emit(sentence[i], 1);
        if (i + 1 < sentence.size()) {
          auto bigram = sentence[i] + ' ' + sentence[i + 1];
          if (targets.contains(bigram)) emit(std::move(bigram), 2);
        }
      }
      ++sentence_no;
    }
  }
  return out;
}

std::vector<Occurrence> stratified_sample(std::span<const Occurrence> occurrences,
                                          const StratumKey& key, std::size_t cap,
                                          std::uint64_t seed) {
  std::map<std::string, ReservoirSampler<Occurrence>> strata;
  for (const auto& o : occurrences) {
    const auto k = key(o);
    auto it = strata.find(k);
    if (it == strata.end()) {
      it = strata.emplace(k, ReservoirSampler<Occurrence>(cap, derive_seed(seed, "stratum:" + k)))
               .first;
    }
    it->second.add(o);
  }
  std::vector<Occurrence> out;
  for (auto& [k, sampler] : strata) {
    auto s = sampler.take();
    out.insert(out.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
  }
  return out;
}

StratumKey platform_ideology_year_key(std::map<std::string, std::string> ideology) {
  return [ideology = std::move(ideology)](const Occurrence& o) {
    auto it = ideology.find(o.community);
    const std::string& group = it == ideology.end() ? o.community : it->second;
    return o.platform + "|" + group + "|" + std::to_string(o.year);
  };
}

StratumKey month_key() {
  return [](const Occurrence& o) { return o.month; };
}

const NumberLexicon& default_number_lexicon() {
  static const NumberLexicon lex = [] {
    NumberLexicon l;
    for (const char* w : {"men", "women", "people", "children", "wives", "policemen",
                          "policewomen", "postmen", "postwomen", "transmen", "transwomen",
                          "gentlemen", "folk", "feet", "kids"}) {
      l[w] = GrammaticalNumber::kPlural;
    }
    for (const char* w : {"boss", "princess", "duchess", "goddess", "actress", "waitress",
                          "empress", "stewardess", "heiress", "hostess", "mistress", "witness",
                          "seductress", "temptress", "lass", "miss", "ms", "mrs", "his", "bus",
                          "boyfriend", "girlfriend", "person", "child", "wife", "man", "woman"}) {
      l[w] = GrammaticalNumber::kSingular;
    }
    return l;
  }();
  return lex;
}

GrammaticalNumber grammatical_number(const std::string& word, const NumberLexicon& lexicon) {
  const auto space = word.rfind(' ');
  const std::string head = space == std::string::npos ? word : word.substr(space + 1);
  if (auto it = lexicon.find(head); it != lexicon.end()) return it->second;
  return !head.empty() && head.back() == 's' ? GrammaticalNumber::kPlural
                                             : GrammaticalNumber::kSingular;
}

Occurrence replace_target(const Occurrence& occ, const NumberLexicon& lexicon) {
  if (occ.length == 0 || occ.start + occ.length > occ.tokens.size()) {
    throw PreconditionError("replace_target: span outside sentence for " + occ.doc_id);
  }
  std::vector<std::string> span(occ.tokens.begin() + static_cast<std::ptrdiff_t>(occ.start),
                                occ.tokens.begin() + static_cast<std::ptrdiff_t>(occ.start + occ.length));
  const auto number = grammatical_number(join(span), lexicon);
  Occurrence out = occ;
  out.tokens.erase(out.tokens.begin() + static_cast<std::ptrdiff_t>(occ.start),
                   out.tokens.begin() + static_cast<std::ptrdiff_t>(occ.start + occ.length));
  out.tokens.insert(out.tokens.begin() + static_cast<std::ptrdiff_t>(occ.start),
                    number == GrammaticalNumber::kPlural ? "people" : "person");
  out.length = 1;
  out.replaced = true;
  return out;
}

std::string serialize_occurrences(std::span<const Occurrence> occurrences) {
  std::string out;
  for (const auto& o : occurrences) {
    ordered_json j;
    j["occurrence_id"] = o.occurrence_id();
    j["doc_id"] = o.doc_id;
    j["month"] = o.month;
    j["year"] = o.year;
    j["platform"] = o.platform;
    j["community"] = o.community;
    j["term"] = o.term;
    j["tokens"] = o.tokens;
    j["target_start"] = o.start;
    j["target_len"] = o.length;
    j["replaced"] = o.replaced;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<Occurrence> parse_occurrences(std::string_view jsonl) {
  std::vector<Occurrence> out;
  std::uint64_t line_no = 0;
  for (const auto& line : split(jsonl, '\n')) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const auto j = json::parse(line);
      Occurrence o;
      o.doc_id = j.at("doc_id").get<std::string>();
      o.month = j.at("month").get<std::string>();
      o.year = j.at("year").get<int>();
      o.platform = j.at("platform").get<std::string>();
      o.community = j.at("community").get<std::string>();
      o.term = j.at("term").get<std::string>();
      o.tokens = j.at("tokens").get<std::vector<std::string>>();
      o.start = j.at("target_start").get<std::size_t>();
      o.length = j.at("target_len").get<std::size_t>();
      o.replaced = j.value("replaced", false);
      if (o.length == 0 || o.start + o.length > o.tokens.size()) {
        throw FormatError("occurrence line " + std::to_string(line_no) + ": span out of bounds",
                          line_no);
      }
      out.push_back(std::move(o));
    } catch (const json::exception& e) {
      throw FormatError("occurrence line " + std::to_string(line_no) + ": " + e.what(), line_no);
    }
  }
  return out;
}

}  // namespace saxe
