#include "saxe/axis_lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include <json.hpp>

namespace saxe {

using nlohmann::json;
using nlohmann::ordered_json;

void SynsetDb::add(Synset s) {
  if (s.lemmas.empty()) throw PreconditionError("synset " + s.id + " has no lemmas");
  auto id = s.id;
  if (!synsets_.emplace(id, std::move(s)).second) {
    throw PreconditionError("duplicate synset id: " + id);
  }
}

const Synset* SynsetDb::find(const std::string& id) const {
  auto it = synsets_.find(id);
  return it == synsets_.end() ? nullptr : &it->second;
}

bool is_acronym(std::string_view raw) {
  bool has_letter = false;
  bool all_upper = true;
  bool has_vowel = false;
  for (char c : raw) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isalpha(uc)) {
      has_letter = true;
      if (!std::isupper(uc)) all_upper = false;
      switch (std::tolower(uc)) {
        case 'a': case 'e': case 'i': case 'o': case 'u': case 'y':
          has_vowel = true;
          break;
        default:
          break;
      }
    }
  }
  if (has_letter && all_upper) return true;
  return raw.size() <= 3 && !has_vowel;
}

SynsetDb parse_synset_db(std::string_view jsonl) {
  SynsetDb db;
  std::uint64_t line_no = 0;
  for (const auto& line : split(jsonl, '\n')) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const auto j = json::parse(line);
      Synset s;
      s.id = j.at("id").get<std::string>();
      s.pos = j.value("pos", std::string("a"));
      for (const auto& raw : j.at("lemmas")) {
        const auto lemma = raw.get<std::string>();
        const auto lower = to_lower(lemma);
        if (std::find(s.lemmas.begin(), s.lemmas.end(), lower) == s.lemmas.end()) {
          s.lemmas.push_back(lower);
        }
        if (is_acronym(lemma)) s.acronyms.insert(lower);
      }
      if (j.contains("similar_to")) {
        s.similar_to = j.at("similar_to").get<std::vector<std::string>>();
      }
      if (j.contains("antonym_of") && !j.at("antonym_of").is_null()) {
        s.antonym_of = j.at("antonym_of").get<std::string>();
      }
      db.add(std::move(s));
    } catch (const json::exception& e) {
      throw FormatError("synset db line " + std::to_string(line_no) + ": " + e.what(), line_no);
    } catch (const PreconditionError& e) {
      throw FormatError("synset db line " + std::to_string(line_no) + ": " + e.what(), line_no);
    }
  }
  return db;
}

SynsetDb load_synset_db(const std::string& path) { return parse_synset_db(read_file(path)); }

Pole expand_pole(const Synset& seed, const SynsetDb& db, Diagnostics* diag) {
  Pole pole;
  pole.seed = seed.id;
  std::set<std::string> seen;
  auto push = [&](const std::string& lemma) {
    if (seen.insert(lemma).second) pole.adjectives.push_back(lemma);
  };
  for (const auto& l : seed.lemmas) push(l);

  std::vector<std::string> hops = seed.similar_to;
  std::sort(hops.begin(), hops.end());
  hops.erase(std::unique(hops.begin(), hops.end()), hops.end());
  for (const auto& id : hops) {
    const Synset* s = db.find(id);
    if (!s) {
      warn(diag, "synset " + seed.id + ": dangling similar_to link " + id);
      continue;
    }
    for (const auto& l : s->lemmas) push(l);
  }
  return pole;
}

namespace {

// Acronym flags are per source synset, so gather them over the same hop set.
std::set<std::string> pole_acronyms(const Synset& seed, const SynsetDb& db) {
  std::set<std::string> out = seed.acronyms;
  for (const auto& id : seed.similar_to) {
    if (const Synset* s = db.find(id)) out.insert(s->acronyms.begin(), s->acronyms.end());
  }
  return out;
}

bool is_adjective_pos(const std::string& pos) {
  return pos == "a" || pos == "s" || pos == "adj";
}

}  // namespace

std::string axis_id_for(const std::string& left_seed, const std::string& right_seed) {
  return left_seed + "__" + right_seed;
}

std::vector<AxisSpec> build_axes(const SynsetDb& db, const std::set<std::string>& vocab,
                                 const LexiconOptions& options, Diagnostics* diag) {
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& [id, s] : db.synsets()) {
    if (!s.antonym_of || !is_adjective_pos(s.pos)) continue;
    const Synset* other = db.find(*s.antonym_of);
    if (!other) {
      warn(diag, "synset " + id + ": dangling antonym_of link " + *s.antonym_of);
      continue;
    }
    if (!is_adjective_pos(other->pos) || other->id == id) continue;
    pairs.emplace(std::min(id, other->id), std::max(id, other->id));
  }

  std::vector<AxisSpec> axes;
  for (const auto& [left_id, right_id] : pairs) {
    const Synset& ls = *db.find(left_id);
    const Synset& rs = *db.find(right_id);
    Pole left = expand_pole(ls, db, diag);
    Pole right = expand_pole(rs, db, diag);

    auto filter = [&](Pole& p, const Synset& seed) {
      const auto acronyms = pole_acronyms(seed, db);
      std::erase_if(p.adjectives, [&](const std::string& a) {
        return acronyms.contains(a) || is_acronym(a) || !vocab.contains(a);
      });
    };
    filter(left, ls);
    filter(right, rs);

    std::set<std::string> right_set(right.adjectives.begin(), right.adjectives.end());
    std::set<std::string> shared;
    for (const auto& a : left.adjectives) {
      if (right_set.contains(a)) shared.insert(a);
    }
    if (!shared.empty()) {
      auto drop = [&](const std::string& a) { return shared.contains(a); };
      std::erase_if(left.adjectives, drop);
      std::erase_if(right.adjectives, drop);
    }

    if (left.adjectives.size() < options.min_pole || right.adjectives.size() < options.min_pole) {
      continue;
    }
    axes.push_back({axis_id_for(left_id, right_id), std::move(left), std::move(right)});
  }
  std::sort(axes.begin(), axes.end(),
            [](const AxisSpec& a, const AxisSpec& b) { return a.axis_id < b.axis_id; });
  return axes;
}

bool single_wordpiece_pole(const Pole& pole, const std::set<std::string>& wp_vocab) {
  return std::any_of(pole.adjectives.begin(), pole.adjectives.end(),
                     [&](const std::string& a) { return wp_vocab.contains(a); });
}

std::string serialize_axes(const std::vector<AxisSpec>& axes) {
  std::string out;
  for (const auto& a : axes) {
    ordered_json j;
    j["axis_id"] = a.axis_id;
    j["left"] = {{"seed", a.left.seed}, {"adjectives", a.left.adjectives}};
    j["right"] = {{"seed", a.right.seed}, {"adjectives", a.right.adjectives}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<AxisSpec> parse_axes(std::string_view jsonl) {
  std::vector<AxisSpec> axes;
  std::uint64_t line_no = 0;
  for (const auto& line : split(jsonl, '\n')) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const auto j = json::parse(line);
      AxisSpec a;
      a.axis_id = j.at("axis_id").get<std::string>();
      a.left.seed = j.at("left").at("seed").get<std::string>();
      a.left.adjectives = j.at("left").at("adjectives").get<std::vector<std::string>>();
      a.right.seed = j.at("right").at("seed").get<std::string>();
      a.right.adjectives = j.at("right").at("adjectives").get<std::vector<std::string>>();
      axes.push_back(std::move(a));
    } catch (const json::exception& e) {
      throw FormatError("axes line " + std::to_string(line_no) + ": " + e.what(), line_no);
    }
  }
  return axes;
}

std::vector<AxisSpec> load_axes(const std::string& path) { return parse_axes(read_file(path)); }

std::set<std::string> load_word_list(const std::string& path, bool lowercase) {
  std::set<std::string> out;
  for (const auto& line : split(read_file(path), '\n')) {
    auto w = trim(line);
    if (w.empty() || w.front() == '#') continue;
    out.insert(lowercase ? to_lower(w) : w);
  }
  return out;
}

}  // namespace saxe
