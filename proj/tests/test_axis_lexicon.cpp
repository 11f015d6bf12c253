#include <doctest.h>

#include "saxe/axis_lexicon.hpp"
#include "support.hpp"

using saxe::AxisSpec;
using saxe::Pole;
using testing::fixture;

namespace {

using Words = std::vector<std::string>;

AxisSpec axis(const std::string& l, Words la, const std::string& r, Words ra) {
  return AxisSpec{l + "__" + r, Pole{l, std::move(la)}, Pole{r, std::move(ra)}};
}

// Traced by hand from the toy database and vocabulary.
std::vector<AxisSpec> expected_toy_axes() {
  return {
      axis("bad.a.01", {"bad", "awful", "terrible", "poor"},
           "good.a.01", {"good", "fine", "superb", "nice", "pleasant"}),
      axis("big.a.01", {"big", "large", "huge"}, "small.a.01", {"small", "tiny", "wee"}),
      // tepid sits on both sides and is removed from each
      axis("cold.a.01", {"cold", "cool", "chilly", "lukewarm"},
           "hot.a.01", {"hot", "spicy", "peppery", "warm"}),
      axis("heavy.a.01", {"heavy", "hefty", "weighty", "massive"},
           "light.a.01", {"light", "airy", "weightless"}),
      // young carries no antonym link of its own; old's link is enough
      axis("old.a.01", {"old", "aged", "ancient", "antique"},
           "young.a.01", {"young", "youthful", "juvenile", "immature"}),
      axis("strong.a.01", {"strong", "powerful", "mighty", "sturdy"},
           "weak.a.01", {"weak", "feeble", "frail", "fragile", "run_down"}),
  };
}

}  // namespace

TEST_SUITE("axis-lexicon") {

TEST_CASE("acronym rule") {
  CHECK(saxe::is_acronym("XXL"));
  CHECK(saxe::is_acronym("USA"));
  CHECK(saxe::is_acronym("sm"));
  CHECK(saxe::is_acronym("hmm"));
  CHECK_FALSE(saxe::is_acronym("hot"));
  CHECK_FALSE(saxe::is_acronym("wee"));
  CHECK_FALSE(saxe::is_acronym("shy"));    // y counts as a vowel
  CHECK_FALSE(saxe::is_acronym("Small"));
  CHECK_FALSE(saxe::is_acronym("strngth"));  // no vowel but long
}

TEST_CASE("one-hop expansion of the twelve-synset fixture") {
  const auto db = saxe::load_synset_db(fixture("lexicon/expand12.jsonl"));
  REQUIRE(db.size() == 12);
  const auto good = saxe::expand_pole(*db.find("good.a.01"), db);
  CHECK(good.seed == "good.a.01");
  CHECK(good.adjectives == Words{"good", "fine", "superb", "nice", "pleasant"});
  const auto cold = saxe::expand_pole(*db.find("cold.a.01"), db);
  CHECK(cold.adjectives == Words{"cold", "cool", "chilly", "tepid", "lukewarm"});
  // similar synsets are visited in id order, not listed order
  const auto hot = saxe::expand_pole(*db.find("hot.a.01"), db);
  CHECK(hot.adjectives == Words{"hot", "spicy", "peppery", "warm", "tepid"});
  // only one hop: fine.s.01 has no links, so its pole is its own lemmas
  CHECK(saxe::expand_pole(*db.find("fine.s.01"), db).adjectives == Words{"fine", "superb"});
}

TEST_CASE("toy database yields the hand-traced axes") {
  const auto db = saxe::load_synset_db(fixture("lexicon/toy_db.jsonl"));
  const auto vocab = saxe::load_word_list(fixture("lexicon/toy_vocab.txt"));
  REQUIRE(db.size() == 40);
  REQUIRE(vocab.size() == 60);
  saxe::Diagnostics diag;
  const auto axes = saxe::build_axes(db, vocab, {}, &diag);
  const auto expected = expected_toy_axes();
  REQUIRE(axes.size() == expected.size());
  for (std::size_t i = 0; i < axes.size(); ++i) {
    CAPTURE(i);
    CHECK(axes[i].axis_id == expected[i].axis_id);
    CHECK(axes[i].left == expected[i].left);
    CHECK(axes[i].right == expected[i].right);
  }
  auto mentions = [&](const std::string& s) {
    for (const auto& w : diag.warnings)
      if (w.find(s) != std::string::npos) return true;
    return false;
  };
  CHECK(mentions("missing.s.99"));
  CHECK(mentions("dim.a.99"));
}

TEST_CASE("axis output is byte-identical across runs and round-trips") {
  const auto db = saxe::load_synset_db(fixture("lexicon/toy_db.jsonl"));
  const auto vocab = saxe::load_word_list(fixture("lexicon/toy_vocab.txt"));
  const auto a = saxe::serialize_axes(saxe::build_axes(db, vocab));
  const auto b = saxe::serialize_axes(saxe::build_axes(db, vocab));
  CHECK(a == b);
  CHECK(saxe::parse_axes(a) == saxe::build_axes(db, vocab));
  CHECK(saxe::serialize_axes(saxe::parse_axes(a)) == a);
}

TEST_CASE("min_pole boundary") {
  const auto db = saxe::load_synset_db(fixture("lexicon/toy_db.jsonl"));
  const auto vocab = saxe::load_word_list(fixture("lexicon/toy_vocab.txt"));
  // big/small and heavy/light have a three-adjective side
  saxe::LexiconOptions four{4};
  std::vector<std::string> ids;
  for (const auto& a : saxe::build_axes(db, vocab, four)) ids.push_back(a.axis_id);
  CHECK(ids == Words{"bad.a.01__good.a.01", "cold.a.01__hot.a.01", "old.a.01__young.a.01",
                     "strong.a.01__weak.a.01"});
  saxe::LexiconOptions two{2};
  ids.clear();
  for (const auto& a : saxe::build_axes(db, vocab, two)) ids.push_back(a.axis_id);
  // happy/sad now qualifies with sad+gloomy
  CHECK(std::find(ids.begin(), ids.end(), "happy.a.01__sad.a.01") != ids.end());
  CHECK(ids.size() == 7);
}

TEST_CASE("verbs and non-adjective synsets never form axes") {
  const auto db = saxe::parse_synset_db(
      R"({"id":"a.v.01","pos":"v","lemmas":["aa","ab","ac"],"similar_to":[],"antonym_of":"b.v.01"}
{"id":"b.v.01","pos":"v","lemmas":["ba","bb","bc"],"similar_to":[],"antonym_of":"a.v.01"}
)");
  CHECK(saxe::build_axes(db, {"aa", "ab", "ac", "ba", "bb", "bc"}).empty());
}

TEST_CASE("malformed database lines report the line number") {
  try {
    saxe::parse_synset_db("{\"id\":\"x.a.01\",\"pos\":\"a\",\"lemmas\":[\"x\"],\"similar_to\":[]}\n{oops\n");
    FAIL("expected FormatError");
  } catch (const saxe::FormatError& e) {
    CHECK(e.offset() == 2);
  }
  CHECK_THROWS_AS(saxe::parse_synset_db(
                      "{\"id\":\"x.a.01\",\"pos\":\"a\",\"lemmas\":[\"x\"],\"similar_to\":[]}\n"
                      "{\"id\":\"x.a.01\",\"pos\":\"a\",\"lemmas\":[\"y\"],\"similar_to\":[]}\n"),
                  std::exception);
}

TEST_CASE("single wordpiece pole check") {
  const Pole p{"heavy.a.01", {"heavy", "hefty"}};
  CHECK(saxe::single_wordpiece_pole(p, {"hefty", "light"}));
  CHECK_FALSE(saxe::single_wordpiece_pole(p, {"light", "airy"}));
  CHECK_FALSE(saxe::single_wordpiece_pole(p, {}));
}

}
