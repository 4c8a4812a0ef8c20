#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "tempnet/entities.hpp"
#include "tempnet/error.hpp"

using namespace tempnet;

namespace {

std::vector<std::pair<std::string, Label>> names(const std::vector<EntityMention>& ms) {
  std::vector<std::pair<std::string, Label>> out;
  for (const auto& m : ms) out.emplace_back(m.normalized, m.label);
  return out;
}

EntityMention mention(std::string chapter, std::string name, Label label, std::string tagger,
                      std::size_t start = 0) {
  EntityMention m;
  m.surface = name;
  m.normalized = normalize_surface(name);
  m.label = label;
  m.chapter_id = std::move(chapter);
  m.span = {start, start + name.size()};
  m.tagger_id = std::move(tagger);
  return m;
}

std::set<std::pair<std::string, std::string>> keys(const std::vector<EntityRow>& rows) {
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& r : rows) out.emplace(r.chapter_id, r.normalized);
  return out;
}

}  // namespace

TEST_CASE("normalize_surface") {
  CHECK(normalize_surface("  Mr. Gokhale,") == "gokhale");
  CHECK(normalize_surface("GOPAL   KRISHNA GOKHALE") == "gopal krishna gokhale");
  CHECK(normalize_surface("\xE2\x80\x94") == "");
  CHECK(normalize_surface("Mahatma Shri Gandhi") == "gandhi");
  CHECK(normalize_surface("Mr.") == "");
  CHECK(normalize_surface("Drummond") == "drummond");
  CHECK(normalize_surface("\"Tolstoy\"") == "tolstoy");
  CHECK(normalize_surface("Pr\xC3\xA9torius") == "pr\xC3\xA9torius");
  CHECK(normalize_surface("PR\xC3\x89TORIUS") == "pr\xC3\xA9torius");
}

TEST_CASE("labels") {
  CHECK(parse_label("PERSON") == Label::kPerson);
  CHECK(parse_label("PLACE") == Label::kPlace);
  CHECK(label_name(Label::kPlace) == "PLACE");
  CHECK_THROWS_AS(parse_label("ORG"), Error);
}

TEST_CASE("tag_gazetteer") {
  const Gazetteer g({"Gokhale", "Gopal Krishna Gokhale"}, {"Bombay"});
  SUBCASE("basic") {
    const auto c = testutil::chapter("v", 1, "met Gokhale in Bombay");
    const auto ms = tag_gazetteer(c, g);
    CHECK(names(ms) == std::vector<std::pair<std::string, Label>>{{"gokhale", Label::kPerson},
                                                                   {"bombay", Label::kPlace}});
    CHECK(c.text.substr(ms[0].span.start, ms[0].span.size()) == "Gokhale");
    CHECK(ms[0].tagger_id == kGazetteerTagger);
  }
  SUBCASE("longest match") {
    const auto ms = tag_gazetteer(testutil::chapter("v", 1, "Gopal Krishna Gokhale spoke"), g);
    REQUIRE(ms.size() == 1);
    CHECK(ms[0].normalized == "gopal krishna gokhale");
    CHECK(ms[0].span.start == 0);
  }
  SUBCASE("no hits") { CHECK(tag_gazetteer(testutil::chapter("v", 1, "nothing here"), g).empty()); }
  SUBCASE("persons win a clash") {
    const Gazetteer both({"Natal"}, {"Natal"});
    REQUIRE(both.find("natal") != nullptr);
    CHECK(*both.find("natal") == Label::kPerson);
  }
}

TEST_CASE("tag_capitalized") {
  const WordSet stop = make_word_set(default_stopwords());
  SUBCASE("preposition rule") {
    const auto ms = tag_capitalized(testutil::chapter("v", 1, "I went to Durban with Kallenbach."), stop);
    CHECK(names(ms) == std::vector<std::pair<std::string, Label>>{{"durban", Label::kPlace},
                                                                   {"kallenbach", Label::kPerson}});
  }
  SUBCASE("stopword before a capital") {
    const auto ms = tag_capitalized(testutil::chapter("v", 1, "The End"), make_word_set({"the"}));
    CHECK(names(ms) == std::vector<std::pair<std::string, Label>>{{"end", Label::kPerson}});
  }
  SUBCASE("sentence-initial token alone") {
    CHECK(tag_capitalized(testutil::chapter("v", 1, "When I arrived"), make_word_set({"i"})).empty());
    CHECK(tag_capitalized(testutil::chapter("v", 1, "It rained. Later we left."), stop).empty());
  }
  SUBCASE("multi-token run") {
    const auto ms =
        tag_capitalized(testutil::chapter("v", 1, "we saw Gopal Krishna Gokhale there"), stop);
    CHECK(names(ms) == std::vector<std::pair<std::string, Label>>{
                           {"gopal krishna gokhale", Label::kPerson}});
  }
  SUBCASE("sentence-initial run of two is kept") {
    const auto ms = tag_capitalized(testutil::chapter("v", 1, "Henry Polak wrote."), stop);
    CHECK(names(ms) == std::vector<std::pair<std::string, Label>>{{"henry polak", Label::kPerson}});
  }
}

TEST_CASE("tag_context") {
  const WordSet hon = make_word_set(default_honorifics());
  const auto& cues = default_place_cues();
  CHECK(names(tag_context(testutil::chapter("v", 1, "Sjt. Gokhale spoke"), hon, cues)) ==
        std::vector<std::pair<std::string, Label>>{{"gokhale", Label::kPerson}});
  CHECK(names(tag_context(testutil::chapter("v", 1, "the city of Porbandar"), hon, cues)) ==
        std::vector<std::pair<std::string, Label>>{{"porbandar", Label::kPlace}});
  CHECK(tag_context(testutil::chapter("v", 1, "no cue words here at all"), hon, cues).empty());
  CHECK(tag_context(testutil::chapter("v", 1, "said mr. nobody"), hon, cues).empty());
}

TEST_CASE("external annotations") {
  ChapterStore store;
  store.add_volume({"v", "V", {}});
  store.store_chapters({testutil::chapter("v", 1, "met Gokhale in Bombay")});

  SUBCASE("valid rows") {
    const auto ann = ExternalAnnotations::parse(
        "v-0001|4|11|PERSON|Gokhale\nv-0001|15|21|PLACE|Bombay\n", store, "external:x");
    CHECK(ann.size() == 2);
    const auto ms = tag_external(store.get("v-0001"), ann);
    CHECK(names(ms) == std::vector<std::pair<std::string, Label>>{{"gokhale", Label::kPerson},
                                                                   {"bombay", Label::kPlace}});
    CHECK(ms[0].tagger_id == "external:x");
    CHECK(tag_external(testutil::chapter("w", 1, "x"), ann).empty());
  }
  auto code_of = [&](std::string_view content) {
    try {
      ExternalAnnotations::parse(content, store, "external:x");
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kNotFound;
  };
  CHECK(code_of("v-0001|4|99|PERSON|Gokhale") == ErrorCode::kSpanOutOfBounds);
  CHECK(code_of("v-0001|4|11|ORG|Gokhale") == ErrorCode::kUnknownLabel);
  CHECK(code_of("v-0009|4|11|PERSON|Gokhale") == ErrorCode::kUnknownChapter);
  CHECK(code_of("v-0001|x|11|PERSON|Gokhale") == ErrorCode::kMalformedInput);
  CHECK(code_of("v-0001|11|4|PERSON|Gokhale") == ErrorCode::kSpanOutOfBounds);
}

TEST_CASE("registry") {
  CHECK_THROWS_AS(TaggerRegistry({{"a", 1}}, 2), Error);
  CHECK_THROWS_AS(TaggerRegistry({{"a", 1}, {"b", 1}}, 2), Error);
  CHECK_THROWS_AS(TaggerRegistry({{"a", 1}, {"b", 2}}, 0), Error);
  const TaggerRegistry r({{"a", 1}, {"b", 2}}, 2);
  CHECK(r.priority_of("b") == 2);
  CHECK_THROWS_AS(r.priority_of("c"), Error);
}

TEST_CASE("vote examples") {
  const TaggerRegistry reg({{"A", 1}, {"B", 2}, {"C", 3}}, 2);
  TaggerOutputs out;
  out["A"] = {mention("c1", "Gokhale", Label::kPerson, "A"),
              mention("c1", "Natal", Label::kPerson, "A")};
  out["B"] = {mention("c1", "Gokhale", Label::kPerson, "B", 30), mention("c1", "End", Label::kPerson, "B"),
              mention("c1", "Natal", Label::kPlace, "B")};
  out["C"] = {};
  const auto rows = vote(out, reg);
  CHECK(rows == std::vector<EntityRow>{{"c1", "gokhale", Label::kPerson},
                                       {"c1", "natal", Label::kPerson}});

  SUBCASE("priority decides a tie") {
    const TaggerRegistry flipped({{"A", 2}, {"B", 1}, {"C", 3}}, 2);
    const auto r2 = vote(out, flipped);
    CHECK(r2[1] == EntityRow{"c1", "natal", Label::kPlace});
  }
  SUBCASE("too few outputs") {
    TaggerOutputs one;
    one["A"] = out["A"];
    CHECK_THROWS_AS(vote(one, reg), Error);
  }
  SUBCASE("agreement is per chapter") {
    TaggerOutputs split;
    split["A"] = {mention("c1", "Gokhale", Label::kPerson, "A")};
    split["B"] = {mention("c2", "Gokhale", Label::kPerson, "B")};
    CHECK(vote(split, reg).empty());
  }
  SUBCASE("empty normalized forms are dropped") {
    TaggerOutputs blank;
    blank["A"] = {mention("c1", "Mr.", Label::kPerson, "A")};
    blank["B"] = {mention("c1", "Mr.", Label::kPerson, "B")};
    CHECK(vote(blank, reg).empty());
  }
}

TEST_CASE("filter_entities") {
  const WordSet places = make_word_set({"bombay"});
  const WordSet common = make_word_set({"bombay", "end", "table", "white house"});
  const std::vector<EntityRow> in = {
      {"c1", "bombay", Label::kPlace},       // common but a known place
      {"c1", "end", Label::kPerson},         // common single-token person
      {"c1", "white house", Label::kPerson}, // common multi-token person kept
      {"c1", "table", Label::kPlace},        // common place not in gazetteer
      {"c1", "polak", Label::kPlace},        // unconfirmed place, also a person elsewhere
      {"c2", "polak", Label::kPerson},
      {"c2", "ladysmith", Label::kPlace},    // unconfirmed place kept
  };
  const auto out = filter_entities(in, places, common);
  CHECK(out == std::vector<EntityRow>{{"c1", "bombay", Label::kPlace},
                                      {"c1", "white house", Label::kPerson},
                                      {"c1", "polak", Label::kPerson},
                                      {"c2", "polak", Label::kPerson},
                                      {"c2", "ladysmith", Label::kPlace}});
  CHECK(filter_entities(out, places, common) == out);
}

TEST_CASE("entity rows round trip") {
  const std::vector<EntityRow> rows = {{"a-0001", "gokhale", Label::kPerson},
                                       {"a-0002", "bombay", Label::kPlace}};
  CHECK(parse_entity_rows(format_entity_rows(rows)) == rows);
  CHECK_THROWS_AS(parse_entity_rows("a-0001|gokhale|ORG\n"), Error);
  CHECK(parse_word_list("# c\nGokhale\n\n Bombay \n") == std::vector<std::string>{"Gokhale", "Bombay"});
}

// ---- properties over random tagger outputs ----------------------------------

namespace {

TaggerOutputs random_outputs(std::mt19937& rng, int taggers, int chapters, int vocab) {
  TaggerOutputs out;
  for (int t = 0; t < taggers; ++t) {
    const std::string id = "t" + std::to_string(t);
    auto& list = out[id];
    const int n = static_cast<int>(rng() % 30);
    for (int i = 0; i < n; ++i) {
      const std::string chapter = "c" + std::to_string(rng() % chapters);
      const std::string name = "name" + std::to_string(rng() % vocab);
      list.push_back(mention(chapter, name, rng() % 2 ? Label::kPerson : Label::kPlace, id,
                             rng() % 100));
    }
  }
  return out;
}

TaggerRegistry random_registry(std::mt19937& rng, int taggers, int quorum) {
  std::vector<int> ranks(taggers);
  for (int i = 0; i < taggers; ++i) ranks[i] = i + 1;
  std::shuffle(ranks.begin(), ranks.end(), rng);
  std::vector<TaggerDescriptor> ds;
  for (int t = 0; t < taggers; ++t) ds.push_back({"t" + std::to_string(t), ranks[t]});
  return TaggerRegistry(ds, quorum);
}

}  // namespace

TEST_CASE("vote matches the counting oracle") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int taggers = 2 + static_cast<int>(rng() % 3);
    const int quorum = 1 + static_cast<int>(rng() % taggers);
    const auto outputs = random_outputs(rng, taggers, 4, 8);
    const auto reg = random_registry(rng, taggers, quorum);
    const auto rows = vote(outputs, reg);
    CHECK(keys(rows) == oracle::vote_set(outputs, quorum));
    CHECK(std::is_sorted(rows.begin(), rows.end()));
    for (const auto& r : rows) {
      CHECK(r.label == oracle::vote_label(outputs, reg, {r.chapter_id, r.normalized}));
    }
  }
}

TEST_CASE("vote properties") {
  std::mt19937 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const int taggers = 3;
    const auto outputs = random_outputs(rng, taggers, 3, 6);
    std::vector<std::set<std::pair<std::string, std::string>>> by_quorum;
    std::set<std::pair<std::string, std::string>> all;
    for (const auto& [id, ms] : outputs) {
      for (const auto& m : ms) all.emplace(m.chapter_id, m.normalized);
    }
    for (int q = 1; q <= taggers; ++q) {
      const auto reg = random_registry(rng, taggers, q);
      by_quorum.push_back(keys(vote(outputs, reg)));
      CHECK(std::includes(all.begin(), all.end(), by_quorum.back().begin(), by_quorum.back().end()));
    }
    CHECK(by_quorum[0] == all);
    for (int q = 1; q < taggers; ++q) {
      CHECK(std::includes(by_quorum[q - 1].begin(), by_quorum[q - 1].end(), by_quorum[q].begin(),
                          by_quorum[q].end()));
    }

    // supply order of mentions does not matter
    const auto reg = random_registry(rng, taggers, 2);
    auto shuffled = outputs;
    for (auto& [id, ms] : shuffled) std::shuffle(ms.begin(), ms.end(), rng);
    CHECK(vote(shuffled, reg) == vote(outputs, reg));
  }
}

TEST_CASE("filter never adds and is idempotent") {
  std::mt19937 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<EntityRow> rows;
    const int n = static_cast<int>(rng() % 20);
    for (int i = 0; i < n; ++i) {
      rows.push_back({"c" + std::to_string(rng() % 3),
                      rng() % 3 == 0 ? "w" + std::to_string(rng() % 5) + " x"
                                     : "w" + std::to_string(rng() % 5),
                      rng() % 2 ? Label::kPerson : Label::kPlace});
    }
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end(),
                           [](const EntityRow& a, const EntityRow& b) {
                             return a.chapter_id == b.chapter_id && a.normalized == b.normalized;
                           }),
               rows.end());
    const WordSet places = make_word_set({"w0", "w1 x"});
    const WordSet common = make_word_set({"w1", "w2", "w2 x", "w0"});
    const auto once = filter_entities(rows, places, common);
    CHECK(once.size() <= rows.size());
    const auto in_keys = keys(rows);
    for (const auto& k : keys(once)) CHECK(in_keys.count(k) == 1);
    CHECK(filter_entities(once, places, common) == once);
  }
}

TEST_CASE("tag_chapters serial equals parallel") {
  std::mt19937 rng(14);
  const std::vector<std::string> words = {"Gokhale", "went", "to", "Durban", "with", "Kallenbach",
                                          "Sjt.", "city", "of", "Porbandar", "the", "and", "Polak",
                                          ".", "in", "Bombay"};
  std::vector<Chapter> chapters;
  for (int i = 0; i < 40; ++i) {
    std::string text;
    const int n = static_cast<int>(rng() % 60);
    for (int k = 0; k < n; ++k) text += words[rng() % words.size()] + " ";
    chapters.push_back(testutil::chapter("v", i, text));
  }
  TaggerConfig config;
  config.gazetteer = Gazetteer({"Gokhale", "Polak"}, {"Bombay", "Durban"});
  const auto ptrs = testutil::pointers(chapters);
  const auto serial = tag_chapters(ptrs, config, Exec::kSerial);
  const auto parallel = tag_chapters(ptrs, config, Exec::kParallel);
  CHECK(serial == parallel);
  CHECK(serial.size() == 3);
  for (const auto& [id, ms] : serial) {
    for (const auto& m : ms) {
      const auto it = std::find_if(chapters.begin(), chapters.end(),
                                   [&](const Chapter& c) { return c.chapter_id == m.chapter_id; });
      REQUIRE(it != chapters.end());
      CHECK(m.span.end <= it->text.size());
      CHECK(m.normalized == normalize_surface(m.surface));
      CHECK(m.tagger_id == id);
    }
  }
}
