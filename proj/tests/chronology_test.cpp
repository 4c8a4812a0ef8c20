#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "tempnet/chronology.hpp"
#include "tempnet/error.hpp"

using namespace tempnet;

namespace {

std::map<std::string, int> assign_texts(const std::vector<Chapter>& chapters) {
  std::vector<YearHistogram> hists;
  for (const auto& c : chapters) hists.push_back(extract_year_mentions(c.text));
  return assign_years(testutil::pointers(chapters), hists);
}

}  // namespace

TEST_CASE("extract_year_mentions") {
  CHECK(extract_year_mentions("In 1893 I sailed; by 1893 it was done; 1896 followed.").counts ==
        std::map<int, int>{{1893, 2}, {1896, 1}});
  CHECK(extract_year_mentions("Room 12345 and figure 1893a").counts == std::map<int, int>{{1893, 1}});
  CHECK(extract_year_mentions("no dates here").empty());
  CHECK(extract_year_mentions("1799 1800 1950 1951 0193").counts ==
        std::map<int, int>{{1800, 1}, {1950, 1}});
  CHECK(extract_year_mentions("1899-1901", {1900, 1910}).counts == std::map<int, int>{{1901, 1}});
  CHECK_THROWS_AS(extract_year_mentions("x", {1900, 1800}), Error);
}

TEST_CASE("assign_years rules") {
  SUBCASE("mode") {
    const std::vector<Chapter> v = {testutil::chapter("v", 0, "1893 1893 1896")};
    CHECK(assign_texts(v).at("v-0000") == 1893);
  }
  SUBCASE("nearest dated neighbour, earlier wins at equal distance") {
    const std::vector<Chapter> v = {
        testutil::chapter("v", 0, "in 1901"), testutil::chapter("v", 1, "in 1893"),
        testutil::chapter("v", 2, "undated"), testutil::chapter("v", 3, "undated"),
        testutil::chapter("v", 4, "in 1901")};
    const auto years = assign_texts(v);
    CHECK(years.at("v-0002") == 1893);  // distance 1 vs 2
    CHECK(years.at("v-0003") == 1901);  // distance 2 vs 1
  }
  SUBCASE("equal distance goes to the earlier chapter") {
    const std::vector<Chapter> v = {testutil::chapter("v", 0, "1890"), testutil::chapter("v", 1, ""),
                                    testutil::chapter("v", 2, "1899")};
    CHECK(assign_texts(v).at("v-0001") == 1890);
  }
  SUBCASE("tie without predecessor takes the smaller year") {
    const std::vector<Chapter> v = {testutil::chapter("v", 0, "1896 and 1893")};
    CHECK(assign_texts(v).at("v-0000") == 1893);
  }
  SUBCASE("tie resolved toward the preceding dated chapter") {
    const std::vector<Chapter> v = {testutil::chapter("v", 0, "1900"), testutil::chapter("v", 1, ""),
                                    testutil::chapter("v", 2, "1893 1901")};
    CHECK(assign_texts(v).at("v-0002") == 1901);
  }
  SUBCASE("no propagation across volumes") {
    const std::vector<Chapter> v = {testutil::chapter("a", 0, "1893"), testutil::chapter("b", 0, "none")};
    try {
      assign_texts(v);
      FAIL("expected NoAnchorYear");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kNoAnchorYear);
      CHECK(std::string(e.what()).find("b") != std::string::npos);
    }
  }
}

TEST_CASE("assign_years properties on random volumes") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 10);
    std::vector<Chapter> chapters;
    std::vector<YearHistogram> hists;
    for (int i = 0; i < n; ++i) {
      chapters.push_back(testutil::chapter("v", i, ""));
      YearHistogram h;
      const int mentions = static_cast<int>(rng() % 4);
      for (int m = 0; m < mentions; ++m) ++h.counts[1890 + static_cast<int>(rng() % 5)];
      hists.push_back(h);
    }
    if (std::all_of(hists.begin(), hists.end(), [](const auto& h) { return h.empty(); })) {
      hists[0].counts[1893] = 1;
    }
    const auto ptrs = testutil::pointers(chapters);
    const auto years = assign_years(ptrs, hists);
    CHECK(years.size() == chapters.size());  // totality
    CHECK(assign_years(ptrs, hists) == years);  // idempotence
    for (int i = 0; i < n; ++i) {
      if (hists[i].empty()) continue;
      // The assigned year is a mode of the chapter's own histogram.
      int best = 0;
      for (const auto& [y, c] : hists[i].counts) best = std::max(best, c);
      CHECK(hists[i].counts.at(years.at(chapters[i].chapter_id)) == best);
    }
  }
}

TEST_CASE("locality: editing one chapter only moves chapters that depend on it") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 9);
    std::vector<Chapter> chapters;
    std::vector<YearHistogram> hists(n);
    for (int i = 0; i < n; ++i) {
      chapters.push_back(testutil::chapter("v", i, ""));
      const int mentions = static_cast<int>(rng() % 3);
      for (int m = 0; m < mentions; ++m) ++hists[i].counts[1890 + static_cast<int>(rng() % 4)];
    }
    hists[0].counts[1890] += 1;
    const auto ptrs = testutil::pointers(chapters);
    const auto before = assign_years(ptrs, hists);

    const std::size_t edited = 1 + rng() % (n - 1);
    auto changed = hists;
    changed[edited].counts.clear();
    const int mentions = static_cast<int>(rng() % 3);
    for (int m = 0; m < mentions; ++m) ++changed[edited].counts[1890 + static_cast<int>(rng() % 4)];
    const auto after = assign_years(ptrs, changed);

    std::vector<std::map<int, int>> raw_before, raw_after;
    for (int i = 0; i < n; ++i) {
      raw_before.push_back(hists[i].counts);
      raw_after.push_back(changed[i].counts);
    }
    for (int j = 0; j < n; ++j) {
      if (static_cast<std::size_t>(j) == edited || hists[j].empty()) continue;
      const auto d1 = oracle::year_dependencies(raw_before, j);
      const auto d2 = oracle::year_dependencies(raw_after, j);
      if (d1.count(edited) || d2.count(edited)) continue;
      CHECK(before.at(chapters[j].chapter_id) == after.at(chapters[j].chapter_id));
    }
  }
}
