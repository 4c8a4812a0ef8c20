// Serial reference kernels against their OpenMP counterparts. Arg(0) is the
// serial kernel, Arg(1) the parallel one.

#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "tempnet/entities.hpp"
#include "tempnet/graph.hpp"
#include "tempnet/search.hpp"

using namespace tempnet;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::kSerial : Exec::kParallel; }

const std::vector<Chapter>& synthetic_chapters() {
  static const std::vector<Chapter> chapters = [] {
    const std::vector<std::string> words = {
        "the",    "of",     "and",    "Gokhale", "went",     "to",    "Durban", "with", "Mr.",
        "Polak",  "in",     "Bombay", "city",    "Kallenbach", "truth", "spoke", "we",   "letter",
        "Natal",  "Tolstoy", "farm",  "Pretoria", "London", "said",  "wrote",  "Congress"};
    std::mt19937 rng(7);
    std::vector<Chapter> out;
    for (int i = 0; i < 400; ++i) {
      Chapter c;
      c.volume_id = "v" + std::to_string(i % 8);
      c.ordinal = i;
      c.chapter_id = make_chapter_id(c.volume_id, i);
      c.year = 1890 + i % 40;
      for (int w = 0; w < 1500; ++w) {
        c.text += words[rng() % words.size()];
        c.text += rng() % 12 == 0 ? ". " : " ";
      }
      out.push_back(std::move(c));
    }
    return out;
  }();
  return chapters;
}

std::vector<const Chapter*> chapter_pointers() {
  std::vector<const Chapter*> out;
  for (const auto& c : synthetic_chapters()) out.push_back(&c);
  return out;
}

void BM_TagChapters(benchmark::State& state) {
  const auto chapters = chapter_pointers();
  TaggerConfig config;
  config.gazetteer = Gazetteer({"Gokhale", "Polak", "Kallenbach", "Tolstoy"},
                               {"Durban", "Bombay", "Natal", "Pretoria", "London"});
  for (auto _ : state) benchmark::DoNotOptimize(tag_chapters(chapters, config, exec_of(state)));
}
BENCHMARK(BM_TagChapters)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_BuildGraph(benchmark::State& state) {
  std::mt19937 rng(8);
  std::vector<CanonicalEntity> entities;
  for (int i = 0; i < 3000; ++i) {
    CanonicalEntity e;
    e.normalized = "entity " + std::to_string(i);
    const int k = 1 + static_cast<int>(rng() % 5);
    for (int j = 0; j < k; ++j) e.occurrences[1869 + static_cast<int>(rng() % 80)] += 1;
    entities.push_back(std::move(e));
  }
  for (auto _ : state) benchmark::DoNotOptimize(build_graph(entities, 1, exec_of(state)));
}
BENCHMARK(BM_BuildGraph)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_IndexBuild(benchmark::State& state) {
  const auto chapters = chapter_pointers();
  for (auto _ : state) benchmark::DoNotOptimize(InvertedIndex::build(chapters, exec_of(state)));
}
BENCHMARK(BM_IndexBuild)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Bm25(benchmark::State& state) {
  static const InvertedIndex index = InvertedIndex::build(chapter_pointers(), Exec::kSerial);
  const std::vector<std::string> terms = {"gokhale", "truth", "the", "farm"};
  for (auto _ : state) benchmark::DoNotOptimize(bm25_scores(index, terms, {}, exec_of(state)));
}
BENCHMARK(BM_Bm25)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
