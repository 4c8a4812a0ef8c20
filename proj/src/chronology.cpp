#include "tempnet/chronology.hpp"

#include <cstdlib>
#include <optional>

#include "tempnet/error.hpp"
#include "tempnet/parallel.hpp"

namespace tempnet {

YearHistogram extract_year_mentions(std::string_view text, YearRange range) {
  if (range.min_year > range.max_year) {
    throw Error(ErrorCode::kInvalidArgument, "year range min > max");
  }
  YearHistogram hist;
  hist.valid_range = range;
  std::size_t i = 0;
  const std::size_t n = text.size();
  auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
  while (i < n) {
    if (!is_digit(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    int value = 0;
    while (j < n && is_digit(text[j])) {
      if (j - i < 4) value = value * 10 + (text[j] - '0');
      ++j;
    }
    if (j - i == 4 && value >= range.min_year && value <= range.max_year) {
      ++hist.counts[value];
    }
    i = j;
  }
  return hist;
}

namespace {

int resolve_mode(const YearHistogram& hist, std::optional<int> previous) {
  int best_count = 0;
  for (const auto& [year, count] : hist.counts) best_count = std::max(best_count, count);
  int chosen = 0;
  bool have = false;
  // Map iteration is ascending, so the first candidate wins remaining ties.
  for (const auto& [year, count] : hist.counts) {
    if (count != best_count) continue;
    if (!have) {
      chosen = year;
      have = true;
    } else if (previous &&
               std::abs(year - *previous) < std::abs(chosen - *previous)) {
      chosen = year;
    }
  }
  return chosen;
}

void assign_volume(const std::vector<const Chapter*>& chapters,
                   const std::vector<YearHistogram>& histograms, std::size_t begin,
                   std::size_t end, std::map<std::string, int>& out) {
  std::vector<std::optional<int>> years(end - begin);
  std::optional<int> previous;
  for (std::size_t i = begin; i < end; ++i) {
    if (histograms[i].empty()) continue;
    years[i - begin] = resolve_mode(histograms[i], previous);
    previous = years[i - begin];
  }
  if (!previous) throw Error(ErrorCode::kNoAnchorYear, "volume " + chapters[begin]->volume_id);

  for (std::size_t i = begin; i < end; ++i) {
    const std::size_t k = i - begin;
    if (years[k]) {
      out[chapters[i]->chapter_id] = *years[k];
      continue;
    }
    const int ordinal = chapters[i]->ordinal;
    std::optional<int> best_year;
    int best_distance = 0;
    for (std::size_t j = begin; j < end; ++j) {
      if (!years[j - begin]) continue;
      // Ascending ordinal order: on equal distance the earlier chapter is
      // seen first and kept.
      const int distance = std::abs(chapters[j]->ordinal - ordinal);
      if (!best_year || distance < best_distance) {
        best_year = years[j - begin];
        best_distance = distance;
      }
    }
    out[chapters[i]->chapter_id] = *best_year;
  }
}

}  // namespace

std::map<std::string, int> assign_years(const std::vector<const Chapter*>& chapters,
                                        const std::vector<YearHistogram>& histograms) {
  if (chapters.size() != histograms.size()) {
    throw Error(ErrorCode::kInvalidArgument, "one histogram per chapter required");
  }
  std::map<std::string, int> out;
  std::size_t begin = 0;
  while (begin < chapters.size()) {
    std::size_t end = begin + 1;
    while (end < chapters.size() && chapters[end]->volume_id == chapters[begin]->volume_id) {
      ++end;
    }
    assign_volume(chapters, histograms, begin, end, out);
    begin = end;
  }
  return out;
}

std::map<std::string, int> assign_store_years(const ChapterStore& store) {
  const auto chapters = store.chapters();
  std::vector<YearHistogram> histograms(chapters.size());
  parallel_for(chapters.size(), [&](std::size_t i) {
    const VolumeInfo* v = store.find_volume(chapters[i]->volume_id);
    histograms[i] = extract_year_mentions(chapters[i]->text, v ? v->year_range : YearRange{});
  });
  return assign_years(chapters, histograms);
}

}  // namespace tempnet
