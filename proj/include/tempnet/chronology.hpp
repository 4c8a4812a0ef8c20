#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tempnet/corpus.hpp"

namespace tempnet {

/// Year -> number of mentions, restricted to a valid range.
struct YearHistogram {
  std::map<int, int> counts;
  YearRange valid_range;

  bool empty() const { return counts.empty(); }
  friend bool operator==(const YearHistogram&, const YearHistogram&) = default;
};

/// Counts maximal runs of exactly four ASCII digits whose value lies in range.
YearHistogram extract_year_mentions(std::string_view text, YearRange range = {});

/// Assigns one year to every chapter, volume by volume.
///
/// A dated chapter takes the mode of its histogram. Ties go to the year
/// nearest the resolved year of the closest preceding dated chapter in the
/// same volume, then to the smaller year. An undated chapter copies the year
/// of the nearest dated chapter by ordinal distance, preferring the earlier
/// one on equal distance. Years never propagate across volumes.
///
/// `chapters` and `histograms` are parallel arrays ordered by
/// (volume, ordinal). Throws NoAnchorYear for a volume with no dated chapter.
std::map<std::string, int> assign_years(const std::vector<const Chapter*>& chapters,
                                        const std::vector<YearHistogram>& histograms);

/// Convenience: histograms per chapter using each volume's range, then
/// assign_years over the whole store.
std::map<std::string, int> assign_store_years(const ChapterStore& store);

}  // namespace tempnet
