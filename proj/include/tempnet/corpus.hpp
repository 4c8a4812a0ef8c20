#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tempnet {

/// Upper-case heading line: capitals, digits, spaces and punctuation only,
/// at least one capital letter, at most 80 bytes.
inline constexpr std::string_view kDefaultHeadingPattern =
    R"(^(?=.*[A-Z])[A-Z0-9 !-/:-@\[-`{-~]{1,80}$)";

struct YearRange {
  int min_year = 1800;
  int max_year = 1950;

  friend bool operator==(const YearRange&, const YearRange&) = default;
};

struct VolumeManifest {
  std::string volume_id;
  std::string title;
  std::filesystem::path source_path;
  std::string heading_pattern{kDefaultHeadingPattern};
  std::optional<YearRange> year_range_override;
  bool strip_tags = false;
};

struct Chapter {
  std::string chapter_id;
  std::string volume_id;
  int ordinal = 0;
  std::string title;
  std::string text;
  std::optional<int> year;

  friend bool operator==(const Chapter&, const Chapter&) = default;
};

std::string make_chapter_id(std::string_view volume_id, int ordinal);

/// Splits a volume into chapters. Every line matching the manifest's heading
/// pattern opens a chapter titled by that line; text before the first
/// heading becomes the front-matter chapter at ordinal 0.
std::vector<Chapter> parse_volume(std::string_view raw, const VolumeManifest& manifest);

/// Parses one manifest record (a JSON object on a single line).
VolumeManifest parse_manifest_record(std::string_view line);

/// Parses a whole manifest file: one record per non-blank line, `#` starts a
/// comment line. Volume ids must be unique.
std::vector<VolumeManifest> parse_manifest(std::string_view content);

struct VolumeInfo {
  std::string volume_id;
  std::string title;
  YearRange year_range;

  friend bool operator==(const VolumeInfo&, const VolumeInfo&) = default;
};

/// Chapter table plus texts. Disk-backed stores persist under
///
///   <root>/<volume_id>/<ordinal:04>.txt   chapter text, raw bytes
///   <root>/meta                            JSON line per chapter
///   <root>/volumes                         JSON line per volume
///
/// Writers are single threaded; a loaded store is safe for concurrent reads.
class ChapterStore {
 public:
  /// Store with no backing directory.
  ChapterStore() = default;

  /// Opens (creating if needed) a store rooted at dir and loads its contents.
  static ChapterStore open(const std::filesystem::path& dir);

  bool persistent() const { return !root_.empty(); }
  const std::filesystem::path& root() const { return root_; }

  void add_volume(const VolumeInfo& volume);

  /// Adds chapters, rejecting any id that is already present. Nothing is
  /// written when a duplicate is found.
  std::size_t store_chapters(const std::vector<Chapter>& chapters);

  /// Sets the year column and rewrites the metadata file.
  void set_years(const std::map<std::string, int>& years);

  const Chapter* find(std::string_view chapter_id) const;
  const Chapter* find(std::string_view volume_id, int ordinal) const;
  const Chapter& get(std::string_view chapter_id) const;

  const VolumeInfo* find_volume(std::string_view volume_id) const;

  /// Volumes in insertion order.
  const std::vector<VolumeInfo>& volumes() const { return volumes_; }

  /// All chapters ordered by (volume insertion order, ordinal).
  std::vector<const Chapter*> chapters() const;
  std::vector<const Chapter*> chapters_of(std::string_view volume_id) const;

  std::size_t size() const { return chapters_.size(); }

 private:
  void write_meta() const;
  void write_volumes() const;

  std::filesystem::path root_;
  std::vector<VolumeInfo> volumes_;
  std::map<std::string, Chapter, std::less<>> chapters_;
};

struct Volume {
  VolumeManifest manifest;
  std::vector<Chapter> chapters;
};

/// All volumes of a corpus, parsed, in manifest order.
class Corpus {
 public:
  explicit Corpus(std::vector<Volume> volumes) : volumes_(std::move(volumes)) {}

  const std::vector<Volume>& volumes() const { return volumes_; }
  std::size_t chapter_count() const;

  /// Writes every volume and chapter into the store.
  std::size_t store_into(ChapterStore& store) const;

 private:
  std::vector<Volume> volumes_;
};

/// Reads and parses every volume; source paths are relative to root.
/// Volumes are parsed in parallel.
Corpus load_corpus(const std::vector<VolumeManifest>& manifests,
                   const std::filesystem::path& root);

/// Reads `<dir>/manifest` and the volume files it names.
Corpus load_corpus_dir(const std::filesystem::path& dir);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace tempnet
