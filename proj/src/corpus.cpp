#include "tempnet/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tempnet/error.hpp"
#include "tempnet/parallel.hpp"
#include "tempnet/text.hpp"

namespace tempnet {

namespace fs = std::filesystem;
using nlohmann::json;

std::string make_chapter_id(std::string_view volume_id, int ordinal) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d", ordinal);
  std::string id(volume_id);
  id += '-';
  id += buf;
  return id;
}

namespace {

std::regex compile_heading(const VolumeManifest& manifest) {
  try {
    return std::regex(manifest.heading_pattern, std::regex::ECMAScript);
  } catch (const std::regex_error& e) {
    throw Error(ErrorCode::kMalformedManifest, "volume '" + manifest.volume_id +
                                                   "': heading pattern does not compile: " +
                                                   e.what());
  }
}

bool all_space(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
  });
}

}  // namespace

std::vector<Chapter> parse_volume(std::string_view raw, const VolumeManifest& manifest) {
  std::string stripped;
  if (manifest.strip_tags) {
    stripped = text::strip_markup(raw);
    raw = stripped;
  }
  if (!text::is_valid_utf8(raw)) {
    throw Error(ErrorCode::kMalformedInput, "volume '" + manifest.volume_id + "' is not valid UTF-8");
  }
  const std::regex heading = compile_heading(manifest);

  std::vector<Chapter> chapters;
  chapters.push_back(Chapter{make_chapter_id(manifest.volume_id, 0), manifest.volume_id, 0,
                             "front matter", "", std::nullopt});

  std::size_t pos = 0;
  while (pos < raw.size()) {
    auto nl = raw.find('\n', pos);
    const std::size_t next = nl == std::string_view::npos ? raw.size() : nl + 1;
    std::string_view line = raw.substr(pos, next - pos);
    std::string_view content = line;
    if (!content.empty() && content.back() == '\n') content.remove_suffix(1);
    if (!content.empty() && content.back() == '\r') content.remove_suffix(1);

    if (std::regex_search(content.begin(), content.end(), heading)) {
      const int ordinal = static_cast<int>(chapters.size());
      chapters.push_back(Chapter{make_chapter_id(manifest.volume_id, ordinal),
                                 manifest.volume_id, ordinal, std::string(content), "",
                                 std::nullopt});
    } else {
      chapters.back().text.append(line);
    }
    pos = next;
  }

  if (chapters.size() == 1 && all_space(chapters.front().text)) {
    throw Error(ErrorCode::kNoChapters,
                "volume '" + manifest.volume_id + "' has no headings and no body text");
  }
  return chapters;
}

VolumeManifest parse_manifest_record(std::string_view line) {
  json record;
  try {
    record = json::parse(line);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedManifest, std::string("unparseable record: ") + e.what());
  }
  if (!record.is_object()) {
    throw Error(ErrorCode::kMalformedManifest, "record is not an object");
  }
  auto required = [&](const char* key) -> std::string {
    auto it = record.find(key);
    if (it == record.end() || !it->is_string() || it->get<std::string>().empty()) {
      throw Error(ErrorCode::kMalformedManifest, std::string("missing string field '") + key + "'");
    }
    return it->get<std::string>();
  };

  VolumeManifest m;
  m.volume_id = required("volume_id");
  m.title = required("title");
  m.source_path = required("path");
  if (auto it = record.find("heading_pattern"); it != record.end() && !it->is_null()) {
    if (!it->is_string()) throw Error(ErrorCode::kMalformedManifest, "heading_pattern must be a string");
    m.heading_pattern = it->get<std::string>();
  }
  if (auto it = record.find("year_range"); it != record.end() && !it->is_null()) {
    if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number_integer() ||
        !(*it)[1].is_number_integer()) {
      throw Error(ErrorCode::kMalformedManifest, "year_range must be [min, max]");
    }
    YearRange range{(*it)[0].get<int>(), (*it)[1].get<int>()};
    if (range.min_year > range.max_year) {
      throw Error(ErrorCode::kMalformedManifest, "volume '" + m.volume_id + "': year_range min > max");
    }
    m.year_range_override = range;
  }
  if (auto it = record.find("strip_tags"); it != record.end() && !it->is_null()) {
    if (!it->is_boolean()) throw Error(ErrorCode::kMalformedManifest, "strip_tags must be a boolean");
    m.strip_tags = it->get<bool>();
  }
  compile_heading(m);
  return m;
}

std::vector<VolumeManifest> parse_manifest(std::string_view content) {
  std::vector<VolumeManifest> out;
  std::set<std::string, std::less<>> seen;
  std::istringstream in{std::string(content)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (all_space(line)) continue;
    const auto first = line.find_first_not_of(" \t");
    if (line[first] == '#') continue;
    VolumeManifest m;
    try {
      m = parse_manifest_record(line);
    } catch (const Error& e) {
      throw Error(ErrorCode::kMalformedManifest, "line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!seen.insert(m.volume_id).second) {
      throw Error(ErrorCode::kMalformedManifest, "duplicate volume_id '" + m.volume_id + "'");
    }
    out.push_back(std::move(m));
  }
  return out;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kStorageFailure, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

void write_file(const fs::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kStorageFailure, "cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::kStorageFailure, "short write to " + path.string());
}

// ---------------------------------------------------------------------------
// ChapterStore

namespace {

fs::path chapter_path(const fs::path& root, const Chapter& c) {
  char name[32];
  std::snprintf(name, sizeof(name), "%04d.txt", c.ordinal);
  return root / c.volume_id / name;
}

template <typename Fn>
void for_each_json_line(const fs::path& path, Fn&& fn) {
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      fn(json::parse(line));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kStorageFailure, path.string() + ": " + e.what());
    }
  }
}

}  // namespace

ChapterStore ChapterStore::open(const fs::path& dir) {
  ChapterStore store;
  store.root_ = dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kStorageFailure, "cannot create " + dir.string());

  if (fs::exists(dir / "volumes")) {
    for_each_json_line(dir / "volumes", [&](const json& r) {
      store.volumes_.push_back(VolumeInfo{r.at("volume_id").get<std::string>(),
                                          r.at("title").get<std::string>(),
                                          {r.at("year_range").at(0).get<int>(),
                                           r.at("year_range").at(1).get<int>()}});
    });
  }
  if (fs::exists(dir / "meta")) {
    for_each_json_line(dir / "meta", [&](const json& r) {
      Chapter c;
      c.chapter_id = r.at("chapter_id").get<std::string>();
      c.volume_id = r.at("volume_id").get<std::string>();
      c.ordinal = r.at("ordinal").get<int>();
      c.title = r.at("title").get<std::string>();
      if (!r.at("year").is_null()) c.year = r.at("year").get<int>();
      c.text = read_file(chapter_path(dir, c));
      if (c.text.size() != r.at("bytes").get<std::size_t>()) {
        throw Error(ErrorCode::kStorageFailure,
                    "chapter " + c.chapter_id + " length does not match store/meta");
      }
      store.chapters_.emplace(c.chapter_id, std::move(c));
    });
  }
  return store;
}

void ChapterStore::add_volume(const VolumeInfo& volume) {
  auto it = std::find_if(volumes_.begin(), volumes_.end(),
                         [&](const VolumeInfo& v) { return v.volume_id == volume.volume_id; });
  if (it != volumes_.end()) {
    *it = volume;
  } else {
    volumes_.push_back(volume);
  }
  write_volumes();
}

std::size_t ChapterStore::store_chapters(const std::vector<Chapter>& chapters) {
  if (chapters.empty()) return 0;
  std::set<std::string_view> batch;
  for (const auto& c : chapters) {
    if (chapters_.count(c.chapter_id) != 0 || !batch.insert(c.chapter_id).second) {
      throw Error(ErrorCode::kDuplicateChapter, c.chapter_id);
    }
  }
  bool new_volume = false;
  for (const auto& c : chapters) {
    if (find_volume(c.volume_id) == nullptr) {
      volumes_.push_back(VolumeInfo{c.volume_id, c.volume_id, YearRange{}});
      new_volume = true;
    }
  }
  if (persistent()) {
    for (const auto& c : chapters) write_file(chapter_path(root_, c), c.text);
  }
  for (const auto& c : chapters) chapters_.emplace(c.chapter_id, c);
  if (new_volume) write_volumes();
  write_meta();
  return chapters.size();
}

void ChapterStore::set_years(const std::map<std::string, int>& years) {
  for (const auto& [id, year] : years) {
    auto it = chapters_.find(id);
    if (it == chapters_.end()) throw Error(ErrorCode::kUnknownChapter, id);
    it->second.year = year;
  }
  write_meta();
}

const Chapter* ChapterStore::find(std::string_view chapter_id) const {
  auto it = chapters_.find(chapter_id);
  return it == chapters_.end() ? nullptr : &it->second;
}

const Chapter* ChapterStore::find(std::string_view volume_id, int ordinal) const {
  return find(make_chapter_id(volume_id, ordinal));
}

const Chapter& ChapterStore::get(std::string_view chapter_id) const {
  const Chapter* c = find(chapter_id);
  if (c == nullptr) throw Error(ErrorCode::kNotFound, "chapter " + std::string(chapter_id));
  return *c;
}

const VolumeInfo* ChapterStore::find_volume(std::string_view volume_id) const {
  for (const auto& v : volumes_) {
    if (v.volume_id == volume_id) return &v;
  }
  return nullptr;
}

std::vector<const Chapter*> ChapterStore::chapters_of(std::string_view volume_id) const {
  std::vector<const Chapter*> out;
  for (const auto& [id, c] : chapters_) {
    if (c.volume_id == volume_id) out.push_back(&c);
  }
  std::sort(out.begin(), out.end(),
            [](const Chapter* a, const Chapter* b) { return a->ordinal < b->ordinal; });
  return out;
}

std::vector<const Chapter*> ChapterStore::chapters() const {
  std::vector<const Chapter*> out;
  out.reserve(chapters_.size());
  for (const auto& v : volumes_) {
    auto part = chapters_of(v.volume_id);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

void ChapterStore::write_meta() const {
  if (!persistent()) return;
  std::string out;
  for (const Chapter* c : chapters()) {
    json r;
    r["chapter_id"] = c->chapter_id;
    r["volume_id"] = c->volume_id;
    r["ordinal"] = c->ordinal;
    r["title"] = c->title;
    r["bytes"] = c->text.size();
    r["year"] = c->year ? json(*c->year) : json(nullptr);
    out += r.dump();
    out += '\n';
  }
  write_file(root_ / "meta", out);
}

void ChapterStore::write_volumes() const {
  if (!persistent()) return;
  std::string out;
  for (const auto& v : volumes_) {
    json r;
    r["volume_id"] = v.volume_id;
    r["title"] = v.title;
    r["year_range"] = {v.year_range.min_year, v.year_range.max_year};
    out += r.dump();
    out += '\n';
  }
  write_file(root_ / "volumes", out);
}

// ---------------------------------------------------------------------------
// Corpus

std::size_t Corpus::chapter_count() const {
  std::size_t n = 0;
  for (const auto& v : volumes_) n += v.chapters.size();
  return n;
}

std::size_t Corpus::store_into(ChapterStore& store) const {
  std::size_t n = 0;
  for (const auto& v : volumes_) {
    store.add_volume(VolumeInfo{v.manifest.volume_id, v.manifest.title,
                                v.manifest.year_range_override.value_or(YearRange{})});
  }
  for (const auto& v : volumes_) n += store.store_chapters(v.chapters);
  return n;
}

Corpus load_corpus(const std::vector<VolumeManifest>& manifests, const fs::path& root) {
  std::set<std::string_view> ids;
  for (const auto& m : manifests) {
    if (!ids.insert(m.volume_id).second) {
      throw Error(ErrorCode::kMalformedManifest, "duplicate volume_id '" + m.volume_id + "'");
    }
  }
  for (const auto& m : manifests) {
    const fs::path path = root / m.source_path;
    if (!fs::is_regular_file(path)) throw Error(ErrorCode::kMissingVolumeFile, path.string());
  }
  std::vector<Volume> volumes(manifests.size());
  parallel_for(manifests.size(), [&](std::size_t i) {
    volumes[i].manifest = manifests[i];
    volumes[i].chapters = parse_volume(read_file(root / manifests[i].source_path), manifests[i]);
  });
  return Corpus(std::move(volumes));
}

Corpus load_corpus_dir(const fs::path& dir) {
  const fs::path manifest = dir / "manifest";
  if (!fs::is_regular_file(manifest)) {
    throw Error(ErrorCode::kMalformedManifest, "no manifest at " + manifest.string());
  }
  return load_corpus(parse_manifest(read_file(manifest)), dir);
}

}  // namespace tempnet
