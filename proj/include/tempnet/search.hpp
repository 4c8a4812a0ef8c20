#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tempnet/corpus.hpp"
#include "tempnet/entities.hpp"
#include "tempnet/parallel.hpp"

namespace tempnet {

struct Token {
  std::string term;
  std::uint32_t position = 0;
  ByteSpan span;

  friend bool operator==(const Token&, const Token&) = default;
};

/// Maximal runs of word characters, case-folded; spans index the original
/// bytes. No stemming and no stopwords.
std::vector<Token> tokenize(std::string_view text);

/// Unique terms of a query in first-occurrence order.
std::vector<std::string> query_terms(std::string_view query);

struct Posting {
  std::uint32_t doc = 0;
  std::vector<std::uint32_t> positions;
  std::vector<ByteSpan> spans;

  friend bool operator==(const Posting&, const Posting&) = default;
};

struct DocInfo {
  std::string chapter_id;
  std::string volume_id;
  int ordinal = 0;
  int year = 0;
  std::uint32_t length = 0;  // tokens

  friend bool operator==(const DocInfo&, const DocInfo&) = default;
};

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

/// Positional inverted index. Documents are chapters numbered in
/// chapter_id order; posting lists are sorted by document.
class InvertedIndex {
 public:
  static constexpr std::uint32_t kFormatVersion = 1;

  /// Every chapter must carry a year (UnassignedYear otherwise). The
  /// parallel build tokenizes chapters concurrently and merges in document
  /// order, so both kernels yield the same bytes.
  static InvertedIndex build(const std::vector<const Chapter*>& chapters,
                             Exec exec = Exec::kParallel);

  std::string serialize() const;
  static InvertedIndex deserialize(std::string_view bytes);
  void save(const std::filesystem::path& path) const;
  static InvertedIndex load(const std::filesystem::path& path);

  const std::vector<DocInfo>& docs() const { return docs_; }
  std::size_t num_docs() const { return docs_.size(); }
  double average_length() const;
  const std::vector<Posting>* postings(std::string_view term) const;
  const std::map<std::string, std::vector<Posting>, std::less<>>& terms() const { return terms_; }
  /// -1 when absent.
  std::int64_t doc_of(std::string_view chapter_id) const;
  bool has_volume(std::string_view volume_id) const;

  friend bool operator==(const InvertedIndex&, const InvertedIndex&) = default;

 private:
  std::vector<DocInfo> docs_;
  std::uint64_t total_length_ = 0;
  std::map<std::string, std::vector<Posting>, std::less<>> terms_;
};

/// BM25 with idf = ln(1 + (N - n + 0.5) / (n + 0.5)), summed over the
/// given terms. Returns (doc, score) for every document containing at least
/// one term, in document order. `allowed`, when non-empty, masks documents.
std::vector<std::pair<std::uint32_t, double>> bm25_scores(const InvertedIndex& index,
                                                          const std::vector<std::string>& terms,
                                                          const std::vector<char>& allowed = {},
                                                          Exec exec = Exec::kParallel,
                                                          Bm25Params params = {});

struct Snippet {
  std::string excerpt;
  std::vector<ByteSpan> highlights;  // relative to excerpt

  friend bool operator==(const Snippet&, const Snippet&) = default;
};

/// Cuts excerpts around sorted match spans. Each window reaches `radius`
/// bytes either side of its matches; overlapping windows merge. Window ends
/// move outward to UTF-8 boundaries, then inward to the nearest whitespace
/// outside the matches when there is one.
std::vector<Snippet> snippet(std::string_view text, const std::vector<ByteSpan>& matches,
                             std::size_t radius, std::size_t max_snippets);

struct SearchHit {
  std::string chapter_id;
  std::string volume_id;
  int ordinal = 0;
  int year = 0;
  double score = 0.0;
  std::vector<Snippet> snippets;
};

struct SearchPage {
  std::size_t total = 0;
  std::vector<SearchHit> hits;
};

struct EntityChapterHit {
  std::string chapter_id;
  std::string volume_id;
  int ordinal = 0;
  int year = 0;
  std::vector<ByteSpan> occurrences;
  std::vector<Snippet> snippets;
};

struct YearGroup {
  int year = 0;
  std::vector<EntityChapterHit> chapters;
};

struct EntityOccurrences {
  std::string entity;
  std::vector<YearGroup> groups;
  std::size_t total_chapters = 0;
  std::size_t total_occurrences = 0;
};

struct SnippetOptions {
  std::size_t radius = 80;
  std::size_t max_snippets = 3;
};

/// Query front end over an index and the chapter texts it was built from.
/// Immutable after construction; safe for concurrent queries.
class Searcher {
 public:
  Searcher(const InvertedIndex& index, const ChapterStore& store, SnippetOptions options = {})
      : index_(index), store_(store), options_(options) {}

  /// Ranked OR query: every chapter with at least one query term, BM25
  /// descending, chapter_id ascending on ties. `volumes` restricts the
  /// candidates when non-empty (UnknownBook for a volume not indexed).
  /// Throws EmptyQuery when the query has no terms.
  SearchPage search(std::string_view query, std::size_t limit, std::size_t offset = 0,
                    const std::vector<std::string>& volumes = {},
                    Exec exec = Exec::kParallel) const;

  /// Exact phrase occurrences of an entity name, grouped by year ascending
  /// and by ordinal within a year, with one snippet set per chapter.
  EntityOccurrences entity_occurrences(std::string_view entity,
                                       const std::vector<std::string>& volumes = {}) const;

  const InvertedIndex& index() const { return index_; }
  const ChapterStore& store() const { return store_; }

 private:
  std::vector<char> volume_mask(const std::vector<std::string>& volumes) const;

  const InvertedIndex& index_;
  const ChapterStore& store_;
  SnippetOptions options_;
};

}  // namespace tempnet
