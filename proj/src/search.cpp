#include "tempnet/search.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <set>
#include <unordered_map>

#include "tempnet/error.hpp"
#include "tempnet/text.hpp"

namespace tempnet {

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t pos = 0;
  std::size_t start = 0;
  bool in_word = false;
  std::string term;
  auto flush = [&](std::size_t end) {
    out.push_back(Token{std::move(term), static_cast<std::uint32_t>(out.size()), {start, end}});
    term.clear();
    in_word = false;
  };
  while (pos < s.size()) {
    const std::size_t at = pos;
    const char32_t cp = text::decode_at(s, pos);
    if (text::is_word_char(cp)) {
      if (!in_word) {
        start = at;
        in_word = true;
      }
      text::append_utf8(term, text::fold(cp));
    } else if (in_word) {
      flush(at);
    }
  }
  if (in_word) flush(s.size());
  return out;
}

std::vector<std::string> query_terms(std::string_view query) {
  std::vector<std::string> terms;
  std::set<std::string, std::less<>> seen;
  for (auto& t : tokenize(query)) {
    if (seen.insert(t.term).second) terms.push_back(std::move(t.term));
  }
  return terms;
}

// ---------------------------------------------------------------------------
// Index

InvertedIndex InvertedIndex::build(const std::vector<const Chapter*>& chapters, Exec exec) {
  std::vector<const Chapter*> sorted(chapters);
  std::sort(sorted.begin(), sorted.end(),
            [](const Chapter* a, const Chapter* b) { return a->chapter_id < b->chapter_id; });
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (!sorted[i]->year) throw Error(ErrorCode::kUnassignedYear, sorted[i]->chapter_id);
    if (i > 0 && sorted[i]->chapter_id == sorted[i - 1]->chapter_id) {
      throw Error(ErrorCode::kDuplicateChapter, sorted[i]->chapter_id);
    }
  }

  using ChapterTerms = std::map<std::string, Posting>;
  std::vector<ChapterTerms> per_doc(sorted.size());
  std::vector<std::uint32_t> lengths(sorted.size());
  for_each_index(exec, sorted.size(), [&](std::size_t d) {
    auto tokens = tokenize(sorted[d]->text);
    lengths[d] = static_cast<std::uint32_t>(tokens.size());
    auto& terms = per_doc[d];
    for (auto& t : tokens) {
      Posting& p = terms[t.term];
      p.doc = static_cast<std::uint32_t>(d);
      p.positions.push_back(t.position);
      p.spans.push_back(t.span);
    }
  });

  InvertedIndex index;
  index.docs_.reserve(sorted.size());
  for (std::size_t d = 0; d < sorted.size(); ++d) {
    const Chapter& c = *sorted[d];
    index.docs_.push_back(DocInfo{c.chapter_id, c.volume_id, c.ordinal, *c.year, lengths[d]});
    index.total_length_ += lengths[d];
    for (auto& [term, posting] : per_doc[d]) {
      index.terms_[term].push_back(std::move(posting));
    }
  }
  return index;
}

double InvertedIndex::average_length() const {
  return docs_.empty() ? 0.0 : static_cast<double>(total_length_) / static_cast<double>(docs_.size());
}

const std::vector<Posting>* InvertedIndex::postings(std::string_view term) const {
  auto it = terms_.find(term);
  return it == terms_.end() ? nullptr : &it->second;
}

std::int64_t InvertedIndex::doc_of(std::string_view chapter_id) const {
  auto it = std::lower_bound(docs_.begin(), docs_.end(), chapter_id,
                             [](const DocInfo& d, std::string_view id) { return d.chapter_id < id; });
  if (it == docs_.end() || it->chapter_id != chapter_id) return -1;
  return it - docs_.begin();
}

bool InvertedIndex::has_volume(std::string_view volume_id) const {
  return std::any_of(docs_.begin(), docs_.end(),
                     [&](const DocInfo& d) { return d.volume_id == volume_id; });
}

namespace {

constexpr char kMagic[8] = {'T', 'N', 'E', 'T', 'I', 'D', 'X', '\0'};

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.append(s);
  }
  void raw(const char* p, std::size_t n) { out_.append(p, n); }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  std::uint64_t unsigned_bytes(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
    }
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  std::uint32_t u32() { return static_cast<std::uint32_t>(unsigned_bytes(4)); }
  std::uint64_t u64() { return unsigned_bytes(8); }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  std::string str() {
    const std::uint32_t n = u32();
    need(n);
    std::string s(in_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  std::string_view raw(std::size_t n) {
    need(n);
    auto v = in_.substr(pos_, n);
    pos_ += n;
    return v;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw Error(ErrorCode::kStorageFailure, "index file truncated");
  }
  std::string_view in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string InvertedIndex::serialize() const {
  Writer w;
  w.raw(kMagic, sizeof(kMagic));
  w.u32(kFormatVersion);
  w.u32(static_cast<std::uint32_t>(docs_.size()));
  for (const auto& d : docs_) {
    w.str(d.chapter_id);
    w.str(d.volume_id);
    w.i32(d.ordinal);
    w.i32(d.year);
    w.u32(d.length);
  }
  w.u64(total_length_);
  w.u32(static_cast<std::uint32_t>(terms_.size()));
  for (const auto& [term, list] : terms_) {
    w.str(term);
    w.u32(static_cast<std::uint32_t>(list.size()));
    for (const auto& p : list) {
      w.u32(p.doc);
      w.u32(static_cast<std::uint32_t>(p.positions.size()));
      for (auto pos : p.positions) w.u32(pos);
      for (const auto& s : p.spans) {
        w.u64(s.start);
        w.u64(s.end);
      }
    }
  }
  return w.take();
}

InvertedIndex InvertedIndex::deserialize(std::string_view bytes) {
  Reader r(bytes);
  if (r.raw(sizeof(kMagic)) != std::string_view(kMagic, sizeof(kMagic))) {
    throw Error(ErrorCode::kStorageFailure, "not an index file (bad magic)");
  }
  if (const auto version = r.u32(); version != kFormatVersion) {
    throw Error(ErrorCode::kStorageFailure, "unsupported index version " + std::to_string(version));
  }
  InvertedIndex index;
  const std::uint32_t num_docs = r.u32();
  index.docs_.reserve(num_docs);
  for (std::uint32_t i = 0; i < num_docs; ++i) {
    DocInfo d;
    d.chapter_id = r.str();
    d.volume_id = r.str();
    d.ordinal = r.i32();
    d.year = r.i32();
    d.length = r.u32();
    index.docs_.push_back(std::move(d));
  }
  index.total_length_ = r.u64();
  const std::uint32_t num_terms = r.u32();
  for (std::uint32_t t = 0; t < num_terms; ++t) {
    std::string term = r.str();
    const std::uint32_t count = r.u32();
    std::vector<Posting> list(count);
    for (auto& p : list) {
      p.doc = r.u32();
      if (p.doc >= num_docs) throw Error(ErrorCode::kStorageFailure, "posting references unknown doc");
      const std::uint32_t n = r.u32();
      p.positions.resize(n);
      for (auto& pos : p.positions) pos = r.u32();
      p.spans.resize(n);
      for (auto& s : p.spans) {
        s.start = r.u64();
        s.end = r.u64();
      }
    }
    index.terms_.emplace(std::move(term), std::move(list));
  }
  if (!r.done()) throw Error(ErrorCode::kStorageFailure, "trailing bytes after index");
  return index;
}

void InvertedIndex::save(const std::filesystem::path& path) const { write_file(path, serialize()); }

InvertedIndex InvertedIndex::load(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) {
    throw Error(ErrorCode::kMissingArtifact, path.string());
  }
  return deserialize(read_file(path));
}

// ---------------------------------------------------------------------------
// Ranking

std::vector<std::pair<std::uint32_t, double>> bm25_scores(const InvertedIndex& index,
                                                          const std::vector<std::string>& terms,
                                                          const std::vector<char>& allowed, Exec exec,
                                                          Bm25Params params) {
  const std::size_t n_docs = index.num_docs();
  const double avg = index.average_length();
  std::vector<double> score(n_docs, 0.0);
  std::vector<char> hit(n_docs, 0);

  for (const auto& term : terms) {
    const auto* list = index.postings(term);
    if (list == nullptr) continue;
    const double df = static_cast<double>(list->size());
    const double idf = std::log(1.0 + (static_cast<double>(n_docs) - df + 0.5) / (df + 0.5));
    // Each posting names a distinct document, so the updates never collide.
    for_each_index(exec, list->size(), [&](std::size_t i) {
      const Posting& p = (*list)[i];
      if (!allowed.empty() && !allowed[p.doc]) return;
      const double tf = static_cast<double>(p.positions.size());
      const double dl = static_cast<double>(index.docs()[p.doc].length);
      const double norm = params.k1 * (1.0 - params.b + params.b * dl / avg);
      score[p.doc] += idf * tf * (params.k1 + 1.0) / (tf + norm);
      hit[p.doc] = 1;
    });
  }

  std::vector<std::pair<std::uint32_t, double>> out;
  for (std::uint32_t d = 0; d < n_docs; ++d) {
    if (hit[d]) out.emplace_back(d, score[d]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Snippets

std::vector<Snippet> snippet(std::string_view text, const std::vector<ByteSpan>& matches,
                             std::size_t radius, std::size_t max_snippets) {
  std::vector<Snippet> out;
  if (matches.empty() || max_snippets == 0) return out;

  auto window_start = [&](const ByteSpan& m) { return m.start > radius ? m.start - radius : 0; };
  auto window_end = [&](const ByteSpan& m) { return std::min(text.size(), m.end + radius); };
  auto is_ws = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };

  std::size_t i = 0;
  while (i < matches.size() && out.size() < max_snippets) {
    std::size_t first = i;
    std::size_t last = i;
    std::size_t end = window_end(matches[i]);
    while (last + 1 < matches.size() && window_start(matches[last + 1]) <= end) {
      ++last;
      end = std::max(end, window_end(matches[last]));
    }
    std::size_t start = window_start(matches[first]);

    while (start > 0 && text::is_continuation_byte(static_cast<unsigned char>(text[start]))) --start;
    while (end < text.size() && text::is_continuation_byte(static_cast<unsigned char>(text[end]))) ++end;
    if (start > 0 && !is_ws(text[start - 1])) {
      for (std::size_t p = start; p < matches[first].start; ++p) {
        if (is_ws(text[p])) {
          start = p + 1;
          break;
        }
      }
    }
    if (end < text.size() && !is_ws(text[end])) {
      std::size_t match_end = matches[first].end;
      for (std::size_t k = first; k <= last; ++k) match_end = std::max(match_end, matches[k].end);
      for (std::size_t p = end; p > match_end; --p) {
        if (is_ws(text[p - 1])) {
          end = p - 1;
          break;
        }
      }
    }

    Snippet s;
    s.excerpt = std::string(text.substr(start, end - start));
    for (std::size_t k = first; k <= last; ++k) {
      s.highlights.push_back({matches[k].start - start, matches[k].end - start});
    }
    out.push_back(std::move(s));
    i = last + 1;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Searcher

std::vector<char> Searcher::volume_mask(const std::vector<std::string>& volumes) const {
  if (volumes.empty()) return {};
  std::set<std::string_view> wanted;
  for (const auto& v : volumes) {
    if (!index_.has_volume(v)) throw Error(ErrorCode::kUnknownBook, v);
    wanted.insert(v);
  }
  std::vector<char> mask(index_.num_docs(), 0);
  for (std::size_t d = 0; d < index_.num_docs(); ++d) {
    mask[d] = wanted.count(index_.docs()[d].volume_id) != 0;
  }
  return mask;
}

SearchPage Searcher::search(std::string_view query, std::size_t limit, std::size_t offset,
                            const std::vector<std::string>& volumes, Exec exec) const {
  const auto terms = query_terms(query);
  if (terms.empty()) throw Error(ErrorCode::kEmptyQuery, "query has no searchable terms");
  const auto mask = volume_mask(volumes);

  auto scored = bm25_scores(index_, terms, mask, exec);
  // Documents are numbered in chapter_id order, so a stable sort on score
  // alone keeps chapter_id ascending among ties.
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  SearchPage page;
  page.total = scored.size();
  const std::size_t begin = std::min(offset, scored.size());
  const std::size_t end = begin + std::min(limit, scored.size() - begin);
  page.hits.resize(end - begin);

  for_each_index(exec, end - begin, [&](std::size_t k) {
    const auto [doc, score] = scored[begin + k];
    const DocInfo& info = index_.docs()[doc];
    std::vector<ByteSpan> matches;
    for (const auto& term : terms) {
      const auto* list = index_.postings(term);
      if (list == nullptr) continue;
      auto it = std::lower_bound(list->begin(), list->end(), doc,
                                 [](const Posting& p, std::uint32_t d) { return p.doc < d; });
      if (it != list->end() && it->doc == doc) matches.insert(matches.end(), it->spans.begin(), it->spans.end());
    }
    std::sort(matches.begin(), matches.end());
    SearchHit& hit = page.hits[k];
    hit.chapter_id = info.chapter_id;
    hit.volume_id = info.volume_id;
    hit.ordinal = info.ordinal;
    hit.year = info.year;
    hit.score = score;
    hit.snippets = snippet(store_.get(info.chapter_id).text, matches, options_.radius,
                           options_.max_snippets);
  });
  return page;
}

EntityOccurrences Searcher::entity_occurrences(std::string_view entity,
                                               const std::vector<std::string>& volumes) const {
  std::vector<std::string> phrase;
  for (auto& t : tokenize(entity)) phrase.push_back(std::move(t.term));
  if (phrase.empty()) throw Error(ErrorCode::kEmptyQuery, "entity name has no terms");
  const auto mask = volume_mask(volumes);

  EntityOccurrences result;
  result.entity = std::string(entity);

  std::vector<const std::vector<Posting>*> lists;
  for (const auto& term : phrase) {
    const auto* list = index_.postings(term);
    if (list == nullptr) return result;
    lists.push_back(list);
  }
  auto find_posting = [](const std::vector<Posting>& list, std::uint32_t doc) -> const Posting* {
    auto it = std::lower_bound(list.begin(), list.end(), doc,
                               [](const Posting& p, std::uint32_t d) { return p.doc < d; });
    return it != list.end() && it->doc == doc ? &*it : nullptr;
  };

  std::vector<EntityChapterHit> hits;
  for (const Posting& head : *lists[0]) {
    if (!mask.empty() && !mask[head.doc]) continue;
    std::vector<const Posting*> rest;
    for (std::size_t k = 1; k < lists.size(); ++k) {
      const Posting* p = find_posting(*lists[k], head.doc);
      if (p == nullptr) break;
      rest.push_back(p);
    }
    if (rest.size() + 1 != lists.size()) continue;

    EntityChapterHit hit;
    for (std::size_t i = 0; i < head.positions.size(); ++i) {
      const std::uint32_t pos = head.positions[i];
      std::size_t end_byte = head.spans[i].end;
      bool match = true;
      for (std::size_t k = 0; k < rest.size() && match; ++k) {
        const auto& positions = rest[k]->positions;
        auto it = std::lower_bound(positions.begin(), positions.end(), pos + k + 1);
        match = it != positions.end() && *it == pos + k + 1;
        if (match) end_byte = rest[k]->spans[it - positions.begin()].end;
      }
      if (match) hit.occurrences.push_back({head.spans[i].start, end_byte});
    }
    if (hit.occurrences.empty()) continue;
    const DocInfo& info = index_.docs()[head.doc];
    hit.chapter_id = info.chapter_id;
    hit.volume_id = info.volume_id;
    hit.ordinal = info.ordinal;
    hit.year = info.year;
    hit.snippets = snippet(store_.get(info.chapter_id).text, hit.occurrences, options_.radius,
                           std::numeric_limits<std::size_t>::max());
    result.total_occurrences += hit.occurrences.size();
    hits.push_back(std::move(hit));
  }

  std::sort(hits.begin(), hits.end(), [](const EntityChapterHit& a, const EntityChapterHit& b) {
    return std::tie(a.year, a.ordinal, a.chapter_id) < std::tie(b.year, b.ordinal, b.chapter_id);
  });
  result.total_chapters = hits.size();
  for (auto& h : hits) {
    if (result.groups.empty() || result.groups.back().year != h.year) {
      result.groups.push_back(YearGroup{h.year, {}});
    }
    result.groups.back().chapters.push_back(std::move(h));
  }
  return result;
}

}  // namespace tempnet
