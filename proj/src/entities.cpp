#include "tempnet/entities.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "tempnet/error.hpp"
#include "tempnet/text.hpp"

namespace tempnet {

std::string_view label_name(Label label) {
  return label == Label::kPerson ? "PERSON" : "PLACE";
}

Label parse_label(std::string_view name) {
  if (name == "PERSON") return Label::kPerson;
  if (name == "PLACE") return Label::kPlace;
  throw Error(ErrorCode::kUnknownLabel, std::string(name));
}

namespace {

const std::vector<std::string> kNormalizeHonorifics = {"mr", "mrs", "dr", "sjt", "shri", "mahatma"};

// Byte offsets of the first and one-past-last word character.
std::pair<std::size_t, std::size_t> word_bounds(std::string_view s) {
  std::size_t first = s.size();
  std::size_t last = 0;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const std::size_t at = pos;
    if (text::is_word_char(text::decode_at(s, pos))) {
      if (first == s.size()) first = at;
      last = pos;
    }
  }
  if (first == s.size()) return {0, 0};
  return {first, last};
}

std::string_view trim_punct(std::string_view s) {
  auto [b, e] = word_bounds(s);
  return s.substr(b, e - b);
}

bool is_capitalized(std::string_view token) {
  if (token.empty()) return false;
  std::size_t pos = 0;
  const char32_t cp = text::decode_at(token, pos);
  return text::fold(cp) != cp;
}

bool gap_is_space(std::string_view gap, bool allow_blank_line) {
  std::size_t newlines = 0;
  for (char c : gap) {
    if (c == '\n') ++newlines;
    if (c != ' ' && c != '\t' && c != '\n' && c != '\r') return false;
  }
  return allow_blank_line || newlines < 2;
}

std::string lower(std::string_view s) { return text::fold_case(s); }

}  // namespace

std::string normalize_surface(std::string_view surface) {
  const std::string folded = text::fold_case(surface);

  std::vector<std::string> words;
  std::string current;
  std::size_t pos = 0;
  while (pos < folded.size()) {
    const std::size_t at = pos;
    const char32_t cp = text::decode_at(folded, pos);
    if (text::is_space(cp)) {
      if (!current.empty()) words.push_back(std::move(current));
      current.clear();
    } else {
      current.append(folded, at, pos - at);
    }
  }
  if (!current.empty()) words.push_back(std::move(current));

  std::string joined;
  for (const auto& w : words) {
    if (!joined.empty()) joined += ' ';
    joined += w;
  }
  std::string_view rest = trim_punct(joined);

  while (!rest.empty()) {
    const auto space = rest.find(' ');
    const std::string_view head = trim_punct(rest.substr(0, space));
    if (std::find(kNormalizeHonorifics.begin(), kNormalizeHonorifics.end(), head) ==
        kNormalizeHonorifics.end()) {
      break;
    }
    rest = space == std::string_view::npos ? std::string_view{} : trim_punct(rest.substr(space + 1));
  }
  return std::string(rest);
}

std::vector<WordToken> word_tokens(std::string_view s) {
  std::vector<WordToken> out;
  std::size_t pos = 0;
  std::size_t start = 0;
  bool in_word = false;
  while (pos < s.size()) {
    const std::size_t at = pos;
    const bool word = text::is_word_char(text::decode_at(s, pos));
    if (word && !in_word) {
      start = at;
      in_word = true;
    } else if (!word && in_word) {
      out.push_back({s.substr(start, at - start), {start, at}});
      in_word = false;
    }
  }
  if (in_word) out.push_back({s.substr(start), {start, s.size()}});
  return out;
}

// ---------------------------------------------------------------------------
// Lexicons

Gazetteer::Gazetteer(const std::vector<std::string>& persons,
                     const std::vector<std::string>& places) {
  auto add = [&](const std::string& raw, Label label) {
    std::string name = normalize_surface(raw);
    if (name.empty()) return;
    max_tokens_ = std::max(max_tokens_, word_tokens(name).size());
    names_.emplace(std::move(name), label);  // first insertion wins
  };
  for (const auto& p : persons) add(p, Label::kPerson);
  for (const auto& p : places) add(p, Label::kPlace);
}

const Label* Gazetteer::find(std::string_view normalized) const {
  auto it = names_.find(std::string(normalized));
  return it == names_.end() ? nullptr : &it->second;
}

WordSet make_word_set(const std::vector<std::string>& words) {
  WordSet out;
  for (const auto& w : words) {
    std::string n = normalize_surface(w);
    if (n.empty()) n = lower(w);
    if (!n.empty()) out.insert(std::move(n));
  }
  return out;
}

const std::vector<std::string>& default_stopwords() {
  static const std::vector<std::string> kWords = {
      "a", "about", "after", "again", "all", "also", "an", "and", "any", "are", "as", "at",
      "be", "because", "been", "before", "being", "but", "by", "can", "could", "did", "do",
      "does", "during", "each", "even", "for", "from", "had", "has", "have", "he", "her",
      "here", "hers", "him", "his", "how", "i", "if", "in", "into", "is", "it", "its", "let",
      "may", "me", "might", "mine", "more", "most", "much", "must", "my", "no", "nor", "not",
      "now", "of", "on", "once", "one", "only", "or", "other", "our", "ours", "out", "over",
      "shall", "she", "should", "since", "so", "some", "such", "than", "that", "the", "their",
      "them", "then", "there", "these", "they", "this", "those", "though", "through", "thus",
      "till", "to", "too", "under", "until", "up", "upon", "us", "very", "was", "we", "were",
      "what", "when", "where", "whether", "which", "while", "who", "whom", "why", "will",
      "with", "would", "yet", "you", "your", "chapter", "mr", "mrs", "dr", "sjt", "shri",
      "mahatma", "sir", "lord", "lady", "miss"};
  return kWords;
}

const std::vector<std::string>& default_honorifics() {
  static const std::vector<std::string> kWords = {"mr",  "mrs",  "dr",   "sjt",  "shri",
                                                  "mahatma", "sir", "lord", "lady", "miss"};
  return kWords;
}

const std::vector<std::string>& default_place_cues() {
  static const std::vector<std::string> kCues = {"city of", "town of", "port of"};
  return kCues;
}

// ---------------------------------------------------------------------------
// Taggers

namespace {

EntityMention make_mention(const Chapter& chapter, ByteSpan span, Label label,
                           std::string_view tagger) {
  std::string surface = chapter.text.substr(span.start, span.size());
  std::string normalized = normalize_surface(surface);
  return EntityMention{std::move(surface), std::move(normalized), label, chapter.chapter_id,
                       span, std::string(tagger)};
}

std::string_view gap_before(std::string_view text, const std::vector<WordToken>& tokens,
                            std::size_t k) {
  const std::size_t from = k == 0 ? 0 : tokens[k - 1].span.end;
  return text.substr(from, tokens[k].span.start - from);
}

// Index one past the run of capitalized tokens starting at k, joined only by
// whitespace. `skip` rejects tokens that may not join the run.
template <typename Skip>
std::size_t capitalized_run_end(std::string_view text, const std::vector<WordToken>& tokens,
                                std::size_t k, Skip&& skip) {
  std::size_t end = k;
  while (end < tokens.size() && is_capitalized(tokens[end].text) && !skip(tokens[end]) &&
         (end == k || gap_is_space(gap_before(text, tokens, end), false))) {
    ++end;
  }
  return end;
}

}  // namespace

std::vector<EntityMention> tag_gazetteer(const Chapter& chapter, const Gazetteer& gazetteer) {
  std::vector<EntityMention> out;
  if (gazetteer.empty()) return out;
  const std::string_view text = chapter.text;
  const auto tokens = word_tokens(text);
  // Leading honorifics may pad a name by a couple of tokens.
  const std::size_t longest = gazetteer.max_tokens() + 2;
  std::size_t i = 0;
  while (i < tokens.size()) {
    std::size_t matched = 0;
    const std::size_t limit = std::min(longest, tokens.size() - i);
    for (std::size_t len = limit; len >= 1; --len) {
      const ByteSpan span{tokens[i].span.start, tokens[i + len - 1].span.end};
      const std::string name = normalize_surface(text.substr(span.start, span.size()));
      if (name.empty()) continue;
      if (const Label* label = gazetteer.find(name)) {
        out.push_back(make_mention(chapter, span, *label, kGazetteerTagger));
        matched = len;
        break;
      }
    }
    i += matched == 0 ? 1 : matched;
  }
  return out;
}

std::vector<EntityMention> tag_capitalized(const Chapter& chapter, const WordSet& stopwords) {
  static const WordSet kAbbreviations = make_word_set(default_honorifics());
  static const WordSet kPlacePrepositions = {"in", "at", "to", "from"};

  std::vector<EntityMention> out;
  const std::string_view text = chapter.text;
  const auto tokens = word_tokens(text);

  auto sentence_initial = [&](std::size_t k) {
    if (k == 0) return true;
    const std::string_view gap = gap_before(text, tokens, k);
    if (gap.find("\n\n") != std::string_view::npos ||
        gap.find("\r\n\r\n") != std::string_view::npos) {
      return true;
    }
    if (gap.find_first_of(".!?") == std::string_view::npos) return false;
    // "Mr. Gokhale", "M. K. Gandhi": the period ends an abbreviation.
    const std::string_view prev = tokens[k - 1].text;
    if (kAbbreviations.count(lower(prev)) != 0) return false;
    if (prev.size() == 1 && is_capitalized(prev)) return false;
    return true;
  };
  auto is_stopword = [&](const WordToken& t) { return stopwords.count(lower(t.text)) != 0; };

  std::size_t k = 0;
  while (k < tokens.size()) {
    if (!is_capitalized(tokens[k].text) || is_stopword(tokens[k])) {
      ++k;
      continue;
    }
    const std::size_t end = capitalized_run_end(text, tokens, k, is_stopword);
    if (end - k == 1 && sentence_initial(k)) {
      k = end;
      continue;
    }
    Label label = Label::kPerson;
    if (k > 0 && gap_is_space(gap_before(text, tokens, k), false) &&
        kPlacePrepositions.count(lower(tokens[k - 1].text)) != 0) {
      label = Label::kPlace;
    }
    auto m = make_mention(chapter, {tokens[k].span.start, tokens[end - 1].span.end}, label,
                          kCapitalizedTagger);
    if (!m.normalized.empty()) out.push_back(std::move(m));
    k = end;
  }
  return out;
}

std::vector<EntityMention> tag_context(const Chapter& chapter, const WordSet& honorifics,
                                       const std::vector<std::string>& place_cues) {
  std::vector<EntityMention> out;
  const std::string_view text = chapter.text;
  const auto tokens = word_tokens(text);

  std::vector<std::vector<std::string>> cues;
  for (const auto& cue : place_cues) {
    std::vector<std::string> words;
    for (const auto& t : word_tokens(cue)) words.push_back(lower(t.text));
    if (!words.empty()) cues.push_back(std::move(words));
  }

  auto no_skip = [](const WordToken&) { return false; };
  // Honorific gap: whitespace, optionally after the abbreviation period.
  auto honorific_gap = [](std::string_view gap) {
    if (!gap.empty() && gap.front() == '.') gap.remove_prefix(1);
    return !gap.empty() && gap_is_space(gap, false);
  };

  std::size_t k = 0;
  while (k < tokens.size()) {
    const std::string word = lower(tokens[k].text);
    if (honorifics.count(word) != 0 && k + 1 < tokens.size() &&
        honorific_gap(gap_before(text, tokens, k + 1))) {
      const std::size_t end = capitalized_run_end(text, tokens, k + 1, no_skip);
      if (end > k + 1) {
        auto m = make_mention(chapter, {tokens[k + 1].span.start, tokens[end - 1].span.end},
                              Label::kPerson, kContextTagger);
        if (!m.normalized.empty()) out.push_back(std::move(m));
        k = end;
        continue;
      }
    }
    bool advanced = false;
    for (const auto& cue : cues) {
      const std::size_t after = k + cue.size();
      if (after >= tokens.size()) continue;
      bool match = true;
      for (std::size_t j = 0; j < cue.size() && match; ++j) {
        match = lower(tokens[k + j].text) == cue[j] &&
                (j == 0 || gap_is_space(gap_before(text, tokens, k + j), false));
      }
      if (!match || !gap_is_space(gap_before(text, tokens, after), false)) continue;
      const std::size_t end = capitalized_run_end(text, tokens, after, no_skip);
      if (end == after) continue;
      auto m = make_mention(chapter, {tokens[after].span.start, tokens[end - 1].span.end},
                            Label::kPlace, kContextTagger);
      if (!m.normalized.empty()) out.push_back(std::move(m));
      k = end;
      advanced = true;
      break;
    }
    if (!advanced) ++k;
  }
  return out;
}

// ---------------------------------------------------------------------------
// External annotations

ExternalAnnotations ExternalAnnotations::parse(std::string_view content, const ChapterStore& store,
                                               std::string tagger_id) {
  ExternalAnnotations out;
  out.tagger_id_ = std::move(tagger_id);
  std::istringstream in{std::string(content)};
  std::string line;
  int lineno = 0;
  auto parse_offset = [&](std::string_view field) {
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
      throw Error(ErrorCode::kMalformedInput,
                  "line " + std::to_string(lineno) + ": bad offset '" + std::string(field) + "'");
    }
    return value;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string_view> fields;
    std::string_view rest = line;
    for (int f = 0; f < 4; ++f) {
      const auto bar = rest.find('|');
      if (bar == std::string_view::npos) {
        throw Error(ErrorCode::kMalformedInput,
                    "line " + std::to_string(lineno) + ": expected 5 '|' separated fields");
      }
      fields.push_back(rest.substr(0, bar));
      rest.remove_prefix(bar + 1);
    }
    fields.push_back(rest);

    const Chapter* chapter = store.find(fields[0]);
    if (chapter == nullptr) throw Error(ErrorCode::kUnknownChapter, std::string(fields[0]));
    const ByteSpan span{parse_offset(fields[1]), parse_offset(fields[2])};
    const Label label = parse_label(fields[3]);
    if (span.start > span.end || span.end > chapter->text.size()) {
      throw Error(ErrorCode::kSpanOutOfBounds,
                  chapter->chapter_id + " [" + std::to_string(span.start) + ", " +
                      std::to_string(span.end) + ") exceeds " +
                      std::to_string(chapter->text.size()) + " bytes");
    }
    EntityMention m{std::string(fields[4]), normalize_surface(fields[4]), label,
                    chapter->chapter_id, span, out.tagger_id_};
    out.by_chapter_[m.chapter_id].push_back(std::move(m));
  }
  return out;
}

std::vector<EntityMention> ExternalAnnotations::for_chapter(const Chapter& chapter) const {
  auto it = by_chapter_.find(chapter.chapter_id);
  return it == by_chapter_.end() ? std::vector<EntityMention>{} : it->second;
}

std::size_t ExternalAnnotations::size() const {
  std::size_t n = 0;
  for (const auto& [id, v] : by_chapter_) n += v.size();
  return n;
}

std::vector<EntityMention> tag_external(const Chapter& chapter,
                                        const ExternalAnnotations& annotations) {
  return annotations.for_chapter(chapter);
}

// ---------------------------------------------------------------------------
// Ensemble

TaggerRegistry::TaggerRegistry(std::vector<TaggerDescriptor> taggers, int quorum)
    : taggers_(std::move(taggers)), quorum_(quorum) {
  if (quorum_ < 1) throw Error(ErrorCode::kInvalidArgument, "quorum must be >= 1");
  if (static_cast<int>(taggers_.size()) < quorum_) {
    throw Error(ErrorCode::kQuorumUnsatisfiable,
                std::to_string(taggers_.size()) + " taggers registered, quorum " +
                    std::to_string(quorum_));
  }
  std::set<int> ranks;
  std::set<std::string> ids;
  for (const auto& t : taggers_) {
    if (!ranks.insert(t.priority).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate tagger priority " + std::to_string(t.priority));
    }
    if (!ids.insert(t.id).second) throw Error(ErrorCode::kInvalidArgument, "duplicate tagger " + t.id);
  }
}

int TaggerRegistry::priority_of(std::string_view tagger_id) const {
  for (const auto& t : taggers_) {
    if (t.id == tagger_id) return t.priority;
  }
  throw Error(ErrorCode::kUnknownTagger, std::string(tagger_id));
}

std::vector<EntityRow> vote(const TaggerOutputs& outputs, const TaggerRegistry& registry) {
  if (static_cast<int>(outputs.size()) < registry.quorum()) {
    throw Error(ErrorCode::kQuorumUnsatisfiable,
                std::to_string(outputs.size()) + " tagger outputs, quorum " +
                    std::to_string(registry.quorum()));
  }

  struct TaggerVote {
    int person = 0;
    int place = 0;
    ByteSpan first_span;
    Label first_label = Label::kPerson;
  };
  // (chapter, normalized) -> priority -> that tagger's evidence
  std::map<std::pair<std::string, std::string>, std::map<int, TaggerVote>> candidates;

  for (const auto& [tagger_id, mentions] : outputs) {
    const int priority = registry.priority_of(tagger_id);
    for (const auto& m : mentions) {
      if (m.normalized.empty()) continue;
      auto& votes = candidates[{m.chapter_id, m.normalized}];
      auto [it, fresh] = votes.try_emplace(priority);
      TaggerVote& v = it->second;
      (m.label == Label::kPerson ? v.person : v.place)++;
      if (fresh || m.span < v.first_span ||
          (m.span == v.first_span && m.label == Label::kPerson)) {
        v.first_span = m.span;
        v.first_label = m.label;
      }
    }
  }

  std::vector<EntityRow> out;
  for (const auto& [key, votes] : candidates) {
    if (static_cast<int>(votes.size()) < registry.quorum()) continue;
    int persons = 0;
    int places = 0;
    for (const auto& [priority, v] : votes) {
      const Label own = v.person != v.place ? (v.person > v.place ? Label::kPerson : Label::kPlace)
                                            : v.first_label;
      (own == Label::kPerson ? persons : places)++;
    }
    Label label;
    if (persons != places) {
      label = persons > places ? Label::kPerson : Label::kPlace;
    } else {
      // votes is keyed by priority, so begin() is the strongest supporter.
      const TaggerVote& top = votes.begin()->second;
      label = top.person != top.place ? (top.person > top.place ? Label::kPerson : Label::kPlace)
                                      : top.first_label;
    }
    out.push_back(EntityRow{key.first, key.second, label});
  }
  return out;
}

// An entity is dropped when its name is a common word, is not a known place,
// and is either a PLACE or a single-word PERSON. Before that check, a PLACE
// that the gazetteer does not confirm becomes a PERSON if the same name was
// accepted as a PERSON anywhere in the input; otherwise it stays a PLACE.
std::vector<EntityRow> filter_entities(const std::vector<EntityRow>& accepted,
                                       const WordSet& places_gazetteer,
                                       const WordSet& common_words) {
  std::set<std::string_view> person_forms;
  for (const auto& row : accepted) {
    if (row.label == Label::kPerson) person_forms.insert(row.normalized);
  }
  std::vector<EntityRow> out;
  out.reserve(accepted.size());
  for (const auto& row : accepted) {
    const bool known_place = places_gazetteer.count(row.normalized) != 0;
    Label label = row.label;
    if (label == Label::kPlace && !known_place && person_forms.count(row.normalized) != 0) {
      label = Label::kPerson;
    }
    const bool single_token = row.normalized.find(' ') == std::string::npos;
    const bool drop = common_words.count(row.normalized) != 0 && !known_place &&
                      (label != Label::kPerson || single_token);
    if (!drop) out.push_back(EntityRow{row.chapter_id, row.normalized, label});
  }
  return out;
}

TaggerRegistry make_registry(const TaggerConfig& config, int quorum) {
  std::vector<TaggerDescriptor> taggers = {{std::string(kGazetteerTagger), 1},
                                           {std::string(kContextTagger), 2},
                                           {std::string(kCapitalizedTagger), 3}};
  int rank = 4;
  for (const auto& ext : config.external) taggers.push_back({ext.tagger_id(), rank++});
  return TaggerRegistry(std::move(taggers), quorum);
}

TaggerOutputs tag_chapters(const std::vector<const Chapter*>& chapters, const TaggerConfig& config,
                           Exec exec) {
  const std::size_t num_taggers = 3 + config.external.size();
  // per chapter, per tagger
  std::vector<std::vector<std::vector<EntityMention>>> found(
      chapters.size(), std::vector<std::vector<EntityMention>>(num_taggers));
  for_each_index(exec, chapters.size(), [&](std::size_t i) {
    const Chapter& c = *chapters[i];
    auto& slot = found[i];
    slot[0] = tag_gazetteer(c, config.gazetteer);
    slot[1] = tag_context(c, config.honorifics, config.place_cues);
    slot[2] = tag_capitalized(c, config.stopwords);
    for (std::size_t e = 0; e < config.external.size(); ++e) {
      slot[3 + e] = tag_external(c, config.external[e]);
    }
  });

  std::vector<std::string> ids = {std::string(kGazetteerTagger), std::string(kContextTagger),
                                  std::string(kCapitalizedTagger)};
  for (const auto& ext : config.external) ids.push_back(ext.tagger_id());
  TaggerOutputs out;
  for (std::size_t t = 0; t < num_taggers; ++t) {
    auto& list = out[ids[t]];
    for (auto& per_chapter : found) {
      std::move(per_chapter[t].begin(), per_chapter[t].end(), std::back_inserter(list));
    }
  }
  return out;
}

std::string format_entity_rows(const std::vector<EntityRow>& rows) {
  std::string out;
  for (const auto& r : rows) {
    out += r.chapter_id;
    out += '|';
    out += r.normalized;
    out += '|';
    out += label_name(r.label);
    out += '\n';
  }
  return out;
}

std::vector<EntityRow> parse_entity_rows(std::string_view content) {
  std::vector<EntityRow> rows;
  std::istringstream in{std::string(content)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto a = line.find('|');
    const auto b = line.rfind('|');
    if (a == std::string::npos || a == b) {
      throw Error(ErrorCode::kStorageFailure, "bad entity row '" + line + "'");
    }
    rows.push_back(EntityRow{line.substr(0, a), line.substr(a + 1, b - a - 1),
                             parse_label(std::string_view(line).substr(b + 1))});
  }
  return rows;
}

std::vector<std::string> parse_word_list(std::string_view content) {
  std::vector<std::string> out;
  std::istringstream in{std::string(content)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t");
    out.push_back(line.substr(first, last - first + 1));
  }
  return out;
}

std::vector<std::string> read_word_list(const std::filesystem::path& path) {
  return parse_word_list(read_file(path));
}

}  // namespace tempnet
