#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tempnet/corpus.hpp"
#include "tempnet/parallel.hpp"

namespace tempnet {

enum class Label { kPerson, kPlace };

std::string_view label_name(Label label);
/// Accepts "PERSON" or "PLACE"; throws UnknownLabel otherwise.
Label parse_label(std::string_view name);

struct ByteSpan {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start; }
  friend auto operator<=>(const ByteSpan&, const ByteSpan&) = default;
};

struct EntityMention {
  std::string surface;
  std::string normalized;
  Label label = Label::kPerson;
  std::string chapter_id;
  ByteSpan span;
  std::string tagger_id;

  friend bool operator==(const EntityMention&, const EntityMention&) = default;
};

/// One accepted (chapter, entity) pair; the row format of `store/entities`.
struct EntityRow {
  std::string chapter_id;
  std::string normalized;
  Label label = Label::kPerson;

  friend auto operator<=>(const EntityRow&, const EntityRow&) = default;
};

/// Case-folds, trims surrounding punctuation and whitespace, collapses inner
/// whitespace and drops leading honorifics. An empty result means discard.
std::string normalize_surface(std::string_view surface);

/// Word-level token used by the taggers: a maximal run of word characters
/// with its original bytes.
struct WordToken {
  std::string_view text;
  ByteSpan span;
};

std::vector<WordToken> word_tokens(std::string_view text);

/// Normalized name -> label lookup with longest-match support.
class Gazetteer {
 public:
  Gazetteer() = default;
  Gazetteer(const std::vector<std::string>& persons, const std::vector<std::string>& places);

  /// Persons win when a name appears in both lists.
  const Label* find(std::string_view normalized) const;
  bool contains(std::string_view normalized) const { return find(normalized) != nullptr; }
  std::size_t max_tokens() const { return max_tokens_; }
  bool empty() const { return names_.empty(); }

 private:
  std::unordered_map<std::string, Label> names_;
  std::size_t max_tokens_ = 0;
};

/// Lowercased word set.
using WordSet = std::unordered_set<std::string>;

WordSet make_word_set(const std::vector<std::string>& words);

const std::vector<std::string>& default_stopwords();
const std::vector<std::string>& default_honorifics();
const std::vector<std::string>& default_place_cues();

inline constexpr std::string_view kGazetteerTagger = "gazetteer";
inline constexpr std::string_view kContextTagger = "context";
inline constexpr std::string_view kCapitalizedTagger = "capitalized";

/// Longest non-overlapping token sequences whose normalized form is a
/// gazetteer entry.
std::vector<EntityMention> tag_gazetteer(const Chapter& chapter, const Gazetteer& gazetteer);

/// Runs of capitalized tokens outside stopwords. A lone sentence-initial
/// token is ignored. A run right after in/at/to/from is a PLACE, otherwise
/// a PERSON.
std::vector<EntityMention> tag_capitalized(const Chapter& chapter, const WordSet& stopwords);

/// Capitalized run after an honorific is a PERSON; after a place cue such
/// as "city of" it is a PLACE.
std::vector<EntityMention> tag_context(const Chapter& chapter, const WordSet& honorifics,
                                       const std::vector<std::string>& place_cues);

/// Pre-parsed external annotations, `chapter_id|start|end|label|surface`.
class ExternalAnnotations {
 public:
  /// Parses annotation text. Rows naming chapters absent from the store raise
  /// UnknownChapter; spans beyond the chapter raise SpanOutOfBounds; labels
  /// other than PERSON/PLACE raise UnknownLabel.
  static ExternalAnnotations parse(std::string_view content, const ChapterStore& store,
                                   std::string tagger_id);

  const std::string& tagger_id() const { return tagger_id_; }
  std::vector<EntityMention> for_chapter(const Chapter& chapter) const;
  std::size_t size() const;

 private:
  std::string tagger_id_;
  std::map<std::string, std::vector<EntityMention>, std::less<>> by_chapter_;
};

std::vector<EntityMention> tag_external(const Chapter& chapter,
                                        const ExternalAnnotations& annotations);

struct TaggerDescriptor {
  std::string id;
  int priority = 0;  // lower is stronger
};

class TaggerRegistry {
 public:
  explicit TaggerRegistry(std::vector<TaggerDescriptor> taggers, int quorum = 2);

  const std::vector<TaggerDescriptor>& taggers() const { return taggers_; }
  int quorum() const { return quorum_; }
  /// Throws UnknownTagger for ids that were never registered.
  int priority_of(std::string_view tagger_id) const;

 private:
  std::vector<TaggerDescriptor> taggers_;
  int quorum_;
};

/// tagger id -> its mentions over any number of chapters.
using TaggerOutputs = std::map<std::string, std::vector<EntityMention>, std::less<>>;

/// Accepts a (chapter, normalized) candidate when at least `quorum` distinct
/// taggers produced it. Each tagger votes the label it used most often for
/// the candidate (first mention breaks a tie); the accepted label is the
/// majority over supporting taggers, tie to the highest-priority one.
/// Output is sorted by (chapter_id, normalized).
std::vector<EntityRow> vote(const TaggerOutputs& outputs, const TaggerRegistry& registry);

/// Drops common-word noise and resolves unconfirmed places. See the notes in
/// entities.cpp for the exact rule.
std::vector<EntityRow> filter_entities(const std::vector<EntityRow>& accepted,
                                       const WordSet& places_gazetteer,
                                       const WordSet& common_words);

/// Everything the built-in taggers need.
struct TaggerConfig {
  Gazetteer gazetteer;
  WordSet stopwords = make_word_set(default_stopwords());
  WordSet honorifics = make_word_set(default_honorifics());
  std::vector<std::string> place_cues = default_place_cues();
  std::vector<ExternalAnnotations> external;
};

/// Registry for the three built-in taggers (priority gazetteer, context,
/// capitalized) followed by each external source.
TaggerRegistry make_registry(const TaggerConfig& config, int quorum);

/// Runs every configured tagger over every chapter. The parallel kernel
/// splits work by chapter; results are identical to the serial one.
TaggerOutputs tag_chapters(const std::vector<const Chapter*>& chapters,
                           const TaggerConfig& config, Exec exec = Exec::kParallel);

/// `chapter_id|normalized|label` lines.
std::string format_entity_rows(const std::vector<EntityRow>& rows);
std::vector<EntityRow> parse_entity_rows(std::string_view content);

/// One entry per line, trimmed; blank lines and `#` comments skipped.
std::vector<std::string> read_word_list(const std::filesystem::path& path);
std::vector<std::string> parse_word_list(std::string_view content);

}  // namespace tempnet
