#include "tempnet/pipeline.hpp"

#include <numeric>
#include <set>

#include "tempnet/chronology.hpp"
#include "tempnet/corpus.hpp"
#include "tempnet/error.hpp"
#include "tempnet/search.hpp"

namespace tempnet {

namespace fs = std::filesystem;

ChapterStore open_built_store(const fs::path& store_dir) {
  if (!fs::is_regular_file(store_dir / "meta")) {
    throw Error(ErrorCode::kMissingArtifact, (store_dir / "meta").string());
  }
  return ChapterStore::open(store_dir);
}

std::size_t run_ingest(const fs::path& corpus_dir, const fs::path& store_dir) {
  const Corpus corpus = load_corpus_dir(corpus_dir);
  ChapterStore store = ChapterStore::open(store_dir);
  return corpus.store_into(store);
}

std::map<std::string, int> run_annotate_years(const fs::path& store_dir) {
  ChapterStore store = open_built_store(store_dir);
  auto years = assign_store_years(store);
  store.set_years(years);
  return years;
}

std::vector<EntityRow> run_annotate_entities(const fs::path& store_dir,
                                             const EntityStepOptions& options) {
  const ChapterStore store = open_built_store(store_dir);
  const auto places = read_word_list(options.places);
  TaggerConfig config;
  config.gazetteer = Gazetteer(read_word_list(options.persons), places);
  if (options.stopwords) config.stopwords = make_word_set(read_word_list(*options.stopwords));
  for (const auto& path : options.external) {
    config.external.push_back(
        ExternalAnnotations::parse(read_file(path), store, "external:" + path.filename().string()));
  }
  const TaggerRegistry registry = make_registry(config, options.quorum);
  const auto outputs = tag_chapters(store.chapters(), config);
  const auto accepted = vote(outputs, registry);
  auto rows = filter_entities(accepted, make_word_set(places),
                              make_word_set(read_word_list(options.common)));
  write_file(store_dir / kEntitiesFile, format_entity_rows(rows));
  return rows;
}

BookGraph build_book_graph(const fs::path& store_dir, const GraphStepOptions& options) {
  const ChapterStore store = open_built_store(store_dir);
  if (options.volumes.empty()) throw Error(ErrorCode::kUnknownBook, "no volumes selected");
  std::set<std::string> volumes;
  for (const auto& v : options.volumes) {
    if (store.find_volume(v) == nullptr) throw Error(ErrorCode::kUnknownBook, v);
    volumes.insert(v);
  }
  const fs::path entities_path = store_dir / kEntitiesFile;
  if (!fs::is_regular_file(entities_path)) {
    throw Error(ErrorCode::kMissingArtifact, entities_path.string());
  }

  std::vector<EntityRow> rows;
  std::map<std::string, int> years;
  for (auto& row : parse_entity_rows(read_file(entities_path))) {
    const Chapter* c = store.find(row.chapter_id);
    if (c == nullptr) throw Error(ErrorCode::kUnknownChapter, row.chapter_id);
    if (volumes.count(c->volume_id) == 0) continue;
    if (c->year) years[c->chapter_id] = *c->year;
    rows.push_back(std::move(row));
  }
  auto entities = collect_occurrences(rows, years);
  if (options.kind != EntityKind::kAll) {
    const Label keep = options.kind == EntityKind::kPerson ? Label::kPerson : Label::kPlace;
    std::erase_if(entities, [&](const CanonicalEntity& e) { return e.label != keep; });
  }

  BookGraph out;
  out.graph = build_graph(std::move(entities), options.window);
  if (out.graph.edges.empty()) {
    out.partition.resize(out.graph.nodes.size());
    std::iota(out.partition.begin(), out.partition.end(), 0);
  } else {
    auto result = louvain(out.graph, options.seed);
    out.partition = std::move(result.partition);
    out.modularity = result.modularity;
  }
  out.captions = make_captions(out.graph, out.partition, options.caption_size);
  out.document = export_graph(out.graph, out.partition, out.captions,
                              GraphMeta{options.volumes, options.window, options.seed, out.modularity});
  return out;
}

std::size_t run_index(const fs::path& store_dir) {
  const ChapterStore store = open_built_store(store_dir);
  const auto index = InvertedIndex::build(store.chapters());
  index.save(store_dir / kIndexFile);
  return index.num_docs();
}

}  // namespace tempnet
