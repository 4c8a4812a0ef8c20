// Command-line front end: build steps, ad-hoc search and the HTTP portal.

#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tempnet/error.hpp"
#include "tempnet/pipeline.hpp"
#include "tempnet/portal.hpp"
#include "tempnet/search.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

ordered_json snippets_json(const std::vector<tempnet::Snippet>& snippets) {
  ordered_json out = ordered_json::array();
  for (const auto& s : snippets) {
    ordered_json spans = ordered_json::array();
    for (const auto& h : s.highlights) spans.push_back({h.start, h.end});
    out.push_back({{"text", s.excerpt}, {"highlights", spans}});
  }
  return out;
}

int run_search(const fs::path& store_dir, const std::string& query,
               const std::vector<std::string>& volumes, bool entity, std::size_t limit) {
  const auto store = tempnet::open_built_store(store_dir);
  const auto index = tempnet::InvertedIndex::load(store_dir / tempnet::kIndexFile);
  const tempnet::Searcher searcher(index, store);
  ordered_json out;
  if (entity) {
    const auto result = searcher.entity_occurrences(query, volumes);
    out["entity"] = result.entity;
    out["total_chapters"] = result.total_chapters;
    out["total_occurrences"] = result.total_occurrences;
    out["groups"] = ordered_json::array();
    for (const auto& g : result.groups) {
      ordered_json chapters = ordered_json::array();
      for (const auto& c : g.chapters) {
        chapters.push_back({{"chapter_id", c.chapter_id},
                            {"title", store.get(c.chapter_id).title},
                            {"ordinal", c.ordinal},
                            {"snippets", snippets_json(c.snippets)}});
      }
      out["groups"].push_back({{"year", g.year}, {"chapters", chapters}});
    }
  } else {
    const auto page = searcher.search(query, limit, 0, volumes);
    out["query"] = query;
    out["total"] = page.total;
    out["hits"] = ordered_json::array();
    for (const auto& h : page.hits) {
      out["hits"].push_back({{"chapter_id", h.chapter_id},
                             {"title", store.get(h.chapter_id).title},
                             {"year", h.year},
                             {"score", h.score},
                             {"snippets", snippets_json(h.snippets)}});
    }
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal co-mention networks and search over chaptered corpora"};
  app.require_subcommand(1);

  fs::path corpus_dir;
  fs::path store_dir;
  auto* ingest = app.add_subcommand("ingest", "Parse volumes into the chapter store");
  ingest->add_option("--corpus", corpus_dir, "Directory with manifest and volume files")->required();
  ingest->add_option("--store", store_dir, "Store directory")->required();

  auto* years = app.add_subcommand("annotate-years", "Assign a year to every chapter");
  years->add_option("--store", store_dir)->required();

  tempnet::EntityStepOptions entity_opts;
  fs::path stopwords;
  auto* entities = app.add_subcommand("annotate-entities", "Tag, vote and filter entities");
  entities->add_option("--store", store_dir)->required();
  entities->add_option("--persons", entity_opts.persons, "Person gazetteer")->required();
  entities->add_option("--places", entity_opts.places, "Place gazetteer")->required();
  entities->add_option("--common", entity_opts.common, "Common-word lexicon")->required();
  entities->add_option("--external", entity_opts.external, "External annotation file (repeatable)");
  entities->add_option("--stopwords", stopwords, "Stopword list for the capitalization tagger");
  entities->add_option("--quorum", entity_opts.quorum, "Taggers that must agree")->capture_default_str();

  tempnet::GraphStepOptions graph_opts;
  fs::path graph_out;
  std::string kind = "all";
  auto* graph = app.add_subcommand("graph", "Build, cluster and export a book's network");
  graph->add_option("--store", store_dir)->required();
  graph->add_option("--book", graph_opts.volumes, "Volume id (repeatable)")->required();
  graph->add_option("--window", graph_opts.window, "Year adjacency radius")->capture_default_str();
  graph->add_option("--seed", graph_opts.seed, "Louvain shuffle seed")->capture_default_str();
  graph->add_option("--kind", kind, "Entities to include")
      ->check(CLI::IsMember({"all", "person", "place"}))
      ->capture_default_str();
  graph->add_option("--out", graph_out, "Graph document path")->required();

  auto* index = app.add_subcommand("index", "Build the full-text index");
  index->add_option("--store", store_dir)->required();

  std::string query;
  std::vector<std::string> volumes;
  bool entity_query = false;
  std::size_t limit = 20;
  auto* search = app.add_subcommand("search", "Query the full-text index");
  search->add_option("--store", store_dir)->required();
  search->add_option("--q", query, "Query text")->required();
  search->add_option("--book", volumes, "Restrict to volume id (repeatable)");
  search->add_flag("--entity", entity_query, "Exact phrase, grouped by year");
  search->add_option("--limit", limit)->capture_default_str();

  fs::path config_path;
  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  serve->add_option("--config", config_path, "Portal config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (ingest->parsed()) {
      std::cout << "stored " << tempnet::run_ingest(corpus_dir, store_dir) << " chapters\n";
    } else if (years->parsed()) {
      std::cout << "dated " << tempnet::run_annotate_years(store_dir).size() << " chapters\n";
    } else if (entities->parsed()) {
      if (!stopwords.empty()) entity_opts.stopwords = stopwords;
      std::cout << "accepted " << tempnet::run_annotate_entities(store_dir, entity_opts).size()
                << " chapter entities\n";
    } else if (graph->parsed()) {
      graph_opts.kind = kind == "person"  ? tempnet::EntityKind::kPerson
                        : kind == "place" ? tempnet::EntityKind::kPlace
                                          : tempnet::EntityKind::kAll;
      const auto built = tempnet::build_book_graph(store_dir, graph_opts);
      tempnet::write_file(graph_out, built.document);
      std::cout << built.graph.nodes.size() << " nodes, " << built.graph.edges.size() << " edges, "
                << built.captions.size() << " communities\n";
    } else if (index->parsed()) {
      std::cout << "indexed " << tempnet::run_index(store_dir) << " chapters\n";
    } else if (search->parsed()) {
      return run_search(store_dir, query, volumes, entity_query, limit);
    } else if (serve->parsed()) {
      const auto config = tempnet::load_portal_config(config_path);
      std::cout << "listening on " << config.host << ":" << config.port << std::endl;
      tempnet::serve(config);
    }
  } catch (const tempnet::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
