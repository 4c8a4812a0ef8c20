#pragma once

// Builds the bundled mini-corpus into a scratch directory with the same
// steps the command-line tool runs.

#include <filesystem>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tempnet/corpus.hpp"
#include "tempnet/pipeline.hpp"
#include "tempnet/portal.hpp"

#ifndef TEMPNET_DATA_DIR
#error "TEMPNET_DATA_DIR must point at data/minicorpus"
#endif

namespace testutil {

inline std::filesystem::path minicorpus_dir() { return TEMPNET_DATA_DIR; }

struct MiniCorpus {
  TempDir dir;
  std::filesystem::path store;
  tempnet::PortalConfig config;

  MiniCorpus() : store(dir.path() / "store") {
    const auto data = minicorpus_dir();
    tempnet::run_ingest(data, store);
    tempnet::run_annotate_years(store);
    tempnet::EntityStepOptions ents;
    ents.persons = data / "persons.txt";
    ents.places = data / "places.txt";
    ents.common = data / "common.txt";
    tempnet::run_annotate_entities(store, ents);

    config = tempnet::load_portal_config(data / "portal.json");
    config.store = store;
    config.port = 0;
    for (auto& book : config.books) {
      tempnet::GraphStepOptions g;
      g.volumes = book.volumes;
      g.window = config.window;
      g.seed = config.seed;
      book.graph = store / "graphs" / (book.id + ".json");
      tempnet::write_file(book.graph, tempnet::build_book_graph(store, g).document);
    }
    tempnet::run_index(store);
  }
};

}  // namespace testutil
