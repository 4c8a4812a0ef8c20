#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tempnet/entities.hpp"
#include "tempnet/graph.hpp"

namespace tempnet {

// Build steps behind the command-line tool. Each reads and writes the store
// layout; all of them are deterministic for a given store.

inline constexpr std::string_view kEntitiesFile = "entities";
inline constexpr std::string_view kIndexFile = "index/index.bin";

/// Opens a store that ingest has already written; MissingArtifact otherwise.
ChapterStore open_built_store(const std::filesystem::path& store_dir);

/// Parses `<corpus_dir>/manifest` and its volumes into a new store.
std::size_t run_ingest(const std::filesystem::path& corpus_dir,
                       const std::filesystem::path& store_dir);

/// Fills the year column of `store/meta`.
std::map<std::string, int> run_annotate_years(const std::filesystem::path& store_dir);

struct EntityStepOptions {
  std::filesystem::path persons;
  std::filesystem::path places;
  std::filesystem::path common;
  std::vector<std::filesystem::path> external;
  std::optional<std::filesystem::path> stopwords;
  int quorum = 2;
};

/// Tags every chapter, votes, filters and writes `store/entities`.
std::vector<EntityRow> run_annotate_entities(const std::filesystem::path& store_dir,
                                             const EntityStepOptions& options);

enum class EntityKind { kAll, kPerson, kPlace };

struct GraphStepOptions {
  std::vector<std::string> volumes;
  int window = 1;
  std::uint64_t seed = 0;
  EntityKind kind = EntityKind::kAll;
  std::size_t caption_size = 3;
};

struct BookGraph {
  TemporalGraph graph;
  Partition partition;
  std::optional<double> modularity;  // absent for an edgeless graph
  std::vector<CommunityCaption> captions;
  std::string document;
};

/// Builds, clusters and exports the graph of the chapters in `volumes`.
BookGraph build_book_graph(const std::filesystem::path& store_dir, const GraphStepOptions& options);

/// Builds `store/index/index.bin`.
std::size_t run_index(const std::filesystem::path& store_dir);

}  // namespace tempnet
