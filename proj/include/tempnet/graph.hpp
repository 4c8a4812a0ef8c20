#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tempnet/community.hpp"
#include "tempnet/entities.hpp"
#include "tempnet/parallel.hpp"

namespace tempnet {

struct CanonicalEntity {
  std::string normalized;
  Label label = Label::kPerson;
  /// year -> number of chapters of that year mentioning the entity
  std::map<int, int> occurrences;
  std::set<std::string> chapters;

  int total_occurrences() const;
  /// Year with the highest count; the earlier year wins a tie.
  int dominant_year() const;

  friend bool operator==(const CanonicalEntity&, const CanonicalEntity&) = default;
};

/// Folds accepted rows into one record per normalized name. The label is the
/// majority over the entity's rows, PERSON on a tie. Throws UnassignedYear
/// when a row's chapter has no year.
std::vector<CanonicalEntity> collect_occurrences(const std::vector<EntityRow>& rows,
                                                 const std::map<std::string, int>& years);

struct GraphEdge {
  std::uint32_t u = 0;  // u < v, indices into nodes
  std::uint32_t v = 0;
  std::int64_t weight = 0;

  friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

struct TemporalGraph {
  std::vector<CanonicalEntity> nodes;  // sorted by name
  std::vector<GraphEdge> edges;        // sorted by (u, v)
  int window = 1;

  std::optional<std::uint32_t> index_of(std::string_view name) const;
  /// 0 when the pair is not linked.
  std::int64_t weight(std::string_view a, std::string_view b) const;
  std::vector<std::int64_t> weighted_degrees() const;
  WeightedGraph weighted() const;
};

/// Links every pair of distinct entities with
///
///   weight(u, v) = |{ (a, b) : a in years(u), b in years(v), |a - b| <= window }|
///
/// keeping only pairs with weight >= 1. The parallel kernel buckets entities
/// by year and scans each entity's window independently; the serial kernel
/// is the same scan on one thread.
TemporalGraph build_graph(std::vector<CanonicalEntity> entities, int window,
                          Exec exec = Exec::kParallel);

double modularity(const TemporalGraph& graph, const Partition& partition);
LouvainResult louvain(const TemporalGraph& graph, std::uint64_t seed = 0);

struct CommunityCaption {
  int community_id = 0;
  std::vector<std::string> top_entities;
  int min_year = 0;
  int max_year = 0;
  std::string caption;

  friend bool operator==(const CommunityCaption&, const CommunityCaption&) = default;
};

/// One line per community: its k highest weighted-degree members (name
/// breaks ties) and the year span of all members, as "a, b — 1893–1904".
std::vector<CommunityCaption> make_captions(const TemporalGraph& graph, const Partition& partition,
                                            std::size_t k = 3);

struct GraphMeta {
  std::vector<std::string> book_ids;
  int window = 1;
  std::uint64_t seed = 0;
  std::optional<double> modularity;  // null for an edgeless graph
};

/// Deterministic JSON document: nodes by name, edges by pair, then captions
/// and meta. Identical inputs give identical bytes.
std::string export_graph(const TemporalGraph& graph, const Partition& partition,
                         const std::vector<CommunityCaption>& captions, const GraphMeta& meta);

}  // namespace tempnet
