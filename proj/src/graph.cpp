#include "tempnet/graph.hpp"

#include <algorithm>
#include <unordered_map>

#include <json.hpp>

#include "tempnet/error.hpp"

namespace tempnet {

using nlohmann::ordered_json;

int CanonicalEntity::total_occurrences() const {
  int n = 0;
  for (const auto& [year, count] : occurrences) n += count;
  return n;
}

int CanonicalEntity::dominant_year() const {
  int best_year = 0;
  int best = 0;
  for (const auto& [year, count] : occurrences) {
    if (count > best) {
      best = count;
      best_year = year;
    }
  }
  return best_year;
}

std::vector<CanonicalEntity> collect_occurrences(const std::vector<EntityRow>& rows,
                                                 const std::map<std::string, int>& years) {
  struct Tally {
    std::set<std::string> chapters;
    int persons = 0;
    int places = 0;
  };
  std::map<std::string, Tally> tallies;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& row : rows) {
    if (years.find(row.chapter_id) == years.end()) {
      throw Error(ErrorCode::kUnassignedYear, row.chapter_id);
    }
    if (!seen.emplace(row.chapter_id, row.normalized).second) continue;
    auto& t = tallies[row.normalized];
    t.chapters.insert(row.chapter_id);
    (row.label == Label::kPerson ? t.persons : t.places)++;
  }

  std::vector<CanonicalEntity> out;
  out.reserve(tallies.size());
  for (auto& [name, t] : tallies) {
    CanonicalEntity e;
    e.normalized = name;
    e.label = t.places > t.persons ? Label::kPlace : Label::kPerson;
    for (const auto& id : t.chapters) ++e.occurrences[years.at(id)];
    e.chapters = std::move(t.chapters);
    out.push_back(std::move(e));
  }
  return out;
}

std::optional<std::uint32_t> TemporalGraph::index_of(std::string_view name) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), name,
                             [](const CanonicalEntity& e, std::string_view n) { return e.normalized < n; });
  if (it == nodes.end() || it->normalized != name) return std::nullopt;
  return static_cast<std::uint32_t>(it - nodes.begin());
}

std::int64_t TemporalGraph::weight(std::string_view a, std::string_view b) const {
  auto ia = index_of(a);
  auto ib = index_of(b);
  if (!ia || !ib || *ia == *ib) return 0;
  const GraphEdge key{std::min(*ia, *ib), std::max(*ia, *ib), 0};
  auto it = std::lower_bound(edges.begin(), edges.end(), key, [](const GraphEdge& x, const GraphEdge& y) {
    return std::tie(x.u, x.v) < std::tie(y.u, y.v);
  });
  if (it == edges.end() || it->u != key.u || it->v != key.v) return 0;
  return it->weight;
}

std::vector<std::int64_t> TemporalGraph::weighted_degrees() const {
  std::vector<std::int64_t> degree(nodes.size(), 0);
  for (const auto& e : edges) {
    degree[e.u] += e.weight;
    degree[e.v] += e.weight;
  }
  return degree;
}

WeightedGraph TemporalGraph::weighted() const {
  WeightedGraph g;
  g.num_nodes = nodes.size();
  g.edges.reserve(edges.size());
  for (const auto& e : edges) g.edges.push_back({e.u, e.v, static_cast<double>(e.weight)});
  return g;
}

TemporalGraph build_graph(std::vector<CanonicalEntity> entities, int window, Exec exec) {
  if (window < 0) throw Error(ErrorCode::kInvalidArgument, "window must be >= 0");
  std::sort(entities.begin(), entities.end(),
            [](const CanonicalEntity& a, const CanonicalEntity& b) { return a.normalized < b.normalized; });
  for (std::size_t i = 1; i < entities.size(); ++i) {
    if (entities[i].normalized == entities[i - 1].normalized) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate entity '" + entities[i].normalized + "'");
    }
  }

  TemporalGraph graph;
  graph.window = window;
  graph.nodes = std::move(entities);
  const std::size_t n = graph.nodes.size();

  // year -> entities mentioning it, ascending index
  std::map<int, std::vector<std::uint32_t>> by_year;
  for (std::uint32_t i = 0; i < n; ++i) {
    for (const auto& [year, count] : graph.nodes[i].occurrences) by_year[year].push_back(i);
  }

  // Row u holds edges (u, v) with v > u, so rows are written independently.
  std::vector<std::vector<GraphEdge>> rows(n);
  for_each_index(exec, n, [&](std::size_t u) {
    std::unordered_map<std::uint32_t, std::int64_t> counts;
    for (const auto& [a, count] : graph.nodes[u].occurrences) {
      for (auto it = by_year.lower_bound(a - window); it != by_year.end() && it->first <= a + window; ++it) {
        const auto& bucket = it->second;
        for (auto v = std::upper_bound(bucket.begin(), bucket.end(), static_cast<std::uint32_t>(u));
             v != bucket.end(); ++v) {
          ++counts[*v];
        }
      }
    }
    auto& row = rows[u];
    row.reserve(counts.size());
    for (const auto& [v, w] : counts) row.push_back({static_cast<std::uint32_t>(u), v, w});
    std::sort(row.begin(), row.end(), [](const GraphEdge& x, const GraphEdge& y) { return x.v < y.v; });
  });

  for (auto& row : rows) graph.edges.insert(graph.edges.end(), row.begin(), row.end());
  return graph;
}

double modularity(const TemporalGraph& graph, const Partition& partition) {
  return modularity(graph.weighted(), partition);
}

LouvainResult louvain(const TemporalGraph& graph, std::uint64_t seed) {
  return louvain(graph.weighted(), seed);
}

std::vector<CommunityCaption> make_captions(const TemporalGraph& graph, const Partition& partition,
                                            std::size_t k) {
  if (partition.size() != graph.nodes.size()) {
    throw Error(ErrorCode::kInvalidArgument, "partition does not cover the graph");
  }
  const auto degree = graph.weighted_degrees();
  std::map<int, std::vector<std::uint32_t>> members;
  for (std::uint32_t i = 0; i < partition.size(); ++i) members[partition[i]].push_back(i);

  std::vector<CommunityCaption> out;
  for (auto& [id, list] : members) {
    std::sort(list.begin(), list.end(), [&](std::uint32_t a, std::uint32_t b) {
      if (degree[a] != degree[b]) return degree[a] > degree[b];
      return graph.nodes[a].normalized < graph.nodes[b].normalized;
    });
    CommunityCaption c;
    c.community_id = id;
    bool first = true;
    for (const std::uint32_t m : list) {
      for (const auto& [year, count] : graph.nodes[m].occurrences) {
        c.min_year = first ? year : std::min(c.min_year, year);
        c.max_year = first ? year : std::max(c.max_year, year);
        first = false;
      }
    }
    for (std::size_t i = 0; i < list.size() && i < k; ++i) {
      c.top_entities.push_back(graph.nodes[list[i]].normalized);
    }
    for (std::size_t i = 0; i < c.top_entities.size(); ++i) {
      if (i > 0) c.caption += ", ";
      c.caption += c.top_entities[i];
    }
    c.caption += " — " + std::to_string(c.min_year) + "–" + std::to_string(c.max_year);
    out.push_back(std::move(c));
  }
  return out;
}

std::string export_graph(const TemporalGraph& graph, const Partition& partition,
                         const std::vector<CommunityCaption>& captions, const GraphMeta& meta) {
  if (partition.size() != graph.nodes.size()) {
    throw Error(ErrorCode::kInvalidArgument, "partition does not cover the graph");
  }
  ordered_json doc;
  doc["meta"] = {{"book_ids", meta.book_ids},
                 {"window", meta.window},
                 {"seed", meta.seed},
                 {"modularity", meta.modularity ? ordered_json(*meta.modularity) : ordered_json(nullptr)},
                 {"node_count", graph.nodes.size()},
                 {"edge_count", graph.edges.size()}};

  ordered_json nodes = ordered_json::array();
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    const auto& n = graph.nodes[i];
    ordered_json years = ordered_json::object();
    for (const auto& [year, count] : n.occurrences) years[std::to_string(year)] = count;
    const int dominant = n.dominant_year();
    nodes.push_back({{"id", n.normalized},
                     {"label", label_name(n.label)},
                     {"occurrences", n.total_occurrences()},
                     {"dominant_year", dominant},
                     {"x", dominant},
                     {"community", partition[i]},
                     {"years", years}});
  }
  doc["nodes"] = std::move(nodes);

  ordered_json edges = ordered_json::array();
  for (const auto& e : graph.edges) {
    edges.push_back({{"source", graph.nodes[e.u].normalized},
                     {"target", graph.nodes[e.v].normalized},
                     {"weight", e.weight}});
  }
  doc["edges"] = std::move(edges);

  ordered_json caps = ordered_json::array();
  for (const auto& c : captions) {
    caps.push_back({{"community", c.community_id},
                    {"top_entities", c.top_entities},
                    {"year_span", {c.min_year, c.max_year}},
                    {"caption", c.caption}});
  }
  doc["captions"] = std::move(caps);
  return doc.dump(2) + "\n";
}

}  // namespace tempnet
