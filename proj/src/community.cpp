#include "tempnet/community.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>

#include "tempnet/error.hpp"

namespace tempnet {

double WeightedGraph::total_weight() const {
  double w = 0.0;
  for (const auto& e : edges) w += e.weight;
  return w;
}

double modularity(const WeightedGraph& graph, const Partition& partition) {
  if (partition.size() != graph.num_nodes) {
    throw Error(ErrorCode::kInvalidArgument, "partition covers " + std::to_string(partition.size()) +
                                                 " of " + std::to_string(graph.num_nodes) + " nodes");
  }
  const double total = graph.total_weight();
  if (graph.edges.empty() || total <= 0.0) throw Error(ErrorCode::kEmptyGraph, "no edges");

  int communities = 0;
  for (int c : partition) {
    if (c < 0) throw Error(ErrorCode::kInvalidArgument, "negative community id");
    communities = std::max(communities, c + 1);
  }
  std::vector<double> inside(communities, 0.0);
  std::vector<double> degree(communities, 0.0);
  for (const auto& e : graph.edges) {
    const int cu = partition[e.u];
    const int cv = partition[e.v];
    if (cu == cv) inside[cu] += e.weight;
    degree[cu] += e.weight;
    degree[cv] += e.weight;
  }
  double q = 0.0;
  for (int c = 0; c < communities; ++c) {
    const double share = degree[c] / (2.0 * total);
    q += inside[c] / total - share * share;
  }
  return q;
}

Partition canonical_partition(const Partition& partition) {
  std::vector<int> remap;
  Partition out(partition.size());
  int next = 0;
  for (std::size_t i = 0; i < partition.size(); ++i) {
    const int c = partition[i];
    if (static_cast<std::size_t>(c) >= remap.size()) remap.resize(c + 1, -1);
    if (remap[c] < 0) remap[c] = next++;
    out[i] = remap[c];
  }
  return out;
}

namespace {

// Working graph for one Louvain level. Off-diagonal entries appear in both
// endpoints' lists; self_loop[i] is the diagonal entry A_ii, which for a
// super-node equals twice the weight inside it.
struct Level {
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adjacency;
  std::vector<double> self_loop;
  std::vector<double> degree;

  std::size_t size() const { return adjacency.size(); }
};

Level initial_level(const WeightedGraph& g) {
  Level level;
  level.adjacency.resize(g.num_nodes);
  level.self_loop.assign(g.num_nodes, 0.0);
  level.degree.assign(g.num_nodes, 0.0);
  for (const auto& e : g.edges) {
    level.adjacency[e.u].emplace_back(e.v, e.weight);
    level.adjacency[e.v].emplace_back(e.u, e.weight);
    level.degree[e.u] += e.weight;
    level.degree[e.v] += e.weight;
  }
  for (auto& adj : level.adjacency) std::sort(adj.begin(), adj.end());
  return level;
}

std::vector<std::uint32_t> shuffled_order(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  // Fisher-Yates on raw engine output; std::shuffle is not portable.
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

// Returns true if any node changed community. community[i] ends holding the
// id of an original node of the level, not yet dense.
bool local_moves(const Level& level, double two_m, const std::vector<std::uint32_t>& order,
                 std::vector<std::uint32_t>& community) {
  const std::size_t n = level.size();
  community.resize(n);
  std::iota(community.begin(), community.end(), 0u);
  std::vector<double> total(level.degree);
  std::vector<double> link(n, -1.0);
  std::vector<std::uint32_t> touched;
  touched.reserve(64);

  bool any_move = false;
  constexpr int kMaxSweeps = 10000;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    std::size_t moves = 0;
    for (const std::uint32_t i : order) {
      const std::uint32_t own = community[i];
      const double k_i = level.degree[i];

      touched.clear();
      link[own] = 0.0;
      touched.push_back(own);
      for (const auto& [j, w] : level.adjacency[i]) {
        const std::uint32_t c = community[j];
        if (link[c] < 0.0) {
          link[c] = 0.0;
          touched.push_back(c);
        }
        link[c] += w;
      }

      total[own] -= k_i;
      std::uint32_t best = own;
      double best_gain = link[own] - total[own] * k_i / two_m;
      for (const std::uint32_t c : touched) {
        const double gain = link[c] - total[c] * k_i / two_m;
        if (gain > best_gain) {
          best = c;
          best_gain = gain;
        }
      }
      total[best] += k_i;
      community[i] = best;
      if (best != own) ++moves;
      for (const std::uint32_t c : touched) link[c] = -1.0;
    }
    if (moves == 0) break;
    any_move = true;
  }
  return any_move;
}

// Dense ids by first appearance; returns the community count.
std::size_t densify(std::vector<std::uint32_t>& community) {
  std::vector<std::int64_t> remap(community.size(), -1);
  std::size_t next = 0;
  for (auto& c : community) {
    if (remap[c] < 0) remap[c] = static_cast<std::int64_t>(next++);
    c = static_cast<std::uint32_t>(remap[c]);
  }
  return next;
}

Level aggregate(const Level& level, const std::vector<std::uint32_t>& community,
                std::size_t count) {
  Level next;
  next.adjacency.resize(count);
  next.self_loop.assign(count, 0.0);
  next.degree.assign(count, 0.0);
  std::vector<std::vector<std::pair<std::uint32_t, double>>> merged(count);
  for (std::size_t i = 0; i < level.size(); ++i) {
    const std::uint32_t ci = community[i];
    next.self_loop[ci] += level.self_loop[i];
    for (const auto& [j, w] : level.adjacency[i]) {
      const std::uint32_t cj = community[j];
      if (ci == cj) {
        next.self_loop[ci] += w;
      } else {
        merged[ci].emplace_back(cj, w);
      }
    }
  }
  for (std::size_t c = 0; c < count; ++c) {
    auto& list = merged[c];
    std::sort(list.begin(), list.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [cj, w] : list) {
      if (!next.adjacency[c].empty() && next.adjacency[c].back().first == cj) {
        next.adjacency[c].back().second += w;
      } else {
        next.adjacency[c].emplace_back(cj, w);
      }
    }
    double degree = next.self_loop[c];
    for (const auto& [cj, w] : next.adjacency[c]) degree += w;
    next.degree[c] = degree;
  }
  return next;
}

}  // namespace

LouvainResult louvain(const WeightedGraph& graph, std::uint64_t seed) {
  const double total = graph.total_weight();
  if (graph.edges.empty() || total <= 0.0) throw Error(ErrorCode::kEmptyGraph, "no edges");
  const double two_m = 2.0 * total;

  LouvainResult result;
  result.partition.resize(graph.num_nodes);
  std::iota(result.partition.begin(), result.partition.end(), 0);
  result.modularity = modularity(graph, result.partition);
  result.pass_modularity.push_back(result.modularity);

  std::mt19937_64 rng(seed);
  Level level = initial_level(graph);
  // original node -> node of the current level
  std::vector<std::uint32_t> membership(graph.num_nodes);
  std::iota(membership.begin(), membership.end(), 0u);

  while (true) {
    const auto order = shuffled_order(level.size(), rng);
    std::vector<std::uint32_t> community;
    if (!local_moves(level, two_m, order, community)) break;
    const std::size_t count = densify(community);

    Partition candidate(graph.num_nodes);
    for (std::size_t v = 0; v < graph.num_nodes; ++v) {
      candidate[v] = static_cast<int>(community[membership[v]]);
    }
    const double q = modularity(graph, candidate);
    if (!(q > result.modularity)) break;

    result.partition = std::move(candidate);
    result.modularity = q;
    result.pass_modularity.push_back(q);
    for (auto& m : membership) m = community[m];
    if (count == level.size()) break;
    level = aggregate(level, community, count);
  }
  result.partition = canonical_partition(result.partition);
  return result;
}

}  // namespace tempnet
