#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace tempnet {

/// Community id per node, dense from 0.
using Partition = std::vector<int>;

struct WeightedEdge {
  std::uint32_t u = 0;
  std::uint32_t v = 0;
  double weight = 0.0;
};

/// Undirected simple graph; each edge listed once, u != v, weight > 0.
struct WeightedGraph {
  std::size_t num_nodes = 0;
  std::vector<WeightedEdge> edges;

  double total_weight() const;
};

/// Newman-Girvan modularity
///
///   Q = sum_c [ W_c / W - (S_c / 2W)^2 ]
///
/// where W is the total edge weight, W_c the weight inside community c and
/// S_c the summed weighted degree of c. Throws EmptyGraph when W == 0 and
/// InvalidArgument when the partition does not cover every node.
double modularity(const WeightedGraph& graph, const Partition& partition);

struct LouvainResult {
  Partition partition;
  double modularity = 0.0;
  /// Modularity of the singleton partition followed by the value after each
  /// accepted pass (local moves + aggregation).
  std::vector<double> pass_modularity;
};

/// Two-phase Louvain. Each pass sweeps nodes in a seeded shuffle (drawn once
/// per pass) moving each to the neighbouring community with the largest
/// strictly positive gain until a sweep moves nothing, then collapses
/// communities into super-nodes. Stops when a pass does not raise
/// modularity. Single threaded and bit-reproducible for a given seed.
LouvainResult louvain(const WeightedGraph& graph, std::uint64_t seed = 0);

/// Renumbers community ids by first appearance in node order.
Partition canonical_partition(const Partition& partition);

}  // namespace tempnet
