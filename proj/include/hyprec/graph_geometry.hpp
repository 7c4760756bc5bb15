#pragma once

// Structural analysis of interaction graphs: delta-hyperbolicity via the
// four-point condition, Ollivier-Ricci curvature, and summary statistics.

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "hyprec/knowledge_graph.hpp"
#include "hyprec/transport.hpp"

namespace hyprec {

using NodeId = std::int32_t;

// Undirected, unweighted graph without self-loops or parallel edges.
struct SimpleGraph {
  std::vector<std::vector<NodeId>> adjacency;  // sorted neighbour lists
  std::vector<EntityId> entity_of;             // node -> source entity id

  std::size_t node_count() const { return adjacency.size(); }
  std::size_t edge_count() const;
  std::size_t degree(NodeId v) const { return adjacency[static_cast<std::size_t>(v)].size(); }
  bool has_edge(NodeId a, NodeId b) const;
  // (u, v) pairs with u < v, in ascending order.
  std::vector<std::pair<NodeId, NodeId>> edges() const;

  // Builds a graph on n nodes from an arbitrary edge list (duplicates, both
  // orientations and self-loops are dropped). entity_of becomes the identity.
  static SimpleGraph from_edges(std::size_t n, const std::vector<std::pair<NodeId, NodeId>>& edges);
};

// Largest connected component, nodes renumbered in ascending original order.
// Ties between equally large components go to the one holding the smallest node.
SimpleGraph largest_connected_component(const SimpleGraph& g);

// Drops relation types and directions, dedupes, removes self-loops and keeps the
// largest connected component. Throws InputError if g has no non-loop edge.
SimpleGraph collapse_graph(const KnowledgeGraph& g);

// Hop counts from `source`; -1 for unreachable nodes.
std::vector<std::int32_t> bfs_distances(const SimpleGraph& g, NodeId source);

// All-pairs hop distances (n x n, row-major).
std::vector<std::int32_t> all_pairs_distances(const SimpleGraph& g);

// Four-point delta of one quadruple given its six pairwise distances.
inline double four_point_delta(double wx, double yz, double wy, double xz, double wz, double xy) {
  double s1 = wx + yz;
  double s2 = wy + xz;
  double s3 = wz + xy;
  // Largest minus second largest, halved.
  if (s1 < s2) std::swap(s1, s2);
  if (s2 < s3) std::swap(s2, s3);
  if (s1 < s2) std::swap(s1, s2);
  return (s1 - s2) / 2.0;
}

enum class DeltaMode { Exact, Sampled };

struct DeltaOptions {
  DeltaMode mode = DeltaMode::Sampled;
  std::uint64_t n_samples = 200000;
  std::uint64_t seed = 0;
  // Sampled mode draws quadruples among a uniform node pool of this size
  // (all nodes when the graph is smaller).
  std::size_t pool_size = 2000;
};

struct DeltaResult {
  double mean = 0.0;
  double max = 0.0;
  std::uint64_t quadruples = 0;
  std::size_t pool = 0;
  bool exhaustive = false;
};

// Throws std::invalid_argument when g has fewer than 4 nodes.
DeltaResult delta_hyperbolicity(const SimpleGraph& g, const DeltaOptions& options);

// Exhaustive four-point evaluation over an explicit distance matrix.
DeltaResult delta_from_distances(const std::vector<std::int32_t>& dist, std::size_t n);

struct CurvatureOptions {
  double alpha = 0.0;  // idleness, 0 <= alpha < 1
  std::size_t support_cap = kDefaultSupportCap;
  std::uint64_t seed = 0;
};

// Probability measure m_v: alpha at v and (1 - alpha) spread uniformly over the
// neighbours, subsampled (seeded by (seed, v)) when the support would exceed the cap.
struct NodeMeasure {
  std::vector<NodeId> support;
  std::vector<double> mass;
  bool subsampled = false;
};
NodeMeasure neighbour_measure(const SimpleGraph& g, NodeId v, const CurvatureOptions& options);

// kappa(x, y) = 1 - W1(m_x, m_y) for an edge (x, y). Throws std::invalid_argument
// for non-edges or alpha outside [0, 1).
double ollivier_ricci_edge(const SimpleGraph& g, NodeId x, NodeId y, const CurvatureOptions& options);

struct EdgeCurvature {
  NodeId u;
  NodeId v;
  double kappa;
};

struct CurvatureReport {
  std::vector<EdgeCurvature> edges;
  std::vector<double> node_kappa;  // mean over incident edges; 0 for isolated nodes
  double alpha = 0.0;
  std::size_t support_cap = kDefaultSupportCap;
  std::size_t subsampled_nodes = 0;
};

CurvatureReport edge_curvatures(const SimpleGraph& g, const CurvatureOptions& options);

struct GraphStats {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  double density = 0.0;  // edges / (nodes (nodes - 1))
  double avg_degree = 0.0;
  double delta_mean = 0.0;
  double delta_max = 0.0;

  double density_pct() const { return 100.0 * density; }
};

double density_from_counts(std::size_t nodes, std::size_t edges);
double avg_degree_from_counts(std::size_t nodes, std::size_t edges);

struct GraphReport {
  GraphStats stats;
  DeltaResult delta;
  CurvatureReport curvature;
};

GraphReport graph_stats(const SimpleGraph& g, const DeltaOptions& delta,
                        const CurvatureOptions& curvature);

}  // namespace hyprec
