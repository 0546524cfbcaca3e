#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace pcap {

using VertexId = std::string;

/// Undirected edge between vertex indices u < v with weight w > 0.
struct Edge {
  int u = 0;
  int v = 0;
  double w = 1.0;
};

/// Immutable weighted graph: vertices with positive measure, symmetric
/// positive edge weights, no self-loops. Non-edges are represented by
/// absence. Vertex ids are opaque strings; the internal index order is
/// lexicographic in the id, which fixes all downstream tie-breaking.
class WeightedGraph {
 public:
  WeightedGraph() = default;
  WeightedGraph(std::vector<std::pair<VertexId, double>> vertex_measures,
                std::vector<std::tuple<VertexId, VertexId, double>> edge_weights);

  int size() const { return static_cast<int>(ids_.size()); }
  const std::vector<VertexId>& ids() const { return ids_; }
  const VertexId& id(int i) const { return ids_[i]; }
  /// Index of an id; throws std::invalid_argument for unknown ids.
  int index_of(const VertexId& id) const;
  std::optional<int> find(const VertexId& id) const;
  bool contains(const VertexId& id) const { return find(id).has_value(); }

  double measure(int i) const { return measure_[i]; }
  double total_measure() const;
  const std::vector<Edge>& edges() const { return edges_; }
  std::span<const std::pair<int, double>> neighbors(int i) const {
    return adj_[i];
  }
  int degree(int i) const { return static_cast<int>(adj_[i].size()); }
  /// Weight of {i,j}, 0 when the pair is not an edge.
  double weight(int i, int j) const;

  bool connected() const;
  /// Connectivity of the subgraph induced on `subset` (indices).
  bool connected_within(const std::vector<int>& subset) const;

  bool operator==(const WeightedGraph& other) const;

 private:
  std::vector<VertexId> ids_;  // sorted
  std::vector<double> measure_;
  std::vector<Edge> edges_;    // sorted by (u, v)
  std::vector<std::vector<std::pair<int, double>>> adj_;
};

/// A subset of vertices of a host graph, kept as sorted unique ids.
struct VertexSubset {
  std::vector<VertexId> members;  // sorted, unique

  VertexSubset() = default;
  explicit VertexSubset(std::vector<VertexId> ids);
  VertexSubset(std::initializer_list<VertexId> ids);

  int size() const { return static_cast<int>(members.size()); }
  bool empty() const { return members.empty(); }
  bool contains(const VertexId& id) const;
};

/// Validates membership against the host graph.
VertexSubset make_subset(const WeightedGraph& g, std::vector<VertexId> ids);
VertexSubset full_subset(const WeightedGraph& g);

/// A vertex subset with its derived boundary, closure, and boundary graph.
///
/// The boundary graph lives on the closure and keeps exactly the edges
/// meeting the interior; edges between two boundary vertices are dropped
/// (equivalently their weight is zero). The closure must be connected as
/// an induced subgraph of the base graph.
class Domain {
 public:
  Domain(const WeightedGraph& g, const VertexSubset& omega);

  const WeightedGraph& base() const { return d_->base; }
  const WeightedGraph& boundary_graph() const { return d_->g_omega; }
  const VertexSubset& omega() const { return d_->omega; }
  const VertexSubset& boundary() const { return d_->boundary; }
  VertexSubset closure() const;

  int closure_size() const { return d_->g_omega.size(); }
  int interior_count() const { return static_cast<int>(d_->interior_idx.size()); }
  int boundary_count() const { return static_cast<int>(d_->boundary_idx.size()); }

  /// Index views into boundary_graph() ordering.
  bool is_interior(int closure_index) const {
    return d_->interior_mask[closure_index] != 0;
  }
  const std::vector<int>& interior_indices() const { return d_->interior_idx; }
  const std::vector<int>& boundary_indices() const { return d_->boundary_idx; }

 private:
  struct Data {
    WeightedGraph base;
    WeightedGraph g_omega;
    VertexSubset omega;
    VertexSubset boundary;
    std::vector<char> interior_mask;
    std::vector<int> interior_idx;
    std::vector<int> boundary_idx;
  };
  std::shared_ptr<const Data> d_;
};

/// Exterior vertices adjacent to omega. Throws on empty omega.
VertexSubset vertex_boundary(const WeightedGraph& g, const VertexSubset& omega);

/// Constructs the domain; throws DomainDisconnectedError when the closure
/// is not connected as an induced subgraph.
Domain build_domain(const WeightedGraph& g, const VertexSubset& omega);

double volume(const WeightedGraph& g, const VertexSubset& a);
double volume(const Domain& d, const VertexSubset& a);

/// Edges with one endpoint in a and the other in b, as sorted id pairs.
std::vector<std::pair<VertexId, VertexId>> edge_cut(const WeightedGraph& g,
                                                    const VertexSubset& a,
                                                    const VertexSubset& b);

// ---- generators ----------------------------------------------------------

WeightedGraph make_path(int n);              // vertices 0..n, n unit edges
WeightedGraph make_cycle(int n);             // n vertices
WeightedGraph make_complete(int n);          // n vertices
WeightedGraph make_grid(int rows, int cols); // rows*cols vertices
WeightedGraph make_star(int leaves);         // center 0 plus `leaves` leaves
WeightedGraph make_random(int n, double edge_prob, double wmin, double wmax,
                          std::uint64_t seed);

/// Parses "path(4)", "grid(2,3)", "random(8,0.5,0.5,2,7)", ... and builds
/// the graph. Throws std::invalid_argument for unknown families or bad
/// parameters.
WeightedGraph generate(const std::string& family_spec);

// ---- infinite families ---------------------------------------------------

/// Nested finite vertex sets W_1 c W_2 c ... of an infinite graph.
struct Exhaustion {
  std::vector<VertexSubset> family;
};

/// Ball of the given radius around the root of one of the built-in
/// infinite families, together with the exhaustion W_i = ball(i).
/// Families: "integer-line", "half-line", "lattice", "tree(d)".
std::pair<WeightedGraph, Exhaustion> truncate(const std::string& family,
                                              int radius);

/// Domain used for limits along an exhaustion at a given radius: the
/// graph is ball(radius) and the interior is ball(radius-1), so the
/// boundary is exactly the sphere of the given radius.
Domain truncation_domain(const std::string& family, int radius);

/// Root vertex id of an infinite family ("0", "0,0" or "r").
VertexId family_root(const std::string& family);

// ---- measure rescaling ---------------------------------------------------

/// New domain over the same boundary graph with interior measure divided
/// by k and boundary measure unchanged.
Domain rescale_measure(const Domain& d, int k);

// ---- file I/O -------------------------------------------------------------

/// Text format: header "pgraph v1", then "v <id> <measure>" and
/// "e <id1> <id2> <weight>" lines; '#' starts a comment.
WeightedGraph load_graph(const std::filesystem::path& path);
void save_graph(const WeightedGraph& g, const std::filesystem::path& path);

/// Domain files list interior vertex ids, one per line.
VertexSubset load_vertex_list(const std::filesystem::path& path,
                              const WeightedGraph& host);
void save_vertex_list(const VertexSubset& s, const std::filesystem::path& path);

}  // namespace pcap
