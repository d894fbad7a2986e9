#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace poa {

using VertexIndex = std::size_t;
using EdgeIndex = std::size_t;

struct Edge {
  std::string id;
  VertexIndex tail = 0;
  VertexIndex head = 0;
};

/// Edge as given by the user, with vertex names instead of indices.
struct EdgeSpec {
  std::string id;
  std::string tail;
  std::string head;
};

/// Directed multigraph with a single origin-destination pair. Immutable once
/// constructed; the constructor rejects self-loops, duplicate ids, unknown
/// vertices and origin == destination.
class Network {
 public:
  Network(std::vector<std::string> vertices, const std::vector<EdgeSpec>& edges, const std::string& origin,
          const std::string& destination);

  std::size_t vertex_count() const noexcept { return vertices_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<std::string>& vertices() const noexcept { return vertices_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const Edge& edge(EdgeIndex e) const { return edges_.at(e); }
  VertexIndex origin() const noexcept { return origin_; }
  VertexIndex destination() const noexcept { return destination_; }

  std::optional<VertexIndex> find_vertex(const std::string& name) const;
  std::optional<EdgeIndex> find_edge(const std::string& id) const;

  /// Outgoing edges of v, sorted by edge id.
  const std::vector<EdgeIndex>& out_edges(VertexIndex v) const { return out_.at(v); }

 private:
  std::vector<std::string> vertices_;
  std::vector<Edge> edges_;
  VertexIndex origin_ = 0;
  VertexIndex destination_ = 0;
  std::unordered_map<std::string, VertexIndex> vertex_index_;
  std::unordered_map<std::string, EdgeIndex> edge_index_;
  std::vector<std::vector<EdgeIndex>> out_;
};

/// A simple O-D path as a sequence of edge indices.
using Path = std::vector<EdgeIndex>;

struct PathSet {
  std::vector<Path> paths;
  /// Edge-path 0/1 incidence: rows are edges, columns are paths.
  Eigen::MatrixXd incidence;

  std::size_t size() const noexcept { return paths.size(); }
};

inline constexpr std::size_t kDefaultPathCap = 4096;

/// All simple O-D paths, ordered lexicographically by their edge-id sequence.
/// Throws PathExplosion beyond `cap` paths and NoPath when there are none.
PathSet enumerate_paths(const Network& net, std::size_t cap = kDefaultPathCap);

/// "e1>e4>e7": edge ids joined by '>'.
std::string path_label(const Network& net, const Path& path);

/// Vertex names visited by the path, origin first.
std::vector<std::string> path_vertices(const Network& net, const Path& path);

// --- series-parallel structure ---------------------------------------------

struct SPNode {
  enum class Kind { Leaf, Series, Parallel };
  Kind kind = Kind::Leaf;
  EdgeIndex edge = 0;  // Leaf only
  std::size_t left = 0;
  std::size_t right = 0;
};

/// Decomposition tree; for Series nodes `left` is traversed before `right`.
struct SPDecomposition {
  std::vector<SPNode> nodes;
  std::size_t root = 0;

  const SPNode& node(std::size_t i) const { return nodes.at(i); }
};

/// nullopt when the network is not series-parallel between its origin and
/// destination (this includes networks with vertices or edges off every O-D
/// path).
std::optional<SPDecomposition> decompose_series_parallel(const Network& net);

/// Edges under `node`, in tree order.
std::vector<EdgeIndex> sp_edges(const SPDecomposition& dec, std::size_t node);

}  // namespace poa
