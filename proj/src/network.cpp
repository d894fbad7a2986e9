#include "poa/network.hpp"

#include <algorithm>

#include "poa/errors.hpp"

namespace poa {

Network::Network(std::vector<std::string> vertices, const std::vector<EdgeSpec>& edges, const std::string& origin,
                 const std::string& destination)
    : vertices_(std::move(vertices)) {
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (!vertex_index_.emplace(vertices_[i], i).second) {
      throw Error(ErrorKind::InvalidNetwork, "duplicate vertex '" + vertices_[i] + "'");
    }
  }
  auto lookup = [this](const std::string& name, const std::string& role) {
    auto it = vertex_index_.find(name);
    if (it == vertex_index_.end()) {
      throw Error(ErrorKind::InvalidNetwork, role + " '" + name + "' is not a declared vertex");
    }
    return it->second;
  };
  origin_ = lookup(origin, "origin");
  destination_ = lookup(destination, "destination");
  if (origin_ == destination_) throw Error(ErrorKind::InvalidNetwork, "origin and destination coincide");

  edges_.reserve(edges.size());
  for (const auto& spec : edges) {
    if (spec.id.empty()) throw Error(ErrorKind::InvalidNetwork, "edge id must be non-empty");
    const VertexIndex t = lookup(spec.tail, "tail of edge '" + spec.id + "'");
    const VertexIndex h = lookup(spec.head, "head of edge '" + spec.id + "'");
    if (t == h) throw Error(ErrorKind::InvalidNetwork, "edge '" + spec.id + "' is a self-loop");
    if (!edge_index_.emplace(spec.id, edges_.size()).second) {
      throw Error(ErrorKind::InvalidNetwork, "duplicate edge id '" + spec.id + "'");
    }
    edges_.push_back(Edge{spec.id, t, h});
  }

  out_.assign(vertices_.size(), {});
  for (EdgeIndex e = 0; e < edges_.size(); ++e) out_[edges_[e].tail].push_back(e);
  for (auto& list : out_) {
    std::sort(list.begin(), list.end(), [this](EdgeIndex a, EdgeIndex b) { return edges_[a].id < edges_[b].id; });
  }
}

std::optional<VertexIndex> Network::find_vertex(const std::string& name) const {
  auto it = vertex_index_.find(name);
  if (it == vertex_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<EdgeIndex> Network::find_edge(const std::string& id) const {
  auto it = edge_index_.find(id);
  if (it == edge_index_.end()) return std::nullopt;
  return it->second;
}

namespace {

struct PathSearch {
  const Network& net;
  std::size_t cap;
  std::vector<char> on_path;
  Path current;
  std::vector<Path> found;

  void visit(VertexIndex v) {
    if (v == net.destination()) {
      if (found.size() == cap) {
        throw Error(ErrorKind::PathExplosion, "more than " + std::to_string(cap) + " O-D paths");
      }
      found.push_back(current);
      return;
    }
    on_path[v] = 1;
    for (EdgeIndex e : net.out_edges(v)) {
      const VertexIndex next = net.edge(e).head;
      if (on_path[next]) continue;
      current.push_back(e);
      visit(next);
      current.pop_back();
    }
    on_path[v] = 0;
  }
};

}  // namespace

PathSet enumerate_paths(const Network& net, std::size_t cap) {
  PathSearch search{net, cap, std::vector<char>(net.vertex_count(), 0), {}, {}};
  search.visit(net.origin());
  if (search.found.empty()) throw Error(ErrorKind::NoPath, "no path from origin to destination");

  PathSet set;
  set.paths = std::move(search.found);
  set.incidence = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(net.edge_count()),
                                        static_cast<Eigen::Index>(set.paths.size()));
  for (std::size_t p = 0; p < set.paths.size(); ++p) {
    for (EdgeIndex e : set.paths[p]) set.incidence(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(p)) = 1.0;
  }
  return set;
}

std::string path_label(const Network& net, const Path& path) {
  std::string out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i > 0) out += '>';
    out += net.edge(path[i]).id;
  }
  return out;
}

std::vector<std::string> path_vertices(const Network& net, const Path& path) {
  std::vector<std::string> out{net.vertices()[net.origin()]};
  for (EdgeIndex e : path) out.push_back(net.vertices()[net.edge(e).head]);
  return out;
}

}  // namespace poa
