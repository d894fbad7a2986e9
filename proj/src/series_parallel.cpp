#include <algorithm>
#include <map>
#include <utility>

#include "poa/network.hpp"

namespace poa {

namespace {

struct Arc {
  VertexIndex tail;
  VertexIndex head;
  std::size_t node;
  bool alive = true;
};

class Reducer {
 public:
  explicit Reducer(const Network& net) : net_(net) {
    for (EdgeIndex e = 0; e < net.edge_count(); ++e) {
      dec_.nodes.push_back(SPNode{SPNode::Kind::Leaf, e, 0, 0});
      arcs_.push_back(Arc{net.edge(e).tail, net.edge(e).head, e});
    }
  }

  std::optional<SPDecomposition> run() {
    if (arcs_.empty()) return std::nullopt;
    for (VertexIndex v = 0; v < net_.vertex_count(); ++v) {
      if (v == net_.origin() || v == net_.destination()) continue;
      const bool touched = std::any_of(arcs_.begin(), arcs_.end(),
                                       [v](const Arc& a) { return a.tail == v || a.head == v; });
      if (!touched) return std::nullopt;
    }
    while (merge_parallel() || merge_series()) {
    }
    std::vector<const Arc*> alive;
    for (const auto& a : arcs_) {
      if (a.alive) alive.push_back(&a);
    }
    if (alive.size() != 1) return std::nullopt;
    if (alive[0]->tail != net_.origin() || alive[0]->head != net_.destination()) return std::nullopt;
    dec_.root = alive[0]->node;
    return std::move(dec_);
  }

 private:
  std::size_t add_node(SPNode::Kind kind, std::size_t left, std::size_t right) {
    dec_.nodes.push_back(SPNode{kind, 0, left, right});
    return dec_.nodes.size() - 1;
  }

  bool merge_parallel() {
    std::map<std::pair<VertexIndex, VertexIndex>, std::size_t> first;
    bool changed = false;
    for (std::size_t i = 0; i < arcs_.size(); ++i) {
      Arc& a = arcs_[i];
      if (!a.alive) continue;
      auto [it, inserted] = first.emplace(std::make_pair(a.tail, a.head), i);
      if (inserted) continue;
      Arc& keep = arcs_[it->second];
      keep.node = add_node(SPNode::Kind::Parallel, keep.node, a.node);
      a.alive = false;
      changed = true;
    }
    return changed;
  }

  bool merge_series() {
    for (VertexIndex v = 0; v < net_.vertex_count(); ++v) {
      if (v == net_.origin() || v == net_.destination()) continue;
      std::vector<std::size_t> in;
      std::vector<std::size_t> out;
      for (std::size_t i = 0; i < arcs_.size(); ++i) {
        if (!arcs_[i].alive) continue;
        if (arcs_[i].head == v) in.push_back(i);
        if (arcs_[i].tail == v) out.push_back(i);
      }
      if (in.size() != 1 || out.size() != 1) continue;
      Arc& first = arcs_[in[0]];
      Arc& second = arcs_[out[0]];
      if (first.tail == second.head) continue;
      first.node = add_node(SPNode::Kind::Series, first.node, second.node);
      first.head = second.head;
      second.alive = false;
      return true;
    }
    return false;
  }

  const Network& net_;
  SPDecomposition dec_;
  std::vector<Arc> arcs_;
};

void collect(const SPDecomposition& dec, std::size_t node, std::vector<EdgeIndex>& out) {
  const SPNode& n = dec.node(node);
  if (n.kind == SPNode::Kind::Leaf) {
    out.push_back(n.edge);
    return;
  }
  collect(dec, n.left, out);
  collect(dec, n.right, out);
}

}  // namespace

std::optional<SPDecomposition> decompose_series_parallel(const Network& net) { return Reducer(net).run(); }

std::vector<EdgeIndex> sp_edges(const SPDecomposition& dec, std::size_t node) {
  std::vector<EdgeIndex> out;
  collect(dec, node, out);
  return out;
}

}  // namespace poa
