#pragma once

#include <vector>

#include <Eigen/Dense>

#include "poa/costs.hpp"
#include "poa/network.hpp"

namespace poa {

/// A routing game: network, one cost per edge (indexed like the edges) and
/// the enumerated path set.
struct Instance {
  Network network;
  std::vector<CostFunction> costs;
  PathSet paths;

  /// Set when every cost is affine. Then A = Z^T diag(a) Z and d = Z^T b give
  /// path costs as A f + d.
  bool all_affine = false;
  Eigen::VectorXd slopes;
  Eigen::VectorXd intercepts;
  Eigen::MatrixXd A;
  Eigen::VectorXd d;

  std::size_t path_count() const noexcept { return paths.size(); }
  std::size_t edge_count() const noexcept { return network.edge_count(); }
};

/// Throws InvalidArgument when the number of costs does not match the edges.
Instance make_instance(Network net, std::vector<CostFunction> costs, std::size_t path_cap = kDefaultPathCap);

/// Same network with every cost replaced by its marginal cost.
Instance marginal_instance(const Instance& inst);

Eigen::VectorXd edge_loads(const Instance& inst, const Eigen::VectorXd& path_flows);

/// Path costs c_p = sum of c_e(x_e) over the edges of p.
Eigen::VectorXd path_costs(const Instance& inst, const Eigen::VectorXd& edge_loads);

}  // namespace poa
