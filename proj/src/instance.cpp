#include "poa/instance.hpp"

#include <algorithm>
#include <string>

#include "poa/errors.hpp"

namespace poa {

Instance make_instance(Network net, std::vector<CostFunction> costs, std::size_t path_cap) {
  if (costs.size() != net.edge_count()) {
    throw Error(ErrorKind::InvalidArgument, "expected " + std::to_string(net.edge_count()) + " costs, got " +
                                                std::to_string(costs.size()));
  }
  PathSet paths = enumerate_paths(net, path_cap);
  Instance inst{std::move(net), std::move(costs), std::move(paths), false, {}, {}, {}, {}};

  inst.all_affine = true;
  for (const auto& c : inst.costs) inst.all_affine = inst.all_affine && c.is_affine();
  if (inst.all_affine) {
    const auto m = static_cast<Eigen::Index>(inst.edge_count());
    inst.slopes.resize(m);
    inst.intercepts.resize(m);
    for (Eigen::Index e = 0; e < m; ++e) {
      const auto& a = std::get<Affine>(inst.costs[static_cast<std::size_t>(e)].form());
      inst.slopes(e) = a.slope;
      inst.intercepts(e) = a.intercept;
    }
    const auto& Z = inst.paths.incidence;
    inst.A = Z.transpose() * inst.slopes.asDiagonal() * Z;
    inst.d = Z.transpose() * inst.intercepts;
  }
  return inst;
}

Instance marginal_instance(const Instance& inst) {
  std::vector<CostFunction> costs;
  costs.reserve(inst.costs.size());
  for (const auto& c : inst.costs) costs.push_back(marginal(c));
  Instance out = inst;
  out.costs = std::move(costs);
  if (out.all_affine) {
    out.slopes *= 2.0;
    out.A *= 2.0;
  }
  return out;
}

Eigen::VectorXd edge_loads(const Instance& inst, const Eigen::VectorXd& path_flows) {
  return inst.paths.incidence * path_flows;
}

Eigen::VectorXd path_costs(const Instance& inst, const Eigen::VectorXd& loads) {
  Eigen::VectorXd tau(loads.size());
  for (Eigen::Index e = 0; e < loads.size(); ++e) {
    tau(e) = evaluate(inst.costs[static_cast<std::size_t>(e)], std::max(0.0, loads(e)));
  }
  return inst.paths.incidence.transpose() * tau;
}

}  // namespace poa
