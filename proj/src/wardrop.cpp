#include <algorithm>
#include <cmath>

#include "poa/equilibrium.hpp"

namespace poa {

double link_cost(const Instance& inst, Objective objective, EdgeIndex e, double x) {
  const CostFunction& c = inst.costs[e];
  return objective == Objective::Beckmann ? evaluate(c, x) : marginal_value(c, x);
}

double link_potential(const Instance& inst, Objective objective, EdgeIndex e, double x) {
  const CostFunction& c = inst.costs[e];
  return objective == Objective::Beckmann ? primitive(c, x) : x * evaluate(c, x);
}

double social_cost(const Instance& inst, const Eigen::VectorXd& loads) {
  double total = 0.0;
  for (Eigen::Index e = 0; e < loads.size(); ++e) {
    const double x = std::max(0.0, loads(e));
    total += x * evaluate(inst.costs[static_cast<std::size_t>(e)], x);
  }
  return total;
}

void finalize_solution(const Instance& inst, FlowSolution& sol, double active_eps) {
  const auto& Z = inst.paths.incidence;
  sol.edge_loads = (Z * sol.path_flows).cwiseMax(0.0);
  sol.edge_costs.resize(sol.edge_loads.size());
  sol.potential = 0.0;
  for (Eigen::Index e = 0; e < sol.edge_loads.size(); ++e) {
    const auto edge = static_cast<EdgeIndex>(e);
    sol.edge_costs(e) = link_cost(inst, sol.objective, edge, sol.edge_loads(e));
    sol.potential += link_potential(inst, sol.objective, edge, sol.edge_loads(e));
  }
  const Eigen::VectorXd pc = Z.transpose() * sol.edge_costs;
  sol.lambda = pc.minCoeff();
  sol.social_cost = social_cost(inst, sol.edge_loads);
  sol.duality_gap = std::max(0.0, sol.path_flows.dot(pc) - sol.demand * sol.lambda);

  std::vector<char> active(inst.edge_count(), 0);
  for (auto p : shortest_paths(pc, sol.lambda, active_eps)) {
    for (EdgeIndex e : inst.paths.paths[p]) active[e] = 1;
  }
  sol.active_edges.clear();
  for (EdgeIndex e = 0; e < active.size(); ++e) {
    if (active[e]) sol.active_edges.push_back(e);
  }
}

WardropReport verify_wardrop(const Instance& inst, const FlowSolution& sol, double tol) {
  WardropReport report;
  const auto& Z = inst.paths.incidence;
  const Eigen::VectorXd& f = sol.path_flows;
  const Eigen::VectorXd loads = (Z * f).cwiseMax(0.0);
  Eigen::VectorXd tau(loads.size());
  for (Eigen::Index e = 0; e < loads.size(); ++e) {
    tau(e) = link_cost(inst, sol.objective, static_cast<EdgeIndex>(e), loads(e));
  }
  const Eigen::VectorXd pc = Z.transpose() * tau;
  report.lambda = pc.minCoeff();
  report.slack = pc.array() - report.lambda;

  const double cost_tol = tol * std::max(1.0, std::abs(report.lambda));
  const double flow_tol = tol * std::max(1.0, sol.demand);
  for (Eigen::Index p = 0; p < f.size(); ++p) {
    const bool negative = f(p) < -flow_tol;
    const bool used_but_long = f(p) > flow_tol && report.slack(p) > cost_tol;
    if (negative || used_but_long) report.violations.push_back(static_cast<std::size_t>(p));
  }
  report.conservation_error = std::abs(f.sum() - sol.demand);
  const double total = f.dot(pc);
  report.same_cost_error = std::abs(total - sol.demand * report.lambda);
  report.same_cost_ok = report.same_cost_error <= tol * std::max(1.0, std::abs(total));
  report.ok = report.violations.empty() && report.conservation_error <= flow_tol && report.same_cost_ok;
  return report;
}

Regularity check_regularity(const FlowSolution& sol, double eps_flow) {
  Regularity out;
  for (EdgeIndex e : sol.active_edges) {
    if (sol.edge_loads(static_cast<Eigen::Index>(e)) <= eps_flow) out.witness.push_back(e);
  }
  out.regular = out.witness.empty();
  return out;
}

}  // namespace poa
