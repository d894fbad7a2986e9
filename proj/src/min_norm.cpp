#include <algorithm>
#include <cmath>
#include <limits>

#include "poa/equilibrium.hpp"
#include "poa/least_squares.hpp"

namespace poa {

namespace {

LoadInterval objective_level_set(const Instance& inst, Objective objective, EdgeIndex e, double x) {
  const CostFunction& c = inst.costs[e];
  if (objective == Objective::Beckmann) return level_set(c, x);
  if (is_constant(c)) return {};
  if (std::holds_alternative<PiecewiseLinear>(c.form())) return level_set(marginal(c), x);
  return {x, x};
}

}  // namespace

std::vector<std::size_t> shortest_paths(const Eigen::VectorXd& path_costs, double lambda, double active_eps) {
  const double thr = lambda == 0.0 ? 1e-9 : active_eps * std::abs(lambda);
  std::vector<std::size_t> out;
  for (Eigen::Index p = 0; p < path_costs.size(); ++p) {
    if (path_costs(p) <= lambda + thr) out.push_back(static_cast<std::size_t>(p));
  }
  return out;
}

Eigen::VectorXd min_norm_flows(const Instance& inst, Objective objective, const Eigen::VectorXd& flows,
                               const std::vector<std::size_t>& face) {
  const auto& Z = inst.paths.incidence;
  const auto k = static_cast<Eigen::Index>(face.size());
  if (k <= 1) return flows;

  std::vector<char> in_face(inst.path_count(), 0);
  for (auto p : face) in_face[p] = 1;
  Eigen::VectorXd fixed_flows = flows;
  for (auto p : face) fixed_flows(static_cast<Eigen::Index>(p)) = 0.0;
  const Eigen::VectorXd loads = Z * flows;
  const Eigen::VectorXd fixed_loads = Z * fixed_flows;
  const double mu = flows.sum();

  Eigen::MatrixXd Zf(Z.rows(), k);
  for (Eigen::Index j = 0; j < k; ++j) Zf.col(j) = Z.col(static_cast<Eigen::Index>(face[static_cast<std::size_t>(j)]));

  std::vector<Eigen::VectorXd> eq_rows;
  std::vector<double> eq_rhs;
  std::vector<Eigen::VectorXd> ineq_rows;
  std::vector<double> ineq_rhs;
  for (Eigen::Index e = 0; e < Z.rows(); ++e) {
    if (Zf.row(e).sum() == 0.0) continue;
    const double x = std::max(0.0, loads(e));
    const LoadInterval level = objective_level_set(inst, objective, static_cast<EdgeIndex>(e), x);
    const double base = fixed_loads(e);
    if (level.is_point()) {
      eq_rows.emplace_back(Zf.row(e).transpose());
      eq_rhs.push_back(x - base);
      continue;
    }
    if (level.lo > 0.0) {
      ineq_rows.emplace_back(Zf.row(e).transpose());
      ineq_rhs.push_back(level.lo - base);
    }
    if (std::isfinite(level.hi)) {
      ineq_rows.emplace_back(-Zf.row(e).transpose());
      ineq_rhs.push_back(base - level.hi);
    }
  }
  eq_rows.emplace_back(Eigen::VectorXd::Ones(k));
  eq_rhs.push_back(mu - fixed_flows.sum());

  Eigen::MatrixXd Q(static_cast<Eigen::Index>(eq_rows.size()), k);
  Eigen::VectorXd g(Q.rows());
  for (std::size_t i = 0; i < eq_rows.size(); ++i) {
    Q.row(static_cast<Eigen::Index>(i)) = eq_rows[i].transpose();
    g(static_cast<Eigen::Index>(i)) = eq_rhs[i];
  }
  const auto ni = static_cast<Eigen::Index>(ineq_rows.size());
  Eigen::MatrixXd G(k + ni, k);
  Eigen::VectorXd h(k + ni);
  G.topRows(k).setIdentity();
  h.head(k).setZero();
  for (Eigen::Index i = 0; i < ni; ++i) {
    G.row(k + i) = ineq_rows[static_cast<std::size_t>(i)].transpose();
    h(k + i) = ineq_rhs[static_cast<std::size_t>(i)];
  }

  const auto sol = min_norm_point(Q, g, G, h);
  if (!sol) return flows;
  const double floor = -1e-9 * std::max(1.0, mu);
  if ((sol->array() < floor).any()) return flows;

  Eigen::VectorXd out = fixed_flows;
  for (Eigen::Index j = 0; j < k; ++j) {
    out(static_cast<Eigen::Index>(face[static_cast<std::size_t>(j)])) = std::max(0.0, (*sol)(j));
  }
  // Reject selections that moved loads on fixed-cost edges noticeably.
  const Eigen::VectorXd new_loads = Z * out;
  for (Eigen::Index e = 0; e < Z.rows(); ++e) {
    const double x = std::max(0.0, loads(e));
    const LoadInterval level = objective_level_set(inst, objective, static_cast<EdgeIndex>(e), x);
    const double slack = 1e-9 * std::max(1.0, mu);
    if (new_loads(e) < level.lo - slack || new_loads(e) > level.hi + slack) return flows;
  }
  return out;
}

}  // namespace poa
