#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "poa/equilibrium.hpp"
#include "poa/errors.hpp"
#include "poa/least_squares.hpp"

namespace poa {

namespace {

class SPSolver {
 public:
  SPSolver(const Instance& inst, const SPDecomposition& dec) : inst_(inst), dec_(dec) {}

  // Common cost of the used routes through `node` when it carries m.
  double lambda(std::size_t node, double m) const {
    const SPNode& n = dec_.node(node);
    switch (n.kind) {
      case SPNode::Kind::Leaf: return evaluate(inst_.costs[n.edge], m);
      case SPNode::Kind::Series: return lambda(n.left, m) + lambda(n.right, m);
      case SPNode::Kind::Parallel: {
        const double g = split(n, m);
        return std::min(lambda(n.left, g), lambda(n.right, m - g));
      }
    }
    return 0.0;
  }

  // Load sent through the left branch: inf{x : lambda_left(x) >= lambda_right(m - x)}.
  double split(const SPNode& n, double m) const {
    if (m <= 0.0) return 0.0;
    auto h = [&](double x) { return lambda(n.left, x) - lambda(n.right, std::max(0.0, m - x)); };
    const double h0 = h(0.0);
    if (h0 >= 0.0) return 0.0;
    const double hm = h(m);
    if (hm < 0.0) return m;
    std::uintmax_t iters = 200;
    try {
      const auto [lo, hi] = boost::math::tools::toms748_solve(h, 0.0, m, h0, hm,
                                                              boost::math::tools::eps_tolerance<double>(52), iters);
      return std::clamp(0.5 * (lo + hi), 0.0, m);
    } catch (const std::exception& ex) {
      throw Error(ErrorKind::BisectionFailure, std::string("parallel split: ") + ex.what());
    }
  }

  void assign(std::size_t node, double m, Eigen::VectorXd& loads) const {
    const SPNode& n = dec_.node(node);
    switch (n.kind) {
      case SPNode::Kind::Leaf:
        loads(static_cast<Eigen::Index>(n.edge)) = m;
        return;
      case SPNode::Kind::Series:
        assign(n.left, m, loads);
        assign(n.right, m, loads);
        return;
      case SPNode::Kind::Parallel: {
        const double g = split(n, m);
        assign(n.left, g, loads);
        assign(n.right, m - g, loads);
        return;
      }
    }
  }

 private:
  const Instance& inst_;
  const SPDecomposition& dec_;
};

// Greedy decomposition of acyclic edge loads into path flows, used when the
// min-norm selection fails.
Eigen::VectorXd decompose_loads(const Instance& inst, const Eigen::VectorXd& loads, double mu) {
  const auto& Z = inst.paths.incidence;
  Eigen::VectorXd residual = loads;
  Eigen::VectorXd f = Eigen::VectorXd::Zero(Z.cols());
  double left = mu;
  for (std::size_t round = 0; round < inst.path_count() && left > 0.0; ++round) {
    Eigen::Index best = -1;
    double best_flow = 0.0;
    for (Eigen::Index p = 0; p < Z.cols(); ++p) {
      double bottleneck = left;
      for (EdgeIndex e : inst.paths.paths[static_cast<std::size_t>(p)]) {
        bottleneck = std::min(bottleneck, residual(static_cast<Eigen::Index>(e)));
      }
      if (bottleneck > best_flow) {
        best_flow = bottleneck;
        best = p;
      }
    }
    if (best < 0) break;
    f(best) += best_flow;
    left -= best_flow;
    for (EdgeIndex e : inst.paths.paths[static_cast<std::size_t>(best)]) residual(static_cast<Eigen::Index>(e)) -= best_flow;
  }
  return f;
}

}  // namespace

EquilibriumSolution sp_equilibrium(const Instance& inst, const SPDecomposition& dec, double mu,
                                   const SolverOptions& opts) {
  if (!std::isfinite(mu) || mu < 0.0) throw Error(ErrorKind::InvalidArgument, "demand must be >= 0");
  const SPSolver solver(inst, dec);
  Eigen::VectorXd loads = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(inst.edge_count()));
  solver.assign(dec.root, mu, loads);

  EquilibriumSolution sol;
  sol.objective = Objective::Beckmann;
  sol.demand = mu;

  const auto& Z = inst.paths.incidence;
  const auto n = Z.cols();
  Eigen::MatrixXd Q(Z.rows() + 1, n);
  Q.topRows(Z.rows()) = Z;
  Q.row(Z.rows()).setOnes();
  Eigen::VectorXd g(Z.rows() + 1);
  g.head(Z.rows()) = loads;
  g(Z.rows()) = mu;
  const auto f = min_norm_point(Q, g, Eigen::MatrixXd::Identity(n, n), Eigen::VectorXd::Zero(n));
  sol.path_flows = f ? Eigen::VectorXd(f->cwiseMax(0.0)) : decompose_loads(inst, loads, mu);
  finalize_solution(inst, sol, opts.active_eps);
  sol.edge_loads = loads;
  return sol;
}

}  // namespace poa
