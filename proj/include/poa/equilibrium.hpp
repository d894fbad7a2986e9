#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "poa/instance.hpp"

namespace poa {

/// Which potential a solver minimizes: the Beckmann potential (Wardrop
/// equilibrium) or the social cost (optimum, i.e. equilibrium of marginal costs).
enum class Objective { Beckmann, Social };

enum class Method { Auto, FrankWolfe, AffineExact };

struct SolverOptions {
  double tol = 1e-10;
  std::size_t max_iterations = 1'000'000;
  /// Paths within active_eps * lambda of the shortest count as shortest
  /// (absolute 1e-9 when lambda is zero).
  double active_eps = 1e-7;
  Method method = Method::Auto;
};

struct FlowSolution {
  Objective objective = Objective::Beckmann;
  double demand = 0.0;
  Eigen::VectorXd path_flows;
  Eigen::VectorXd edge_loads;
  /// Per-edge cost seen by the solver: c_e(x_e), or the marginal cost for optima.
  Eigen::VectorXd edge_costs;
  double lambda = 0.0;
  std::vector<EdgeIndex> active_edges;
  /// Beckmann value V for equilibria, minimum social cost V* for optima.
  double potential = 0.0;
  double social_cost = 0.0;
  double duality_gap = 0.0;
  std::size_t iterations = 0;
};

using EquilibriumSolution = FlowSolution;
using OptimumSolution = FlowSolution;

EquilibriumSolution solve_equilibrium(const Instance& inst, double mu, const SolverOptions& opts = {});
OptimumSolution solve_optimum(const Instance& inst, double mu, const SolverOptions& opts = {});

/// Numeric solver for either objective: path equilibration with exact line
/// searches, followed by min-norm selection on the equilibrium face. Starts
/// from `start` when given (path flows summing to mu), otherwise from the
/// free-flow shortest path.
FlowSolution solve_frank_wolfe(const Instance& inst, double mu, Objective objective, const SolverOptions& opts = {},
                               const Eigen::VectorXd* start = nullptr);

/// Exact equilibrium for all-affine instances by support enumeration. `seed`
/// is tried first when given. Returns the min-norm path flow.
EquilibriumSolution solve_affine_exact(const Instance& inst, double mu, const SolverOptions& opts = {},
                                       const std::vector<std::size_t>* seed = nullptr);

/// Per-edge link functions of an objective.
double link_cost(const Instance& inst, Objective objective, EdgeIndex e, double x);
double link_potential(const Instance& inst, Objective objective, EdgeIndex e, double x);

/// Fills loads, costs, lambda, active set, potential, social cost and gap
/// from the path flows.
void finalize_solution(const Instance& inst, FlowSolution& sol, double active_eps);

/// Among flows on `face` paths that keep every edge cost unchanged, the one
/// with minimum Euclidean norm. Returns `flows` when no such selection is found.
Eigen::VectorXd min_norm_flows(const Instance& inst, Objective objective, const Eigen::VectorXd& flows,
                               const std::vector<std::size_t>& face);

/// Paths whose cost is within the active threshold of the minimum.
std::vector<std::size_t> shortest_paths(const Eigen::VectorXd& path_costs, double lambda, double active_eps);

double social_cost(const Instance& inst, const Eigen::VectorXd& edge_loads);

struct WardropReport {
  double lambda = 0.0;
  Eigen::VectorXd slack;  // c_p - lambda
  std::vector<std::size_t> violations;
  double conservation_error = 0.0;  // |sum f - mu|
  double same_cost_error = 0.0;     // |SC - mu lambda|
  bool same_cost_ok = true;
  bool ok = true;
};

/// Recomputes loads and path costs from the path flows and checks the
/// Wardrop conditions with tolerance tol * max(1, lambda).
WardropReport verify_wardrop(const Instance& inst, const FlowSolution& sol, double tol);

struct Regularity {
  bool regular = true;
  std::vector<EdgeIndex> witness;  // active edges carrying no load
};

Regularity check_regularity(const FlowSolution& sol, double eps_flow = 1e-9);

/// Recursive equilibrium of a series-parallel network.
EquilibriumSolution sp_equilibrium(const Instance& inst, const SPDecomposition& dec, double mu,
                                   const SolverOptions& opts = {});

}  // namespace poa
