#include <algorithm>
#include <cmath>
#include <optional>
#include <set>

#include "poa/equilibrium.hpp"
#include "poa/errors.hpp"

namespace poa {

namespace {

constexpr std::size_t kMaxSupportAttempts = std::size_t{1} << 16;

// Equilibrium with support S from the KKT system
//   A_SS f_S - lambda 1 = -d_S,   1^T f_S = mu,
// accepted only when it is nonnegative and no path outside S is shorter.
std::optional<Eigen::VectorXd> try_support(const Instance& inst, double mu, const std::vector<std::size_t>& S) {
  const auto k = static_cast<Eigen::Index>(S.size());
  if (k == 0) return std::nullopt;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(k + 1, k + 1);
  Eigen::VectorXd rhs(k + 1);
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto pi = static_cast<Eigen::Index>(S[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < k; ++j) K(i, j) = inst.A(pi, static_cast<Eigen::Index>(S[static_cast<std::size_t>(j)]));
    K(i, k) = -1.0;
    K(k, i) = 1.0;
    rhs(i) = -inst.d(pi);
  }
  rhs(k) = mu;
  const Eigen::VectorXd u = K.completeOrthogonalDecomposition().solve(rhs);
  const double scale = std::max({1.0, rhs.cwiseAbs().maxCoeff(), std::abs(u(k))});
  if ((K * u - rhs).cwiseAbs().maxCoeff() > 1e-9 * scale) return std::nullopt;

  const double flow_floor = -1e-12 * std::max(1.0, mu);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(inst.path_count()));
  for (Eigen::Index i = 0; i < k; ++i) {
    if (u(i) < flow_floor) return std::nullopt;
    f(static_cast<Eigen::Index>(S[static_cast<std::size_t>(i)])) = std::max(0.0, u(i));
  }
  const Eigen::VectorXd c = inst.A * f + inst.d;
  const double lambda = u(k);
  const double cost_floor = lambda - 1e-10 * std::max(1.0, std::abs(lambda));
  if ((c.array() < cost_floor).any()) return std::nullopt;
  return f;
}

// Calls visit on every k-subset of items for k = 1, 2, ...; stops when visit
// returns true or the attempt budget runs out.
template <class Visit>
bool for_each_subset(const std::vector<std::size_t>& items, std::size_t& budget, Visit&& visit) {
  const std::size_t n = items.size();
  for (std::size_t k = 1; k <= n; ++k) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
      if (budget == 0) return false;
      --budget;
      std::vector<std::size_t> subset(k);
      for (std::size_t i = 0; i < k; ++i) subset[i] = items[idx[i]];
      if (visit(subset)) return true;
      std::size_t i = k;
      while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return false;
}

bool social_cost_convex(const Instance& inst) {
  return std::none_of(inst.costs.begin(), inst.costs.end(), [](const CostFunction& c) {
    return std::holds_alternative<PiecewiseLinear>(c.form()) && !is_constant(c);
  });
}

// With piecewise-linear costs the social cost need not be convex, so the
// descent is restarted from the equilibrium and from every single path; the
// lowest social cost wins.
OptimumSolution solve_social_numeric(const Instance& inst, double mu, const SolverOptions& opts) {
  if (social_cost_convex(inst) || mu == 0.0) return solve_frank_wolfe(inst, mu, Objective::Social, opts);
  const auto n = static_cast<Eigen::Index>(inst.path_count());
  std::vector<Eigen::VectorXd> starts;
  starts.push_back(solve_frank_wolfe(inst, mu, Objective::Beckmann, opts).path_flows);
  for (Eigen::Index p = 0; p < n && p < 64; ++p) {
    starts.push_back(Eigen::VectorXd::Zero(n));
    starts.back()(p) = mu;
  }
  starts.push_back(Eigen::VectorXd::Constant(n, mu / static_cast<double>(n)));
  std::optional<OptimumSolution> best;
  for (const auto& start : starts) {
    OptimumSolution sol = solve_frank_wolfe(inst, mu, Objective::Social, opts, &start);
    if (!best || sol.social_cost < best->social_cost) best = std::move(sol);
  }
  return *best;
}

}  // namespace

EquilibriumSolution solve_affine_exact(const Instance& inst, double mu, const SolverOptions& opts,
                                       const std::vector<std::size_t>* seed) {
  if (!inst.all_affine) throw Error(ErrorKind::InvalidArgument, "exact solver needs affine costs on every edge");
  if (!std::isfinite(mu) || mu < 0.0) throw Error(ErrorKind::InvalidArgument, "demand must be >= 0");

  EquilibriumSolution sol;
  sol.objective = Objective::Beckmann;
  sol.demand = mu;
  sol.path_flows = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(inst.path_count()));
  if (mu == 0.0) {
    finalize_solution(inst, sol, opts.active_eps);
    return sol;
  }

  std::optional<Eigen::VectorXd> found;
  std::set<std::vector<std::size_t>> tried;
  auto attempt = [&](std::vector<std::size_t> S) {
    std::sort(S.begin(), S.end());
    if (!tried.insert(S).second) return false;
    found = try_support(inst, mu, S);
    return found.has_value();
  };

  if (seed != nullptr && !seed->empty()) attempt(*seed);

  if (!found) {
    std::vector<std::size_t> support;
    std::vector<std::size_t> near;
    try {
      SolverOptions fw = opts;
      fw.tol = 1e-9;
      fw.max_iterations = 100000;
      const FlowSolution approx = solve_frank_wolfe(inst, mu, Objective::Beckmann, fw);
      const Eigen::VectorXd pc = inst.A * approx.path_flows + inst.d;
      for (Eigen::Index p = 0; p < pc.size(); ++p) {
        if (approx.path_flows(p) > 1e-9 * mu) support.push_back(static_cast<std::size_t>(p));
        if (pc(p) <= approx.lambda + 1e-6 * std::max(1.0, approx.lambda)) near.push_back(static_cast<std::size_t>(p));
      }
    } catch (const Error&) {
    }
    if (!support.empty()) attempt(support);
    std::size_t budget = kMaxSupportAttempts;
    if (!found && !near.empty() && near.size() <= 16) {
      for_each_subset(near, budget, [&](const std::vector<std::size_t>& S) { return attempt(S); });
    }
    if (!found) {
      std::vector<std::size_t> all(inst.path_count());
      for (std::size_t p = 0; p < all.size(); ++p) all[p] = p;
      for_each_subset(all, budget, [&](const std::vector<std::size_t>& S) { return attempt(S); });
    }
  }
  if (!found) {
    throw Error(ErrorKind::SupportSearchExhausted, "no consistent support at demand " + std::to_string(mu));
  }

  const Eigen::VectorXd pc = inst.A * *found + inst.d;
  const double lambda = pc.minCoeff();
  std::vector<std::size_t> face;
  for (Eigen::Index p = 0; p < pc.size(); ++p) {
    if (pc(p) <= lambda + 1e-10 * std::max(1.0, std::abs(lambda)) || (*found)(p) > 0.0) {
      face.push_back(static_cast<std::size_t>(p));
    }
  }
  sol.path_flows = min_norm_flows(inst, Objective::Beckmann, *found, face);
  finalize_solution(inst, sol, opts.active_eps);
  return sol;
}

EquilibriumSolution solve_equilibrium(const Instance& inst, double mu, const SolverOptions& opts) {
  const bool exact = opts.method == Method::AffineExact || (opts.method == Method::Auto && inst.all_affine);
  if (exact) return solve_affine_exact(inst, mu, opts);
  return solve_frank_wolfe(inst, mu, Objective::Beckmann, opts);
}

OptimumSolution solve_optimum(const Instance& inst, double mu, const SolverOptions& opts) {
  const bool exact = opts.method == Method::AffineExact || (opts.method == Method::Auto && inst.all_affine);
  if (!exact) return solve_social_numeric(inst, mu, opts);
  if (!inst.all_affine) throw Error(ErrorKind::InvalidArgument, "exact solver needs affine costs on every edge");
  OptimumSolution sol = solve_affine_exact(marginal_instance(inst), mu, opts);
  sol.objective = Objective::Social;
  finalize_solution(inst, sol, opts.active_eps);
  return sol;
}

}  // namespace poa
