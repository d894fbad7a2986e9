#include <algorithm>
#include <cmath>
#include <string>

#include "poa/equilibrium.hpp"
#include "poa/errors.hpp"

namespace poa {

namespace {

double link_slope(const Instance& inst, Objective objective, EdgeIndex e, double x) {
  const CostFunction& c = inst.costs[e];
  return objective == Objective::Beckmann ? derivative(c, x) : marginal_slope(c, x);
}

class Equilibrator {
 public:
  Equilibrator(const Instance& inst, Objective objective, bool nonconvex)
      : inst_(inst), objective_(objective), nonconvex_(nonconvex) {
    Z_ = &inst.paths.incidence;
  }

  void reset(const Eigen::VectorXd& flows) {
    f_ = flows;
    x_ = (*Z_ * f_).cwiseMax(0.0);
    tau_.resize(x_.size());
    for (Eigen::Index e = 0; e < x_.size(); ++e) tau_(e) = cost(e, x_(e));
    pc_ = Z_->transpose() * tau_;
  }

  const Eigen::VectorXd& flows() const { return f_; }
  const Eigen::VectorXd& path_costs() const { return pc_; }

  double potential() const {
    double v = 0.0;
    for (Eigen::Index e = 0; e < x_.size(); ++e) v += link_potential(inst_, objective_, static_cast<EdgeIndex>(e), x_(e));
    return v;
  }

  /// Moves the optimal amount of flow from path a to path s. Returns false
  /// when no flow moved.
  bool shift(Eigen::Index a, Eigen::Index s) {
    plus_.clear();
    minus_.clear();
    for (Eigen::Index e = 0; e < Z_->rows(); ++e) {
      const bool on_a = (*Z_)(e, a) != 0.0;
      const bool on_s = (*Z_)(e, s) != 0.0;
      if (on_s && !on_a) plus_.push_back(e);
      if (on_a && !on_s) minus_.push_back(e);
    }
    const double cap = f_(a);
    double t = cap;
    if (nonconvex_) {
      t = global_step(cap);
    } else if (grad(cap) > 0.0) {
      t = root(0.0, cap);
    }
    if (t <= 0.0) return false;

    if (t >= cap) {
      f_(s) += f_(a);
      f_(a) = 0.0;
    } else {
      f_(a) -= t;
      f_(s) += t;
    }
    for (auto e : plus_) update(e, x_(e) + t);
    for (auto e : minus_) update(e, std::max(0.0, x_(e) - t));
    pc_ = Z_->transpose() * tau_;
    return true;
  }

 private:
  double cost(Eigen::Index e, double x) const { return link_cost(inst_, objective_, static_cast<EdgeIndex>(e), x); }
  double slope(Eigen::Index e, double x) const { return link_slope(inst_, objective_, static_cast<EdgeIndex>(e), x); }

  void update(Eigen::Index e, double x) {
    x_(e) = x;
    tau_(e) = cost(e, x);
  }

  // Directional derivative of the potential after moving t units.
  double grad(double t) const {
    double g = 0.0;
    for (auto e : plus_) g += cost(e, x_(e) + t);
    for (auto e : minus_) g -= cost(e, std::max(0.0, x_(e) - t));
    return g;
  }

  double curvature(double t) const {
    double h = 0.0;
    for (auto e : plus_) h += slope(e, x_(e) + t);
    for (auto e : minus_) h += slope(e, std::max(0.0, x_(e) - t));
    return h;
  }

  // Change of the potential after moving t units.
  double change(double t) const {
    double v = 0.0;
    for (auto e : plus_) {
      v += link_potential(inst_, objective_, static_cast<EdgeIndex>(e), x_(e) + t) -
           link_potential(inst_, objective_, static_cast<EdgeIndex>(e), x_(e));
    }
    for (auto e : minus_) {
      v += link_potential(inst_, objective_, static_cast<EdgeIndex>(e), std::max(0.0, x_(e) - t)) -
           link_potential(inst_, objective_, static_cast<EdgeIndex>(e), x_(e));
    }
    return v;
  }

  // Global minimizer of the potential over [0, cap] when link costs have
  // knots: between consecutive knots the potential is convex along the move.
  double global_step(double cap) const {
    std::vector<double> ts{0.0, cap};
    auto add_knots = [&](Eigen::Index e, double sign) {
      const auto* p = std::get_if<PiecewiseLinear>(&inst_.costs[static_cast<std::size_t>(e)].form());
      if (p == nullptr) return;
      for (double k : p->knots) {
        const double t = sign * (k - x_(e));
        if (t > 0.0 && t < cap) ts.push_back(t);
      }
    };
    for (auto e : plus_) add_knots(e, 1.0);
    for (auto e : minus_) add_knots(e, -1.0);
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

    double best_t = 0.0;
    double best_v = 0.0;
    auto consider = [&](double t) {
      const double v = change(t);
      if (v < best_v) {
        best_v = v;
        best_t = t;
      }
    };
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
      const double lo = ts[i] + 1e-12 * (ts[i + 1] - ts[i]);
      const double hi = ts[i + 1];
      if (grad(lo) < 0.0 && grad(hi) > 0.0) consider(root(lo, hi));
      consider(hi);
    }
    const double scale = 1e-14 * std::max(1.0, std::abs(potential()));
    return best_v < -scale ? best_t : 0.0;
  }

  // Root of grad on (lo, hi) where grad(lo) < 0 < grad(hi): Newton steps
  // safeguarded by bisection.
  double root(double lo, double hi) const {
    double t = lo;
    double g = grad(t);
    for (int it = 0; it < 200; ++it) {
      if (g == 0.0) return t;
      if (g < 0.0) {
        lo = t;
      } else {
        hi = t;
      }
      if (hi - lo <= 4e-16 * std::max(1.0, hi)) break;
      const double h = curvature(t);
      double next = h > 0.0 ? t - g / h : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      const bool settled = std::abs(next - t) <= 1e-15 * std::max(1.0, t);
      t = next;
      if (settled) return t;
      g = grad(t);
    }
    return lo;
  }

  const Instance& inst_;
  Objective objective_;
  bool nonconvex_;
  const Eigen::MatrixXd* Z_;
  Eigen::VectorXd f_;
  Eigen::VectorXd x_;
  Eigen::VectorXd tau_;
  Eigen::VectorXd pc_;
  std::vector<Eigen::Index> plus_;
  std::vector<Eigen::Index> minus_;
};

}  // namespace

FlowSolution solve_frank_wolfe(const Instance& inst, double mu, Objective objective, const SolverOptions& opts,
                               const Eigen::VectorXd* start) {
  if (!std::isfinite(mu) || mu < 0.0) throw Error(ErrorKind::InvalidArgument, "demand must be >= 0");
  const auto n = static_cast<Eigen::Index>(inst.path_count());

  FlowSolution sol;
  sol.objective = objective;
  sol.demand = mu;
  sol.path_flows = Eigen::VectorXd::Zero(n);

  const bool nonconvex = objective == Objective::Social &&
                         std::any_of(inst.costs.begin(), inst.costs.end(), [](const CostFunction& c) {
                           return std::holds_alternative<PiecewiseLinear>(c.form()) && !is_constant(c);
                         });
  Equilibrator eq(inst, objective, nonconvex);
  eq.reset(sol.path_flows);
  if (mu > 0.0) {
    if (start != nullptr) {
      if (start->size() != n || (start->array() < 0.0).any() || std::abs(start->sum() - mu) > 1e-9 * std::max(1.0, mu)) {
        throw Error(ErrorKind::InvalidArgument, "starting flow must be nonnegative and sum to the demand");
      }
      sol.path_flows = *start;
    } else {
      Eigen::Index first = 0;
      eq.path_costs().minCoeff(&first);
      sol.path_flows(first) = mu;
    }
    eq.reset(sol.path_flows);

    bool converged = false;
    std::size_t it = 0;
    for (; it < opts.max_iterations; ++it) {
      const Eigen::VectorXd& pc = eq.path_costs();
      Eigen::Index s = 0;
      const double lambda = pc.minCoeff(&s);
      const double gap = eq.flows().dot(pc) - mu * lambda;
      const double floor = 1e-15 * static_cast<double>(n) * mu * std::abs(lambda);
      if (gap <= std::max(opts.tol * std::abs(eq.potential()), floor)) {
        converged = true;
        break;
      }
      bool moved = false;
      for (Eigen::Index a = 0; a < n; ++a) {
        if (a == s || eq.flows()(a) <= 0.0) continue;
        if (eq.path_costs()(a) > eq.path_costs()(s)) moved = eq.shift(a, s) || moved;
      }
      // Without convexity a stationary point of the sweeps is accepted as
      // a local optimum.
      if (nonconvex && !moved) {
        converged = true;
        break;
      }
      // Refresh loads from flows to stop incremental drift.
      eq.reset(eq.flows());
    }
    if (!converged) {
      throw Error(ErrorKind::NonConvergence,
                  "relative gap above " + std::to_string(opts.tol) + " after " + std::to_string(it) + " sweeps");
    }
    sol.iterations = it;
    sol.path_flows = eq.flows();

    const Eigen::VectorXd& pc = eq.path_costs();
    std::vector<std::size_t> face = shortest_paths(pc, pc.minCoeff(), opts.active_eps);
    for (Eigen::Index p = 0; p < n; ++p) {
      if (sol.path_flows(p) > 0.0 && std::find(face.begin(), face.end(), p) == face.end()) {
        face.push_back(static_cast<std::size_t>(p));
      }
    }
    std::sort(face.begin(), face.end());
    sol.path_flows = min_norm_flows(inst, objective, sol.path_flows, face);
  }
  finalize_solution(inst, sol, opts.active_eps);
  return sol;
}

}  // namespace poa
