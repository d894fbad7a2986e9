#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "poa/errors.hpp"

namespace oracle {

namespace {

constexpr double kFullGridPoints = 3e6;

void dfs(const poa::Network& net, poa::VertexIndex v, std::vector<char>& seen, std::vector<poa::EdgeIndex>& cur,
         std::vector<std::vector<poa::EdgeIndex>>& out) {
  if (v == net.destination()) {
    out.push_back(cur);
    return;
  }
  seen[v] = 1;
  for (poa::EdgeIndex e = 0; e < net.edge_count(); ++e) {
    const auto& edge = net.edge(e);
    if (edge.tail != v || seen[edge.head]) continue;
    cur.push_back(e);
    dfs(net, edge.head, seen, cur, out);
    cur.pop_back();
  }
  seen[v] = 0;
}

double simpson(const std::function<double(double)>& g, double a, double b) {
  if (b <= a) return 0.0;
  const int n = 256;
  const double h = (b - a) / n;
  double s = g(a) + g(b);
  for (int i = 1; i < n; ++i) s += g(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return s * h / 3.0;
}

using Objective = std::function<double(const std::vector<double>& loads)>;

double combinations(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

GridSolution search(const poa::Instance& inst, double mu, double resolution, bool social) {
  const auto paths = simple_paths(inst.network);
  const int P = static_cast<int>(paths.size());
  if (P > 4) throw poa::Error(poa::ErrorKind::TooManyPaths, "grid oracle handles at most 4 paths");
  if (P == 0) throw poa::Error(poa::ErrorKind::NoPath, "no path");
  if (!(resolution > 0.0)) throw poa::Error(poa::ErrorKind::InvalidArgument, "resolution must be > 0");

  auto objective = [&](const std::vector<double>& f) {
    std::vector<double> x(inst.edge_count(), 0.0);
    for (int p = 0; p < P; ++p) {
      for (auto e : paths[static_cast<std::size_t>(p)]) x[e] += f[static_cast<std::size_t>(p)];
    }
    double v = 0.0;
    for (std::size_t e = 0; e < x.size(); ++e) {
      v += social ? x[e] * cost_value(inst.costs[e], x[e]) : cost_integral(inst.costs[e], x[e]);
    }
    return v;
  };

  GridSolution best;
  best.resolution = resolution;
  best.objective = std::numeric_limits<double>::infinity();
  std::vector<double> f(static_cast<std::size_t>(P), 0.0);
  auto consider = [&]() {
    const double v = objective(f);
    if (v < best.objective) {
      best.objective = v;
      best.flows = Eigen::Map<const Eigen::VectorXd>(f.data(), P);
    }
  };

  const int N = std::max(1, static_cast<int>(std::lround(1.0 / resolution)));
  const bool full = combinations(N + P - 1, P - 1) <= kFullGridPoints;
  const int coarse = full ? N : 24;

  // Every composition of `coarse` units into P parts.
  std::function<void(int, int)> walk = [&](int p, int left) {
    if (p == P - 1) {
      f[static_cast<std::size_t>(p)] = mu * left / coarse;
      consider();
      return;
    }
    for (int k = 0; k <= left; ++k) {
      f[static_cast<std::size_t>(p)] = mu * k / coarse;
      walk(p + 1, left - k);
    }
  };
  walk(0, coarse);
  if (full) return best;

  // Zoom in around the incumbent until the step reaches the resolution.
  double h = mu / coarse;
  const int R = 8;
  while (h > mu * resolution) {
    h = std::max(h / 4.0, mu * resolution);
    const Eigen::VectorXd center = best.flows;
    std::function<void(int)> local = [&](int p) {
      if (p == P - 1) {
        double rest = mu;
        for (int q = 0; q < P - 1; ++q) rest -= f[static_cast<std::size_t>(q)];
        if (rest < -1e-12 * mu) return;
        f[static_cast<std::size_t>(p)] = std::max(0.0, rest);
        consider();
        return;
      }
      for (int k = -R; k <= R; ++k) {
        const double v = center(p) + k * h;
        if (v < -1e-12 * mu) continue;
        f[static_cast<std::size_t>(p)] = std::max(0.0, v);
        local(p + 1);
      }
    };
    local(0);
  }
  return best;
}

}  // namespace

std::vector<std::vector<poa::EdgeIndex>> simple_paths(const poa::Network& net) {
  std::vector<std::vector<poa::EdgeIndex>> out;
  std::vector<char> seen(net.vertex_count(), 0);
  std::vector<poa::EdgeIndex> cur;
  dfs(net, net.origin(), seen, cur, out);
  return out;
}

double cost_value(const poa::CostFunction& c, double x) {
  if (const auto* a = std::get_if<poa::Affine>(&c.form())) return a->slope * x + a->intercept;
  if (const auto* p = std::get_if<poa::Polynomial>(&c.form())) {
    double v = 0.0;
    for (std::size_t k = 0; k < p->coeffs.size(); ++k) v += p->coeffs[k] * std::pow(x, static_cast<double>(k));
    return v;
  }
  const auto& w = std::get<poa::PiecewiseLinear>(c.form());
  if (x <= w.knots.front()) return w.values.front();
  for (std::size_t i = 0; i + 1 < w.knots.size(); ++i) {
    if (x <= w.knots[i + 1]) {
      const double t = (x - w.knots[i]) / (w.knots[i + 1] - w.knots[i]);
      return (1.0 - t) * w.values[i] + t * w.values[i + 1];
    }
  }
  return w.values.back();
}

double cost_integral(const poa::CostFunction& c, double x) {
  std::vector<double> cuts{0.0};
  if (const auto* w = std::get_if<poa::PiecewiseLinear>(&c.form())) {
    for (double k : w->knots) {
      if (k > 0.0 && k < x) cuts.push_back(k);
    }
  }
  cuts.push_back(x);
  double total = 0.0;
  auto g = [&c](double y) { return cost_value(c, y); };
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += simpson(g, cuts[i], cuts[i + 1]);
  return total;
}

GridSolution brute_beckmann(const poa::Instance& inst, double mu, double resolution) {
  return search(inst, mu, resolution, false);
}

GridSolution brute_social(const poa::Instance& inst, double mu, double resolution) {
  return search(inst, mu, resolution, true);
}

}  // namespace oracle
