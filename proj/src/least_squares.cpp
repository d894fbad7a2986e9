#include "poa/least_squares.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace poa {

namespace {

Eigen::VectorXd solve_on(const Eigen::MatrixXd& E, const Eigen::VectorXd& f, const std::vector<char>& passive) {
  std::vector<Eigen::Index> cols;
  for (Eigen::Index j = 0; j < E.cols(); ++j) {
    if (passive[static_cast<std::size_t>(j)]) cols.push_back(j);
  }
  Eigen::MatrixXd sub(E.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = E.col(cols[k]);
  const Eigen::VectorXd zs = sub.completeOrthogonalDecomposition().solve(f);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(E.cols());
  for (std::size_t k = 0; k < cols.size(); ++k) z(cols[k]) = zs(static_cast<Eigen::Index>(k));
  return z;
}

}  // namespace

Eigen::VectorXd nnls(const Eigen::MatrixXd& E, const Eigen::VectorXd& f) {
  const Eigen::Index n = E.cols();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  if (n == 0) return x;
  std::vector<char> passive(static_cast<std::size_t>(n), 0);
  const double tol = 10.0 * std::numeric_limits<double>::epsilon() * E.cwiseAbs().colwise().sum().maxCoeff() *
                     static_cast<double>(std::max(E.rows(), n));
  const int max_outer = static_cast<int>(3 * n + 10);

  Eigen::VectorXd w = E.transpose() * (f - E * x);
  for (int outer = 0; outer < max_outer; ++outer) {
    Eigen::Index j = -1;
    double best = tol;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!passive[static_cast<std::size_t>(i)] && w(i) > best) {
        best = w(i);
        j = i;
      }
    }
    if (j < 0) break;
    passive[static_cast<std::size_t>(j)] = 1;

    Eigen::VectorXd z = solve_on(E, f, passive);
    for (int inner = 0; inner < max_outer; ++inner) {
      double alpha = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < n; ++i) {
        if (passive[static_cast<std::size_t>(i)] && z(i) <= tol) alpha = std::min(alpha, x(i) / (x(i) - z(i)));
      }
      if (!std::isfinite(alpha)) break;
      x += alpha * (z - x);
      for (Eigen::Index i = 0; i < n; ++i) {
        if (passive[static_cast<std::size_t>(i)] && x(i) <= tol) {
          passive[static_cast<std::size_t>(i)] = 0;
          x(i) = 0.0;
        }
      }
      z = solve_on(E, f, passive);
    }
    x = z;
    w = E.transpose() * (f - E * x);
  }
  return x;
}

std::optional<Eigen::VectorXd> least_distance(const Eigen::MatrixXd& G, const Eigen::VectorXd& h) {
  const Eigen::Index m = G.rows();
  const Eigen::Index n = G.cols();
  if (m == 0) return Eigen::VectorXd::Zero(n);

  // Solve the dual nonnegative least-squares problem and map its residual back.
  Eigen::MatrixXd E(n + 1, m);
  E.topRows(n) = G.transpose();
  E.row(n) = h.transpose();
  Eigen::VectorXd f = Eigen::VectorXd::Zero(n + 1);
  f(n) = 1.0;
  const Eigen::VectorXd u = nnls(E, f);
  const Eigen::VectorXd r = E * u - f;
  if (r.norm() <= 1e-12 || std::abs(r(n)) <= 1e-14) return std::nullopt;
  return Eigen::VectorXd(-r.head(n) / r(n));
}

std::optional<Eigen::VectorXd> min_norm_point(const Eigen::MatrixXd& Q, const Eigen::VectorXd& g,
                                              const Eigen::MatrixXd& G, const Eigen::VectorXd& h) {
  const Eigen::Index n = G.cols();
  Eigen::VectorXd f0 = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd N = Eigen::MatrixXd::Identity(n, n);
  if (Q.rows() > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Q, Eigen::ComputeFullU | Eigen::ComputeFullV);
    svd.setThreshold(1e-12);
    const Eigen::Index rank = svd.rank();
    f0 = svd.solve(g);
    N = svd.matrixV().rightCols(n - rank);
  }

  const double slack = 1e-12 * std::max(1.0, f0.cwiseAbs().maxCoeff());
  if (N.cols() == 0) {
    if (G.rows() > 0 && ((G * f0 - h).array() < -slack).any()) return std::nullopt;
    return f0;
  }
  const auto y = least_distance(G * N, h - G * f0);
  if (!y) return std::nullopt;
  Eigen::VectorXd out = f0 + N * *y;
  if (G.rows() > 0 && ((G * out - h).array() < -1e-9 * std::max(1.0, out.cwiseAbs().maxCoeff())).any()) {
    return std::nullopt;
  }
  return out;
}

}  // namespace poa
