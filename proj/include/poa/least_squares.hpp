#pragma once

#include <optional>

#include <Eigen/Dense>

namespace poa {

/// argmin ||E u - f|| subject to u >= 0 (Lawson-Hanson active set).
Eigen::VectorXd nnls(const Eigen::MatrixXd& E, const Eigen::VectorXd& f);

/// argmin ||y|| subject to G y >= h, or nullopt when the system is infeasible.
std::optional<Eigen::VectorXd> least_distance(const Eigen::MatrixXd& G, const Eigen::VectorXd& h);

/// argmin ||f|| subject to Q f = g and G f >= h. The equality system is taken
/// in the least-squares sense, so slightly inconsistent right-hand sides are
/// tolerated. nullopt when the inequalities cannot be met.
std::optional<Eigen::VectorXd> min_norm_point(const Eigen::MatrixXd& Q, const Eigen::VectorXd& g,
                                              const Eigen::MatrixXd& G, const Eigen::VectorXd& h);

}  // namespace poa
