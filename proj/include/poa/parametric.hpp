#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "poa/equilibrium.hpp"

namespace poa {

/// Equilibrium on a demand interval: path flows mu * w + z and cost
/// lambda = alpha + beta * mu, with a constant active network.
struct TraceSegment {
  double mu_lo = 0.0;
  double mu_hi = 0.0;
  Eigen::VectorXd w;
  Eigen::VectorXd z;
  double alpha = 0.0;
  double beta = 0.0;
  std::vector<EdgeIndex> active_edges;
  std::vector<std::size_t> active_paths;

  Eigen::VectorXd flows_at(double mu) const { return mu * w + z; }
  double lambda_at(double mu) const { return alpha + beta * mu; }
};

struct Breakpoint {
  double mu = 0.0;
  std::vector<EdgeIndex> left;
  std::vector<EdgeIndex> right;
};

struct Trace {
  double mu_max = 0.0;
  std::vector<TraceSegment> segments;
  std::vector<Breakpoint> breakpoints;
  std::vector<std::string> warnings;

  /// Segment containing mu; a breakpoint belongs to the segment on its left.
  const TraceSegment& segment_at(double mu) const;
};

struct TraceOptions {
  double refine_tol = 1e-9;
  /// Relative step taken past a breakpoint before sampling.
  double step_in = 1e-7;
  /// Relative tolerance for a path to count as shortest while tracing.
  double tight_eps = 1e-11;
};

/// Follows the equilibrium of an all-affine instance over (0, mu_max].
Trace trace_affine(const Instance& inst, double mu_max, const TraceOptions& opts = {});

/// Social cost coefficients of a segment: SC_eq = a mu + b mu^2 and
/// SC_opt = g + a mu + b mu^2 where the segment contains 2 mu.
struct SegmentCoefficients {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
};

/// Throws SignViolation when alpha < 0, beta < 0 or gamma > 0 beyond 1e-9.
SegmentCoefficients segment_social_costs(const Instance& inst, const TraceSegment& seg);

std::vector<Breakpoint> optimum_breakpoints(const std::vector<Breakpoint>& bps);

}  // namespace poa
