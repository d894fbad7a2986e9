#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "poa/parametric.hpp"

namespace poa {

/// PoA(mu) = SC(equilibrium) / SC(optimum). PoA(0) = 1. Ratios within
/// `one_tol` of 1 are returned as exactly 1.
double compute_poa(const Instance& inst, double mu, const SolverOptions& opts = {}, double one_tol = 1e-9);

enum class Shape { Constant, Decreasing, Increasing, Valley };

const char* to_string(Shape shape);

/// PoA on (mu_lo, mu_hi) as (alpha mu + beta mu^2) / (gamma + delta mu + eta mu^2).
struct PoAPiece {
  double mu_lo = 0.0;
  double mu_hi = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
  double eta = 0.0;
  Shape shape = Shape::Constant;
  double valley_mu = 0.0;  // Valley only

  double value(double mu) const;
  /// Numerator of the derivative: q(mu) = alpha gamma + 2 beta gamma mu + (beta delta - alpha eta) mu^2.
  double derivative_numerator(double mu) const;
};

struct PoACurve {
  double mu_max = 0.0;
  /// Sorted union of equilibrium breakpoints and their halves, within (0, mu_max).
  std::vector<double> breakpoints;
  std::vector<double> breakpoint_poa;
  std::vector<PoAPiece> pieces;
  Trace trace;  // covers (0, 2 mu_max]
};

/// Traces to 2 mu_max, builds the pieces and classifies each. Throws
/// ClassificationConflict when a piece would have an interior maximum.
PoACurve classify_segments(const Instance& inst, double mu_max, const TraceOptions& trace_opts = {},
                           const SolverOptions& opts = {});

/// Classification of a single piece.
Shape classify_piece(PoAPiece& piece);

struct PoAMax {
  double mu = 0.0;
  double poa = 1.0;
};

/// Maximum over breakpoints and the ends of (0, mu_max], checked against a
/// uniform grid of `grid` direct evaluations. Throws GridExceedsBreakpointMax.
PoAMax find_poa_max(const Instance& inst, const PoACurve& curve, std::size_t grid = 1000,
                    const SolverOptions& opts = {});

struct SweepRow {
  double mu = 0.0;
  double lambda = 0.0;
  double sc_eq = 0.0;
  double sc_opt = 0.0;
  double poa = 1.0;
  std::uint64_t active_set_hash = 0;
};

/// 64-bit FNV-1a over the sorted ids of the edges.
std::uint64_t active_set_hash(const Network& net, const std::vector<EdgeIndex>& edges);

SweepRow evaluate_sample(const Instance& inst, double mu, const SolverOptions& opts = {});

/// Evenly spaced samples on [lo, hi], optionally refined where the active set
/// changes. Rows are sorted by demand whatever the thread count.
std::vector<SweepRow> sweep_poa(const Instance& inst, double lo, double hi, std::size_t samples, bool adaptive,
                                const SolverOptions& opts = {}, unsigned threads = 1);

inline constexpr const char* kSweepHeader = "mu,lambda,sc_eq,sc_opt,poa,active_set_hash";

std::string format_sweep_row(const SweepRow& row);

}  // namespace poa
