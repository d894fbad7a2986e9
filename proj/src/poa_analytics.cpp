#include "poa/poa_analytics.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <future>
#include <sstream>

#include "poa/errors.hpp"

namespace poa {

namespace {

double poa_ratio(double sc_eq, double sc_opt, double one_tol) {
  if (!(sc_opt > 0.0)) return 1.0;
  if (std::abs(sc_eq - sc_opt) <= one_tol * sc_opt) return 1.0;
  return sc_eq / sc_opt;
}

std::string describe(const PoAPiece& piece) {
  std::ostringstream os;
  os.precision(17);
  os << "piece (" << piece.mu_lo << ", " << piece.mu_hi << ")";
  return os.str();
}

}  // namespace

double compute_poa(const Instance& inst, double mu, const SolverOptions& opts, double one_tol) {
  if (!std::isfinite(mu) || mu < 0.0) throw Error(ErrorKind::InvalidArgument, "demand must be >= 0");
  if (mu == 0.0) return 1.0;
  const EquilibriumSolution eq = solve_equilibrium(inst, mu, opts);
  const OptimumSolution opt = solve_optimum(inst, mu, opts);
  return poa_ratio(eq.social_cost, opt.social_cost, one_tol);
}

const char* to_string(Shape shape) {
  switch (shape) {
    case Shape::Constant: return "constant";
    case Shape::Decreasing: return "decreasing";
    case Shape::Increasing: return "increasing";
    case Shape::Valley: return "valley";
  }
  return "unknown";
}

double PoAPiece::value(double mu) const {
  return (alpha * mu + beta * mu * mu) / (gamma + delta * mu + eta * mu * mu);
}

double PoAPiece::derivative_numerator(double mu) const {
  return alpha * gamma + 2.0 * beta * gamma * mu + (beta * delta - alpha * eta) * mu * mu;
}

Shape classify_piece(PoAPiece& piece) {
  const double c0 = piece.alpha * piece.gamma;
  const double c1 = 2.0 * piece.beta * piece.gamma;
  const double c2 = piece.beta * piece.delta - piece.alpha * piece.eta;
  const double a = std::abs(piece.alpha);
  const double b = std::abs(piece.beta);
  const double g = std::abs(piece.gamma);
  auto sign = [&](double mu) {
    const double bound = a * g + 2.0 * b * g * mu + (b * std::abs(piece.delta) + a * std::abs(piece.eta)) * mu * mu;
    const double q = piece.derivative_numerator(mu);
    if (std::abs(q) <= 1e-9 * bound) return 0;
    return q > 0.0 ? 1 : -1;
  };

  const double lo = piece.mu_lo;
  const double hi = piece.mu_hi;
  std::vector<double> cuts{lo};
  auto add_root = [&](double r) {
    if (r > lo && r < hi) cuts.push_back(r);
  };
  const double scale2 = std::abs(c2) * hi * hi;
  const double scale1 = std::abs(c1) * hi + std::abs(c0);
  if (scale2 > 1e-14 * scale1 && c2 != 0.0) {
    const double disc = c1 * c1 - 4.0 * c2 * c0;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      // Numerically stable pair of roots.
      const double qv = -0.5 * (c1 + std::copysign(sq, c1));
      if (qv != 0.0) {
        add_root(qv / c2);
        add_root(c0 / qv);
      } else {
        add_root(0.0);
      }
    }
  } else if (c1 != 0.0) {
    add_root(-c0 / c1);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.push_back(hi);

  std::vector<std::pair<int, double>> signs;  // sign and the cut where it starts
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const int s = sign(0.5 * (cuts[i] + cuts[i + 1]));
    if (s == 0) continue;
    if (signs.empty() || signs.back().first != s) signs.emplace_back(s, cuts[i]);
  }

  if (signs.empty()) {
    piece.shape = Shape::Constant;
  } else if (signs.size() == 1) {
    piece.shape = signs[0].first < 0 ? Shape::Decreasing : Shape::Increasing;
  } else if (signs.size() == 2 && signs[0].first < 0) {
    piece.shape = Shape::Valley;
    piece.valley_mu = signs[1].second;
  } else {
    throw Error(ErrorKind::ClassificationConflict, describe(piece) + " has an interior maximum");
  }
  return piece.shape;
}

PoACurve classify_segments(const Instance& inst, double mu_max, const TraceOptions& trace_opts,
                           const SolverOptions& opts) {
  PoACurve curve;
  curve.mu_max = mu_max;
  curve.trace = trace_affine(inst, 2.0 * mu_max, trace_opts);
  for (const auto& seg : curve.trace.segments) segment_social_costs(inst, seg);

  for (const auto& bp : curve.trace.breakpoints) {
    if (bp.mu < mu_max) curve.breakpoints.push_back(bp.mu);
    if (0.5 * bp.mu < mu_max) curve.breakpoints.push_back(0.5 * bp.mu);
  }
  std::sort(curve.breakpoints.begin(), curve.breakpoints.end());
  curve.breakpoints.erase(std::unique(curve.breakpoints.begin(), curve.breakpoints.end(),
                                      [](double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(1.0, y); }),
                          curve.breakpoints.end());

  std::vector<double> cuts{0.0};
  cuts.insert(cuts.end(), curve.breakpoints.begin(), curve.breakpoints.end());
  cuts.push_back(mu_max);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (!(cuts[i + 1] > cuts[i])) continue;
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    const TraceSegment& eq = curve.trace.segment_at(mid);
    const TraceSegment& opt = curve.trace.segment_at(2.0 * mid);
    const SegmentCoefficients num = segment_social_costs(inst, eq);
    const SegmentCoefficients den = segment_social_costs(inst, opt);

    PoAPiece piece;
    piece.mu_lo = cuts[i];
    piece.mu_hi = cuts[i + 1];
    piece.alpha = num.alpha;
    piece.beta = num.beta;
    piece.gamma = den.gamma;
    piece.delta = inst.d.dot(opt.w) + (inst.A * opt.w).dot(opt.z);
    piece.eta = den.beta;
    const double tol = 1e-9 * std::max({1.0, std::abs(piece.delta), std::abs(piece.eta)});
    if (piece.gamma > tol || piece.delta < -tol || piece.eta < -tol) {
      throw Error(ErrorKind::SignViolation, describe(piece) + " breaks the denominator sign contract");
    }
    classify_piece(piece);
    curve.pieces.push_back(piece);
  }

  for (double mu : curve.breakpoints) curve.breakpoint_poa.push_back(compute_poa(inst, mu, opts));
  return curve;
}

PoAMax find_poa_max(const Instance& inst, const PoACurve& curve, std::size_t grid, const SolverOptions& opts) {
  PoAMax best;
  best.mu = curve.mu_max;
  best.poa = compute_poa(inst, curve.mu_max, opts);
  for (std::size_t i = 0; i < curve.breakpoints.size(); ++i) {
    const double value = curve.breakpoint_poa.size() == curve.breakpoints.size()
                             ? curve.breakpoint_poa[i]
                             : compute_poa(inst, curve.breakpoints[i], opts);
    if (value > best.poa || (value == best.poa && curve.breakpoints[i] < best.mu)) {
      best.mu = curve.breakpoints[i];
      best.poa = value;
    }
  }
  for (std::size_t i = 1; i <= grid; ++i) {
    const double mu = curve.mu_max * static_cast<double>(i) / static_cast<double>(grid);
    const double value = compute_poa(inst, mu, opts);
    if (value > best.poa + 1e-7) {
      std::ostringstream os;
      os.precision(17);
      os << "PoA(" << mu << ") = " << value << " exceeds breakpoint maximum " << best.poa;
      throw Error(ErrorKind::GridExceedsBreakpointMax, os.str());
    }
  }
  return best;
}

std::uint64_t active_set_hash(const Network& net, const std::vector<EdgeIndex>& edges) {
  std::vector<std::string> ids;
  ids.reserve(edges.size());
  for (EdgeIndex e : edges) ids.push_back(net.edge(e).id);
  std::sort(ids.begin(), ids.end());
  std::uint64_t h = 14695981039346656037ULL;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 1099511628211ULL;
  };
  for (const auto& id : ids) {
    for (unsigned char c : id) mix(c);
    mix(0x1f);
  }
  return h;
}

SweepRow evaluate_sample(const Instance& inst, double mu, const SolverOptions& opts) {
  const EquilibriumSolution eq = solve_equilibrium(inst, mu, opts);
  const OptimumSolution opt = solve_optimum(inst, mu, opts);
  SweepRow row;
  row.mu = mu;
  row.lambda = eq.lambda;
  row.sc_eq = eq.social_cost;
  row.sc_opt = opt.social_cost;
  row.poa = poa_ratio(row.sc_eq, row.sc_opt, 1e-9);
  row.active_set_hash = active_set_hash(inst.network, eq.active_edges);
  return row;
}

namespace {

std::vector<SweepRow> evaluate_all(const Instance& inst, const std::vector<double>& mus, const SolverOptions& opts,
                                   unsigned threads) {
  std::vector<SweepRow> rows(mus.size());
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, mus.size()));
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < mus.size(); i += workers) rows[i] = evaluate_sample(inst, mus[i], opts);
    }));
  }
  for (auto& job : jobs) job.get();
  return rows;
}

}  // namespace

std::vector<SweepRow> sweep_poa(const Instance& inst, double lo, double hi, std::size_t samples, bool adaptive,
                                const SolverOptions& opts, unsigned threads) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || lo <= 0.0 || hi <= lo) {
    throw Error(ErrorKind::InvalidArgument, "sweep needs 0 < from < to");
  }
  if (samples < 2) throw Error(ErrorKind::InvalidArgument, "sweep needs at least 2 samples");

  std::vector<double> mus(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    mus[i] = i + 1 == samples ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(samples - 1);
  }
  std::vector<SweepRow> rows = evaluate_all(inst, mus, opts, threads);
  if (!adaptive) return rows;

  const double min_spacing = (hi - lo) / 1e4;
  while (true) {
    std::vector<double> extra;
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
      if (rows[i].active_set_hash == rows[i + 1].active_set_hash) continue;
      if (rows[i + 1].mu - rows[i].mu < min_spacing) continue;
      extra.push_back(0.5 * (rows[i].mu + rows[i + 1].mu));
    }
    if (extra.empty()) break;
    std::vector<SweepRow> more = evaluate_all(inst, extra, opts, threads);
    rows.insert(rows.end(), more.begin(), more.end());
    std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) { return a.mu < b.mu; });
  }
  return rows;
}

std::string format_sweep_row(const SweepRow& row) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%016" PRIx64, row.mu, row.lambda, row.sc_eq,
                row.sc_opt, row.poa, row.active_set_hash);
  return buf;
}

}  // namespace poa
