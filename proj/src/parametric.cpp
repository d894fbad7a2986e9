#include "poa/parametric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "poa/errors.hpp"

namespace poa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxSegments = 100000;

struct Sample {
  double mu = 0.0;
  Eigen::VectorXd flows;
  double lambda = 0.0;
  std::vector<EdgeIndex> active;
  std::vector<std::size_t> paths;
};

struct Branch {
  Eigen::VectorXd w;
  Eigen::VectorXd z;
  double alpha = 0.0;
  double beta = 0.0;
};

std::string format_mu(double mu) {
  std::ostringstream os;
  os.precision(12);
  os << mu;
  return os.str();
}

class Tracer {
 public:
  Tracer(const Instance& inst, const TraceOptions& opts) : inst_(inst), opts_(opts) {
    solver_.active_eps = opts.tight_eps;
  }

  Trace run(double mu_max) {
    Trace trace;
    trace.mu_max = mu_max;
    std::set<std::vector<EdgeIndex>> seen;
    double lo = 0.0;
    while (trace.segments.size() < kMaxSegments) {
      double a = lo + step(lo);
      if (a >= mu_max) a = lo + 0.5 * (mu_max - lo);
      const Sample first = solve(a);
      if (!seen.insert(first.active).second) {
        trace.warnings.push_back("active set repeats after demand " + format_mu(lo));
      }

      Sample cur = first;
      Branch branch;
      double hi = mu_max;
      std::optional<Sample> beyond;
      while (true) {
        Sample second = next_sample(cur, mu_max);
        if (second.active != first.active) {
          hi = locate(cur.mu, second.mu, kInf, first.active);
          beyond = solve(std::min(mu_max, hi + step(hi)));
          branch = fit(cur, second);
          break;
        }
        branch = fit(cur, second);
        double event = next_event(branch, second, first.paths);
        if (event < mu_max) {
          // Refit over a wider base for a sharper event estimate.
          const Sample mid = solve(cur.mu + 0.5 * (event - cur.mu));
          if (mid.active != first.active) {
            hi = locate(second.mu, mid.mu, kInf, first.active);
            beyond = solve(std::min(mu_max, hi + step(hi)));
            break;
          }
          if (mid.mu > second.mu) {
            branch = fit(cur, mid);
            event = next_event(branch, mid, first.paths);
            second = mid;
          }
        }
        if (event >= mu_max) {
          hi = mu_max;
          break;
        }
        const Sample probe = solve(std::min(mu_max, event + step(event)));
        if (probe.active == first.active) {
          if (probe.mu >= mu_max) {
            hi = mu_max;
            break;
          }
          cur = probe;
          continue;
        }
        hi = locate(second.mu, probe.mu, event, first.active);
        beyond = probe;
        break;
      }

      trace.segments.push_back(make_segment(lo, hi, first, branch, mu_max));
      if (hi - lo < opts_.refine_tol) {
        trace.warnings.push_back("DegenerateSegment: zero-length segment at demand " + format_mu(lo));
      }
      if (hi >= mu_max || !beyond) break;
      trace.breakpoints.push_back(Breakpoint{hi, first.active, beyond->active});
      lo = std::max(hi, lo + opts_.refine_tol);
    }
    return trace;
  }

 private:
  double step(double mu) const { return opts_.step_in * std::max(1.0, mu); }

  Sample solve(double mu) {
    const EquilibriumSolution sol = solve_affine_exact(inst_, mu, solver_, seed_.empty() ? nullptr : &seed_);
    Sample s;
    s.mu = mu;
    s.flows = sol.path_flows;
    s.lambda = sol.lambda;
    s.active = sol.active_edges;
    const Eigen::VectorXd pc = inst_.A * sol.path_flows + inst_.d;
    s.paths = shortest_paths(pc, sol.lambda, opts_.tight_eps);
    seed_.clear();
    for (Eigen::Index p = 0; p < sol.path_flows.size(); ++p) {
      if (sol.path_flows(p) > 0.0) seed_.push_back(static_cast<std::size_t>(p));
    }
    return s;
  }

  // A second sample to the right of `cur`, halving the step until it shares
  // the active set of `cur` (or the step cannot shrink further).
  Sample next_sample(const Sample& cur, double mu_max) {
    double h = std::max(1e-3 * std::max(1.0, cur.mu), 10.0 * step(cur.mu));
    h = std::min(h, mu_max - cur.mu);
    Sample s = solve(cur.mu + h);
    for (int i = 0; i < 40 && s.active != cur.active && h > 2.0 * step(cur.mu); ++i) {
      h *= 0.5;
      s = solve(cur.mu + h);
    }
    return s;
  }

  static Branch fit(const Sample& a, const Sample& b) {
    Branch br;
    const double span = b.mu - a.mu;
    br.w = (b.flows - a.flows) / span;
    br.z = a.flows - a.mu * br.w;
    br.beta = (b.lambda - a.lambda) / span;
    br.alpha = a.lambda - a.mu * br.beta;
    return br;
  }

  // First demand beyond `from` where a used path empties or an unused path
  // becomes as short as the current ones.
  double next_event(const Branch& br, const Sample& from, const std::vector<std::size_t>& shortest) const {
    std::vector<char> is_short(inst_.path_count(), 0);
    for (auto p : shortest) is_short[p] = 1;
    const Eigen::VectorXd slope = inst_.A * br.w;
    const Eigen::VectorXd offset = inst_.A * br.z + inst_.d;
    double event = kInf;
    auto consider = [&](double root) {
      if (root > from.mu && root < event) event = root;
    };
    for (Eigen::Index p = 0; p < br.w.size(); ++p) {
      if (from.flows(p) > 0.0 && br.w(p) < -1e-12) consider(-br.z(p) / br.w(p));
      if (!is_short[static_cast<std::size_t>(p)]) {
        const double s = slope(p) - br.beta;
        if (s < -1e-12) consider(-(offset(p) - br.alpha) / s);
      }
    }
    return event;
  }

  // Demand where the active set leaves `set`, given that it holds at lo and
  // not at hi. `hint` is a closed-form estimate, used when it agrees.
  double locate(double lo, double hi, double hint, const std::vector<EdgeIndex>& set) {
    if (hint > lo && hint < hi) {
      if (solve(hint).active == set) {
        lo = hint;
      } else {
        hi = hint;
        const double below = std::max(lo, hint - 0.5 * opts_.refine_tol);
        if (below > lo && solve(below).active == set) lo = below;
      }
    }
    while (hi - lo > opts_.refine_tol) {
      const double mid = 0.5 * (lo + hi);
      if (solve(mid).active == set) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    if (hint >= lo - opts_.refine_tol && hint <= hi + opts_.refine_tol) return hint;
    return lo;
  }

  TraceSegment make_segment(double lo, double hi, const Sample& first, const Branch& branch, double mu_max) {
    TraceSegment seg;
    seg.mu_lo = lo;
    seg.mu_hi = hi;
    seg.active_edges = first.active;
    seg.active_paths = first.paths;
    seg.w = branch.w;
    seg.z = branch.z;
    seg.alpha = branch.alpha;
    seg.beta = branch.beta;

    // Refit on the widest span available inside the segment.
    const double right = hi >= mu_max ? mu_max : hi - step(hi);
    if (right - first.mu > 1e-4 * std::max(1.0, right)) {
      const Sample end = solve(right);
      if (end.active == first.active) {
        const Branch wide = fit(first, end);
        seg.w = wide.w;
        seg.z = wide.z;
        seg.alpha = wide.alpha;
        seg.beta = wide.beta;
      }
    }
    for (Eigen::Index p = 0; p < seg.w.size(); ++p) {
      if (std::abs(seg.w(p)) < 1e-13) seg.w(p) = 0.0;
      if (std::abs(seg.z(p)) < 1e-12 * std::max(1.0, hi)) seg.z(p) = 0.0;
    }
    return seg;
  }

  const Instance& inst_;
  TraceOptions opts_;
  SolverOptions solver_;
  std::vector<std::size_t> seed_;
};

}  // namespace

const TraceSegment& Trace::segment_at(double mu) const {
  if (segments.empty()) throw Error(ErrorKind::InvalidArgument, "empty trace");
  for (const auto& seg : segments) {
    if (mu <= seg.mu_hi) return seg;
  }
  return segments.back();
}

Trace trace_affine(const Instance& inst, double mu_max, const TraceOptions& opts) {
  if (!inst.all_affine) throw Error(ErrorKind::InvalidArgument, "tracing needs affine costs on every edge");
  if (!std::isfinite(mu_max) || mu_max <= 0.0) throw Error(ErrorKind::InvalidArgument, "maximum demand must be > 0");
  return Tracer(inst, opts).run(mu_max);
}

SegmentCoefficients segment_social_costs(const Instance& inst, const TraceSegment& seg) {
  if (!inst.all_affine) throw Error(ErrorKind::InvalidArgument, "segment costs need affine costs on every edge");
  const Eigen::VectorXd Aw = inst.A * seg.w;
  const Eigen::VectorXd Az = inst.A * seg.z;
  SegmentCoefficients out;
  out.alpha = inst.d.dot(seg.w);
  out.beta = Aw.dot(seg.w);
  out.gamma = 0.25 * Az.dot(seg.z) + 0.5 * inst.d.dot(seg.z);

  const double scale = std::max({1.0, std::abs(out.alpha), std::abs(out.beta), 0.5 * std::abs(inst.d.dot(seg.z))});
  const double tol = 1e-9 * scale;
  if (out.alpha < -tol || out.beta < -tol || out.gamma > tol) {
    std::ostringstream os;
    os.precision(17);
    os << "segment [" << seg.mu_lo << ", " << seg.mu_hi << "] has alpha=" << out.alpha << " beta=" << out.beta
       << " gamma=" << out.gamma;
    throw Error(ErrorKind::SignViolation, os.str());
  }
  return out;
}

std::vector<Breakpoint> optimum_breakpoints(const std::vector<Breakpoint>& bps) {
  std::vector<Breakpoint> out = bps;
  for (auto& bp : out) bp.mu *= 0.5;
  return out;
}

}  // namespace poa
