#include "poa/costs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "poa/errors.hpp"

namespace poa {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidNetwork: return "InvalidNetwork";
    case ErrorKind::InvalidCost: return "InvalidCost";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NegativeLoad: return "NegativeLoad";
    case ErrorKind::NoPath: return "NoPath";
    case ErrorKind::PathExplosion: return "PathExplosion";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::SupportSearchExhausted: return "SupportSearchExhausted";
    case ErrorKind::BisectionFailure: return "BisectionFailure";
    case ErrorKind::DegenerateSegment: return "DegenerateSegment";
    case ErrorKind::SignViolation: return "SignViolation";
    case ErrorKind::ClassificationConflict: return "ClassificationConflict";
    case ErrorKind::GridExceedsBreakpointMax: return "GridExceedsBreakpointMax";
    case ErrorKind::TooManyPaths: return "TooManyPaths";
  }
  return "Unknown";
}

ErrorCategory category_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidNetwork:
    case ErrorKind::InvalidCost:
    case ErrorKind::InvalidArgument:
    case ErrorKind::NegativeLoad:
    case ErrorKind::NoPath:
    case ErrorKind::TooManyPaths:
      return ErrorCategory::Input;
    case ErrorKind::SignViolation:
    case ErrorKind::ClassificationConflict:
    case ErrorKind::GridExceedsBreakpointMax:
      return ErrorCategory::Contract;
    default:
      return ErrorCategory::Solver;
  }
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw Error(ErrorKind::InvalidCost, std::string(what) + " must be finite");
}

void check_load(double x) {
  if (x < 0.0 || std::isnan(x)) {
    throw Error(ErrorKind::NegativeLoad, "load " + std::to_string(x) + " is negative");
  }
}

// Index i of the segment [knots[i], knots[i+1]] with knots[i] < x <= knots[i+1];
// -1 when x <= knots.front(), n-1 when x > knots.back().
std::ptrdiff_t segment_of(const PiecewiseLinear& p, double x) {
  auto it = std::lower_bound(p.knots.begin(), p.knots.end(), x);
  return static_cast<std::ptrdiff_t>(it - p.knots.begin()) - 1;
}

double segment_slope(const PiecewiseLinear& p, std::ptrdiff_t i) {
  const auto n = static_cast<std::ptrdiff_t>(p.knots.size());
  if (i < 0 || i >= n - 1) return 0.0;
  return (p.values[i + 1] - p.values[i]) / (p.knots[i + 1] - p.knots[i]);
}

double pwl_value(const PiecewiseLinear& p, double x) {
  if (x <= p.knots.front()) return p.values.front();
  if (x >= p.knots.back()) return p.values.back();
  const auto i = segment_of(p, x);
  return p.values[i] + segment_slope(p, i) * (x - p.knots[i]);
}

double pwl_primitive(const PiecewiseLinear& p, double x) {
  const auto& k = p.knots;
  const auto& v = p.values;
  if (x <= k.front()) return v.front() * x;
  double total = v.front() * k.front();
  for (std::size_t i = 0; i + 1 < k.size(); ++i) {
    if (x <= k[i]) break;
    const double right = std::min(x, k[i + 1]);
    const double v_right = pwl_value(p, right);
    total += 0.5 * (v[i] + v_right) * (right - k[i]);
  }
  if (x > k.back()) total += v.back() * (x - k.back());
  return total;
}

double poly_value(const std::vector<double>& c, double x) {
  double r = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * x + *it;
  return r;
}

}  // namespace

CostFunction CostFunction::affine(double slope, double intercept) {
  require_finite(slope, "affine slope");
  require_finite(intercept, "affine intercept");
  if (slope < 0.0) throw Error(ErrorKind::InvalidCost, "affine slope must be >= 0");
  if (intercept < 0.0) throw Error(ErrorKind::InvalidCost, "affine intercept must be >= 0");
  return CostFunction(Affine{slope, intercept});
}

CostFunction CostFunction::polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) throw Error(ErrorKind::InvalidCost, "polynomial needs at least one coefficient");
  for (double c : coeffs) {
    require_finite(c, "polynomial coefficient");
    if (c < 0.0) throw Error(ErrorKind::InvalidCost, "polynomial coefficients must be >= 0");
  }
  return CostFunction(Polynomial{std::move(coeffs)});
}

CostFunction CostFunction::piecewise_linear(std::vector<double> knots, std::vector<double> values) {
  if (knots.empty() || knots.size() != values.size()) {
    throw Error(ErrorKind::InvalidCost, "piecewise-linear cost needs equally many knots and values");
  }
  for (std::size_t i = 0; i < knots.size(); ++i) {
    require_finite(knots[i], "piecewise-linear knot");
    require_finite(values[i], "piecewise-linear value");
    if (i > 0 && !(knots[i] > knots[i - 1])) {
      throw Error(ErrorKind::InvalidCost, "piecewise-linear knots must be strictly increasing");
    }
    if (i > 0 && values[i] < values[i - 1]) {
      throw Error(ErrorKind::InvalidCost, "piecewise-linear values must be nondecreasing");
    }
  }
  if (knots.front() < 0.0) throw Error(ErrorKind::InvalidCost, "piecewise-linear knots must be >= 0");
  if (values.front() < 0.0) throw Error(ErrorKind::InvalidCost, "piecewise-linear values must be >= 0");
  return CostFunction(PiecewiseLinear{std::move(knots), std::move(values)});
}

double evaluate(const CostFunction& c, double x) {
  check_load(x);
  return std::visit(overloaded{
                        [x](const Affine& a) { return a.slope * x + a.intercept; },
                        [x](const Polynomial& p) { return poly_value(p.coeffs, x); },
                        [x](const PiecewiseLinear& p) { return pwl_value(p, x); },
                    },
                    c.form());
}

double primitive(const CostFunction& c, double x) {
  check_load(x);
  return std::visit(overloaded{
                        [x](const Affine& a) { return 0.5 * a.slope * x * x + a.intercept * x; },
                        [x](const Polynomial& p) {
                          double r = 0.0;
                          for (std::size_t k = p.coeffs.size(); k-- > 0;) {
                            r = r * x + p.coeffs[k] / static_cast<double>(k + 1);
                          }
                          return r * x;
                        },
                        [x](const PiecewiseLinear& p) { return pwl_primitive(p, x); },
                    },
                    c.form());
}

double derivative(const CostFunction& c, double x) {
  check_load(x);
  return std::visit(overloaded{
                        [](const Affine& a) { return a.slope; },
                        [x](const Polynomial& p) {
                          double r = 0.0;
                          for (std::size_t k = p.coeffs.size(); k-- > 1;) {
                            r = r * x + static_cast<double>(k) * p.coeffs[k];
                          }
                          return r;
                        },
                        [x](const PiecewiseLinear& p) { return segment_slope(p, segment_of(p, x)); },
                    },
                    c.form());
}

double marginal_value(const CostFunction& c, double x) { return evaluate(c, x) + x * derivative(c, x); }

double marginal_slope(const CostFunction& c, double x) {
  check_load(x);
  return std::visit(overloaded{
                        [](const Affine& a) { return 2.0 * a.slope; },
                        [x](const Polynomial& p) {
                          // d/dx sum (k+1) c_k x^k
                          double r = 0.0;
                          for (std::size_t k = p.coeffs.size(); k-- > 1;) {
                            r = r * x + static_cast<double>(k * (k + 1)) * p.coeffs[k];
                          }
                          return r;
                        },
                        [x](const PiecewiseLinear& p) { return 2.0 * segment_slope(p, segment_of(p, x)); },
                    },
                    c.form());
}

CostFunction marginal(const CostFunction& c) {
  return std::visit(
      overloaded{
          [](const Affine& a) { return CostFunction(Affine{2.0 * a.slope, a.intercept}); },
          [](const Polynomial& p) {
            std::vector<double> out(p.coeffs.size());
            for (std::size_t k = 0; k < out.size(); ++k) out[k] = static_cast<double>(k + 1) * p.coeffs[k];
            return CostFunction(Polynomial{std::move(out)});
          },
          [](const PiecewiseLinear& p) {
            // On segment i the marginal is values[i] + slope_i (2x - knots[i]).
            // Jumps at knots are replaced by steep ramps starting just to the
            // right of the knot, so the knot itself keeps its left value.
            std::vector<double> xs;
            std::vector<double> ys;
            const auto& k = p.knots;
            const auto& v = p.values;
            const std::size_t n = k.size();
            auto push = [&](double x, double y) {
              if (!xs.empty() && x <= xs.back()) return;
              xs.push_back(x);
              ys.push_back(y);
            };
            push(k[0], v[0]);
            for (std::size_t i = 0; i + 1 < n; ++i) {
              const double s = segment_slope(p, static_cast<std::ptrdiff_t>(i));
              const double right_limit = v[i] + s * k[i];
              if (right_limit != ys.back()) {
                const double ramp = std::min(1e-9 * std::max(1.0, k[i]), 0.25 * (k[i + 1] - k[i]));
                push(k[i] + ramp, v[i] + s * (2.0 * (k[i] + ramp) - k[i]));
              }
              push(k[i + 1], v[i] + s * (2.0 * k[i + 1] - k[i]));
            }
            if (v[n - 1] != ys.back()) {
              push(k[n - 1] + 1e-9 * std::max(1.0, k[n - 1]), v[n - 1]);
            }
            return CostFunction(PiecewiseLinear{std::move(xs), std::move(ys)});
          },
      },
      c.form());
}

bool is_constant(const CostFunction& c) {
  return std::visit(overloaded{
                        [](const Affine& a) { return a.slope == 0.0; },
                        [](const Polynomial& p) {
                          return std::all_of(p.coeffs.begin() + 1, p.coeffs.end(),
                                             [](double v) { return v == 0.0; });
                        },
                        [](const PiecewiseLinear& p) { return p.values.front() == p.values.back(); },
                    },
                    c.form());
}

LoadInterval level_set(const CostFunction& c, double x) {
  check_load(x);
  if (is_constant(c)) return {};
  if (!std::holds_alternative<PiecewiseLinear>(c.form())) return {x, x};

  const auto& p = std::get<PiecewiseLinear>(c.form());
  const auto& k = p.knots;
  const auto& v = p.values;
  const double target = pwl_value(p, x);
  const std::size_t n = k.size();

  double lo = 0.0;
  if (v[0] < target) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (v[i] < target && target <= v[i + 1]) {
        lo = k[i] + (target - v[i]) / (v[i + 1] - v[i]) * (k[i + 1] - k[i]);
        break;
      }
    }
  }
  double hi = std::numeric_limits<double>::infinity();
  if (v[n - 1] > target) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (v[i] <= target && target < v[i + 1]) {
        hi = k[i] + (target - v[i]) / (v[i + 1] - v[i]) * (k[i + 1] - k[i]);
        break;
      }
    }
  }
  if (hi - lo <= 1e-12 * std::max(1.0, x)) return {x, x};
  return {std::min(lo, x), std::max(hi, x)};
}

}  // namespace poa
