#pragma once

#include <limits>
#include <variant>
#include <vector>

namespace poa {

/// c(x) = slope * x + intercept.
struct Affine {
  double slope = 0.0;
  double intercept = 0.0;
};

/// c(x) = coeffs[0] + coeffs[1] x + coeffs[2] x^2 + ...
struct Polynomial {
  std::vector<double> coeffs;
};

/// Linear interpolation through (knots[i], values[i]); constant beyond both ends.
struct PiecewiseLinear {
  std::vector<double> knots;
  std::vector<double> values;
};

/// A nondecreasing, nonnegative edge cost. Construct through the named
/// factories, which enforce monotonicity syntactically.
class CostFunction {
 public:
  using Form = std::variant<Affine, Polynomial, PiecewiseLinear>;

  CostFunction() : form_(Affine{}) {}

  static CostFunction affine(double slope, double intercept);
  static CostFunction polynomial(std::vector<double> coeffs);
  static CostFunction piecewise_linear(std::vector<double> knots, std::vector<double> values);

  const Form& form() const noexcept { return form_; }
  bool is_affine() const noexcept { return std::holds_alternative<Affine>(form_); }

  // Marginal costs of piecewise-linear functions may decrease at knots, so
  // they bypass the monotonicity checks.
  friend CostFunction marginal(const CostFunction& c);

 private:
  explicit CostFunction(Form form) : form_(std::move(form)) {}
  Form form_;
};

/// Closed interval [lo, hi] of loads; hi may be +inf.
struct LoadInterval {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();

  bool is_point() const noexcept { return hi <= lo; }
};

double evaluate(const CostFunction& c, double x);

/// Integral of c over [0, x].
double primitive(const CostFunction& c, double x);

/// Derivative at x; piecewise-linear costs use the left derivative at knots.
double derivative(const CostFunction& c, double x);

/// c(x) + x c'(x) as a cost function.
CostFunction marginal(const CostFunction& c);

/// c(x) + x c'(x) evaluated directly, left-derivative convention at knots.
double marginal_value(const CostFunction& c, double x);

/// d/dx of marginal_value, used by line searches.
double marginal_slope(const CostFunction& c, double x);

/// The set of loads y >= 0 with c(y) == c(x). A single point whenever c is
/// strictly increasing around x.
LoadInterval level_set(const CostFunction& c, double x);

/// True when the cost is the same at every load.
bool is_constant(const CostFunction& c);

}  // namespace poa
