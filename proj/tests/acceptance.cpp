// Acceptance gate: one line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "poa/io.hpp"
#include "poa/poa_analytics.hpp"
#include "random_instances.hpp"

using namespace poa;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    v_.pass = false;
    if (failures_++ < 3) v_.detail += (v_.detail.empty() ? "" : "; ") + what;
  }
  Verdict done(const std::string& summary) {
    if (v_.pass) v_.detail = summary;
    else if (failures_ > 3) v_.detail += "; " + std::to_string(failures_ - 3) + " more";
    return v_;
  }

 private:
  Verdict v_;
  int failures_ = 0;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

Instance fixture(const std::string& name) { return load_instance(std::string(POA_DATA_DIR) + "/" + name + ".json"); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double inf_norm(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

// The 250 instance-demand pairs shared by criteria 3 and 4.
struct AffineCase {
  Instance inst;
  std::vector<double> demands;
};

const std::vector<AffineCase>& affine_cases() {
  static const std::vector<AffineCase> cases = [] {
    oracle::Rng rng(20240501);
    std::uniform_real_distribution<double> mu(0.1, 12.0);
    std::vector<AffineCase> out;
    for (int i = 0; i < 50; ++i) {
      AffineCase c{oracle::random_affine(rng, 8, 6), {}};
      for (int k = 0; k < 5; ++k) c.demands.push_back(mu(rng));
      out.push_back(std::move(c));
    }
    return out;
  }();
  return cases;
}

// Curves and 1000-point grids shared by criteria 7 and 8.
struct CurveCase {
  Instance inst;
  PoACurve curve;
  PoAMax best;
  std::vector<double> grid_mu;
  std::vector<double> grid_poa;
};

constexpr double kCurveMax = 15.0;

const std::vector<CurveCase>& curve_cases() {
  static const std::vector<CurveCase> cases = [] {
    oracle::Rng rng(777);
    std::vector<CurveCase> out;
    for (int i = 0; i < 50; ++i) {
      CurveCase c{oracle::random_affine(rng, 8, 6), {}, {}, {}, {}};
      c.curve = classify_segments(c.inst, kCurveMax);
      c.best = find_poa_max(c.inst, c.curve, 0);
      for (int k = 1; k <= 1000; ++k) {
        const double mu = kCurveMax * k / 1000.0;
        c.grid_mu.push_back(mu);
        c.grid_poa.push_back(compute_poa(c.inst, mu));
      }
      out.push_back(std::move(c));
    }
    return out;
  }();
  return cases;
}

Verdict fig1_breakpoints() {
  Checker c;
  const Instance inst = fixture("fig1");
  const auto t0 = std::chrono::steady_clock::now();
  const Trace trace = trace_affine(inst, 10);
  const double elapsed = seconds_since(t0);
  const double expected[] = {1, 2, 3, 4, 7};
  c.expect(trace.breakpoints.size() == 5, std::to_string(trace.breakpoints.size()) + " breakpoints");
  for (std::size_t i = 0; i < std::min<std::size_t>(5, trace.breakpoints.size()); ++i) {
    c.expect(std::abs(trace.breakpoints[i].mu - expected[i]) <= 1e-6, "breakpoint " + fmt(trace.breakpoints[i].mu));
  }
  c.expect(elapsed < 1.0, "took " + fmt(elapsed) + " s");
  return c.done("breakpoints 1,2,3,4,7 in " + fmt(elapsed) + " s");
}

Verdict nested_curve() {
  Checker c;
  const Instance inst = fixture("nested2");
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<std::pair<double, double>> poa{{0.4, 1.0},        {1, 8.0 / 7.0},   {1.5, 10.0 / 9.5},
                                                   {2.5, 1.0},        {6, 384.0 / 303.0}, {14, 18.0 / 17.0},
                                                   {17, 188.0 / 185.0}, {25, 1.0}};
  for (auto [mu, expected] : poa) {
    const double got = compute_poa(inst, mu);
    c.expect(std::abs(got - expected) <= 1e-6, "PoA(" + fmt(mu) + ") = " + fmt(got));
  }
  // Equilibrium cost by regime.
  const std::vector<std::pair<double, double>> lambda{{0.5, 2},  {1.5, 5},  {4, 11},     {6, 16},     {10, 17},
                                                      {14, 18},  {14.5, 18}, {17, 18.8}, {25, 22.5}};
  for (auto [mu, expected] : lambda) {
    const double got = solve_equilibrium(inst, mu).lambda;
    c.expect(std::abs(got - expected) <= 1e-8, "lambda(" + fmt(mu) + ") = " + fmt(got));
  }
  const double elapsed = seconds_since(t0);
  c.expect(elapsed < 5.0, "took " + fmt(elapsed) + " s");
  return c.done("8 PoA values and 9 lambda values in " + fmt(elapsed) + " s");
}

Verdict scaling_law() {
  Checker c;
  double worst = 0.0;
  for (const auto& ac : affine_cases()) {
    for (double mu : ac.demands) {
      const double err = inf_norm(solve_optimum(ac.inst, mu).edge_loads - 0.5 * solve_equilibrium(ac.inst, 2 * mu).edge_loads);
      worst = std::max(worst, err);
      c.expect(err <= 1e-6, "error " + fmt(err) + " at mu=" + fmt(mu));
    }
  }
  return c.done("250 pairs, worst " + fmt(worst));
}

Verdict affine_bound() {
  Checker c;
  double lo = 2.0;
  double hi = 0.0;
  for (const auto& ac : affine_cases()) {
    for (double mu : ac.demands) {
      const double p = compute_poa(ac.inst, mu);
      lo = std::min(lo, p);
      hi = std::max(hi, p);
      c.expect(p >= 1 - 1e-9 && p <= 4.0 / 3.0 + 1e-6, "PoA " + fmt(p) + " at mu=" + fmt(mu));
    }
  }
  return c.done("250 pairs, PoA in [" + fmt(lo) + ", " + fmt(hi) + "]");
}

Verdict derivative_identity() {
  Checker c;
  oracle::Rng rng(4242);
  std::uniform_real_distribution<double> pick(0.3, 10.0);
  const double h = 1e-4;
  double worst = 0.0;
  int regular = 0;
  for (int i = 0; i < 20; ++i) {
    const Instance inst = i % 2 == 0 ? oracle::random_affine(rng) : oracle::random_polynomial(rng);
    // Draw demands until one is regular on both sides of the stencil.
    double mu = 0.0;
    for (int tries = 0; tries < 50; ++tries) {
      mu = pick(rng);
      if (check_regularity(solve_equilibrium(inst, mu)).regular &&
          check_regularity(solve_equilibrium(inst, mu - h)).regular &&
          check_regularity(solve_equilibrium(inst, mu + h)).regular) {
        ++regular;
        break;
      }
    }
    const double lambda = solve_equilibrium(inst, mu).lambda;
    const double fd = (solve_equilibrium(inst, mu + h).potential - solve_equilibrium(inst, mu - h).potential) / (2 * h);
    const double err = std::abs(fd - lambda) / std::max(1.0, lambda);
    worst = std::max(worst, err);
    c.expect(err <= 1e-3, "relative error " + fmt(err) + " at mu=" + fmt(mu));
  }
  c.expect(regular == 20, "only " + std::to_string(regular) + " regular demands found");
  return c.done("20 instances, worst relative error " + fmt(worst));
}

Verdict sign_contracts() {
  Checker c;
  int segments = 0;
  for (const char* name : {"fig1", "nested2", "nested3", "braess_direct", "braess_direct_lower", "pigou"}) {
    const Instance inst = fixture(name);
    const double mu_max = std::string(name) == "nested3" ? 400.0 : 40.0;
    for (const auto& seg : trace_affine(inst, mu_max).segments) {
      ++segments;
      const auto coef = segment_social_costs(inst, seg);
      c.expect(coef.alpha >= -1e-9 && coef.beta >= -1e-9 && coef.gamma <= 1e-9,
               std::string(name) + " segment at " + fmt(seg.mu_lo) + ": " + fmt(coef.alpha) + ", " + fmt(coef.beta) +
                   ", " + fmt(coef.gamma));
    }
  }
  return c.done(std::to_string(segments) + " segments on the 6 affine fixtures");
}

Verdict max_at_breakpoint() {
  Checker c;
  double worst = -1.0;
  for (const auto& cc : curve_cases()) {
    for (std::size_t k = 0; k < cc.grid_mu.size(); ++k) {
      const double excess = cc.grid_poa[k] - cc.best.poa;
      worst = std::max(worst, excess);
      c.expect(excess <= 1e-7, "PoA(" + fmt(cc.grid_mu[k]) + ") exceeds " + fmt(cc.best.poa) + " by " + fmt(excess));
    }
  }
  return c.done("50 instances x 1000 samples, largest excess " + fmt(worst));
}

Verdict unimodal_pieces() {
  Checker c;
  std::size_t pieces = 0;
  for (const auto& cc : curve_cases()) {
    for (const auto& piece : cc.curve.pieces) {
      std::vector<double> v;
      for (std::size_t k = 0; k < cc.grid_mu.size(); ++k) {
        if (cc.grid_mu[k] > piece.mu_lo && cc.grid_mu[k] < piece.mu_hi) v.push_back(cc.grid_poa[k]);
      }
      ++pieces;
      int last = 0;
      int changes = 0;
      bool downturn = false;
      for (std::size_t k = 1; k < v.size(); ++k) {
        const double d = v[k] - v[k - 1];
        const int s = d > 1e-12 ? 1 : (d < -1e-12 ? -1 : 0);
        if (s == 0) continue;
        if (last != 0 && s != last) {
          ++changes;
          downturn |= last > 0;
        }
        last = s;
      }
      c.expect(changes <= 1 && !downturn,
               "piece (" + fmt(piece.mu_lo) + ", " + fmt(piece.mu_hi) + ") has " + std::to_string(changes) + " turns");
    }
  }
  return c.done(std::to_string(pieces) + " pieces");
}

Verdict parallel_coincidence() {
  Checker c;
  const Instance inst = fixture("parallel_quad");
  const double at3 = compute_poa(inst, 3);
  c.expect(std::abs(at3 - 1) <= 1e-9, "PoA(3) = " + fmt(at3));
  std::vector<double> mu;
  std::vector<double> v;
  for (int k = 1; k < 740; ++k) {
    mu.push_back(3 + 37.0 * k / 740.0);
    v.push_back(compute_poa(inst, mu.back()));
  }
  double peak_mu = 0.0;
  for (std::size_t k = 1; k + 1 < v.size(); ++k) {
    if (v[k] > v[k - 1] && v[k] >= v[k + 1] && v[k] > 1 + 1e-9) {
      peak_mu = mu[k];
      break;
    }
  }
  c.expect(peak_mu > 0, "no local maximum on (3, 40)");
  return c.done("PoA(3) = " + fmt(at3) + ", local maximum near mu = " + fmt(peak_mu));
}

Verdict repeating_active_set() {
  Checker c;
  const Instance inst = fixture("wheatstone_pwl");
  const auto h15 = evaluate_sample(inst, 1.5).active_set_hash;
  const auto h3 = evaluate_sample(inst, 3).active_set_hash;
  const auto h11 = evaluate_sample(inst, 11).active_set_hash;
  c.expect(h3 == h11, "hash(3) != hash(11)");
  c.expect(h3 != h15, "hash(3) == hash(1.5)");
  char buf[96];
  std::snprintf(buf, sizeof buf, "hash(1.5)=%016llx hash(3)=hash(11)=%016llx", static_cast<unsigned long long>(h15),
                static_cast<unsigned long long>(h3));
  return c.done(buf);
}

Verdict oracle_equivalence() {
  Checker c;
  int checks = 0;
  double worst = 0.0;
  for (const char* name : {"fig1", "nested2", "nested3", "braess_direct", "braess_direct_lower", "parallel_quad",
                           "wheatstone_pwl", "pigou"}) {
    const Instance inst = fixture(name);
    if (inst.path_count() > 4) continue;
    for (double mu : {0.5, 2.0, 5.0}) {
      const double v = solve_equilibrium(inst, mu).potential;
      const double vs = solve_optimum(inst, mu).potential;
      const double e1 = std::abs(v - oracle::brute_beckmann(inst, mu, 1e-3).objective);
      const double e2 = std::abs(vs - oracle::brute_social(inst, mu, 1e-3).objective);
      worst = std::max({worst, e1, e2});
      checks += 2;
      c.expect(e1 <= 5e-3, std::string(name) + " Beckmann gap " + fmt(e1) + " at mu=" + fmt(mu));
      c.expect(e2 <= 5e-3, std::string(name) + " social gap " + fmt(e2) + " at mu=" + fmt(mu));
    }
  }
  return c.done(std::to_string(checks) + " comparisons on 6 fixtures, worst " + fmt(worst));
}

Verdict series_parallel_monotone() {
  Checker c;
  oracle::Rng rng(1312);
  std::size_t most = 0;
  for (int i = 0; i < 20; ++i) {
    const Instance inst = oracle::random_series_parallel(rng);
    const auto dec = decompose_series_parallel(inst.network);
    c.expect(dec.has_value(), "generated network not recognised");
    if (!dec) continue;
    Eigen::VectorXd prev = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(inst.edge_count()));
    for (int k = 1; k <= 100; ++k) {
      const double mu = 0.2 * k;
      const auto loads = sp_equilibrium(inst, *dec, mu).edge_loads;
      c.expect((loads - prev).minCoeff() >= -1e-8, "load decreases at mu=" + fmt(mu));
      prev = loads;
    }
    const std::size_t bps = trace_affine(inst, 20).breakpoints.size();
    most = std::max(most, bps);
    c.expect(bps <= std::min(inst.path_count(), inst.edge_count()),
             std::to_string(bps) + " breakpoints with " + std::to_string(inst.path_count()) + " paths");
  }
  return c.done("20 networks x 100 demands, at most " + std::to_string(most) + " breakpoints");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"fig1 breakpoints", fig1_breakpoints},
      {"nested network PoA curve and lambda table", nested_curve},
      {"scaling law on random affine networks", scaling_law},
      {"affine 4/3 bound", affine_bound},
      {"potential derivative equals lambda", derivative_identity},
      {"segment sign contracts", sign_contracts},
      {"maximum at a breakpoint", max_at_breakpoint},
      {"unimodal pieces", unimodal_pieces},
      {"parallel network coincidence", parallel_coincidence},
      {"repeating active set under step costs", repeating_active_set},
      {"grid oracle equivalence", oracle_equivalence},
      {"series-parallel monotone loads", series_parallel_monotone},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failed;
    std::printf("[%s] %2zu %s: %s (%.2f s)\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                v.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
