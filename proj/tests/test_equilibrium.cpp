#include <doctest.h>

#include <cmath>

#include "oracle.hpp"
#include "poa/equilibrium.hpp"
#include "random_instances.hpp"
#include "support.hpp"

using namespace poa;
using doctest::Approx;
using support::edge_of;
using support::path_of;

namespace {

double max_abs(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

SolverOptions with(Method m) {
  SolverOptions o;
  o.method = m;
  return o;
}

}  // namespace

TEST_SUITE("equilibrium") {
  TEST_CASE("parallel links with a quadratic cost") {
    const auto inst = support::fixture("parallel_quad");
    const auto low = solve_equilibrium(inst, 0.5);
    CHECK(low.edge_loads(0) == Approx(0.5).epsilon(1e-9));
    CHECK(std::abs(low.edge_loads(1)) < 1e-9);
    CHECK(low.lambda == Approx(0.5).epsilon(1e-9));
    const auto high = solve_equilibrium(inst, 3);
    CHECK(high.edge_loads(0) == Approx(2).epsilon(1e-8));
    CHECK(high.edge_loads(1) == Approx(1).epsilon(1e-8));
    CHECK(high.lambda == Approx(2).epsilon(1e-8));
  }

  TEST_CASE("nested network at demand 4") {
    const auto inst = support::fixture("nested2");
    const auto sol = solve_equilibrium(inst, 4);
    CHECK(sol.lambda == Approx(11).epsilon(1e-10));
    CHECK(sol.path_flows(path_of(inst, "e1>e4>e8>e9")) == Approx(2).epsilon(1e-10));
    CHECK(sol.path_flows(path_of(inst, "e1>e3>e6>e9")) == Approx(2).epsilon(1e-10));
    CHECK(sol.path_flows.sum() == Approx(4));
    CHECK(std::abs(sol.path_flows(path_of(inst, "e1>e5"))) < 1e-10);
    CHECK(std::abs(sol.path_flows(path_of(inst, "e2>e9"))) < 1e-10);
    CHECK(std::abs(sol.path_flows(path_of(inst, "e1>e4>e7>e6>e9"))) < 1e-10);
  }

  TEST_CASE("single edge") {
    const auto inst = support::single_edge(CostFunction::affine(1.5, 2));
    for (double mu : {0.1, 1.0, 7.0}) {
      CHECK(solve_equilibrium(inst, mu).lambda == Approx(1.5 * mu + 2));
      CHECK(solve_frank_wolfe(inst, mu, Objective::Beckmann).lambda == Approx(1.5 * mu + 2));
    }
  }

  TEST_CASE("optimum") {
    const auto quad = support::fixture("parallel_quad");
    const auto opt = solve_optimum(quad, 1);
    CHECK(opt.edge_loads(1) == Approx(1.0 / 3.0).epsilon(1e-7));
    CHECK(opt.potential == Approx(opt.social_cost));

    const auto pigou = support::fixture("pigou");
    const auto p = solve_optimum(pigou, 1);
    const auto grid = oracle::brute_social(pigou, 1, 1e-4);
    CHECK(p.edge_loads(1) == Approx(0.5).epsilon(1e-9));
    CHECK(p.potential == Approx(grid.objective).epsilon(1e-6));
    CHECK(p.potential == Approx(0.75));
  }

  TEST_CASE("optimum is half the equilibrium at twice the demand") {
    for (const char* name : {"fig1", "nested2", "braess_direct", "pigou"}) {
      CAPTURE(name);
      const auto inst = support::fixture(name);
      for (double mu : {0.3, 1.1, 2.7, 6.4}) {
        const auto opt = solve_optimum(inst, mu);
        const auto eq = solve_equilibrium(inst, 2 * mu);
        CHECK(max_abs(opt.edge_loads - 0.5 * eq.edge_loads) <= 1e-6);
      }
    }
  }

  TEST_CASE("exact affine solver") {
    const auto fig1 = support::fixture("fig1");
    const auto exact = solve_affine_exact(fig1, 5);
    const auto fw = solve_equilibrium(fig1, 5, with(Method::FrankWolfe));
    CHECK(exact.lambda == Approx(fw.lambda).epsilon(1e-9));
    CHECK(max_abs(exact.edge_loads - fw.edge_loads) <= 1e-6);

    const auto braess = support::fixture("braess_direct");
    CHECK(solve_affine_exact(braess, 3).lambda == Approx(2).epsilon(1e-12));

    const auto twins = support::parallel(CostFunction::affine(1, 0), CostFunction::affine(1, 0));
    const auto t = solve_affine_exact(twins, 2);
    CHECK(t.path_flows(0) == Approx(1));
    CHECK(t.path_flows(1) == Approx(1));
    CHECK(t.lambda == Approx(1));
  }

  TEST_CASE("numeric and exact solvers agree on random affine networks") {
    oracle::Rng rng(5);
    for (int i = 0; i < 40; ++i) {
      const auto inst = oracle::random_affine(rng);
      for (double mu : {0.5, 3.0, 9.0}) {
        const auto exact = solve_affine_exact(inst, mu);
        const auto fw = solve_frank_wolfe(inst, mu, Objective::Beckmann);
        CHECK(max_abs(exact.edge_loads - fw.edge_loads) <= 1e-6);
        CHECK(exact.lambda == Approx(fw.lambda).epsilon(1e-8));
      }
    }
  }

  TEST_CASE("equal cost of all equilibria and monotone lambda") {
    for (const char* name : {"fig1", "nested2", "nested3", "braess_direct", "parallel_quad", "wheatstone_pwl"}) {
      CAPTURE(name);
      const auto inst = support::fixture(name);
      double prev = -1.0;
      for (int k = 1; k <= 30; ++k) {
        const double mu = 0.7 * k;
        const auto sol = solve_equilibrium(inst, mu);
        CHECK(std::abs(sol.social_cost - mu * sol.lambda) <= 1e-8 * std::max(1.0, sol.social_cost));
        CHECK(sol.lambda >= prev - 1e-8);
        prev = sol.lambda;
        CHECK(verify_wardrop(inst, sol, 1e-8).ok);
      }
    }
  }

  TEST_CASE("potential derivative equals lambda") {
    const auto inst = support::fixture("parallel_quad");
    const double h = 1e-4;
    for (double mu : {0.5, 2.0, 3.0, 5.5}) {
      const double fd = (solve_equilibrium(inst, mu + h).potential - solve_equilibrium(inst, mu - h).potential) / (2 * h);
      const double lambda = solve_equilibrium(inst, mu).lambda;
      CHECK(std::abs(fd - lambda) / std::max(1.0, lambda) <= 1e-3);
    }
  }

  TEST_CASE("verify_wardrop") {
    const auto nested = support::fixture("nested2");
    FlowSolution table;
    table.demand = 14;
    table.path_flows = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nested.path_count()));
    table.path_flows(path_of(nested, "e1>e5")) = 6;
    table.path_flows(path_of(nested, "e2>e9")) = 6;
    table.path_flows(path_of(nested, "e1>e4>e8>e9")) = 1;
    table.path_flows(path_of(nested, "e1>e3>e6>e9")) = 1;
    const auto report = verify_wardrop(nested, table, 1e-10);
    CHECK(report.ok);
    CHECK(report.violations.empty());
    CHECK(report.lambda == Approx(18));
    CHECK(report.same_cost_ok);

    const auto quad = support::fixture("parallel_quad");
    auto sol = solve_equilibrium(quad, 3);
    CHECK(verify_wardrop(quad, sol, 1e-9).ok);
    sol.path_flows(0) += 0.1;
    const auto bad = verify_wardrop(quad, sol, 1e-9);
    CHECK_FALSE(bad.ok);
    CHECK_FALSE(bad.violations.empty());
    CHECK(bad.conservation_error == Approx(0.1));
    // Path costs after the change: 2.1 on the first link, 2 on the second.
    CHECK(bad.slack(0) == Approx(0.1));
  }

  TEST_CASE("regularity") {
    const auto lower = support::fixture("braess_direct_lower");
    const auto sol = solve_equilibrium(lower, 1.5);
    const auto reg = check_regularity(sol);
    CHECK_FALSE(reg.regular);
    CHECK(reg.witness == std::vector<EdgeIndex>{edge_of(lower, "e6")});
    CHECK(check_regularity(solve_equilibrium(lower, 2.5)).regular);

    CHECK(check_regularity(solve_equilibrium(support::fixture("parallel_quad"), 2)).regular);
    CHECK(check_regularity(solve_equilibrium(support::single_edge(CostFunction::affine(0, 3)), 2)).regular);
  }

  TEST_CASE("min-norm selection when loads are not unique") {
    // Two constant links: every split is an equilibrium; the even split has least norm.
    const auto flat = support::parallel(CostFunction::affine(0, 1), CostFunction::affine(0, 1));
    for (auto m : {Method::AffineExact, Method::FrankWolfe}) {
      const auto sol = solve_equilibrium(flat, 4, with(m));
      CHECK(sol.path_flows(0) == Approx(2));
      CHECK(sol.path_flows(1) == Approx(2));
    }
  }

  TEST_CASE("series-parallel recursion") {
    const auto lin_const = support::parallel(CostFunction::affine(1, 0), CostFunction::affine(0, 1));
    const auto dec = *decompose_series_parallel(lin_const.network);
    const auto a = sp_equilibrium(lin_const, dec, 0.5);
    CHECK(a.edge_loads(0) == Approx(0.5));
    CHECK(std::abs(a.edge_loads(1)) < 1e-12);
    const auto b = sp_equilibrium(lin_const, dec, 3);
    CHECK(b.edge_loads(0) == Approx(1));
    CHECK(b.edge_loads(1) == Approx(2));
    CHECK(b.lambda == Approx(1));

    const auto lin_shift = support::parallel(CostFunction::affine(1, 0), CostFunction::affine(1, 1));
    const auto c = sp_equilibrium(lin_shift, *decompose_series_parallel(lin_shift.network), 3);
    CHECK(c.edge_loads(0) == Approx(2));
    CHECK(c.edge_loads(1) == Approx(1));
    CHECK(c.lambda == Approx(2));

    const auto series = support::build({"O", "v1", "D"}, {{"e1", "O", "v1", CostFunction::affine(1, 0)},
                                                         {"e2", "v1", "D", CostFunction::affine(1, 0)}});
    CHECK(sp_equilibrium(series, *decompose_series_parallel(series.network), 2).lambda == Approx(4));
  }

  TEST_CASE("series-parallel recursion agrees with the general solver") {
    oracle::Rng rng(17);
    for (int i = 0; i < 30; ++i) {
      const auto inst = oracle::random_series_parallel(rng);
      const auto dec = *decompose_series_parallel(inst.network);
      for (double mu : {0.4, 2.0, 8.0}) {
        const auto sp = sp_equilibrium(inst, dec, mu);
        const auto ref = solve_equilibrium(inst, mu);
        CHECK(max_abs(sp.edge_loads - ref.edge_loads) <= 1e-6);
        CHECK(sp.lambda == Approx(ref.lambda).epsilon(1e-8));
        CHECK(verify_wardrop(inst, sp, 1e-8).ok);
      }
    }
  }

  TEST_CASE("solver errors") {
    const auto fig1 = support::fixture("fig1");
    SolverOptions tight;
    tight.max_iterations = 1;
    CHECK(support::error_kind([&] { solve_frank_wolfe(fig1, 5, Objective::Beckmann, tight); }) ==
          ErrorKind::NonConvergence);
    CHECK(support::error_kind([&] { solve_equilibrium(fig1, -1); }) == ErrorKind::InvalidArgument);
  }
}
