#include "poa/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "poa/errors.hpp"
#include "poa/io.hpp"

namespace poa {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitSolver = 2;
constexpr int kExitContract = 3;

int exit_code(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::Input: return kExitInput;
    case ErrorCategory::Solver: return kExitSolver;
    case ErrorCategory::Contract: return kExitContract;
  }
  return kExitSolver;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Method parse_method(const std::string& name) {
  if (name == "auto") return Method::Auto;
  if (name == "frank-wolfe") return Method::FrankWolfe;
  if (name == "exact") return Method::AffineExact;
  throw Error(ErrorKind::InvalidArgument, "unknown method '" + name + "'");
}

struct Context {
  const RunConfig& cfg;
  Instance inst;
  SolverOptions solver;
  TraceOptions trace;
  std::string format;
};

Json metadata(const Context& ctx) {
  Json m;
  m["tol"] = ctx.solver.tol;
  m["active_eps"] = ctx.solver.active_eps;
  m["refine_tol"] = ctx.trace.refine_tol;
  m["max_iterations"] = ctx.solver.max_iterations;
  m["method"] = ctx.cfg.method;
  m["path_cap"] = ctx.cfg.path_cap;
  return m;
}

double require_demand(const RunConfig& cfg) {
  if (!cfg.demand) throw Error(ErrorKind::InvalidArgument, cfg.command + " needs --demand");
  if (!(*cfg.demand > 0.0)) throw Error(ErrorKind::InvalidArgument, "demand must be > 0");
  return *cfg.demand;
}

double require_max_demand(const RunConfig& cfg) {
  if (!(cfg.max_demand > 0.0)) throw Error(ErrorKind::InvalidArgument, cfg.command + " needs --max-demand > 0");
  return cfg.max_demand;
}

void require_format(const Context& ctx, std::initializer_list<const char*> allowed) {
  for (const char* f : allowed) {
    if (ctx.format == f) return;
  }
  throw Error(ErrorKind::InvalidArgument, "format '" + ctx.format + "' is not available for " + ctx.cfg.command);
}

void write_json(std::ostream& os, const Json& doc) { os << doc.dump(2) << '\n'; }

int cmd_solve(Context& ctx, std::ostream& os, bool optimum) {
  require_format(ctx, {"json", "csv"});
  const double mu = require_demand(ctx.cfg);
  const SweepRow row = evaluate_sample(ctx.inst, mu, ctx.solver);
  if (ctx.format == "csv") {
    os << kSweepHeader << '\n' << format_sweep_row(row) << '\n';
    return kExitOk;
  }
  const FlowSolution sol =
      optimum ? solve_optimum(ctx.inst, mu, ctx.solver) : solve_equilibrium(ctx.inst, mu, ctx.solver);
  Json doc = solution_to_json(ctx.inst, sol);
  doc["equilibrium_social_cost"] = row.sc_eq;
  doc["optimum_social_cost"] = row.sc_opt;
  doc["poa"] = row.poa;
  doc["metadata"] = metadata(ctx);
  write_json(os, doc);
  return kExitOk;
}

int cmd_sweep(Context& ctx, std::ostream& os) {
  require_format(ctx, {"csv", "json"});
  const auto rows = sweep_poa(ctx.inst, ctx.cfg.from, ctx.cfg.to, ctx.cfg.samples, ctx.cfg.adaptive, ctx.solver,
                              ctx.cfg.threads);
  if (ctx.format == "csv") {
    os << kSweepHeader << '\n';
    for (const auto& row : rows) os << format_sweep_row(row) << '\n';
    return kExitOk;
  }
  Json arr = Json::array();
  for (const auto& row : rows) {
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(row.active_set_hash));
    arr.push_back(Json{{"mu", row.mu},
                       {"lambda", row.lambda},
                       {"sc_eq", row.sc_eq},
                       {"sc_opt", row.sc_opt},
                       {"poa", row.poa},
                       {"active_set_hash", hash}});
  }
  write_json(os, Json{{"rows", arr}, {"metadata", metadata(ctx)}});
  return kExitOk;
}

int cmd_trace(Context& ctx, std::ostream& os) {
  require_format(ctx, {"json", "csv"});
  const Trace trace = trace_affine(ctx.inst, require_max_demand(ctx.cfg), ctx.trace);
  if (ctx.format == "csv") {
    os << "mu_lo,mu_hi,alpha,beta,gamma\n";
    for (const auto& seg : trace.segments) {
      const SegmentCoefficients k = segment_social_costs(ctx.inst, seg);
      os << fmt(seg.mu_lo) << ',' << fmt(seg.mu_hi) << ',' << fmt(seg.alpha) << ',' << fmt(seg.beta) << ','
         << fmt(k.gamma) << '\n';
    }
    return kExitOk;
  }
  Json doc = trace_to_json(ctx.inst, trace);
  doc["metadata"] = metadata(ctx);
  write_json(os, doc);
  return kExitOk;
}

int cmd_breakpoints(Context& ctx, std::ostream& os) {
  require_format(ctx, {"json", "csv"});
  const Trace trace = trace_affine(ctx.inst, require_max_demand(ctx.cfg), ctx.trace);
  const auto halves = optimum_breakpoints(trace.breakpoints);
  if (ctx.format == "csv") {
    os << "kind,mu\n";
    for (const auto& bp : trace.breakpoints) os << "equilibrium," << fmt(bp.mu) << '\n';
    for (const auto& bp : halves) os << "optimum," << fmt(bp.mu) << '\n';
    return kExitOk;
  }
  Json eq = Json::array();
  Json opt = Json::array();
  for (const auto& bp : trace.breakpoints) eq.push_back(bp.mu);
  for (const auto& bp : halves) opt.push_back(bp.mu);
  write_json(os, Json{{"equilibrium", eq}, {"optimum", opt}, {"metadata", metadata(ctx)}});
  return kExitOk;
}

int cmd_analyze(Context& ctx, std::ostream& os) {
  require_format(ctx, {"json"});
  const PoACurve curve = classify_segments(ctx.inst, require_max_demand(ctx.cfg), ctx.trace, ctx.solver);
  const PoAMax max = find_poa_max(ctx.inst, curve, 1000, ctx.solver);
  Json doc = curve_to_json(curve, max);
  doc["metadata"] = metadata(ctx);
  write_json(os, doc);
  return kExitOk;
}

int cmd_verify(Context& ctx, std::ostream& os) {
  require_format(ctx, {"json"});
  const RunConfig& cfg = ctx.cfg;
  Json doc;
  bool ok = true;
  if (!cfg.trace_path.empty()) {
    const auto segments = segments_from_json(ctx.inst, Json::parse(read_file(cfg.trace_path)));
    constexpr double kTraceTol = 1e-8;
    Json checks = Json::array();
    for (const auto& seg : segments) {
      Json samples = Json::array();
      for (int i = 1; i <= 5; ++i) {
        FlowSolution sol;
        sol.demand = seg.mu_lo + (seg.mu_hi - seg.mu_lo) * i / 6.0;
        sol.path_flows = seg.flows_at(sol.demand);
        const WardropReport report = verify_wardrop(ctx.inst, sol, kTraceTol);
        const bool lambda_ok = std::abs(report.lambda - seg.lambda_at(sol.demand)) <=
                               kTraceTol * std::max(1.0, std::abs(report.lambda));
        ok = ok && report.ok && lambda_ok;
        samples.push_back(Json{{"mu", sol.demand}, {"ok", report.ok && lambda_ok}, {"lambda", report.lambda}});
      }
      checks.push_back(Json{{"mu_lo", seg.mu_lo}, {"mu_hi", seg.mu_hi}, {"samples", samples}});
    }
    doc["segments"] = checks;
    doc["tol"] = kTraceTol;
  } else {
    const double mu = require_demand(cfg);
    FlowSolution sol;
    if (!cfg.flows_path.empty()) {
      sol.demand = mu;
      sol.path_flows = flows_from_json(ctx.inst, Json::parse(read_file(cfg.flows_path)));
    } else {
      sol = solve_equilibrium(ctx.inst, mu, ctx.solver);
    }
    const double tol = std::max(ctx.solver.tol, 1e-9);
    const WardropReport report = verify_wardrop(ctx.inst, sol, tol);
    ok = report.ok;
    doc = report_to_json(ctx.inst, report);
    doc["demand"] = mu;
    doc["tol"] = tol;
    if (cfg.flows_path.empty()) {
      const Regularity reg = check_regularity(sol, 1e-9 * std::max(1.0, mu));
      doc["regular"] = reg.regular;
      doc["regularity_witness"] = edge_ids(ctx.inst.network, reg.witness);
    }
  }
  doc["ok"] = ok;
  doc["metadata"] = metadata(ctx);
  write_json(os, doc);
  return ok ? kExitOk : kExitContract;
}

int dispatch(Context& ctx, std::ostream& os) {
  const std::string& c = ctx.cfg.command;
  if (c == "solve") return cmd_solve(ctx, os, false);
  if (c == "optimum") return cmd_solve(ctx, os, true);
  if (c == "sweep") return cmd_sweep(ctx, os);
  if (c == "trace") return cmd_trace(ctx, os);
  if (c == "breakpoints") return cmd_breakpoints(ctx, os);
  if (c == "analyze") return cmd_analyze(ctx, os);
  if (c == "verify") return cmd_verify(ctx, os);
  throw Error(ErrorKind::InvalidArgument, "unknown command '" + c + "'");
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.network_path.empty()) throw Error(ErrorKind::InvalidArgument, "--network is required");
    if (!(config.tol > 0.0) || !(config.active_eps > 0.0) || !(config.refine_tol > 0.0)) {
      throw Error(ErrorKind::InvalidArgument, "tolerances must be > 0");
    }
    if (config.max_iterations == 0) throw Error(ErrorKind::InvalidArgument, "--max-iterations must be >= 1");
    Context ctx{config, load_instance(config.network_path, config.path_cap), {}, {}, config.format};
    ctx.solver.tol = config.tol;
    ctx.solver.active_eps = config.active_eps;
    ctx.solver.max_iterations = config.max_iterations;
    ctx.solver.method = parse_method(config.method);
    ctx.trace.refine_tol = config.refine_tol;
    if (ctx.format.empty()) ctx.format = config.command == "sweep" ? "csv" : "json";

    std::ostringstream buffer;
    const int status = dispatch(ctx, buffer);
    if (config.output.empty()) {
      out << buffer.str();
    } else {
      std::ofstream file(config.output, std::ios::binary);
      if (!file) throw Error(ErrorKind::InvalidArgument, "cannot write '" + config.output + "'");
      file << buffer.str();
    }
    return status;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.category());
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitSolver;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Wardrop equilibria and price of anarchy for single-commodity routing games", "poa"};
  app.require_subcommand(1);

  auto common = [&cfg](CLI::App* sub) {
    sub->add_option("--network", cfg.network_path, "Network JSON file")->required();
    sub->add_option("--tol", cfg.tol, "Relative duality gap tolerance")->capture_default_str();
    sub->add_option("--active-eps", cfg.active_eps, "Relative threshold for shortest paths")->capture_default_str();
    sub->add_option("--max-iterations", cfg.max_iterations, "Iteration limit of the numeric solver")
        ->capture_default_str();
    sub->add_option("--method", cfg.method, "auto, frank-wolfe or exact")->capture_default_str();
    sub->add_option("--output,-o", cfg.output, "Write output to this file");
    sub->add_option("--format", cfg.format, "csv or json");
  };
  auto demand = [&cfg](CLI::App* sub, bool required) {
    auto* opt = sub->add_option_function<double>("--demand", [&cfg](double v) { cfg.demand = v; }, "Demand mu");
    if (required) opt->required();
  };
  auto range = [&cfg](CLI::App* sub) {
    sub->add_option("--max-demand", cfg.max_demand, "Upper end of the demand range")->required();
    sub->add_option("--refine-tol", cfg.refine_tol, "Breakpoint tolerance")->capture_default_str();
  };

  CLI::App* solve = app.add_subcommand("solve", "Equilibrium at one demand");
  common(solve);
  demand(solve, true);
  CLI::App* optimum = app.add_subcommand("optimum", "Social optimum at one demand");
  common(optimum);
  demand(optimum, true);
  CLI::App* sweep = app.add_subcommand("sweep", "PoA on a demand grid");
  common(sweep);
  sweep->add_option("--from", cfg.from, "Smallest demand")->required();
  sweep->add_option("--to", cfg.to, "Largest demand")->required();
  sweep->add_option("--samples", cfg.samples, "Number of grid points")->capture_default_str();
  sweep->add_flag("--adaptive", cfg.adaptive, "Refine where the active set changes");
  sweep->add_option("--threads", cfg.threads, "Worker threads")->capture_default_str();
  CLI::App* trace = app.add_subcommand("trace", "Piecewise-affine equilibrium path (affine costs)");
  common(trace);
  range(trace);
  CLI::App* breakpoints = app.add_subcommand("breakpoints", "Active-network breakpoints (affine costs)");
  common(breakpoints);
  range(breakpoints);
  CLI::App* analyze = app.add_subcommand("analyze", "PoA pieces, shapes and maximum (affine costs)");
  common(analyze);
  range(analyze);
  CLI::App* verify = app.add_subcommand("verify", "Check Wardrop conditions");
  common(verify);
  demand(verify, false);
  verify->add_option("--flows", cfg.flows_path, "JSON file of path flows to check");
  verify->add_option("--trace", cfg.trace_path, "Trace JSON to re-check segment by segment");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  for (CLI::App* sub : app.get_subcommands()) cfg.command = sub->get_name();

  if (const char* cap = std::getenv("POA_MAX_PATHS")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(cap, &end, 10);
    if (end == cap || *end != '\0' || v == 0) {
      err << "error: POA_MAX_PATHS must be a positive integer\n";
      return kExitInput;
    }
    cfg.path_cap = static_cast<std::size_t>(v);
  }
  if (cfg.command == "verify" && cfg.trace_path.empty() && !cfg.demand) {
    err << "error: verify needs --demand or --trace\n";
    return kExitInput;
  }
  return run(cfg, out, err);
}

}  // namespace poa
