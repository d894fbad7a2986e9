#include "poa/io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "poa/errors.hpp"

namespace poa {

namespace {

[[noreturn]] void field_error(const std::string& source, const std::string& field, const std::string& what) {
  throw Error(ErrorKind::InvalidNetwork, source + ": " + field + ": " + what);
}

const Json& member(const Json& obj, const char* key, const std::string& source, const std::string& where) {
  if (!obj.is_object()) field_error(source, where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) field_error(source, where + "." + key, "missing");
  return *it;
}

std::string string_field(const Json& obj, const char* key, const std::string& source, const std::string& where) {
  const Json& v = member(obj, key, source, where);
  if (!v.is_string()) field_error(source, where + "." + key, "expected a string");
  return v.get<std::string>();
}

double number(const Json& v, const std::string& source, const std::string& where) {
  if (!v.is_number()) field_error(source, where, "expected a number");
  return v.get<double>();
}

std::vector<double> numbers(const Json& v, const std::string& source, const std::string& where) {
  if (!v.is_array()) field_error(source, where, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], source, where + "[" + std::to_string(i) + "]"));
  return out;
}

CostFunction parse_cost(const Json& c, const std::string& source, const std::string& where) {
  const std::string type = string_field(c, "type", source, where);
  try {
    if (type == "affine") {
      return CostFunction::affine(number(member(c, "a", source, where), source, where + ".a"),
                                  number(member(c, "b", source, where), source, where + ".b"));
    }
    if (type == "poly") return CostFunction::polynomial(numbers(member(c, "coeffs", source, where), source, where + ".coeffs"));
    if (type == "pwl") {
      return CostFunction::piecewise_linear(numbers(member(c, "x", source, where), source, where + ".x"),
                                            numbers(member(c, "y", source, where), source, where + ".y"));
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InvalidCost) throw;
    throw Error(ErrorKind::InvalidCost, source + ": " + where + ": " + e.what());
  }
  field_error(source, where + ".type", "unknown cost type '" + type + "'");
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Instance parse_instance(const std::string& text, std::size_t path_cap, const std::string& source) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw Error(ErrorKind::InvalidNetwork,
                source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": malformed JSON");
  }
  if (!doc.is_object()) field_error(source, "<root>", "expected an object");

  const Json& vs = member(doc, "vertices", source, "<root>");
  if (!vs.is_array()) field_error(source, "vertices", "expected an array of strings");
  std::vector<std::string> vertices;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (!vs[i].is_string()) field_error(source, "vertices[" + std::to_string(i) + "]", "expected a string");
    vertices.push_back(vs[i].get<std::string>());
  }

  const Json& es = member(doc, "edges", source, "<root>");
  if (!es.is_array()) field_error(source, "edges", "expected an array");
  std::vector<EdgeSpec> edges;
  std::vector<CostFunction> costs;
  for (std::size_t i = 0; i < es.size(); ++i) {
    const std::string where = "edges[" + std::to_string(i) + "]";
    edges.push_back(EdgeSpec{string_field(es[i], "id", source, where), string_field(es[i], "tail", source, where),
                             string_field(es[i], "head", source, where)});
    costs.push_back(parse_cost(member(es[i], "cost", source, where), source, where + ".cost"));
  }
  const std::string origin = string_field(doc, "origin", source, "<root>");
  const std::string destination = string_field(doc, "destination", source, "<root>");
  try {
    return make_instance(Network(std::move(vertices), edges, origin, destination), std::move(costs), path_cap);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InvalidNetwork) throw;
    throw Error(ErrorKind::InvalidNetwork, source + ": " + e.what());
  }
}

Instance load_instance(const std::string& path, std::size_t path_cap) {
  return parse_instance(read_file(path), path_cap, path);
}

Json edge_ids(const Network& net, const std::vector<EdgeIndex>& edges) {
  Json out = Json::array();
  for (EdgeIndex e : edges) out.push_back(net.edge(e).id);
  return out;
}

Json solution_to_json(const Instance& inst, const FlowSolution& sol) {
  const Network& net = inst.network;
  Json out;
  out["objective"] = sol.objective == Objective::Beckmann ? "equilibrium" : "optimum";
  out["demand"] = sol.demand;
  out["lambda"] = sol.lambda;
  out[sol.objective == Objective::Beckmann ? "beckmann_value" : "optimum_value"] = sol.potential;
  out["social_cost"] = sol.social_cost;
  out["duality_gap"] = sol.duality_gap;
  out["iterations"] = sol.iterations;
  out["active_edges"] = edge_ids(net, sol.active_edges);
  Json flows = Json::object();
  for (std::size_t p = 0; p < inst.path_count(); ++p) {
    flows[path_label(net, inst.paths.paths[p])] = sol.path_flows(static_cast<Eigen::Index>(p));
  }
  out["path_flows"] = flows;
  Json loads = Json::object();
  Json costs = Json::object();
  for (EdgeIndex e = 0; e < net.edge_count(); ++e) {
    loads[net.edge(e).id] = sol.edge_loads(static_cast<Eigen::Index>(e));
    costs[net.edge(e).id] = sol.edge_costs(static_cast<Eigen::Index>(e));
  }
  out["edge_loads"] = loads;
  out["edge_costs"] = costs;
  return out;
}

Json report_to_json(const Instance& inst, const WardropReport& report) {
  Json out;
  out["ok"] = report.ok;
  out["lambda"] = report.lambda;
  Json slack = Json::object();
  for (std::size_t p = 0; p < inst.path_count(); ++p) {
    slack[path_label(inst.network, inst.paths.paths[p])] = report.slack(static_cast<Eigen::Index>(p));
  }
  out["slack"] = slack;
  Json bad = Json::array();
  for (auto p : report.violations) bad.push_back(path_label(inst.network, inst.paths.paths[p]));
  out["violations"] = bad;
  out["conservation_error"] = report.conservation_error;
  out["same_cost_error"] = report.same_cost_error;
  return out;
}

Json trace_to_json(const Instance& inst, const Trace& trace) {
  const Network& net = inst.network;
  Json out;
  out["mu_max"] = trace.mu_max;
  Json segs = Json::array();
  for (const auto& seg : trace.segments) {
    const SegmentCoefficients k = segment_social_costs(inst, seg);
    Json s;
    s["mu_lo"] = seg.mu_lo;
    s["mu_hi"] = seg.mu_hi;
    s["alpha"] = seg.alpha;
    s["beta"] = seg.beta;
    s["gamma"] = k.gamma;
    s["active_edges"] = edge_ids(net, seg.active_edges);
    Json w = Json::object();
    Json z = Json::object();
    for (std::size_t p = 0; p < inst.path_count(); ++p) {
      const std::string label = path_label(net, inst.paths.paths[p]);
      w[label] = seg.w(static_cast<Eigen::Index>(p));
      z[label] = seg.z(static_cast<Eigen::Index>(p));
    }
    s["w"] = w;
    s["z"] = z;
    segs.push_back(s);
  }
  out["segments"] = segs;
  auto bp_json = [&](const std::vector<Breakpoint>& bps) {
    Json arr = Json::array();
    for (const auto& bp : bps) {
      Json b;
      b["mu"] = bp.mu;
      b["left"] = edge_ids(net, bp.left);
      b["right"] = edge_ids(net, bp.right);
      arr.push_back(b);
    }
    return arr;
  };
  out["breakpoints"] = bp_json(trace.breakpoints);
  out["optimum_breakpoints"] = bp_json(optimum_breakpoints(trace.breakpoints));
  out["warnings"] = trace.warnings;
  return out;
}

Json curve_to_json(const PoACurve& curve, const PoAMax& max) {
  Json out;
  out["mu_max"] = curve.mu_max;
  Json bps = Json::array();
  for (std::size_t i = 0; i < curve.breakpoints.size(); ++i) {
    Json b;
    b["mu"] = curve.breakpoints[i];
    b["poa"] = curve.breakpoint_poa[i];
    bps.push_back(b);
  }
  out["breakpoints"] = bps;
  Json pieces = Json::array();
  for (const auto& piece : curve.pieces) {
    Json p;
    p["mu_lo"] = piece.mu_lo;
    p["mu_hi"] = piece.mu_hi;
    p["numerator"] = Json{{"alpha", piece.alpha}, {"beta", piece.beta}};
    p["denominator"] = Json{{"gamma", piece.gamma}, {"delta", piece.delta}, {"eta", piece.eta}};
    p["shape"] = to_string(piece.shape);
    if (piece.shape == Shape::Valley) p["valley_mu"] = piece.valley_mu;
    pieces.push_back(p);
  }
  out["pieces"] = pieces;
  out["max"] = Json{{"mu", max.mu}, {"poa", max.poa}};
  return out;
}

namespace {

std::map<std::string, std::size_t> label_index(const Instance& inst) {
  std::map<std::string, std::size_t> out;
  for (std::size_t p = 0; p < inst.path_count(); ++p) out[path_label(inst.network, inst.paths.paths[p])] = p;
  return out;
}

Eigen::VectorXd by_label(const Instance& inst, const std::map<std::string, std::size_t>& index, const Json& obj,
                         const std::string& where) {
  if (!obj.is_object()) throw Error(ErrorKind::InvalidArgument, where + ": expected an object keyed by path");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(inst.path_count()));
  for (const auto& [label, value] : obj.items()) {
    auto it = index.find(label);
    if (it == index.end()) throw Error(ErrorKind::InvalidArgument, where + ": unknown path '" + label + "'");
    if (!value.is_number()) throw Error(ErrorKind::InvalidArgument, where + "." + label + ": expected a number");
    out(static_cast<Eigen::Index>(it->second)) = value.get<double>();
  }
  return out;
}

double required_number(const Json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) {
    throw Error(ErrorKind::InvalidArgument, where + "." + key + ": expected a number");
  }
  return it->get<double>();
}

}  // namespace

std::vector<TraceSegment> segments_from_json(const Instance& inst, const Json& doc) {
  if (!doc.is_object() || !doc.contains("segments") || !doc["segments"].is_array()) {
    throw Error(ErrorKind::InvalidArgument, "trace: expected an object with a 'segments' array");
  }
  const auto index = label_index(inst);
  std::vector<TraceSegment> out;
  const Json& segs = doc["segments"];
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const std::string where = "segments[" + std::to_string(i) + "]";
    const Json& s = segs[i];
    if (!s.is_object()) throw Error(ErrorKind::InvalidArgument, where + ": expected an object");
    TraceSegment seg;
    seg.mu_lo = required_number(s, "mu_lo", where);
    seg.mu_hi = required_number(s, "mu_hi", where);
    seg.alpha = required_number(s, "alpha", where);
    seg.beta = required_number(s, "beta", where);
    seg.w = by_label(inst, index, s.value("w", Json()), where + ".w");
    seg.z = by_label(inst, index, s.value("z", Json()), where + ".z");
    out.push_back(std::move(seg));
  }
  return out;
}

Eigen::VectorXd flows_from_json(const Instance& inst, const Json& doc) {
  const auto index = label_index(inst);
  const Json& flows = doc.is_object() && doc.contains("path_flows") ? doc["path_flows"] : doc;
  return by_label(inst, index, flows, "path_flows");
}

}  // namespace poa
