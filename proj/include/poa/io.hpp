#pragma once

#include <string>

#include <json.hpp>

#include "poa/equilibrium.hpp"
#include "poa/parametric.hpp"
#include "poa/poa_analytics.hpp"

namespace poa {

using Json = nlohmann::ordered_json;

/// Parses a network document. Errors name the offending line or field.
Instance parse_instance(const std::string& text, std::size_t path_cap = kDefaultPathCap,
                        const std::string& source = "<input>");
Instance load_instance(const std::string& path, std::size_t path_cap = kDefaultPathCap);

std::string read_file(const std::string& path);

Json edge_ids(const Network& net, const std::vector<EdgeIndex>& edges);
Json solution_to_json(const Instance& inst, const FlowSolution& sol);
Json report_to_json(const Instance& inst, const WardropReport& report);
Json trace_to_json(const Instance& inst, const Trace& trace);
Json curve_to_json(const PoACurve& curve, const PoAMax& max);

/// Segments of a trace document; w and z are keyed by path label.
std::vector<TraceSegment> segments_from_json(const Instance& inst, const Json& doc);

/// Path flows keyed by path label; unlisted paths carry no flow.
Eigen::VectorXd flows_from_json(const Instance& inst, const Json& doc);

}  // namespace poa
