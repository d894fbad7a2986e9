#pragma once

#include <string>
#include <tuple>
#include <vector>

#include "poa/errors.hpp"
#include "poa/io.hpp"

namespace support {

inline std::string data_path(const std::string& file) { return std::string(POA_DATA_DIR) + "/" + file; }

inline poa::Instance fixture(const std::string& name) { return poa::load_instance(data_path(name + ".json")); }

using EdgeDef = std::tuple<std::string, std::string, std::string, poa::CostFunction>;

/// Network with origin "O" and destination "D".
inline poa::Instance build(const std::vector<std::string>& vertices, const std::vector<EdgeDef>& edges) {
  std::vector<poa::EdgeSpec> specs;
  std::vector<poa::CostFunction> costs;
  for (const auto& [id, tail, head, cost] : edges) {
    specs.push_back({id, tail, head});
    costs.push_back(cost);
  }
  return poa::make_instance(poa::Network(vertices, specs, "O", "D"), costs);
}

inline poa::Instance parallel(const poa::CostFunction& c1, const poa::CostFunction& c2) {
  return build({"O", "D"}, {{"e1", "O", "D", c1}, {"e2", "O", "D", c2}});
}

inline poa::Instance single_edge(const poa::CostFunction& c) { return build({"O", "D"}, {{"e1", "O", "D", c}}); }

inline std::size_t path_of(const poa::Instance& inst, const std::string& label) {
  for (std::size_t p = 0; p < inst.path_count(); ++p) {
    if (poa::path_label(inst.network, inst.paths.paths[p]) == label) return p;
  }
  throw std::runtime_error("no path " + label);
}

inline std::size_t edge_of(const poa::Instance& inst, const std::string& id) { return *inst.network.find_edge(id); }

template <class F>
poa::ErrorKind error_kind(F&& f) {
  try {
    f();
  } catch (const poa::Error& e) {
    return e.kind();
  }
  throw std::runtime_error("expected a poa::Error");
}

}  // namespace support
