#pragma once

// Instance files: one JSON object with fields m, T, a (row-major T x m), b, d,
// L, U, capacity [{alpha, beta}], pairwise [{i, j, r}], seed. Indices are
// 0-based. Unknown fields are rejected.

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "logitprice/model.hpp"

namespace logitprice {

namespace io_detail {

inline void reject_unknown(const nlohmann::json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw InvalidInput(where + " must be a JSON object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.contains(key)) throw InvalidInput("unknown field '" + key + "' in " + where);
}

template <typename T>
T required(const nlohmann::json& obj, const char* key) {
  if (!obj.contains(key)) throw InvalidInput(std::string("missing field '") + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("bad field '") + key + "': " + e.what());
  }
}

}  // namespace io_detail

inline nlohmann::json to_json(const PricingInstance& inst) {
  nlohmann::json j;
  j["m"] = inst.m;
  j["T"] = inst.T;
  j["a"] = inst.a;
  j["b"] = inst.b;
  j["d"] = inst.d;
  j["L"] = inst.L;
  j["U"] = inst.U;
  j["capacity"] = nlohmann::json::array();
  for (const auto& row : inst.capacity) j["capacity"].push_back({{"alpha", row.alpha}, {"beta", row.beta}});
  j["pairwise"] = nlohmann::json::array();
  for (const auto& rule : inst.pairwise) j["pairwise"].push_back({{"i", rule.i}, {"j", rule.j}, {"r", rule.r}});
  if (inst.seed) j["seed"] = *inst.seed;
  else j["seed"] = nullptr;
  return j;
}

inline PricingInstance instance_from_json(const nlohmann::json& j) {
  using io_detail::required;
  io_detail::reject_unknown(j, {"m", "T", "a", "b", "d", "L", "U", "capacity", "pairwise", "seed"}, "instance");
  PricingInstance inst;
  inst.m = required<std::size_t>(j, "m");
  inst.T = required<std::size_t>(j, "T");
  inst.a = required<std::vector<double>>(j, "a");
  inst.b = required<std::vector<double>>(j, "b");
  inst.d = required<std::vector<double>>(j, "d");
  inst.L = required<std::vector<double>>(j, "L");
  inst.U = required<std::vector<double>>(j, "U");
  if (j.contains("capacity")) {
    for (const auto& row : j.at("capacity")) {
      io_detail::reject_unknown(row, {"alpha", "beta"}, "capacity row");
      inst.capacity.push_back({required<std::vector<double>>(row, "alpha"), required<double>(row, "beta")});
    }
  }
  if (j.contains("pairwise")) {
    for (const auto& rule : j.at("pairwise")) {
      io_detail::reject_unknown(rule, {"i", "j", "r"}, "pairwise rule");
      inst.pairwise.push_back(
          {required<std::size_t>(rule, "i"), required<std::size_t>(rule, "j"), required<double>(rule, "r")});
    }
  }
  if (j.contains("seed") && !j.at("seed").is_null()) inst.seed = required<std::uint64_t>(j, "seed");
  inst.validate();
  return inst;
}

/// Round-trip exact: doubles are written with 17 significant digits.
inline std::string dump_instance(const PricingInstance& inst) { return to_json(inst).dump(2) + "\n"; }

inline PricingInstance parse_instance(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput(std::string("instance is not valid JSON: ") + e.what());
  }
  return instance_from_json(j);
}

inline PricingInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open instance file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str());
}

inline void save_instance(const PricingInstance& inst, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << dump_instance(inst);
}

}  // namespace logitprice
