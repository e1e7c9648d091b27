#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "check.hpp"
#include "direction_sets.hpp"
#include "lacunary.hpp"
#include "perron.hpp"
#include "probability.hpp"
#include "witnesses.hpp"

namespace perronlab {

using json = nlohmann::json;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// 17 significant digits: enough to round-trip any double.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << bytes;
  if (!out) throw IoError("write failed: " + path);
}

// ---- generator specs and samples ----

inline json to_json(const GeneratorSpec& s) {
  json j{{"gen", generator_name(s.gen)}, {"count", s.count}};
  if (s.seed) j["seed"] = *s.seed;
  return j;
}

inline GeneratorSpec generator_spec_from_json(const json& j) {
  GeneratorSpec s;
  s.gen = parse_generator(j.at("gen").get<std::string>());
  s.count = j.at("count").get<std::uint64_t>();
  if (j.contains("seed") && !j["seed"].is_null()) s.seed = j["seed"].get<std::uint64_t>();
  return s;
}

// "index,value" rows, 17 significant digits.
inline std::string sample_csv(const DirectionSample& s) {
  std::string out = "index,value\n";
  for (const auto& e : s.entries()) out += std::to_string(e.index) + "," + fmt17(e.angle) + "\n";
  return out;
}

inline std::string ordered_csv(const OrderedSample& s) {
  std::string out = "index,value\n";
  for (std::size_t i = 0; i < s.size(); ++i) out += std::to_string(i + 1) + "," + fmt17(s[i]) + "\n";
  return out;
}

inline json to_json(const Provenance& p) {
  json j{{"generator", p.generator}, {"first_index", p.first_index}, {"last_index", p.last_index}};
  j["seed"] = p.seed ? json(*p.seed) : json(nullptr);
  return j;
}

inline json to_json(const DirectionSample& s) {
  json values = json::array(), indices = json::array();
  for (const auto& e : s.entries()) {
    values.push_back(e.angle);
    indices.push_back(e.index);
  }
  return {{"provenance", to_json(s.provenance())}, {"values", values}, {"indices", indices}};
}

inline json to_json(const OrderedSample& s) { return json(std::vector<double>(s.values().begin(), s.values().end())); }

// ---- checks, estimates, reports ----

inline json to_json(const Check& c) {
  json j{{"name", c.name}, {"passed", c.passed}, {"required", c.required}};
  j["expected"] = c.expected ? json(*c.expected) : json(nullptr);
  j["observed"] = c.observed ? json(*c.observed) : json(nullptr);
  j["tolerance"] = c.tolerance ? json(*c.tolerance) : json(nullptr);
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

inline json to_json(const std::vector<Check>& checks) {
  json a = json::array();
  for (const auto& c : checks) a.push_back(to_json(c));
  return a;
}

inline json to_json(const CapacityEstimate& c) {
  return {{"N", c.N}, {"exact", c.exact}, {"value", c.value}, {"witness", to_json(c.witness)}};
}

inline CapacityEstimate capacity_from_json(const json& j) {
  return {j.at("N").get<unsigned>(), j.at("exact").get<bool>(), j.at("value").get<double>(), OrderedSample(j.at("witness").get<std::vector<double>>())};
}

inline json to_json(const FrequencyEstimate& f) {
  return {{"trials", f.trials}, {"hits", f.hits}, {"frequency", f.frequency}, {"stderr", f.stderr_}};
}

inline json to_json(const PropertySummary& s) {
  return {{"trials", s.trials}, {"max_g", s.max_g}, {"violations", s.violations}, {"bound", s.bound}};
}

template <typename T>
json opt_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

inline json to_json(const WitnessReport& r) {
  json j{{"kind", r.kind}, {"N", r.N}, {"horizon", r.horizon}, {"found", r.found}, {"witness", to_json(r.witness)},
         {"scale_log2", r.scale_log2}, {"indices", r.indices}, {"checks", to_json(r.checks)}, {"passed", r.passed()}};
  j["seed"] = opt_json(r.seed);
  j["g_value"] = opt_json(r.g_value);
  j["a"] = opt_json(r.a);
  j["d"] = opt_json(r.d);
  j["delta_log2"] = opt_json(r.delta_log2);
  j["eps_sup_norm"] = opt_json(r.eps_sup_norm);
  return j;
}

// ---- lacunary certificates ----

inline json to_json(const LacunaryCertificate& c) {
  json children = json::array();
  for (const auto& ch : c.children) children.push_back(to_json(ch));
  return {{"limit", c.limit}, {"lambda", c.lambda}, {"skeleton", c.skeleton}, {"children", children}};
}

inline LacunaryCertificate certificate_from_json(const json& j) {
  LacunaryCertificate c;
  if (j.is_null() || (j.is_object() && j.empty())) return c;
  c.limit = j.value("limit", 0.0);
  c.lambda = j.value("lambda", 0.5);
  if (j.contains("skeleton")) c.skeleton = j["skeleton"].get<std::vector<double>>();
  if (j.contains("children"))
    for (const auto& ch : j["children"]) c.children.push_back(certificate_from_json(ch));
  return c;
}

// ---- checksums ----

// FNV-1a, 64 bit.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace perronlab
