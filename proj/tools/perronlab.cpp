#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "perronlab/cli.hpp"

using perronlab::json;

namespace {

enum class Kind { U64, Dbl, Str, DblList };

struct Flag {
  const char* key;
  const char* name;
  Kind kind;
  const char* help;
};

const Flag kFlags[] = {
    {"set", "--set", Kind::Str, "generator: lin, lac, sin-lin, sin-lac, rand-lin, rand-lac"},
    {"count", "--count", Kind::U64, "number of directions"},
    {"seed", "--seed", Kind::U64, "random seed"},
    {"values", "--values", Kind::DblList, "explicit inverse values, comma separated"},
    {"variant", "--variant", Kind::Str, "Perron factor form: capacity or ordered"},
    {"n", "--n", Kind::U64, "N, subsets of size 2^N"},
    {"strategy", "--strategy", Kind::Str, "capacity search: exact, greedy or swap"},
    {"budget", "--budget", Kind::Dbl, "evaluation budget"},
    {"search_seed", "--search-seed", Kind::U64, "seed for search restarts"},
    {"a", "--a", Kind::U64, "homogeneous multiplier a"},
    {"a_max", "--a-max", Kind::U64, "largest multiplier tried"},
    {"d_max", "--d-max", Kind::U64, "largest dyadic scale tried"},
    {"trials", "--trials", Kind::U64, "Monte Carlo trials"},
    {"d", "--d", Kind::U64, "scale d"},
    {"d2", "--d2", Kind::U64, "second scale for the d-independence check"},
    {"d_lo", "--d-lo", Kind::U64, "first d of the event frequency range"},
    {"d_hi", "--d-hi", Kind::U64, "last d of the event frequency range"},
    {"j", "--j", Kind::U64, "tree depth J (2^J directions)"},
    {"j_min", "--j-min", Kind::U64, "smallest J"},
    {"j_max", "--j-max", Kind::U64, "largest J"},
    {"resolution", "--resolution", Kind::Dbl, "pixels per unit length"},
    {"alpha", "--alpha", Kind::Dbl, "Perron-tree base fraction kept per merge"},
    {"aspect", "--aspect", Kind::Dbl, "rectangle length/width ratio"},
    {"phases", "--phases", Kind::U64, "sub-pixel phases per axis"},
    {"threshold", "--threshold", Kind::Dbl, "level for the maximal-function test"},
    {"coverage", "--coverage", Kind::Dbl, "required fraction of translated pixels"},
    {"input", "--input", Kind::Str, "certificate JSON file"},
    {"order", "--order", Kind::U64, "claimed lacunary order"},
    {"out", "--out", Kind::Str, "write the JSON report here"},
    {"csv", "--csv", Kind::Str, "write a CSV table here"},
    {"svg", "--svg", Kind::Str, "write an SVG figure here"},
    {"pgm", "--pgm", Kind::Str, "write a PGM image here"},
    {"workers", "--workers", Kind::U64, "worker threads"},
};

json convert(const Flag& f, const std::string& raw) {
  try {
    switch (f.kind) {
      case Kind::U64: {
        std::size_t pos = 0;
        if (!raw.empty() && raw[0] == '-') throw std::invalid_argument("negative");
        auto v = std::stoull(raw, &pos);
        if (pos != raw.size()) throw std::invalid_argument("trailing");
        return v;
      }
      case Kind::Dbl: {
        std::size_t pos = 0;
        double v = std::stod(raw, &pos);
        if (pos != raw.size()) throw std::invalid_argument("trailing");
        return v;
      }
      case Kind::Str:
        return raw;
      case Kind::DblList: {
        json a = json::array();
        std::stringstream ss(raw);
        std::string item;
        while (std::getline(ss, item, ',')) {
          std::size_t pos = 0;
          a.push_back(std::stod(item, &pos));
          if (pos != item.size()) throw std::invalid_argument("trailing");
        }
        return a;
      }
    }
  } catch (const std::exception&) {
  }
  throw perronlab::ConfigError(std::string("bad value for ") + f.name + ": " + raw);
}

void print_summary(const perronlab::Report& r) {
  const auto& b = r.body;
  std::printf("%s: %s (checksum %s, %.3f s)\n", b["config"]["command"].get<std::string>().c_str(), r.passed ? "PASS" : "FAIL", r.checksum().c_str(), r.seconds);
  for (const auto& c : b["checks"]) {
    std::string line = std::string(c["passed"].get<bool>() ? "  ok   " : "  FAIL ") + c["name"].get<std::string>();
    if (!c["observed"].is_null()) line += " observed=" + perronlab::fmt17(c["observed"].get<double>());
    if (!c["expected"].is_null()) line += " expected=" + perronlab::fmt17(c["expected"].get<double>());
    if (!c["tolerance"].is_null()) line += " tol=" + perronlab::fmt17(c["tolerance"].get<double>());
    if (!c["required"].get<bool>()) line += " (informational)";
    std::puts(line.c_str());
  }
  const auto& res = b["result"];
  if (res.is_object() && res.contains("g")) std::printf("G = %s\n", perronlab::fmt17(res["g"].get<double>()).c_str());
  if (res.is_object() && res.contains("value") && res.contains("exact")) std::printf("capacity = %s\n", perronlab::fmt17(res["value"].get<double>()).c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"perronlab: Perron factors, random lacunary directions and Kakeya blow experiments"};
  app.require_subcommand(1);
  app.fallthrough();

  std::map<std::string, std::string> given;
  for (const auto& f : kFlags) app.add_option_function<std::string>(f.name, [&given, key = f.key](const std::string& v) { given[key] = v; }, f.help);
  std::string config_path;
  bool as_json = false;
  app.add_option("--config", config_path, "JSON config file; flags override its values");
  app.add_flag("--json", as_json, "print the full JSON report");

  std::string command;
  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& id, const std::string& help) {
    parent->add_subcommand(name, help)->callback([&command, id] { command = id; });
  };
  leaf(&app, "gen", "gen", "generate a direction set");
  leaf(&app, "factor", "factor", "Perron factor of an inverse sample");
  leaf(&app, "capacity", "capacity", "Perron capacity G_N of an inverse sample");
  auto* witness = app.add_subcommand("witness", "constructive witness searches")->require_subcommand(1);
  leaf(witness, "t1", "witness-t1", "homogeneous-set witness");
  leaf(witness, "t2", "witness-t2", "dyadic-filling witness");
  auto* verify = app.add_subcommand("verify", "Monte Carlo and property checks")->require_subcommand(1);
  leaf(verify, "prob", "verify-prob", "closed-form probabilities");
  leaf(verify, "p5", "verify-p5", "perturbed homogeneous sets");
  leaf(verify, "spacing", "verify-spacing", "bounded-gap samples");
  leaf(&app, "blow", "blow", "Perron-tree union areas and blow ratios");
  leaf(&app, "maxop", "maxop", "directional maximal function on a Perron tree");
  leaf(&app, "certify-lacunary", "certify-lacunary", "check a lacunary-order certificate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    json merged = json::object();
    if (!config_path.empty()) {
      try {
        merged = json::parse(perronlab::read_file(config_path));
      } catch (const json::exception& e) {
        throw perronlab::ConfigError(std::string("bad config file: ") + e.what());
      }
      if (!merged.is_object()) throw perronlab::ConfigError("config file must hold a JSON object");
    }
    for (const auto& f : kFlags)
      if (auto it = given.find(f.key); it != given.end()) merged[f.key] = convert(f, it->second);
    merged["command"] = command;
    const auto config = perronlab::config_from_json(merged);
    const auto report = perronlab::run(config);
    if (as_json)
      std::cout << report.to_json(true).dump(2) << "\n";
    else
      print_summary(report);
    return perronlab::exit_code(report);
  } catch (const perronlab::ConfigError& e) {
    std::fprintf(stderr, "invalid configuration: %s\n", e.what());
    return 2;
  } catch (const perronlab::IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
