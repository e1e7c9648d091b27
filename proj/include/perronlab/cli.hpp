#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "figures.hpp"
#include "io.hpp"
#include "kakeya.hpp"
#include "lacunary.hpp"
#include "perron.hpp"
#include "probability.hpp"
#include "witnesses.hpp"

namespace perronlab {

inline constexpr const char* kToolVersion = "0.1.0";

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Everything an experiment needs. Filled from a JSON object whose keys are the long
// flag names with '-' replaced by '_'.
struct RunConfig {
  std::string command;
  // direction sets
  std::string set = "lin";
  std::uint64_t count = 16;
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<double>> values;
  std::string variant = "capacity";
  // capacity / witnesses / probability
  unsigned n = 2;
  std::string strategy = "swap";
  std::optional<double> budget;
  std::uint64_t search_seed = 0;
  std::uint64_t a = 1;
  std::uint64_t a_max = 20000;
  std::uint64_t d_max = 100000;
  std::uint64_t trials = 1000000;
  std::uint64_t d = 40;
  std::uint64_t d2 = 1000;
  std::uint64_t d_lo = 50;
  std::uint64_t d_hi = 10000;
  // geometry
  unsigned j = 3;
  unsigned j_min = 1;
  unsigned j_max = 4;
  double resolution = 256.0;
  double alpha = 0.8;
  std::optional<double> aspect;
  unsigned phases = 4;
  double threshold = 0.45;
  double coverage = 0.95;
  // lacunary
  std::optional<std::string> input;
  std::optional<unsigned> order;
  // outputs
  std::optional<std::string> out, csv, svg, pgm;
  // execution only; not part of the report
  unsigned workers = 1;
};

inline const std::set<std::string>& known_commands() {
  static const std::set<std::string> c{"gen", "factor", "capacity", "witness-t1", "witness-t2", "verify-prob", "verify-p5", "verify-spacing", "blow", "maxop", "certify-lacunary"};
  return c;
}

namespace detail {

template <typename T>
void take(const json& j, const char* key, T& field) {
  if (j.contains(key) && !j[key].is_null()) field = j[key].get<T>();
}

template <typename T>
void take(const json& j, const char* key, std::optional<T>& field) {
  if (j.contains(key) && !j[key].is_null()) field = j[key].get<T>();
}

}  // namespace detail

inline RunConfig config_from_json(const json& j) {
  static const std::set<std::string> keys{"command", "set", "count", "seed", "values", "variant", "n", "strategy", "budget", "search_seed", "a", "a_max", "d_max", "trials", "d", "d2",
                                          "d_lo", "d_hi", "j", "j_min", "j_max", "resolution", "alpha", "aspect", "phases", "threshold", "coverage", "input", "order", "out", "csv",
                                          "svg", "pgm", "workers"};
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [k, v] : j.items())
    if (!keys.count(k)) throw ConfigError("unknown config key: " + k);
  RunConfig c;
  try {
    using detail::take;
    take(j, "command", c.command);
    take(j, "set", c.set);
    take(j, "count", c.count);
    take(j, "seed", c.seed);
    take(j, "values", c.values);
    take(j, "variant", c.variant);
    take(j, "n", c.n);
    take(j, "strategy", c.strategy);
    take(j, "budget", c.budget);
    take(j, "search_seed", c.search_seed);
    take(j, "a", c.a);
    take(j, "a_max", c.a_max);
    take(j, "d_max", c.d_max);
    take(j, "trials", c.trials);
    take(j, "d", c.d);
    take(j, "d2", c.d2);
    take(j, "d_lo", c.d_lo);
    take(j, "d_hi", c.d_hi);
    take(j, "j", c.j);
    take(j, "j_min", c.j_min);
    take(j, "j_max", c.j_max);
    take(j, "resolution", c.resolution);
    take(j, "alpha", c.alpha);
    take(j, "aspect", c.aspect);
    take(j, "phases", c.phases);
    take(j, "threshold", c.threshold);
    take(j, "coverage", c.coverage);
    take(j, "input", c.input);
    take(j, "order", c.order);
    take(j, "out", c.out);
    take(j, "csv", c.csv);
    take(j, "svg", c.svg);
    take(j, "pgm", c.pgm);
    take(j, "workers", c.workers);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  return c;
}

// Echo of the experiment parameters (workers excluded: results do not depend on it).
inline json config_echo(const RunConfig& c) {
  json j{{"command", c.command}, {"set", c.set}, {"count", c.count}, {"variant", c.variant}, {"n", c.n}, {"strategy", c.strategy}, {"search_seed", c.search_seed},
         {"a", c.a}, {"a_max", c.a_max}, {"d_max", c.d_max}, {"trials", c.trials}, {"d", c.d}, {"d2", c.d2}, {"d_lo", c.d_lo}, {"d_hi", c.d_hi}, {"j", c.j},
         {"j_min", c.j_min}, {"j_max", c.j_max}, {"resolution", c.resolution}, {"alpha", c.alpha}, {"phases", c.phases}, {"threshold", c.threshold},
         {"coverage", c.coverage}};
  j["seed"] = opt_json(c.seed);
  j["values"] = opt_json(c.values);
  j["budget"] = opt_json(c.budget);
  j["aspect"] = opt_json(c.aspect);
  j["input"] = opt_json(c.input);
  j["order"] = opt_json(c.order);
  j["out"] = opt_json(c.out);
  j["csv"] = opt_json(c.csv);
  j["svg"] = opt_json(c.svg);
  j["pgm"] = opt_json(c.pgm);
  return j;
}

inline void validate(const RunConfig& c) {
  if (!known_commands().count(c.command)) throw ConfigError("unknown command: " + c.command);
  auto positive = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string(what) + " must be positive");
  };
  positive(c.count > 0, "count");
  positive(c.trials > 0, "trials");
  positive(c.a > 0 && c.a_max > 0 && c.d_max > 0, "a, a_max and d_max");
  positive(c.d > 0 && c.d2 > 0 && c.d_lo > 0 && c.d_hi >= c.d_lo, "d values");
  positive(c.resolution > 0.0 && c.phases > 0 && c.workers > 0, "resolution, phases and workers");
  if (c.variant != "capacity" && c.variant != "ordered") throw ConfigError("variant must be capacity or ordered");
  if (c.strategy != "exact" && c.strategy != "greedy" && c.strategy != "swap") throw ConfigError("strategy must be exact, greedy or swap");
  const bool needs_seed = c.command.starts_with("witness") || c.command.starts_with("verify") ||
                          ((c.command == "gen" || c.command == "factor" || c.command == "capacity") && !c.values && is_random(parse_generator(c.set)));
  if (needs_seed && !c.seed) throw ConfigError("command " + c.command + " needs an explicit seed");
  if (c.j_min > c.j_max || c.j_max > 8 || c.j > 8) throw ConfigError("J values out of range");
  if (c.command == "certify-lacunary" && !c.input) throw ConfigError("certify-lacunary needs an input file");
}

struct Report {
  json body;
  bool passed = false;
  double seconds = 0.0;

  std::string checksum() const { return hex64(fnv1a64(body.dump())); }

  json to_json(bool with_timing = true) const {
    json j = body;
    j["checksum"] = checksum();
    if (with_timing) j["timing"] = {{"seconds", seconds}};
    return j;
  }
};

namespace detail {

inline OrderedSample universe_for(const RunConfig& c) {
  if (c.values) return OrderedSample::from_unsorted(*c.values);
  GeneratorSpec spec{parse_generator(c.set), c.count, is_random(parse_generator(c.set)) ? c.seed : std::nullopt};
  return invert(generate(spec));
}

inline void emit(const std::optional<std::string>& path, const std::string& bytes) {
  if (path) write_file(*path, bytes);
}

inline Check bound_check(std::string name, bool ok, double expected, double observed, std::optional<double> tol = std::nullopt, std::string note = "") {
  return {std::move(name), ok, expected, observed, tol, true, std::move(note)};
}

inline double tree_aspect(const RunConfig& c, unsigned J) { return c.aspect ? *c.aspect : default_tree_aspect(std::size_t{1} << J); }

struct TreeScene {
  std::vector<OrientedRectangle> rects, moved;
  DirectionSample directions;
  RasterGrid grid;
};

inline TreeScene tree_scene(const RunConfig& c, unsigned J) {
  PerronTreeOptions opt;
  opt.alpha = c.alpha;
  opt.aspect = tree_aspect(c, J);
  auto dirs = spread_directions(J);
  auto rects = perron_tree(dirs, opt);
  auto moved = translate_all(rects);
  std::vector<OrientedRectangle> all(rects);
  all.insert(all.end(), moved.begin(), moved.end());
  auto grid = RasterGrid::covering(all, c.resolution, 0.05);
  return {std::move(rects), std::move(moved), std::move(dirs), std::move(grid)};
}

inline std::string prob_csv(const std::vector<Check>& checks, const std::vector<double>& stderrs) {
  std::string out = "check,analytic,empirical,stderr,pass\n";
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const auto& c = checks[i];
    out += c.name + "," + (c.expected ? fmt17(*c.expected) : "") + "," + (c.observed ? fmt17(*c.observed) : "") + "," + (i < stderrs.size() ? fmt17(stderrs[i]) : "") + "," +
           (c.passed ? "true" : "false") + "\n";
  }
  return out;
}

}  // namespace detail

// Runs one experiment and writes its artifacts. Throws ConfigError for bad input and
// IoError when an artifact cannot be written.
inline Report run(const RunConfig& c) {
  validate(c);
  const auto t0 = std::chrono::steady_clock::now();
  const Workers workers{c.workers};
  std::vector<Check> checks;
  json result;

  try {
    if (c.command == "gen") {
      if (c.values) throw ConfigError("gen does not take explicit values");
      const auto g = parse_generator(c.set);
      const auto sample = generate({g, c.count, is_random(g) ? c.seed : std::nullopt});
      result["sample"] = to_json(sample);
      try {
        const auto inv = invert(sample);
        result["inverse"] = to_json(inv);
        detail::emit(c.svg, scatter_figure(inv.values(), std::string(generator_name(g)) + ": inverse values pi/omega"));
      } catch (const std::overflow_error&) {
        result["inverse"] = nullptr;
        result["note"] = "inverse values exceed double range";
      }
      detail::emit(c.csv, sample_csv(sample));
      checks.push_back({"sample_generated", sample.size() == c.count, static_cast<double>(c.count), static_cast<double>(sample.size())});
    } else if (c.command == "factor") {
      const auto u = detail::universe_for(c);
      const auto variant = c.variant == "ordered" ? FactorVariant::OrderedForm : FactorVariant::CapacityForm;
      const auto best = perron_factor_argmax(u.values(), variant);
      result = {{"universe", to_json(u)}, {"variant", c.variant}, {"g", best.value}, {"k", best.k}, {"l", best.l}};
      checks.push_back(detail::bound_check("g_at_least_2", best.value >= 2.0, 2.0, best.value));
    } else if (c.command == "capacity") {
      const auto u = detail::universe_for(c);
      CapacityEstimate est;
      if (c.strategy == "exact") {
        est = capacity_exact_small(u, c.n, c.budget.value_or(kDefaultEnumerationBudget), workers);
      } else {
        SearchOptions so;
        so.strategy = c.strategy == "greedy" ? SearchStrategy::Greedy : SearchStrategy::SwapLocalSearch;
        so.seed = c.search_seed;
        so.budget = static_cast<std::uint64_t>(c.budget.value_or(200000.0));
        est = capacity_search(u, c.n, so);
      }
      result = to_json(est);
      bool subset = true;
      for (double w : est.witness.values()) subset = subset && std::binary_search(u.values().begin(), u.values().end(), w);
      checks.push_back(detail::bound_check("value_at_least_2", est.value >= 2.0, 2.0, est.value));
      checks.push_back({"witness_in_universe", subset && est.witness.size() == (std::size_t{1} << c.n)});
    } else if (c.command == "witness-t1" || c.command == "witness-t2") {
      const RandomStream stream(*c.seed);
      const bool t1 = c.command == "witness-t1";
      const auto r = t1 ? homogeneous_witness_search(stream, c.n, c.a_max, c.seed) : dyadic_witness_search(stream, c.n, c.d_max, c.seed);
      result = to_json(r);
      checks.push_back({"witness_found", r.found});
      for (const auto& ch : r.checks)
        if (ch.name != "witness_found") checks.push_back(ch);
      detail::emit(c.svg, t1 ? homogeneous_figure(r) : dyadic_filling_figure(r, stream));
    } else if (c.command == "verify-prob") {
      check_subdivision(c.n);
      const std::uint64_t parts = std::uint64_t{1} << c.n;
      if (c.d <= parts || c.d2 <= parts) throw ConfigError("d and d2 must exceed 2^N");
      std::vector<double> stderrs;
      json rows = json::array();
      for (std::uint64_t l = 1; l <= parts; ++l) {
        const double p = p_analytic(c.n, l);
        const auto f1 = mc_p(c.n, l, c.trials, *c.seed, c.d, workers);
        const auto f2 = mc_p(c.n, l, c.trials, *c.seed ^ 0x5bd1e995ULL, c.d2, workers);
        const double s = binomial_stderr(p, c.trials);
        const std::string tag = "p_" + std::to_string(c.n) + "_" + std::to_string(l);
        checks.push_back(detail::bound_check(tag + "@d=" + std::to_string(c.d), within_band(f1, p), p, f1.frequency, kSigmaBand * s));
        stderrs.push_back(s);
        checks.push_back(detail::bound_check(tag + "@d=" + std::to_string(c.d2), within_band(f2, p), p, f2.frequency, kSigmaBand * s));
        stderrs.push_back(s);
        const double diff_tol = kSigmaBand * std::sqrt(2.0) * s;
        checks.push_back(detail::bound_check(tag + "_d_independence", std::abs(f1.frequency - f2.frequency) <= diff_tol, 0.0, f1.frequency - f2.frequency, diff_tol));
        stderrs.push_back(std::sqrt(2.0) * s);
        rows.push_back({{"l", l}, {"analytic", p}, {"d", to_json(f1)}, {"d2", to_json(f2)}});
      }
      const double q = homogeneous_inclusion_prob(c.n);
      const auto fh = mc_homogeneous_inclusion(c.n, c.a, c.trials, *c.seed ^ 0x9e3779b9ULL, workers);
      const double sq = binomial_stderr(q, c.trials);
      checks.push_back(detail::bound_check("homogeneous_inclusion", within_band(fh, q), q, fh.frequency, kSigmaBand * sq));
      stderrs.push_back(sq);
      const double et = eta(c.n);
      const auto fa = mc_event_A(RandomStream(*c.seed), c.n, c.d_lo, c.d_hi);
      checks.push_back(detail::bound_check("event_A_at_least_eta", fa.frequency >= et - kSigmaBand * fa.stderr_, et, fa.frequency, kSigmaBand * fa.stderr_));
      stderrs.push_back(fa.stderr_);
      result = {{"p", rows}, {"eta", et}, {"log_eta", log_eta(c.n)}, {"homogeneous_inclusion", {{"analytic", q}, {"estimate", to_json(fh)}}}, {"event_A", to_json(fa)}};
      detail::emit(c.csv, detail::prob_csv(checks, stderrs));
    } else if (c.command == "verify-p5") {
      const auto s = verify_perturbations(c.n, c.a, c.trials, *c.seed, workers);
      result = to_json(s);
      checks.push_back(detail::bound_check("g_below_6", s.violations == 0 && s.max_g < 6.0, 6.0, s.max_g));
      checks.push_back(detail::bound_check("g_below_10_3", s.max_g <= 10.0 / 3.0 + 1e-9, 10.0 / 3.0, s.max_g, 1e-9));
    } else if (c.command == "verify-spacing") {
      const auto s = verify_spacing(c.n, c.trials, *c.seed, workers);
      result = to_json(s);
      checks.push_back(detail::bound_check("g_at_most_6", s.violations == 0 && s.max_g <= 6.0 + 1e-9, 6.0, s.max_g, 1e-9));
      checks.push_back(detail::bound_check("g_at_most_10_3", s.max_g <= 10.0 / 3.0 + 1e-9, 10.0 / 3.0, s.max_g, 1e-9));
    } else if (c.command == "blow") {
      json rows = json::array();
      std::vector<double> areas, ratios;
      for (unsigned J = c.j_min; J <= c.j_max; ++J) {
        const auto scene = detail::tree_scene(c, J);
        const double base = union_measure(scene.rects, scene.grid, workers);
        const double moved = union_measure(scene.moved, scene.grid, workers);
        areas.push_back(base);
        ratios.push_back(moved / base);
        rows.push_back({{"J", J}, {"union_area", base}, {"translated_area", moved}, {"blow_ratio", moved / base}, {"aspect", detail::tree_aspect(c, J)}});
        if (J == c.j_max) {
          detail::emit(c.svg, rectangles_figure(scene.rects, scene.grid));
          if (c.pgm) detail::emit(c.pgm, mask_pgm(rasterize(scene.rects, scene.grid, workers)));
        }
      }
      for (std::size_t i = 1; i < areas.size(); ++i) {
        const auto tag = std::to_string(c.j_min + i - 1) + "_to_" + std::to_string(c.j_min + i);
        checks.push_back(detail::bound_check("area_decreases_" + tag, areas[i] <= 0.98 * areas[i - 1], areas[i - 1], areas[i], 0.02));
        checks.push_back(detail::bound_check("ratio_increases_" + tag, ratios[i] >= 1.02 * ratios[i - 1], ratios[i - 1], ratios[i], 0.02));
      }
      if (areas.size() == 1) checks.push_back(detail::bound_check("positive_area", areas[0] > 0.0, 0.0, areas[0]));
      result = {{"series", rows}};
    } else if (c.command == "maxop") {
      const auto scene = detail::tree_scene(c, c.j);
      const auto mask = rasterize(scene.rects, scene.grid, workers);
      const auto moved = rasterize(scene.moved, scene.grid, workers);
      const double len = scene.rects.front().length;
      const double asp = detail::tree_aspect(c, c.j);
      MaxOpOptions mo{len, 2.0 * len, asp, 2.0 * asp, c.phases};
      const auto field = discrete_max_op(mask, scene.grid, scene.directions, mo, workers);
      std::size_t total = 0, hit = 0;
      for (std::size_t jj = 0; jj < scene.grid.ny(); ++jj)
        for (std::size_t i = 0; i < scene.grid.nx(); ++i)
          if (moved.at(i, jj)) {
            ++total;
            hit += field.at(i, jj) >= static_cast<float>(c.threshold) ? 1 : 0;
          }
      const double frac = total ? static_cast<double>(hit) / static_cast<double>(total) : 0.0;
      result = {{"J", c.j}, {"translated_pixels", total}, {"pixels_at_threshold", hit}, {"fraction", frac}, {"threshold", c.threshold},
                {"lengths", field.lengths}, {"aspects", field.aspects}, {"grid", {{"nx", scene.grid.nx()}, {"ny", scene.grid.ny()}}}};
      checks.push_back(detail::bound_check("translates_in_level_set", frac >= c.coverage, c.coverage, frac));
      detail::emit(c.pgm, field_pgm(field));
      detail::emit(c.svg, rectangles_figure(scene.rects, scene.grid, &field, 0.5f));
    } else if (c.command == "certify-lacunary") {
      json in;
      try {
        in = json::parse(read_file(*c.input));
      } catch (const json::exception& e) {
        throw ConfigError(std::string("bad certificate input: ") + e.what());
      }
      const auto omega = in.at("omega").get<std::vector<double>>();
      const auto cert = certificate_from_json(in.value("certificate", json::object()));
      const unsigned order = c.order ? *c.order : in.value("order", 1u);
      const auto r = verify_order_certificate(omega, cert, order);
      result = {{"valid", r.valid}, {"reason", r.reason}, {"order", order}, {"depth", certificate_depth(cert)}, {"points", omega.size()}};
      checks.push_back({"certificate_valid", r.valid, {}, {}, {}, true, r.reason});
    }
  } catch (const IoError&) {
    throw;
  } catch (const ConfigError&) {
    throw;
  } catch (const json::exception& e) {
    throw ConfigError(e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const std::out_of_range& e) {
    throw ConfigError(e.what());
  } catch (const std::length_error& e) {
    throw ConfigError(e.what());
  }

  Report rep;
  rep.passed = all_required_pass(checks);
  rep.body = {{"tool", "perronlab"}, {"version", kToolVersion}, {"config", config_echo(c)}, {"checks", to_json(checks)}, {"result", result}, {"passed", rep.passed}};
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (c.out) write_file(*c.out, rep.to_json(true).dump(2) + "\n");
  return rep;
}

inline int exit_code(const Report& r) { return r.passed ? 0 : 1; }

}  // namespace perronlab
