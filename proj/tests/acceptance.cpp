// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "perronlab/cli.hpp"

using namespace perronlab;

namespace {

std::string golden(const std::string& name) { return std::string(PERRONLAB_GOLDEN_DIR) + "/" + name; }

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Outcome()> body;
};

std::string num(double v) { return fmt17(v); }

Outcome exact_factor() {
  Outcome o;
  for (std::uint64_t a : {1, 2, 5, 1000})
    for (unsigned N = 1; N <= 5; ++N) {
      const auto h = homogeneous_set({a, N});
      const double g = h.size() >= 3 ? perron_factor(h) : 2.0;
      o.require(std::abs(g - 2.0) <= 1e-12, "G(H_{" + std::to_string(a) + "," + std::to_string(N) + "}) = " + num(g));
    }
  if (o.ok) o.detail = "G = 2 for all 20 (a, N)";
  return o;
}

Outcome perturbation_suite() {
  Outcome o;
  double worst = 0.0;
  for (unsigned N : {1u, 2u, 3u, 5u}) {
    const auto s = verify_perturbations(N, 3, 10000, 1000 + N);
    worst = std::max(worst, s.max_g);
    o.require(s.violations == 0 && s.max_g < 6.0, "N=" + std::to_string(N) + " max G " + num(s.max_g));
    o.require(s.max_g <= 10.0 / 3.0 + 1e-9, "N=" + std::to_string(N) + " above 10/3: " + num(s.max_g));
  }
  if (o.ok) o.detail = "max G over 4x10^4 trials = " + num(worst);
  return o;
}

Outcome spacing_suite() {
  Outcome o;
  double worst = 0.0;
  for (unsigned N : {2u, 3u, 4u, 5u}) {
    const auto s = verify_spacing(N, 10000, 2000 + N);
    worst = std::max(worst, s.max_g);
    o.require(s.violations == 0 && s.max_g <= 6.0 + 1e-9, "N=" + std::to_string(N) + " max G " + num(s.max_g));
  }
  if (o.ok) o.detail = "max G over 4x10^4 trials = " + num(worst);
  return o;
}

Outcome probability_formulas() {
  Outcome o;
  const std::uint64_t trials = 1000000;
  int checks = 0;
  for (unsigned N : {1u, 2u})
    for (std::uint64_t l = 1; l <= (1u << N); ++l) {
      const double p = p_analytic(N, l);
      const double s = binomial_stderr(p, trials);
      const auto f1 = mc_p(N, l, trials, 31 * N + l, 20);
      const auto f2 = mc_p(N, l, trials, 977 * N + l, 600);
      const std::string tag = "p_{" + std::to_string(N) + "," + std::to_string(l) + "}";
      o.require(within_band(f1, p), tag + " at d=20: " + num(f1.frequency) + " vs " + num(p));
      o.require(within_band(f2, p), tag + " at d=600: " + num(f2.frequency) + " vs " + num(p));
      o.require(std::abs(f1.frequency - f2.frequency) <= kSigmaBand * std::sqrt(2.0) * s, tag + " depends on d");
      checks += 3;
    }
  if (o.ok) o.detail = std::to_string(checks) + " band checks within 4 sigma";
  return o;
}

Outcome inclusion_probability() {
  Outcome o;
  std::string seen;
  for (unsigned N : {1u, 2u}) {
    const double q = homogeneous_inclusion_prob(N);
    const auto f = mc_homogeneous_inclusion(N, 1 + N, 1000000, 4242 + N);
    o.require(within_band(f, q), "N=" + std::to_string(N) + ": " + num(f.frequency) + " vs " + num(q));
    seen += (seen.empty() ? "" : ", ") + ("N=" + std::to_string(N) + ": " + num(f.frequency) + " vs " + num(q));
  }
  if (o.ok) o.detail = seen;
  return o;
}

Outcome homogeneous_witness() {
  Outcome o;
  const RandomStream stream(42);
  const auto r = homogeneous_witness_search(stream, 2, 20000, 42);
  o.require(r.found, "no witness for a <= 20000");
  if (!r.found) return o;
  for (std::size_t i = 0; i < r.indices.size(); ++i)
    o.require(r.witness[i] == static_cast<double>(r.indices[i]) / stream.value(r.indices[i]), "witness value differs from k a / X_ka");
  o.require(r.g_value && *r.g_value < 6.0, "G >= 6");
  json cfg{{"command", "witness-t1"}, {"n", 2}, {"seed", 42}, {"a_max", 20000}};
  const auto text = run(config_from_json(cfg)).to_json(false).dump(2) + "\n";
  o.require(text == read_file(golden("homogeneous_seed42_n2_report.json")), "report differs from golden file");
  if (o.ok) o.detail = "a = " + std::to_string(*r.a) + ", G = " + num(*r.g_value) + ", golden report identical";
  return o;
}

Outcome dyadic_witness() {
  Outcome o;
  const RandomStream stream(42);
  std::string seen;
  for (unsigned N : {1u, 2u}) {
    const auto r = dyadic_witness_search(stream, N, 100000, 42);
    o.require(r.found, "N=" + std::to_string(N) + ": no filled interval");
    if (!r.found) continue;
    const double delta = std::ldexp(1.0, -static_cast<int>(N));
    for (std::size_t i = 0; i + 1 < r.witness.size(); ++i) {
      const double gap = r.witness[i + 1] - r.witness[i];
      o.require(gap >= delta && gap <= 3.0 * delta, "N=" + std::to_string(N) + ": gap outside window");
    }
    // With N <= 2 the extracted set has at most 2 points and G has no admissible term.
    o.require(!r.g_value || *r.g_value <= 6.0, "N=" + std::to_string(N) + ": G > 6");
    o.require(r.passed(), "N=" + std::to_string(N) + ": witness checks failed");
    seen += "N=" + std::to_string(N) + " d=" + std::to_string(*r.d) + " (" + std::to_string(r.witness.size()) + " pts" +
            (r.g_value ? ", G=" + num(*r.g_value) : ", G vacuous") + "); ";
  }
  const auto f = mc_event_A(stream, 1, 50, 10000);
  o.require(f.frequency >= eta(1) - 4.0 * f.stderr_, "A_{d,1} frequency " + num(f.frequency) + " below 1/144");
  if (o.ok) o.detail = seen + "A_{d,1} frequency " + num(f.frequency) + " >= 1/144";
  return o;
}

Outcome capacity_oracle() {
  Outcome o;
  int compared = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const RandomStream s(seed * 7919);
    const std::size_t n = 8 + static_cast<std::size_t>(s.value(1) * 13.0);
    std::vector<double> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(std::ldexp(1.0 + s.value(i + 2), static_cast<int>(s.value(i + 100) * 10.0)));
    const auto u = OrderedSample::from_unsorted(v);
    const unsigned N = seed % 2 == 0 ? 2 : 1;
    const auto exact = capacity_exact_small(u, N);
    const auto heur = capacity_search(u, N, {SearchStrategy::SwapLocalSearch, seed, 200000});
    o.require(heur.value == exact.value, "seed " + std::to_string(seed) + ": search " + num(heur.value) + " vs exact " + num(exact.value));
    ++compared;
  }
  if (o.ok) o.detail = std::to_string(compared) + " universes agree";
  return o;
}

Outcome kakeya_blow() {
  Outcome o;
  json cfg{{"command", "blow"}, {"j_min", 1}, {"j_max", 4}, {"resolution", 256.0}};
  const auto r = run(config_from_json(cfg));
  std::string series;
  for (const auto& row : r.body["result"]["series"])
    series += "J=" + std::to_string(row["J"].get<unsigned>()) + " area " + num(row["union_area"].get<double>()).substr(0, 6) + " ratio " +
              num(row["blow_ratio"].get<double>()).substr(0, 5) + "; ";
  for (const auto& c : r.body["checks"]) o.require(c["passed"].get<bool>(), c["name"].get<std::string>());
  o.detail = series + (o.ok ? "" : o.detail);
  return o;
}

Outcome maximal_operator() {
  Outcome o;
  json cfg{{"command", "maxop"}, {"j", 3}, {"threshold", 0.45}, {"coverage", 0.95}, {"resolution", 256.0}};
  const auto r = run(config_from_json(cfg));
  const double frac = r.body["result"]["fraction"].get<double>();
  o.require(r.passed && frac >= 0.95, "fraction " + num(frac));
  if (o.ok) o.detail = "fraction of translated pixels with field >= 0.45: " + num(frac);
  return o;
}

Outcome determinism() {
  Outcome o;
  const auto dir = std::filesystem::temp_directory_path() / "perronlab_acceptance";
  std::filesystem::create_directories(dir);
  write_file((dir / "cert.json").string(), R"({"omega":[0.5,0.25,0.125],"order":1,"certificate":{"limit":0,"lambda":0.5,"skeleton":[0.5,0.25,0.125],"children":[{},{}]}})");
  const std::vector<json> configs{
      {{"command", "gen"}, {"set", "rand-lac"}, {"count", 64}, {"seed", 42}},
      {{"command", "factor"}, {"set", "rand-lin"}, {"count", 50}, {"seed", 3}},
      {{"command", "capacity"}, {"set", "rand-lin"}, {"count", 18}, {"seed", 9}, {"n", 2}, {"strategy", "exact"}},
      {{"command", "capacity"}, {"set", "rand-lin"}, {"count", 40}, {"seed", 9}, {"n", 3}, {"strategy", "swap"}, {"budget", 20000}},
      {{"command", "witness-t1"}, {"n", 2}, {"seed", 42}, {"a_max", 20000}},
      {{"command", "witness-t2"}, {"n", 2}, {"seed", 42}, {"d_max", 100000}},
      {{"command", "verify-prob"}, {"n", 2}, {"seed", 7}, {"trials", 100000}},
      {{"command", "verify-p5"}, {"n", 3}, {"seed", 1}, {"trials", 10000}},
      {{"command", "verify-spacing"}, {"n", 3}, {"seed", 1}, {"trials", 10000}},
      {{"command", "blow"}, {"j_min", 1}, {"j_max", 4}},
      {{"command", "maxop"}, {"j", 3}, {"phases", 2}},
      {{"command", "certify-lacunary"}, {"input", (dir / "cert.json").string()}},
  };
  int runs = 0;
  for (auto cfg : configs) {
    std::string first;
    for (unsigned w : {1u, 4u, 8u, 1u}) {
      cfg["workers"] = w;
      const auto sum = run(config_from_json(cfg)).checksum();
      ++runs;
      if (first.empty()) first = sum;
      o.require(sum == first, cfg["command"].get<std::string>() + " checksum changes with workers=" + std::to_string(w));
    }
  }
  if (o.ok) o.detail = std::to_string(configs.size()) + " commands x workers {1,4,8,1}: identical checksums (" + std::to_string(runs) + " runs)";
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "exact Perron factor of homogeneous sets", 1.0, exact_factor},
      {2, "perturbed homogeneous sets stay below 6", 5.0, perturbation_suite},
      {3, "bounded-gap samples have G <= 6", 5.0, spacing_suite},
      {4, "closed-form probabilities p_{N,l}", 30.0, probability_formulas},
      {5, "inclusion probability 2^(-N 2^N)", 30.0, inclusion_probability},
      {6, "homogeneous-set witness at desk scale", 10.0, homogeneous_witness},
      {7, "dyadic-filling witness at desk scale", 60.0, dyadic_witness},
      {8, "capacity search matches enumeration", 30.0, capacity_oracle},
      {9, "Kakeya blow of Perron trees", 60.0, kakeya_blow},
      {10, "translates inside the maximal-function level set", 120.0, maximal_operator},
      {11, "determinism across worker counts", 600.0, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.limit_s) {
      o.ok = false;
      o.detail += "; took " + num(secs) + " s, limit " + num(c.limit_s) + " s";
    }
    failed += o.ok ? 0 : 1;
    std::printf("%s  criterion %2d  %-50s %7.2f s  %s\n", o.ok ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
