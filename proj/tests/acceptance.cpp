// SPDX-License-Identifier: Apache-2.0
// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.
#include "pvqe/harness.hpp"
#include "pvqe/matching.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

#include <unistd.h>

using namespace pvqe;

namespace {

constexpr double kPi = std::numbers::pi;
const std::filesystem::path kData(PVQE_TEST_DATA_DIR);

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double time_limit_s, const std::function<Outcome()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (time_limit_s > 0 && secs >= time_limit_s) {
    o.pass = false;
    o.detail += "; over time limit";
  }
  if (!o.pass) ++failures;
  std::printf("CRITERION %d %s: %s | %s | %.2fs\n", id, o.pass ? "PASS" : "FAIL", name,
              o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

ExperimentConfig base(std::uint64_t seed) {
  ExperimentConfig c;
  c.seed = seed;
  c.calibration = kData / "aspen_m1_like.json";
  c.cost_model = kData / "default_cost_model.json";
  return c;
}

std::array<double, 4> probs(const Vector4c& v) {
  return {std::norm(v(0)), std::norm(v(1)), std::norm(v(2)), std::norm(v(3))};
}

Vector4c run(const NativeCircuit& c) { return circuit_unitary(c) * Vector4c(1, 0, 0, 0); }

double max_diff(const std::array<double, 4>& x, const std::array<double, 4>& y) {
  double m = 0;
  for (int i = 0; i < 4; ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

// ---------------------------------------------------------------- criteria

Outcome c1_oracle() {
  const double e0 = exact_ground_energy({1.0, 2.0});
  const double g_err = std::abs(e0 - (1.0 - std::sqrt(5.0)));
  ExperimentConfig c = base(1);
  c.noiseless = true;
  c.exact_expectation = true;
  c.grid = 20;
  const double grid_err = cmd_heatmap(c).metrics.at("max_abs_err");
  return {g_err < 1e-10 && grid_err < 1e-10,
          "ground err " + fmt("%.2e", g_err) + ", 20x20 pipeline max err " + fmt("%.2e", grid_err)};
}

Outcome c2_circuits() {
  RngStream rng(2);
  Matrix4c hh;
  hh << 1, 1, 1, 1, 1, -1, 1, -1, 1, 1, -1, -1, 1, -1, -1, 1;
  double worst = 0.0, theta_worst = 0.0;
  for (int n = 0; n < 100; ++n) {
    const AnsatzParams a{rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi)};
    const auto p = probs(ideal_state(a));
    const std::array<double, 4> onsite{p[1], p[0], p[3], p[2]};
    const auto hop = probs(hh * 0.5 * ideal_state(a));
    const auto hop_circ = probs(run(build_circuit(a, MeasurementSetting::Hopping)));
    worst = std::max(worst, max_diff(probs(run(build_circuit(a, MeasurementSetting::Onsite))), onsite));
    worst = std::max(worst, max_diff(hop_circ, hop));
    const AnsatzParams b{a.phi, rng.uniform(-kPi, kPi)};
    theta_worst = std::max(
        theta_worst, max_diff(probs(run(build_circuit(b, MeasurementSetting::Hopping))), hop_circ));
  }
  return {worst < 1e-10 && theta_worst < 1e-10,
          "oracle max diff " + fmt("%.2e", worst) + ", hopping theta drift " + fmt("%.2e", theta_worst)};
}

Outcome c3_landscape() {
  // One period per axis: phi has period pi, theta period pi/2.
  const int n = 200;
  const double e0 = exact_ground_energy();
  double best = 1e9;
  AnsatzParams arg{};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const AnsatzParams a{-kPi / 2 + kPi * i / (n - 1), -kPi / 4 + (kPi / 2) * j / (n - 1)};
      const double e = exact_energy(a);
      if (e < best) {
        best = e;
        arg = a;
      }
    }
  // Distance to the nearest symmetry image of (0.2318, pi/8).
  const AnsatzParams opt = optimal_params({});
  double dist = 1e9;
  for (int sgn : {1, -1})
    for (int k = -2; k <= 2; ++k)
      for (int l = -4; l <= 4; ++l)
        dist = std::min(dist, std::hypot(arg.phi - (sgn * opt.phi + k * kPi),
                                         arg.theta - (sgn * opt.theta + l * kPi / 2)));

  // Same count over the full [-pi, pi]^2 square, reported only.
  double full = 1e9;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      full = std::min(full, exact_energy({-kPi + 2 * kPi * i / (n - 1), -kPi + 2 * kPi * j / (n - 1)}));

  const double step = kPi / (n - 1);
  return {best - e0 < 1e-4 && dist < step,
          "grid min - E0 = " + fmt("%.2e", best - e0) + " at (" + fmt("%.4f", arg.phi) + ", " +
              fmt("%.4f", arg.theta) + "), dist to optimum image " + fmt("%.4f", dist) +
              "; full-square grid gap " + fmt("%.2e", full - e0)};
}

std::int64_t brute_force(int n, const std::vector<matching::WeightedEdge>& edges, std::size_t i,
                         std::vector<bool>& used) {
  if (i == edges.size()) return 0;
  std::int64_t best = brute_force(n, edges, i + 1, used);
  const auto& e = edges[i];
  if (!used[e.u] && !used[e.v]) {
    used[e.u] = used[e.v] = true;
    best = std::max(best, e.weight + brute_force(n, edges, i + 1, used));
    used[e.u] = used[e.v] = false;
  }
  return best;
}

Outcome c4_matching() {
  RngStream rng(4);
  int agree = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_u64() % 10);
    std::vector<matching::WeightedEdge> edges;
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v)
        if (rng.uniform() < 0.6)
          edges.push_back({u, v, static_cast<std::int64_t>(rng.next_u64() % 1000) + 1});
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    const auto mate = matching::max_weight_matching(n, edges);
    agree += matching::matching_weight(mate, edges) == brute_force(n, edges, 0, used);
  }
  const DeviceTopology t = load_calibration(kData / "aspen_m1_like.json");
  const auto g = greedy_select(t).pairs.size();
  const auto m = max_weight_matching(t).pairs.size();
  const auto gc = greedy_select(t, {}, 0.90).pairs.size();
  return {agree == 100 && g == 33 && m == 39 && gc == 26,
          std::to_string(agree) + "/100 brute-force matches; greedy " + std::to_string(g) +
              ", matching " + std::to_string(m) + ", greedy@0.90 " + std::to_string(gc)};
}

Outcome c5_mitigation() {
  PairNoiseSpec n;
  n.readout = {ReadoutError{0.03, 0.07}, ReadoutError{0.05, 0.02}};
  const ConfusionMatrix exact = exact_confusion(n);
  const Distribution truth{0.1, 0.4, 0.2, 0.3};
  const Eigen::Vector4d d = exact.matrix * Eigen::Vector4d(truth[0], truth[1], truth[2], truth[3]);
  const double rt = tv_distance(invert_readout(Distribution{d(0), d(1), d(2), d(3)}, exact), truth);

  // phi-independent additive bias b(theta) on every energy evaluation.
  double tflo_worst = 0.0;
  RngStream rng(5);
  for (int k = 0; k < 50; ++k) {
    const AnsatzParams a{rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi)};
    const PointEvaluator biased = [](const AnsatzParams& x) {
      return Evaluation{{exact_energy(x) + 0.3 + 0.2 * std::sin(x.theta), 0.0, 0}, std::nullopt};
    };
    tflo_worst = std::max(tflo_worst, std::abs(tflo_evaluate(biased, a, {}).tflo - exact_energy(a)));
  }

  PairNoiseSpec eps;
  eps.readout = {ReadoutError{0.05, 0.05}, ReadoutError{0.05, 0.05}};
  RngStream cs(51), ds(52);
  const ConfusionMatrix measured = measure_confusion(eps, 1000000, cs);
  const ShotHistogram h = sample_shots(DensityMatrix::basis(0), eps, 1000000, ds);
  const double tv = tv_distance(invert_readout(h, measured), {1, 0, 0, 0});
  return {rt < 1e-12 && tflo_worst < 1e-12 && tv < 0.005,
          "round trip TV " + fmt("%.2e", rt) + ", TFLO residual " + fmt("%.2e", tflo_worst) +
              ", sampled NI TV " + fmt("%.4f", tv)};
}

Outcome c6_convergence(const std::string& optimizer) {
  int ok = 0;
  std::string errs;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    ExperimentConfig c = base(seed);
    c.noiseless = true;
    c.optimizer = optimizer;
    c.pairs = optimizer == "mgd" ? 12 : 25;
    c.iterations = optimizer == "mgd" ? 50 : 100;
    c.shots = 1000;
    const double e = cmd_vqe(c).metrics.at("median_exact_error");
    ok += e < 0.01;
    errs += (errs.empty() ? "" : " ") + fmt("%.4f", e);
  }
  return {ok >= 8, std::to_string(ok) + "/10 seeds below 0.01 [" + errs + "]"};
}

Outcome c7_noisy() {
  ExperimentConfig c = base(7);
  c.optimizer = "mgd";
  c.uniform_fidelity = 0.95;
  c.pairs = 12;
  c.shots = 1000;
  c.repeats = 5;
  const RunRecord r = cmd_vqe(c);
  const double med = r.metrics.at("median_final_error");
  return {med < 0.06, "median final error " + fmt("%.4f", med) + " (min " +
                          fmt("%.4f", r.metrics.at("min_final_error")) + ", max " +
                          fmt("%.4f", r.metrics.at("max_final_error")) + ")"};
}

Outcome c8_degradation() {
  const RunRecord r = cmd_benchmark_pairs(base(8));
  const double rho = r.metrics.at("spearman_raw");
  const double frac = r.metrics.at("frac_tflo_below_raw");
  return {rho > 0.5 && frac >= 0.9 && r.metrics.at("pairs") == 33,
          "spearman " + fmt("%.3f", rho) + ", TFLO below raw for " + fmt("%.3f", frac) + " of p"};
}

Outcome c9_speedup() {
  const CostModel m = load_cost_model(kData / "default_cost_model.json");
  const CostFit fit = calibrate_cost_model(reference_observations());
  const bool same = std::abs(m.t_base - fit.model.t_base) <= 1e-12 * fit.model.t_base &&
                    std::abs(m.beta - fit.model.beta) <= 1e-12 * fit.model.beta &&
                    std::abs(m.tau - fit.model.tau) <= 1e-12 * fit.model.tau;
  const double heat = heatmap_speedup(m, 400, 25, 10000);
  const double mgd12 = mgd_speedup(m, 12, 50, 1000);
  const double mgd25 = mgd_speedup(m, 25, 50, 1000);
  const double spsa = spsa_speedup(m, 25, 50, 1000);
  const bool ok = same && heat >= 16.2 && heat <= 19.8 && mgd12 >= 5.4 && mgd12 <= 6.6 &&
                  mgd25 > 8.0 && spsa >= 0.5 && spsa <= 1.5;
  return {ok, std::string(same ? "shipped model = fit" : "shipped model differs from fit") +
                  "; heatmap " + fmt("%.2f", heat) + "x, MGD-12 " + fmt("%.2f", mgd12) +
                  "x, MGD-25 " + fmt("%.2f", mgd25) + "x, SPSA-25 " + fmt("%.2f", spsa) + "x"};
}

std::map<std::string, std::string> read_dir(const std::filesystem::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out[std::filesystem::relative(e.path(), dir).string()] = ss.str();
  }
  return out;
}

Outcome c10_determinism() {
  using Cmd = RunRecord (*)(const ExperimentConfig&);
  std::vector<std::pair<Cmd, ExperimentConfig>> runs;
  {
    ExperimentConfig c = base(10);
    c.pairs = 10;
    c.shots = 2000;
    runs.push_back({cmd_benchmark_pairs, c});
  }
  {
    ExperimentConfig c = base(10);
    c.grid = 10;
    c.shots = 2000;
    runs.push_back({cmd_heatmap, c});
  }
  for (const char* opt : {"spsa", "mgd"}) {
    ExperimentConfig c = base(10);
    c.optimizer = opt;
    c.pairs = 6;
    c.iterations = 8;
    c.repeats = 2;
    runs.push_back({cmd_vqe, c});
  }
  {
    ExperimentConfig c = base(10);
    c.shot_list = {100, 1000};
    c.iterations = 8;
    c.repeats = 2;
    c.pairs = 6;
    runs.push_back({cmd_shots_sweep, c});
  }
  {
    ExperimentConfig c = base(10);
    c.pair_counts = {4, 9};
    c.iterations = 4;
    c.repeats = 2;
    runs.push_back({cmd_optimizer_compare, c});
  }

  const auto root = std::filesystem::temp_directory_path() /
                    ("pvqe_acceptance_" + std::to_string(::getpid()));
  std::filesystem::remove_all(root);
  std::size_t files = 0;
  int mismatches = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    std::map<std::string, std::string> first;
    int variant = 0;
    for (unsigned workers : {1u, 1u, 8u}) {
      ExperimentConfig c = runs[i].second;
      c.workers = workers;
      c.out = root / (std::to_string(i) + "_" + std::to_string(variant++));
      runs[i].first(c);
      const auto got = read_dir(c.out);
      if (first.empty()) {
        first = got;
        files += got.size();
      } else if (got != first) {
        ++mismatches;
      }
    }
  }
  std::filesystem::remove_all(root);
  return {mismatches == 0 && files > 0,
          std::to_string(runs.size()) + " runs, " + std::to_string(files) +
              " files each compared across 2 repeats and 1 vs 8 workers, " +
              std::to_string(mismatches) + " mismatches"};
}

}  // namespace

int main() {
  criterion(1, "oracle exactness", 5.0, c1_oracle);
  criterion(2, "circuit fidelity", 0.0, c2_circuits);
  criterion(3, "landscape", 0.0, c3_landscape);
  criterion(4, "matching", 10.0, c4_matching);
  criterion(5, "mitigation", 0.0, c5_mitigation);
  criterion(6, "SPSA convergence (noiseless)", 30.0, [] { return c6_convergence("spsa"); });
  criterion(6, "MGD convergence (noiseless)", 30.0, [] { return c6_convergence("mgd"); });
  criterion(7, "noisy MGD run", 120.0, c7_noisy);
  criterion(8, "degradation trend", 0.0, c8_degradation);
  criterion(9, "modeled speedup", 0.0, c9_speedup);
  criterion(10, "determinism", 0.0, c10_determinism);
  std::printf("%s: %d failing criteria\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}
