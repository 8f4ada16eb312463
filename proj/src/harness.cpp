// SPDX-License-Identifier: Apache-2.0
#include "pvqe/harness.hpp"

#include "pvqe/report.hpp"

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdlib>
#include <numbers>
#include <numeric>
#include <sstream>

#include <json.hpp>

#ifndef PVQE_DATA_DIR
#define PVQE_DATA_DIR "data"
#endif

namespace pvqe {

using json = nlohmann::ordered_json;

namespace {

constexpr int kRecordSchema = 1;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

// ---------------------------------------------------------------- helpers

std::string cell(double x) { return fmt_double(x); }
template <std::integral T>
std::string cell(T x) { return std::to_string(x); }
std::string cell(const char* x) { return x; }

template <typename... Ts>
void csv_row(std::ostringstream& out, const Ts&... xs) {
  bool first = true;
  ((out << (first ? "" : ",") << cell(xs), first = false), ...);
  out << '\n';
}

/// Collects artifacts and writes them when an output directory is set.
class Artifacts {
 public:
  explicit Artifacts(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void add(const std::string& name, const std::string& text) {
    files_.push_back(name);
    if (!dir_.empty()) write_text_file(dir_ / name, text);
  }
  const std::vector<std::string>& files() const { return files_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

std::string selection_name(SelectionMethod m) {
  return m == SelectionMethod::Greedy ? "greedy" : "matching";
}

json config_json(const ExperimentConfig& c) {
  json j;
  j["calibration"] = c.uniform_fidelity ? std::string("uniform") : c.calibration.string();
  j["seed"] = c.seed;
  j["pairs"] = c.pairs;
  j["select"] = selection_name(c.select);
  j["cap"] = c.cap ? json(*c.cap) : json(nullptr);
  j["shots"] = c.shots;
  j["optimizer"] = c.optimizer;
  j["mode"] = c.mode;
  j["iterations"] = c.iterations;
  j["mitigation"] = to_string(c.mitigation);
  j["cost_model"] = c.cost_model.string();
  j["crosstalk_p"] = c.crosstalk_p;
  j["repeats"] = c.repeats;
  j["grid"] = c.grid;
  j["pair_counts"] = c.pair_counts;
  j["shot_list"] = c.shot_list;
  j["confusion_shots"] = c.confusion_shots;
  j["uniform_fidelity"] = c.uniform_fidelity ? json(*c.uniform_fidelity) : json(nullptr);
  j["uniform_readout"] = {c.uniform_readout.p01, c.uniform_readout.p10};
  j["noiseless"] = c.noiseless;
  j["exact_expectation"] = c.exact_expectation;
  j["start"] = {c.start.phi, c.start.theta};
  j["eta"] = c.eta ? json(*c.eta) : json(nullptr);
  j["optimizer_frame"] = "circuit angles (U phi, 2 t theta)";
  j["model"] = {{"t", c.model.t}, {"U", c.model.U}};
  // workers and the output directory are left out: they never change results.
  return j;
}

RunRecord finish(const std::string& command, const ExperimentConfig& cfg, json metrics,
                 json extra, Artifacts& art) {
  RunRecord rec;
  rec.command = command;
  for (const auto& [k, v] : metrics.items())
    if (v.is_number()) rec.metrics[k] = v.get<double>();
  json doc;
  doc["schema_version"] = kRecordSchema;
  doc["code_version"] = PVQE_VERSION;
  doc["command"] = command;
  doc["config"] = config_json(cfg);
  doc["ground_energy"] = exact_ground_energy(cfg.model);
  doc["metrics"] = std::move(metrics);
  for (auto& [k, v] : extra.items()) doc[k] = v;
  std::vector<std::string> files = art.files();
  files.push_back(command + ".json");
  doc["files"] = files;
  rec.json = doc.dump(2) + "\n";
  art.add(command + ".json", rec.json);
  rec.files = art.files();
  return rec;
}

struct Setup {
  std::shared_ptr<const DeviceTopology> topology;
  std::vector<QubitPair> pairs;
  CostModel cost;
};

// Fills calibration/cost paths, builds the topology and selects pairs.
Setup prepare(ExperimentConfig& cfg, int default_pairs) {
  cfg.model.validate();
  if (cfg.pairs <= 0) cfg.pairs = default_pairs;
  if (cfg.cost_model.empty()) cfg.cost_model = default_cost_model_path();

  Setup s;
  DeviceTopology t;
  if (cfg.uniform_fidelity) {
    t = uniform_topology(cfg.pairs, *cfg.uniform_fidelity, cfg.uniform_readout);
  } else {
    if (cfg.calibration.empty()) cfg.calibration = default_calibration_path();
    t = load_calibration(cfg.calibration);
  }
  if (cfg.noiseless) t = noiseless_topology(t);

  PairSelection sel;
  if (cfg.select == SelectionMethod::Greedy) {
    sel = greedy_select(t, {}, cfg.cap);
  } else {
    sel = max_weight_matching(t);
    if (cfg.cap)
      std::erase_if(sel.pairs, [&](QubitPair p) { return t.coupler(p)->cz_fidelity < *cfg.cap; });
  }
  if (static_cast<int>(sel.pairs.size()) < cfg.pairs)
    throw ConfigError("requested " + std::to_string(cfg.pairs) + " pairs but " +
                      selection_name(cfg.select) + " selection yields only " +
                      std::to_string(sel.pairs.size()));
  sel.pairs.resize(static_cast<std::size_t>(cfg.pairs));
  s.pairs = sel.pairs;
  s.topology = std::make_shared<const DeviceTopology>(std::move(t));
  s.cost = load_cost_model(cfg.cost_model);
  return s;
}

std::shared_ptr<const std::map<QubitPair, ConfusionMatrix>> confusions_for(
    const ExperimentConfig& cfg, const Setup& s) {
  return std::make_shared<const std::map<QubitPair, ConfusionMatrix>>(measure_confusions(
      *s.topology, s.pairs, cfg.exact_expectation ? 0 : cfg.confusion_shots,
      RngStream(cfg.seed).derive({0x4e49}).next_u64()));
}

DeviceContext context_for(const ExperimentConfig& cfg, const Setup& s,
                          std::vector<QubitPair> pairs,
                          std::shared_ptr<const std::map<QubitPair, ConfusionMatrix>> conf) {
  DeviceContext ctx;
  ctx.topology = s.topology;
  ctx.pairs = std::move(pairs);
  ctx.model = cfg.model;
  ctx.shots = cfg.shots;
  ctx.exact_expectation = cfg.exact_expectation;
  ctx.options.workers = cfg.workers;
  ctx.options.crosstalk_p = cfg.crosstalk_p;
  ctx.confusions = std::move(conf);
  return ctx;
}

double fidelity_of(const Setup& s, QubitPair p) { return s.topology->coupler(p)->cz_fidelity; }

double mean(const std::vector<double>& v) {
  return v.empty() ? kNaN : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::vector<double> linspace_pi(int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] =
        n == 1 ? 0.0 : -std::numbers::pi + 2.0 * std::numbers::pi * i / (n - 1);
  return out;
}

// Final energy with the configured mitigation level.
double mitigated(const TfloResult& r, Mitigation m) {
  if (m.tflo) return m.ni ? r.tflo_ni : r.tflo;
  return m.ni ? r.ni : r.raw;
}

// -------------------------------------------------------------- optimizers

struct OptimizerRun {
  OptTrace trace;
  TfloResult final;
  double final_error = 0.0;  ///< |mitigated final estimate - ground|
  double exact_error = 0.0;  ///< exact energy at final params - ground
};

OptimizerRun run_optimizer(const ExperimentConfig& cfg, const Setup& s,
                           const std::vector<QubitPair>& pairs, bool mgd, int iterations,
                           int points, std::uint64_t seed,
                           std::shared_ptr<const std::map<QubitPair, ConfusionMatrix>> conf) {
  auto runner = std::make_shared<BatchRunner>(
      context_for(cfg, s, pairs, cfg.mitigation.ni ? conf : nullptr), RngStream(seed).derive({1}).next_u64());
  RngStream stream = RngStream(seed).derive({2});
  const HubbardParams h = cfg.model;
  const Diagnostics diag = [h](const AnsatzParams& a) { return exact_energy(a, h); };

  OptimizerRun r;
  if (mgd) {
    MgdConfig mc;
    mc.iterations = iterations;
    mc.shots = cfg.shots;
    mc.eta = cfg.eta;
    mc.frame = AngleFrame::circuit(h);
    r.trace = mgd_run(mc, batch_evaluator(runner), cfg.start, points, stream, diag);
  } else {
    SpsaConfig sc;
    sc.iterations = iterations;
    sc.shots = cfg.shots;
    sc.frame = AngleFrame::circuit(h);
    r.trace = spsa_run(sc, same_params_evaluator(runner), cfg.start, stream, diag);
  }
  r.final = tflo_evaluate(same_params_evaluator(runner), r.trace.final_params, h);
  const double ground = exact_ground_energy(h);
  r.final_error = std::abs(mitigated(r.final, cfg.mitigation) - ground);
  r.exact_error = exact_energy(r.trace.final_params, h) - ground;
  return r;
}

std::string trace_csv(const OptTrace& t) {
  std::ostringstream out;
  write_trace_csv(out, t);
  return out.str();
}

PlotSpec trace_plot(const OptTrace& t, const std::string& title, double ground) {
  PlotSpec p{title, "iteration", "energy", {}, {{"ground", ground}}};
  Series raw{"raw", {}, {}}, ni{"NI", {}, {}}, ex{"exact", {}, {}};
  for (const auto& r : t.records) {
    const double k = r.iteration;
    if (r.at_center) {
      raw.x.push_back(k);
      raw.y.push_back(r.at_center->raw.value);
      if (r.at_center->ni) {
        ni.x.push_back(k);
        ni.y.push_back(r.at_center->ni->value);
      }
    }
    ex.x.push_back(k);
    ex.y.push_back(r.exact);
  }
  p.series = {raw, ni, ex};
  return p;
}

}  // namespace

// ------------------------------------------------------------------ public

Mitigation parse_mitigation(const std::string& s) {
  if (s == "none") return {false, false};
  if (s == "ni") return {true, false};
  if (s == "tflo") return {false, true};
  if (s == "ni+tflo" || s == "tflo+ni") return {true, true};
  throw ConfigError("unknown mitigation '" + s + "' (none, ni, tflo, ni+tflo)");
}

std::string to_string(Mitigation m) {
  if (m.ni && m.tflo) return "ni+tflo";
  if (m.ni) return "ni";
  if (m.tflo) return "tflo";
  return "none";
}

AnsatzParams optimal_params(const HubbardParams& h) {
  const double phi = h.U > 0 ? std::atan2(h.U / 2.0, 2.0 * h.t) / h.U : 0.0;
  return {phi, std::numbers::pi / (8.0 * h.t)};
}

double median(std::vector<double> v) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) return kNaN;
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const double mx = mean(rx), my = mean(ry);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxx > 0 && syy > 0 ? sxy / std::sqrt(sxx * syy) : kNaN;
}

DeviceTopology uniform_topology(int n, double fidelity, ReadoutError readout) {
  if (n < 1) throw ConfigError("uniform topology needs at least one pair");
  std::vector<int> qubits;
  std::vector<Coupler> couplers;
  std::map<int, ReadoutError> ro;
  for (int i = 0; i < n; ++i) {
    qubits.push_back(2 * i);
    qubits.push_back(2 * i + 1);
    couplers.push_back({{2 * i, 2 * i + 1}, fidelity});
    ro[2 * i] = readout;
    ro[2 * i + 1] = readout;
  }
  return DeviceTopology(qubits, couplers, ro, "uniform", "isolated couplers of equal fidelity");
}

DeviceTopology noiseless_topology(const DeviceTopology& t) {
  std::vector<Coupler> couplers = t.couplers();
  for (auto& c : couplers) c.cz_fidelity = 1.0;
  return DeviceTopology(t.qubits(), couplers, {}, t.name(), "noise removed");
}

std::filesystem::path default_calibration_path() {
  if (const char* d = std::getenv("PVQE_DATA_DIR")) return std::filesystem::path(d) / "aspen_m1_like.json";
  return std::filesystem::path(PVQE_DATA_DIR) / "aspen_m1_like.json";
}

std::filesystem::path default_cost_model_path() {
  if (const char* d = std::getenv("PVQE_DATA_DIR")) return std::filesystem::path(d) / "default_cost_model.json";
  return std::filesystem::path(PVQE_DATA_DIR) / "default_cost_model.json";
}

// --------------------------------------------------------- benchmark-pairs

RunRecord cmd_benchmark_pairs(const ExperimentConfig& config) {
  ExperimentConfig cfg = config;
  if (cfg.shots == 0) cfg.shots = 10000;
  cfg.mode = "individual+parallel";
  const Setup s = prepare(cfg, 33);
  const auto conf = confusions_for(cfg, s);
  const HubbardParams h = cfg.model;
  const AnsatzParams best = optimal_params(h);
  const double ground = exact_ground_energy(h);
  const auto n = s.pairs.size();

  auto levels = [&](const Evaluation& m, const Evaluation& ref) {
    const double ref_exact = exact_energy({0.0, best.theta}, h);
    return std::array<double, 4>{m.raw.value, m.ni->value,
                                 tflo_correct(m.raw.value, ref_exact, ref.raw.value),
                                 tflo_correct(m.ni->value, ref_exact, ref.ni->value)};
  };
  const std::array<const char*, 4> names{"raw", "ni", "tflo", "tflo_ni"};

  Artifacts art(cfg.out);
  // (a) each pair on its own.
  std::ostringstream ind;
  csv_row(ind, "pair_a", "pair_b", "fidelity", "e_raw", "e_ni", "e_tflo", "e_tflo_ni", "err_raw",
          "err_ni", "err_tflo", "err_tflo_ni");
  std::vector<std::array<double, 4>> individual(n);
  std::array<Series, 4> scatter;
  for (std::size_t i = 0; i < n; ++i) {
    BatchRunner runner(context_for(cfg, s, {s.pairs[i]}, conf),
                       RngStream(cfg.seed).derive({1, i}).next_u64());
    const BatchResult m = runner.run({best});
    const BatchResult r = runner.run({{0.0, best.theta}});
    const auto e = levels(runner.evaluate(m.pairs[0], m), runner.evaluate(r.pairs[0], r));
    const double f = fidelity_of(s, s.pairs[i]);
    for (int k = 0; k < 4; ++k) {
      individual[i][k] = e[k] - ground;
      scatter[k].x.push_back(f);
      scatter[k].y.push_back(e[k] - ground);
    }
    csv_row(ind, s.pairs[i].a, s.pairs[i].b, f, e[0], e[1], e[2], e[3], e[0] - ground,
            e[1] - ground, e[2] - ground, e[3] - ground);
  }
  art.add("benchmark_individual.csv", ind.str());

  // (b) the first p greedy pairs in parallel, p = 1..n.
  std::ostringstream sweep, matrix;
  csv_row(sweep, "p", "mean_abs_err_raw", "mean_abs_err_ni", "mean_abs_err_tflo",
          "mean_abs_err_tflo_ni");
  csv_row(matrix, "p", "index", "pair_a", "pair_b", "fidelity", "err_raw", "err_ni", "err_tflo",
          "err_tflo_ni");
  std::vector<double> ps;
  std::array<std::vector<double>, 4> curve;
  std::vector<std::vector<double>> heat(n, std::vector<double>(n, kNaN));
  std::vector<std::array<double, 4>> last(n);
  for (std::size_t p = 1; p <= n; ++p) {
    const std::vector<QubitPair> sub(s.pairs.begin(), s.pairs.begin() + static_cast<std::ptrdiff_t>(p));
    BatchRunner runner(context_for(cfg, s, sub, conf), RngStream(cfg.seed).derive({2, p}).next_u64());
    const BatchResult m = runner.run(std::vector<AnsatzParams>(p, best));
    const BatchResult r = runner.run(std::vector<AnsatzParams>(p, {0.0, best.theta}));
    std::array<double, 4> sum{};
    for (std::size_t i = 0; i < p; ++i) {
      const auto e = levels(runner.evaluate(m.pairs[i], m), runner.evaluate(r.pairs[i], r));
      std::array<double, 4> err{};
      for (int k = 0; k < 4; ++k) {
        err[k] = e[k] - ground;
        sum[k] += std::abs(err[k]);
      }
      if (p == n) last[i] = err;
      heat[p - 1][i] = std::abs(err[0]);
      csv_row(matrix, p, i, sub[i].a, sub[i].b, fidelity_of(s, sub[i]), err[0], err[1], err[2],
              err[3]);
    }
    ps.push_back(static_cast<double>(p));
    for (int k = 0; k < 4; ++k) curve[k].push_back(sum[k] / static_cast<double>(p));
    csv_row(sweep, p, curve[0].back(), curve[1].back(), curve[2].back(), curve[3].back());
  }
  art.add("benchmark_parallel.csv", sweep.str());
  art.add("benchmark_matrix.csv", matrix.str());

  int tflo_below = 0, tflo_ni_below = 0;
  for (std::size_t i = 0; i < n; ++i) {
    tflo_below += curve[2][i] < curve[0][i];
    tflo_ni_below += curve[3][i] < curve[0][i];
  }
  int high = 0, high_ok = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (fidelity_of(s, s.pairs[i]) < 0.9) continue;
    ++high;
    high_ok += std::abs(last[i][0]) <= 2.0 * std::abs(individual[i][0]);
  }
  double max_abs = 0.0;
  for (const auto& row : individual)
    for (double e : row) max_abs = std::max(max_abs, std::abs(e));

  PlotSpec fig3{"Per-pair energy error at optimal parameters", "CZ fidelity", "E - E0", {}, {{"0", 0.0}}};
  PlotSpec fig4{"Mean |error| vs parallel pairs", "pairs", "mean |E - E0|", {}, {}};
  for (int k = 0; k < 4; ++k) {
    scatter[k].name = names[k];
    scatter[k].markers = true;
    fig3.series.push_back(scatter[k]);
    fig4.series.push_back({names[k], ps, curve[k]});
  }
  art.add("benchmark_individual.svg", svg_plot(fig3));
  art.add("benchmark_parallel.svg", svg_plot(fig4));
  art.add("benchmark_matrix.svg",
          svg_heatmap({"|raw error| per pair (column) and p (row)", "pair index", "p", 0,
                       static_cast<double>(n), 1, static_cast<double>(n), heat}));

  json metrics;
  metrics["pairs"] = n;
  metrics["spearman_raw"] = spearman(ps, curve[0]);
  metrics["spearman_tflo_ni"] = spearman(ps, curve[3]);
  metrics["frac_tflo_below_raw"] = static_cast<double>(tflo_below) / static_cast<double>(n);
  metrics["frac_tflo_ni_below_raw"] = static_cast<double>(tflo_ni_below) / static_cast<double>(n);
  metrics["high_fidelity_pairs"] = high;
  metrics["frac_high_fidelity_within_2x"] = high ? static_cast<double>(high_ok) / high : 1.0;
  metrics["max_abs_individual_error"] = max_abs;
  metrics["mean_abs_err_raw_p1"] = curve[0].front();
  metrics["mean_abs_err_raw_pmax"] = curve[0].back();
  metrics["mean_abs_err_tflo_ni_pmax"] = curve[3].back();
  json extra;
  extra["pairs"] = json::array();
  for (const QubitPair& p : s.pairs) extra["pairs"].push_back({p.a, p.b, fidelity_of(s, p)});
  return finish("benchmark-pairs", cfg, metrics, extra, art);
}

// ----------------------------------------------------------------- heatmap

RunRecord cmd_heatmap(const ExperimentConfig& config) {
  ExperimentConfig cfg = config;
  if (cfg.shots == 0) cfg.shots = 10000;
  if (cfg.grid < 2) throw ConfigError("heatmap grid must be >= 2");
  cfg.mode = "parallel-batch";
  const Setup s = prepare(cfg, 25);
  const auto conf = confusions_for(cfg, s);
  const HubbardParams h = cfg.model;
  const auto p = s.pairs.size();
  const auto axis = linspace_pi(cfg.grid);
  const auto g = static_cast<std::size_t>(cfg.grid);

  std::vector<AnsatzParams> points;
  for (double theta : axis)
    for (double phi : axis) points.push_back({phi, theta});

  auto runner = std::make_shared<BatchRunner>(context_for(cfg, s, s.pairs, conf),
                                              RngStream(cfg.seed).derive({3}).next_u64());
  const std::vector<Evaluation> evals = batch_evaluator(runner)(points);
  const std::uint64_t grid_batches = runner->batches_run();

  // phi = 0 reference on every pair for each theta row.
  std::vector<std::vector<Evaluation>> refs(g);
  for (std::size_t j = 0; j < g; ++j) {
    const BatchResult b = runner->run(std::vector<AnsatzParams>(p, {0.0, axis[j]}));
    for (const PairOutcome& o : b.pairs) refs[j].push_back(runner->evaluate(o, b));
  }

  std::ostringstream exact_csv, sim_csv;
  csv_row(exact_csv, "phi", "theta", "e_exact");
  csv_row(sim_csv, "phi", "theta", "pair_a", "pair_b", "e_raw", "e_ni", "e_tflo", "e_tflo_ni",
          "e_mitigated", "std_err", "e_exact", "abs_err");
  std::vector<std::vector<double>> ex(g, std::vector<double>(g)), sim = ex, err = ex;
  double max_err = 0.0, sum_err = 0.0, max_z = 0.0;
  for (std::size_t j = 0; j < g; ++j) {
    const double ref_exact = exact_energy({0.0, axis[j]}, h);
    for (std::size_t i = 0; i < g; ++i) {
      const std::size_t idx = j * g + i;
      const std::size_t pair = idx % p;
      const Evaluation& e = evals[idx];
      const Evaluation& r = refs[j][pair];
      TfloResult t;
      t.raw = e.raw.value;
      t.ni = e.ni->value;
      t.tflo = tflo_correct(t.raw, ref_exact, r.raw.value);
      t.tflo_ni = tflo_correct(t.ni, ref_exact, r.ni->value);
      const double value = mitigated(t, cfg.mitigation);
      const EnergyEstimate& used = cfg.mitigation.ni ? *e.ni : e.raw;
      const EnergyEstimate& used_ref = cfg.mitigation.ni ? *r.ni : r.raw;
      const double se = cfg.mitigation.tflo ? std::hypot(used.std_err, used_ref.std_err) : used.std_err;
      const double exact = exact_energy(points[idx], h);
      const double abs_err = std::abs(value - exact);
      ex[j][i] = exact;
      sim[j][i] = value;
      err[j][i] = abs_err;
      max_err = std::max(max_err, abs_err);
      sum_err += abs_err;
      if (se > 0) max_z = std::max(max_z, abs_err / se);
      csv_row(exact_csv, points[idx].phi, points[idx].theta, exact);
      csv_row(sim_csv, points[idx].phi, points[idx].theta, s.pairs[pair].a, s.pairs[pair].b,
              t.raw, t.ni, t.tflo, t.tflo_ni, value, se, exact, abs_err);
    }
  }

  Artifacts art(cfg.out);
  art.add("heatmap_exact.csv", exact_csv.str());
  art.add("heatmap.csv", sim_csv.str());
  const double lo = -std::numbers::pi, hi = std::numbers::pi;
  art.add("heatmap_exact.svg", svg_heatmap({"Exact energy", "phi", "theta", lo, hi, lo, hi, ex}));
  art.add("heatmap_sim.svg",
          svg_heatmap({"Simulated energy (" + to_string(cfg.mitigation) + ")", "phi", "theta", lo,
                       hi, lo, hi, sim}));
  art.add("heatmap_err.svg", svg_heatmap({"Absolute error", "phi", "theta", lo, hi, lo, hi, err}));

  const int n_points = static_cast<int>(points.size());
  const auto batches = static_cast<std::uint64_t>((points.size() + p - 1) / p);
  json metrics;
  metrics["points"] = n_points;
  metrics["pairs"] = p;
  metrics["batches"] = batches;
  metrics["batches_run"] = grid_batches;
  metrics["max_abs_err"] = max_err;
  metrics["mean_abs_err"] = sum_err / n_points;
  metrics["max_err_over_std_err"] = max_z;
  metrics["modeled_time_parallel_s"] =
      predict_wall_time(s.cost, static_cast<int>(p), batches, cfg.shots);
  metrics["modeled_time_single_s"] =
      predict_wall_time(s.cost, 1, static_cast<std::uint64_t>(n_points), cfg.shots);
  metrics["modeled_speedup"] = heatmap_speedup(s.cost, n_points, static_cast<int>(p), cfg.shots);
  return finish("heatmap", cfg, metrics, json::object(), art);
}

// --------------------------------------------------------------------- vqe

RunRecord cmd_vqe(const ExperimentConfig& config) {
  ExperimentConfig cfg = config;
  const bool mgd = cfg.optimizer == "mgd";
  if (!mgd && cfg.optimizer != "spsa")
    throw ConfigError("unknown optimizer '" + cfg.optimizer + "' (spsa, mgd)");
  if (cfg.mode.empty()) cfg.mode = "parallel";
  if (cfg.mode == "parallel") cfg.mode = mgd ? "parallel-batch" : "parallel-same";
  if (cfg.mode != "single" && cfg.mode != "parallel-same" && cfg.mode != "parallel-batch")
    throw ConfigError("unknown mode '" + cfg.mode + "'");
  if (mgd && cfg.mode == "parallel-same")
    throw ConfigError("mgd with more than one pair requires parallel-batch mode");
  if (!mgd && cfg.mode == "parallel-batch")
    throw ConfigError("spsa runs in parallel-same mode");
  const bool single = cfg.mode == "single";
  if (single && cfg.pairs > 1) throw ConfigError("single mode uses exactly one pair");
  if (cfg.shots == 0) cfg.shots = 1000;
  if (cfg.iterations <= 0) cfg.iterations = mgd ? 50 : 100;
  if (cfg.repeats <= 0) cfg.repeats = 1;
  const Setup s = prepare(cfg, single ? 1 : (mgd ? 12 : 25));
  const auto conf = confusions_for(cfg, s);
  const int p = cfg.pairs;

  int points = single ? 12 : p;
  bool underdetermined = false;
  if (cfg.eta) points = n_points_from_eta(*cfg.eta, &underdetermined);
  else underdetermined = points < 6;

  const double ground = exact_ground_energy(cfg.model);
  Artifacts art(cfg.out);
  std::ostringstream finals;
  csv_row(finals, "repeat", "phi", "theta", "e_raw", "e_ni", "e_tflo", "e_tflo_ni", "final_error",
          "exact_error");
  std::vector<double> errs, exact_errs;
  for (int rep = 0; rep < cfg.repeats; ++rep) {
    const auto seed = RngStream(cfg.seed).derive({4, static_cast<std::uint64_t>(rep)}).next_u64();
    const OptimizerRun r = run_optimizer(cfg, s, s.pairs, mgd, cfg.iterations, points, seed, conf);
    errs.push_back(r.final_error);
    exact_errs.push_back(r.exact_error);
    csv_row(finals, rep, r.trace.final_params.phi, r.trace.final_params.theta, r.final.raw,
            r.final.ni, r.final.tflo, r.final.tflo_ni, r.final_error, r.exact_error);
    const std::string tag = "vqe_trace_r" + std::to_string(rep);
    art.add(tag + ".csv", trace_csv(r.trace));
    if (rep == 0)
      art.add("vqe_trace.svg",
              svg_plot(trace_plot(r.trace, cfg.optimizer + " (" + cfg.mode + ")", ground)));
  }
  art.add("vqe_final.csv", finals.str());

  // Modeled wall time. A single-pair run is compared against itself.
  const auto k = static_cast<std::uint64_t>(cfg.iterations);
  double t_parallel, t_serial;
  if (mgd) {
    t_serial = predict_wall_time(s.cost, 1, k * static_cast<std::uint64_t>(points + 1), cfg.shots);
    t_parallel = single ? t_serial
                        : predict_wall_time(s.cost, p, k, cfg.shots) +
                              predict_wall_time(s.cost, 1, k, cfg.shots);
  } else {
    t_serial = predict_wall_time(s.cost, 1, 3 * k, cfg.shots);
    t_parallel = predict_wall_time(s.cost, p, 3 * k, cfg.shots);
  }

  std::ostringstream sweep;
  csv_row(sweep, "p", "spsa_speedup", "mgd_speedup");
  Series sp{"spsa", {}, {}}, mg{"mgd", {}, {}};
  for (int q : {2, 4, 8, 12, 16, 20, 25}) {
    const double a = spsa_speedup(s.cost, q, cfg.iterations, cfg.shots);
    const double b = mgd_speedup(s.cost, q, cfg.iterations, cfg.shots);
    csv_row(sweep, q, a, b);
    sp.x.push_back(q);
    sp.y.push_back(a);
    mg.x.push_back(q);
    mg.y.push_back(b);
  }
  art.add("vqe_speedup.csv", sweep.str());
  art.add("vqe_speedup.svg",
          svg_plot({"Modeled speedup vs pairs", "pairs", "speedup", {sp, mg}, {{"1x", 1.0}}}));

  json metrics;
  metrics["pairs"] = p;
  metrics["points_per_iteration"] = mgd ? points : 0;
  metrics["underdetermined"] = mgd && underdetermined;
  metrics["median_final_error"] = median(errs);
  metrics["min_final_error"] = *std::min_element(errs.begin(), errs.end());
  metrics["max_final_error"] = *std::max_element(errs.begin(), errs.end());
  metrics["median_exact_error"] = median(exact_errs);
  metrics["modeled_time_serial_s"] = t_serial;
  metrics["modeled_time_parallel_s"] = t_parallel;
  metrics["modeled_speedup"] = t_serial / t_parallel;
  return finish("vqe", cfg, metrics, json::object(), art);
}

// ------------------------------------------------------------- shots-sweep

RunRecord cmd_shots_sweep(const ExperimentConfig& config) {
  ExperimentConfig cfg = config;
  cfg.optimizer = "spsa";
  cfg.mode = "parallel-same";
  if (cfg.shot_list.empty()) cfg.shot_list = {100, 1000, 10000};
  if (cfg.iterations <= 0) cfg.iterations = 50;
  if (cfg.repeats <= 0) cfg.repeats = 1;
  if (!cfg.cap && !cfg.uniform_fidelity) cfg.cap = 0.90;
  cfg.shots = cfg.shot_list.front();
  const Setup s = prepare(cfg, 26);
  const auto conf = confusions_for(cfg, s);
  const double ground = exact_ground_energy(cfg.model);

  Artifacts art(cfg.out);
  std::ostringstream traces, finals;
  csv_row(traces, "shots", "repeat", "iteration", "phi", "theta", "e_raw", "e_ni", "e_exact");
  csv_row(finals, "shots", "repeat", "exact_error", "final_error");
  PlotSpec plot{"SPSA exact energy by shot count", "iteration", "exact energy", {}, {{"ground", ground}}};
  json metrics;
  std::map<std::uint64_t, double> by_shots;
  for (std::uint64_t shots : cfg.shot_list) {
    ExperimentConfig c = cfg;
    c.shots = shots;
    std::vector<double> ex;
    for (int rep = 0; rep < cfg.repeats; ++rep) {
      const auto seed =
          RngStream(cfg.seed).derive({5, shots, static_cast<std::uint64_t>(rep)}).next_u64();
      const OptimizerRun r = run_optimizer(c, s, s.pairs, false, cfg.iterations, 0, seed, conf);
      ex.push_back(r.exact_error);
      csv_row(finals, shots, rep, r.exact_error, r.final_error);
      Series ser{std::to_string(shots) + " shots", {}, {}};
      for (const auto& rec : r.trace.records) {
        const double ni = rec.at_center->ni ? rec.at_center->ni->value : kNaN;
        csv_row(traces, shots, rep, rec.iteration, rec.center.phi, rec.center.theta,
                rec.at_center->raw.value, ni, rec.exact);
        ser.x.push_back(rec.iteration);
        ser.y.push_back(rec.exact);
      }
      if (rep == 0) plot.series.push_back(ser);
    }
    by_shots[shots] = median(ex);
    metrics["median_exact_error_" + std::to_string(shots)] = by_shots[shots];
  }
  art.add("shots_sweep_traces.csv", traces.str());
  art.add("shots_sweep_final.csv", finals.str());
  art.add("shots_sweep.svg", svg_plot(plot));
  if (by_shots.count(1000) && by_shots.count(10000))
    metrics["diff_1000_vs_10000"] = std::abs(by_shots[1000] - by_shots[10000]);
  metrics["pairs"] = cfg.pairs;
  return finish("shots-sweep", cfg, metrics, json::object(), art);
}

// ------------------------------------------------------- optimizer-compare

RunRecord cmd_optimizer_compare(const ExperimentConfig& config) {
  ExperimentConfig cfg = config;
  if (cfg.pair_counts.empty()) cfg.pair_counts = {4, 6, 9, 12, 16, 25};
  if (cfg.shots == 0) cfg.shots = 1000;
  const int spsa_iters = cfg.iterations > 0 ? cfg.iterations : 20;
  const int mgd_iters = cfg.iterations > 0 ? cfg.iterations : 10;
  const int spsa_reps = cfg.repeats > 0 ? cfg.repeats : 4;
  const int mgd_reps = cfg.repeats > 0 ? cfg.repeats : 5;
  cfg.mode = "parallel";
  const int max_p = *std::max_element(cfg.pair_counts.begin(), cfg.pair_counts.end());
  if (*std::min_element(cfg.pair_counts.begin(), cfg.pair_counts.end()) < 1)
    throw ConfigError("pair counts must be >= 1");
  cfg.pairs = std::max(cfg.pairs, max_p);
  const Setup s = prepare(cfg, max_p);
  const auto conf = confusions_for(cfg, s);

  Artifacts art(cfg.out);
  std::ostringstream runs, summary;
  csv_row(runs, "optimizer", "p", "repeat", "final_error", "exact_error");
  csv_row(summary, "optimizer", "p", "median", "min", "max");
  Series med_spsa{"spsa median", {}, {}}, med_mgd{"mgd median", {}, {}};
  Series lo_mgd{"mgd min", {}, {}}, hi_mgd{"mgd max", {}, {}};
  std::map<std::pair<int, int>, std::array<double, 3>> stats;  // (optimizer, p)
  for (int p : cfg.pair_counts) {
    const std::vector<QubitPair> sub(s.pairs.begin(), s.pairs.begin() + p);
    for (int which = 0; which < 2; ++which) {
      const bool mgd = which == 1;
      const int reps = mgd ? mgd_reps : spsa_reps;
      std::vector<double> errs;
      for (int rep = 0; rep < reps; ++rep) {
        const auto seed = RngStream(cfg.seed)
                              .derive({6, static_cast<std::uint64_t>(which),
                                       static_cast<std::uint64_t>(p), static_cast<std::uint64_t>(rep)})
                              .next_u64();
        const OptimizerRun r =
            run_optimizer(cfg, s, sub, mgd, mgd ? mgd_iters : spsa_iters, p, seed, conf);
        errs.push_back(r.final_error);
        csv_row(runs, mgd ? "mgd" : "spsa", p, rep, r.final_error, r.exact_error);
      }
      const double md = median(errs);
      const double mn = *std::min_element(errs.begin(), errs.end());
      const double mx = *std::max_element(errs.begin(), errs.end());
      stats[{which, p}] = {md, mn, mx};
      csv_row(summary, mgd ? "mgd" : "spsa", p, md, mn, mx);
      (mgd ? med_mgd : med_spsa).x.push_back(p);
      (mgd ? med_mgd : med_spsa).y.push_back(md);
      if (mgd) {
        lo_mgd.x.push_back(p);
        lo_mgd.y.push_back(mn);
        hi_mgd.x.push_back(p);
        hi_mgd.y.push_back(mx);
      }
    }
  }
  art.add("optimizer_compare_runs.csv", runs.str());
  art.add("optimizer_compare.csv", summary.str());
  art.add("optimizer_compare.svg",
          svg_plot({"Final error (" + to_string(cfg.mitigation) + ")", "pairs", "|E - E0|",
                    {med_spsa, med_mgd, lo_mgd, hi_mgd}, {}}));

  json metrics;
  int tested = 0, mgd_wins = 0;
  for (int p : cfg.pair_counts) {
    if (p < 9) continue;
    ++tested;
    mgd_wins += stats[{1, p}][0] <= stats[{0, p}][0];
  }
  metrics["p_ge_9_tested"] = tested;
  metrics["p_ge_9_mgd_not_worse"] = mgd_wins;
  if (stats.count({1, 12})) {
    const auto& ref = stats[{1, 12}];
    metrics["mgd_spread_p12"] = ref[2] - ref[1];
    double small = 0.0;
    for (int p : cfg.pair_counts)
      if (p < 8) small = std::max(small, stats[{1, p}][2] - stats[{1, p}][1]);
    metrics["mgd_max_spread_p_lt_8"] = small;
  }
  metrics["spsa_iterations"] = spsa_iters;
  metrics["mgd_iterations"] = mgd_iters;
  metrics["spsa_repeats"] = spsa_reps;
  metrics["mgd_repeats"] = mgd_reps;
  return finish("optimizer-compare", cfg, metrics, json::object(), art);
}

}  // namespace pvqe
