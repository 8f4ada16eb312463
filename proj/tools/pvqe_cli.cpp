// SPDX-License-Identifier: Apache-2.0
// Command-line front end for the parallel VQE experiments.
#include "pvqe/harness.hpp"
#include "pvqe/report.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <iostream>

namespace {

struct Flags {
  pvqe::ExperimentConfig cfg;
  std::string select = "greedy";
  std::string mitigation = "ni+tflo";
  double cap = -1.0;
  double uniform_fidelity = -1.0;
  double eta = -1.0;
  std::vector<double> start;
  std::vector<double> uniform_readout;
};

void add_common(CLI::App* sub, Flags& f) {
  auto& c = f.cfg;
  sub->add_option("--calibration", c.calibration, "Calibration JSON (default: shipped file)");
  sub->add_option("--seed", c.seed, "Root seed")->required();
  sub->add_option("--pairs", c.pairs, "Number of qubit pairs");
  sub->add_option("--select", f.select, "Pair selection")->check(CLI::IsMember({"greedy", "matching"}));
  sub->add_option("--cap", f.cap, "Minimum CZ fidelity for selected pairs");
  sub->add_option("--shots", c.shots, "Shots per setting");
  sub->add_option("--mitigation", f.mitigation, "none | ni | tflo | ni+tflo");
  sub->add_option("--out", c.out, "Output directory");
  sub->add_option("--workers", c.workers, "Simulation threads")->check(CLI::Range(1u, 256u));
  sub->add_option("--cost-model", c.cost_model, "Cost model JSON (default: shipped file)");
  sub->add_option("--crosstalk", c.crosstalk_p, "Extra depolarizing probability for neighbouring pairs")
      ->check(CLI::Range(0.0, 1.0));
  sub->add_option("--confusion-shots", c.confusion_shots, "Shots per basis state for NI");
  sub->add_option("--uniform-fidelity", f.uniform_fidelity,
                  "Use isolated synthetic couplers with this CZ fidelity");
  sub->add_option("--uniform-readout", f.uniform_readout, "eps01 eps10 for synthetic couplers")
      ->expected(2);
  sub->add_flag("--noiseless", c.noiseless, "Remove all noise from the topology");
  sub->add_flag("--exact", c.exact_expectation, "Use exact distributions instead of shots");
}

void add_optimizer(CLI::App* sub, Flags& f) {
  auto& c = f.cfg;
  sub->add_option("--iterations", c.iterations, "Optimizer iterations");
  sub->add_option("--repeats", c.repeats, "Independent repeats");
  sub->add_option("--start", f.start, "Start point phi theta")->expected(2);
  sub->add_option("--eta", f.eta, "MGD points per iteration as a multiple of 6");
}

void resolve(Flags& f) {
  auto& c = f.cfg;
  c.select = f.select == "matching" ? pvqe::SelectionMethod::MaxWeightMatching
                                    : pvqe::SelectionMethod::Greedy;
  c.mitigation = pvqe::parse_mitigation(f.mitigation);
  if (f.cap >= 0) c.cap = f.cap;
  if (f.uniform_fidelity >= 0) c.uniform_fidelity = f.uniform_fidelity;
  if (f.eta > 0) c.eta = f.eta;
  if (f.start.size() == 2) c.start = {f.start[0], f.start[1]};
  if (f.uniform_readout.size() == 2) c.uniform_readout = {f.uniform_readout[0], f.uniform_readout[1]};
}

int fit_cost_model(const std::string& out) {
  const auto fit = pvqe::calibrate_cost_model(pvqe::reference_observations());
  const std::string text = pvqe::cost_model_to_json(fit.model);
  if (out.empty()) std::cout << text;
  else pvqe::write_text_file(out, text);
  std::cerr << "rms residual " << fit.rms << " s\n";
  for (double r : fit.residuals) std::cerr << "  residual " << r << " s\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parallel VQE testbed for the two-site Hubbard model"};
  app.set_version_flag("--version", PVQE_VERSION);
  app.require_subcommand(1);

  Flags f;
  auto* bench = app.add_subcommand("benchmark-pairs", "Per-pair and greedy-parallel benchmarks");
  add_common(bench, f);

  auto* heat = app.add_subcommand("heatmap", "Energy landscape on a grid, batched over pairs");
  add_common(heat, f);
  heat->add_option("--grid", f.cfg.grid, "Points per axis")->check(CLI::Range(2, 400));

  auto* vqe = app.add_subcommand("vqe", "One optimizer run, single pair or parallel");
  add_common(vqe, f);
  add_optimizer(vqe, f);
  vqe->add_option("--optimizer", f.cfg.optimizer, "spsa | mgd")->check(CLI::IsMember({"spsa", "mgd"}));
  vqe->add_option("--mode", f.cfg.mode, "single | parallel | parallel-same | parallel-batch");

  auto* shots = app.add_subcommand("shots-sweep", "SPSA at several shot counts");
  add_common(shots, f);
  add_optimizer(shots, f);
  shots->add_option("--shot-list", f.cfg.shot_list, "Shot counts to compare (comma separated)")->delimiter(',');

  auto* cmp = app.add_subcommand("optimizer-compare", "SPSA against MGD across pair counts");
  add_common(cmp, f);
  add_optimizer(cmp, f);
  cmp->add_option("--pair-counts", f.cfg.pair_counts, "Pair counts to test (comma separated)")->delimiter(',');

  std::string fit_out;
  auto* fit = app.add_subcommand("fit-cost-model", "Fit the cost model to the reference timings");
  fit->add_option("--out", fit_out, "Output JSON file (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (fit->parsed()) return fit_cost_model(fit_out);
    resolve(f);
    const auto t0 = std::chrono::steady_clock::now();
    pvqe::RunRecord rec;
    if (bench->parsed()) rec = pvqe::cmd_benchmark_pairs(f.cfg);
    else if (heat->parsed()) rec = pvqe::cmd_heatmap(f.cfg);
    else if (vqe->parsed()) rec = pvqe::cmd_vqe(f.cfg);
    else if (shots->parsed()) rec = pvqe::cmd_shots_sweep(f.cfg);
    else rec = pvqe::cmd_optimizer_compare(f.cfg);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    for (const auto& [k, v] : rec.metrics) std::cout << k << " = " << v << '\n';
    if (!f.cfg.out.empty()) std::cout << "wrote " << rec.files.size() << " files to " << f.cfg.out.string() << '\n';
    // Host time is informational and kept out of every artifact.
    std::cerr << "simulation time " << secs << " s\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
