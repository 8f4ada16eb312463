// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "pvqe/cost_model.hpp"
#include "pvqe/evaluators.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace pvqe {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Mitigation {
  bool ni = false;
  bool tflo = false;
};

/// Parses none | ni | tflo | ni+tflo. Throws ConfigError otherwise.
Mitigation parse_mitigation(const std::string& s);
std::string to_string(Mitigation m);

/// Resolved settings of one experiment. Zero or empty fields take the
/// command's default when the command runs; the RunRecord stores the values
/// actually used.
struct ExperimentConfig {
  std::filesystem::path calibration;  ///< empty: shipped aspen_m1_like.json
  std::uint64_t seed = 0;
  int pairs = 0;
  SelectionMethod select = SelectionMethod::Greedy;
  std::optional<double> cap;
  std::uint64_t shots = 0;
  std::string optimizer = "spsa";  ///< spsa | mgd
  std::string mode;                ///< single | parallel
  int iterations = 0;
  Mitigation mitigation{true, true};
  std::filesystem::path out;  ///< empty: write nothing
  unsigned workers = 1;
  std::filesystem::path cost_model;  ///< empty: shipped default_cost_model.json
  double crosstalk_p = 0.0;
  int repeats = 0;
  int grid = 20;
  std::vector<int> pair_counts;
  std::vector<std::uint64_t> shot_list;
  std::uint64_t confusion_shots = 10000;
  /// Replace the chip by `pairs` isolated couplers with this CZ fidelity and
  /// the readout error below.
  std::optional<double> uniform_fidelity;
  ReadoutError uniform_readout{0.02, 0.05};
  /// Strip all gate and readout noise from the topology.
  bool noiseless = false;
  /// Skip sampling and use exact outcome distributions.
  bool exact_expectation = false;
  AnsatzParams start{0.6, 0.8};
  std::optional<double> eta;
  HubbardParams model;
};

/// Result of one subcommand. `json` is the serialized record; `files` lists
/// the artifacts written relative to the output directory.
struct RunRecord {
  std::string command;
  std::string json;
  std::vector<std::string> files;
  /// Headline numbers for tests and the CLI summary.
  std::map<std::string, double> metrics;
};

RunRecord cmd_benchmark_pairs(const ExperimentConfig& cfg);
RunRecord cmd_heatmap(const ExperimentConfig& cfg);
RunRecord cmd_vqe(const ExperimentConfig& cfg);
RunRecord cmd_shots_sweep(const ExperimentConfig& cfg);
RunRecord cmd_optimizer_compare(const ExperimentConfig& cfg);

/// Parameters minimizing the ansatz energy: theta = pi/(8t),
/// U phi = atan2(U/2, 2t).
AnsatzParams optimal_params(const HubbardParams& h);

/// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

double median(std::vector<double> v);

/// `n` disjoint couplers (2i, 2i+1) with the given fidelity and readout error.
DeviceTopology uniform_topology(int n, double fidelity, ReadoutError readout);

/// Same graph with every fidelity set to 1 and no readout error.
DeviceTopology noiseless_topology(const DeviceTopology& t);

std::filesystem::path default_calibration_path();
std::filesystem::path default_cost_model_path();

}  // namespace pvqe
