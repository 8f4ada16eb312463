// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "pvqe/device.hpp"
#include "pvqe/mitigation.hpp"

#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace pvqe {

class BatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PairAssignment {
  QubitPair pair;
  AnsatzParams params;
};

/// One run of the device: every assignment executes both measurement settings.
struct BatchJob {
  std::vector<PairAssignment> assignments;
  std::uint64_t shots = 1000;
  std::uint64_t seed = 0;
  /// Skip sampling and keep only exact outcome distributions.
  bool exact_expectation = false;
  HubbardParams model;
};

struct BatchOptions {
  unsigned workers = 1;
  /// Extra depolarizing probability on pairs with an active neighbour pair.
  double crosstalk_p = 0.0;
};

struct SettingOutcome {
  Distribution exact{};  ///< outcome probabilities including readout error
  ShotHistogram counts;  ///< empty in exact-expectation mode
};

struct PairOutcome {
  QubitPair pair;
  AnsatzParams params;
  PairNoiseSpec noise;
  bool crosstalk = false;
  std::array<SettingOutcome, 2> settings;  ///< indexed by MeasurementSetting

  const SettingOutcome& at(MeasurementSetting s) const { return settings[static_cast<int>(s)]; }
};

struct BatchResult {
  std::vector<PairOutcome> pairs;  ///< same order as the job's assignments
  std::uint64_t shots = 0;
  bool exact_expectation = false;
};

/// Simulates a batch. Tasks are (pair, setting) and may run on `workers`
/// threads; each draws from a stream derived from (seed, pair index,
/// setting), so the result does not depend on the worker count.
/// Throws BatchError for empty jobs, overlapping pairs, zero shots or pairs
/// that are not couplers of the topology.
BatchResult run_batch(const BatchJob& job, const DeviceTopology& topology,
                      const BatchOptions& options = {});

/// Energy in units of H_C with its standard error.
struct EnergyEstimate {
  double value = 0.0;
  double std_err = 0.0;
  std::uint64_t shots_per_setting = 0;
};

struct MeasuredSettings {
  ShotHistogram onsite;
  ShotHistogram hopping;
};

/// E = (U/2)(1 + <ZZ>) - t(<XI> + <IX>) from the two settings' counts, with
/// the frozen sign map. When a confusion matrix is given the counts are
/// readout-inverted first. The standard error is the plug-in multinomial
/// error of each setting, combined in quadrature.
/// Throws BatchError when a setting has no shots or the shot counts differ.
EnergyEstimate estimate_energy(const MeasuredSettings& m, const HubbardParams& h,
                               const ConfusionMatrix* confusion = nullptr);

/// Same estimator on exact distributions; std_err is 0.
EnergyEstimate estimate_energy_exact(const Distribution& onsite, const Distribution& hopping,
                                     const HubbardParams& h,
                                     const ConfusionMatrix* confusion = nullptr);

/// Estimate for one pair of a batch, honouring the batch's mode.
EnergyEstimate pair_energy(const PairOutcome& outcome, const BatchResult& batch,
                           const HubbardParams& h, const ConfusionMatrix* confusion = nullptr);

/// Shot-weighted pooled mean of same-parameter estimates.
/// Throws BatchError on an empty list.
EnergyEstimate aggregate_same_params(const std::vector<EnergyEstimate>& estimates);

/// NI confusion matrices, one per pair, each from `shots` samples per basis
/// state (or exact when shots == 0). Streams derive from (seed, pair index).
std::map<QubitPair, ConfusionMatrix> measure_confusions(const DeviceTopology& topology,
                                                        const std::vector<QubitPair>& pairs,
                                                        std::uint64_t shots, std::uint64_t seed);

/// CSV columns: pair_a,pair_b,setting,b00,b01,b10,b11,shots.
void write_batch_csv(std::ostream& out, const BatchResult& batch);

}  // namespace pvqe
