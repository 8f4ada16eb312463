// SPDX-License-Identifier: Apache-2.0
#include "pvqe/executor.hpp"

#include "pvqe/parallel.hpp"

#include <cmath>
#include <set>

namespace pvqe {

namespace {

// Per-outcome value of each setting's observable, outcome index = 2*b0 + b1.
Eigen::Vector4d observable_weights(MeasurementSetting s, const HubbardParams& h) {
  const SignMap sm = sign_map(s);
  Eigen::Vector4d g;
  for (int i = 0; i < 4; ++i) {
    const int z0 = sm.sign[0] * (((i >> 1) & 1) ? -1 : 1);
    const int z1 = sm.sign[1] * ((i & 1) ? -1 : 1);
    if (s == MeasurementSetting::Onsite)
      g(i) = 0.5 * h.U * (1.0 + z0 * z1);
    else
      g(i) = -h.t * (z0 + z1);
  }
  return g;
}

// With readout inversion the estimator stays linear in the measured
// frequencies: g . N^-1 d = (N^-T g) . d.
Eigen::Vector4d effective_weights(MeasurementSetting s, const HubbardParams& h,
                                  const ConfusionMatrix* confusion) {
  Eigen::Vector4d g = observable_weights(s, h);
  if (confusion) {
    confusion->validate();
    g = confusion->matrix.transpose().partialPivLu().solve(g);
  }
  return g;
}

Eigen::Vector4d as_vector(const Distribution& d) { return {d[0], d[1], d[2], d[3]}; }

struct SettingMoments {
  double mean;
  double variance;  // per shot
};

SettingMoments moments(const Distribution& d, const Eigen::Vector4d& g) {
  const Eigen::Vector4d p = as_vector(d);
  const double mean = p.dot(g);
  const double second = p.dot(g.cwiseProduct(g));
  return {mean, std::max(0.0, second - mean * mean)};
}

void check_histogram(const ShotHistogram& h, const char* name) {
  if (h.shots == 0) throw BatchError(std::string("estimate_energy: missing ") + name + " setting");
  std::uint64_t total = 0;
  for (auto c : h.counts) total += c;
  if (total != h.shots)
    throw BatchError(std::string("estimate_energy: ") + name + " counts do not sum to shots");
}

}  // namespace

BatchResult run_batch(const BatchJob& job, const DeviceTopology& topology,
                      const BatchOptions& options) {
  if (job.assignments.empty()) throw BatchError("run_batch: job has no assignments");
  if (job.shots == 0) throw BatchError("run_batch: shots must be >= 1");
  std::set<int> used;
  for (const PairAssignment& a : job.assignments) {
    if (!topology.coupler(a.pair))
      throw BatchError("run_batch: pair [" + std::to_string(a.pair.a) + ", " +
                       std::to_string(a.pair.b) + "] is not a coupler");
    if (!used.insert(a.pair.a).second || !used.insert(a.pair.b).second)
      throw BatchError("run_batch: assignments share a qubit");
  }

  const std::size_t n = job.assignments.size();
  BatchResult result;
  result.shots = job.shots;
  result.exact_expectation = job.exact_expectation;
  result.pairs.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    PairOutcome& out = result.pairs[i];
    out.pair = job.assignments[i].pair;
    out.params = job.assignments[i].params;
    out.noise = noise_spec_for_pair(topology, out.pair, options.crosstalk_p);
    if (options.crosstalk_p > 0.0) {
      for (std::size_t j = 0; j < n; ++j)
        if (j != i && pairs_neighbor(topology, out.pair, job.assignments[j].pair))
          out.crosstalk = true;
    }
  }

  const RngStream root(job.seed);
  parallel_for(2 * n, options.workers, [&](std::size_t task) {
    const std::size_t i = task / 2;
    const auto setting = static_cast<MeasurementSetting>(task % 2);
    PairOutcome& out = result.pairs[i];
    const NativeCircuit c = build_circuit(out.params, setting, job.model);
    const DensityMatrix rho = run_circuit(c, out.noise, out.crosstalk);
    SettingOutcome& so = out.settings[static_cast<int>(setting)];
    so.exact = exact_distribution(rho, out.noise);
    if (!job.exact_expectation) {
      RngStream stream = root.derive({i, static_cast<std::uint64_t>(setting)});
      so.counts = sample_shots(so.exact, job.shots, stream);
    }
  });
  return result;
}

EnergyEstimate estimate_energy(const MeasuredSettings& m, const HubbardParams& h,
                               const ConfusionMatrix* confusion) {
  check_histogram(m.onsite, "onsite");
  check_histogram(m.hopping, "hopping");
  if (m.onsite.shots != m.hopping.shots)
    throw BatchError("estimate_energy: settings have different shot counts");
  const auto on = moments(m.onsite.normalized(),
                          effective_weights(MeasurementSetting::Onsite, h, confusion));
  const auto hop = moments(m.hopping.normalized(),
                           effective_weights(MeasurementSetting::Hopping, h, confusion));
  const double n = static_cast<double>(m.onsite.shots);
  return {on.mean + hop.mean, std::sqrt((on.variance + hop.variance) / n), m.onsite.shots};
}

EnergyEstimate estimate_energy_exact(const Distribution& onsite, const Distribution& hopping,
                                     const HubbardParams& h, const ConfusionMatrix* confusion) {
  const double on =
      as_vector(onsite).dot(effective_weights(MeasurementSetting::Onsite, h, confusion));
  const double hop =
      as_vector(hopping).dot(effective_weights(MeasurementSetting::Hopping, h, confusion));
  return {on + hop, 0.0, 0};
}

EnergyEstimate pair_energy(const PairOutcome& outcome, const BatchResult& batch,
                           const HubbardParams& h, const ConfusionMatrix* confusion) {
  if (batch.exact_expectation)
    return estimate_energy_exact(outcome.at(MeasurementSetting::Onsite).exact,
                                 outcome.at(MeasurementSetting::Hopping).exact, h, confusion);
  return estimate_energy({outcome.at(MeasurementSetting::Onsite).counts,
                          outcome.at(MeasurementSetting::Hopping).counts},
                         h, confusion);
}

EnergyEstimate aggregate_same_params(const std::vector<EnergyEstimate>& estimates) {
  if (estimates.empty()) throw BatchError("aggregate_same_params: no estimates");
  double total = 0.0;
  for (const auto& e : estimates) total += static_cast<double>(e.shots_per_setting);
  EnergyEstimate out;
  double var = 0.0;
  for (const auto& e : estimates) {
    // Exact-mode estimates carry no shots; weigh them equally.
    const double w = total > 0.0 ? static_cast<double>(e.shots_per_setting) / total
                                 : 1.0 / static_cast<double>(estimates.size());
    out.value += w * e.value;
    var += w * w * e.std_err * e.std_err;
    out.shots_per_setting += e.shots_per_setting;
  }
  out.std_err = std::sqrt(var);
  return out;
}

std::map<QubitPair, ConfusionMatrix> measure_confusions(const DeviceTopology& topology,
                                                        const std::vector<QubitPair>& pairs,
                                                        std::uint64_t shots, std::uint64_t seed) {
  std::map<QubitPair, ConfusionMatrix> out;
  const RngStream root(seed);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const PairNoiseSpec n = noise_spec_for_pair(topology, pairs[i]);
    if (shots == 0) {
      out[pairs[i]] = exact_confusion(n);
    } else {
      RngStream stream = root.derive({0xC0F, i});
      out[pairs[i]] = measure_confusion(n, shots, stream);
    }
  }
  return out;
}

void write_batch_csv(std::ostream& out, const BatchResult& batch) {
  out << "pair_a,pair_b,setting,b00,b01,b10,b11,shots\n";
  for (const PairOutcome& p : batch.pairs) {
    for (MeasurementSetting s : kAllSettings) {
      const ShotHistogram& h = p.at(s).counts;
      out << p.pair.a << ',' << p.pair.b << ',' << to_string(s) << ',' << h.counts[0] << ','
          << h.counts[1] << ',' << h.counts[2] << ',' << h.counts[3] << ',' << h.shots << '\n';
    }
  }
}

}  // namespace pvqe
