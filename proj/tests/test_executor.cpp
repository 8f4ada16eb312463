// SPDX-License-Identifier: Apache-2.0
#include "pvqe/executor.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace pvqe;

namespace {

const char* kLine = R"({
  "name": "line",
  "qubits": [0, 1, 2, 3, 4, 5, 6, 7],
  "edges": [[0, 1, 0.97], [1, 2, 0.9], [2, 3, 0.95], [4, 5, 0.99], [6, 7, 0.93]],
  "readout": {"0": [0.02, 0.05], "3": [0.01, 0.03], "5": [0.04, 0.02]}
})";

DeviceTopology line() { return parse_calibration(kLine); }

DeviceTopology noiseless_line() {
  return parse_calibration(R"({"qubits": [0, 1, 2, 3], "edges": [[0, 1, 1.0], [2, 3, 1.0]]})");
}

ShotHistogram hist(std::array<std::uint64_t, 4> c) {
  ShotHistogram h;
  h.counts = c;
  for (auto x : c) h.shots += x;
  return h;
}

std::string csv(const BatchResult& r) {
  std::ostringstream os;
  write_batch_csv(os, r);
  return os.str();
}

}  // namespace

TEST_CASE("invalid jobs are rejected") {
  const DeviceTopology t = line();
  BatchJob job;
  CHECK_THROWS_AS(run_batch(job, t), BatchError);
  job.assignments = {{{0, 1}, {0.1, 0.2}}};
  job.shots = 0;
  CHECK_THROWS_AS(run_batch(job, t), BatchError);
  job.shots = 10;
  job.assignments = {{{0, 2}, {0.1, 0.2}}};
  CHECK_THROWS_AS(run_batch(job, t), BatchError);
  job.assignments = {{{0, 1}, {0.1, 0.2}}, {{1, 2}, {0.1, 0.2}}};
  CHECK_THROWS_AS(run_batch(job, t), BatchError);
}

TEST_CASE("histograms are deterministic for any worker count") {
  const DeviceTopology t = line();
  BatchJob job;
  job.assignments = {{{0, 1}, {0.1, 0.2}}, {{2, 3}, {-0.4, 0.7}}, {{4, 5}, {0.3, 0.3}},
                     {{6, 7}, {1.0, -0.5}}};
  job.shots = 5000;
  job.seed = 4242;
  const std::string ref = csv(run_batch(job, t, {1, 0.0}));
  for (unsigned w : {4u, 8u}) CHECK(csv(run_batch(job, t, {w, 0.0})) == ref);
  job.seed = 4243;
  CHECK(csv(run_batch(job, t, {1, 0.0})) != ref);
}

TEST_CASE("exact energies on a noiseless device follow the closed form") {
  const DeviceTopology t = noiseless_line();
  double worst = 0.0;
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) {
      const AnsatzParams a{-1.5 + 3.0 * i / 19, -1.5 + 3.0 * j / 19};
      BatchJob job;
      job.assignments = {{{0, 1}, a}};
      job.exact_expectation = true;
      const BatchResult r = run_batch(job, t);
      worst = std::max(worst, std::abs(pair_energy(r.pairs[0], r, {}).value - closed_form_energy(a)));
    }
  CHECK(worst < 1e-10);
}

TEST_CASE("reference point (0, theta) gives U/2 - 2t exactly") {
  const DeviceTopology t = noiseless_line();
  BatchJob job;
  job.assignments = {{{0, 1}, {0.0, 0.37}}, {{2, 3}, {0.0, -1.2}}};
  job.exact_expectation = true;
  const BatchResult r = run_batch(job, t);
  for (const auto& p : r.pairs) CHECK(std::abs(pair_energy(p, r, {}).value + 1.0) < 1e-12);
}

TEST_CASE("sampled energy agrees with the exact one within 3 sigma") {
  const DeviceTopology t = line();
  BatchJob job;
  job.assignments = {{{0, 1}, {0.35, 0.4}}};
  job.shots = 1000000;
  job.seed = 9;
  const BatchResult sampled = run_batch(job, t);
  job.exact_expectation = true;
  const BatchResult exact = run_batch(job, t);
  const EnergyEstimate e = pair_energy(sampled.pairs[0], sampled, {});
  const double ref = pair_energy(exact.pairs[0], exact, {}).value;
  CHECK(e.std_err > 0.0);
  CHECK(std::abs(e.value - ref) < 3 * e.std_err);

  // With readout inversion the exact estimate no longer carries readout bias.
  const ConfusionMatrix c = exact_confusion(exact.pairs[0].noise);
  PairNoiseSpec no_readout = exact.pairs[0].noise;
  no_readout.readout = {};
  const auto setting_dist = [&](MeasurementSetting s) {
    return exact_distribution(run_circuit(build_circuit({0.35, 0.4}, s), no_readout), no_readout);
  };
  const double unbiased = estimate_energy_exact(setting_dist(MeasurementSetting::Onsite),
                                                setting_dist(MeasurementSetting::Hopping), {})
                              .value;
  CHECK(std::abs(pair_energy(exact.pairs[0], exact, {}, &c).value - unbiased) < 1e-12);
}

TEST_CASE("estimator locks the outcome-to-energy mapping") {
  // All shots in 00: onsite contributes 0 (q1 sign flipped), hopping -2t.
  const MeasuredSettings m{hist({100, 0, 0, 0}), hist({100, 0, 0, 0})};
  const EnergyEstimate e = estimate_energy(m, {});
  CHECK(e.value == doctest::Approx(-2.0));
  CHECK(e.std_err == 0.0);
  CHECK(estimate_energy({hist({0, 100, 0, 0}), hist({0, 0, 0, 100})}, {}).value ==
        doctest::Approx(2.0 + 2.0));

  // Uniform distributions: onsite mean U/2, hopping mean 0, variances U^2/4 + 2t^2.
  const EnergyEstimate u = estimate_energy({hist({25, 25, 25, 25}), hist({25, 25, 25, 25})}, {});
  CHECK(u.value == doctest::Approx(1.0));
  CHECK(u.std_err == doctest::Approx(std::sqrt((1.0 + 2.0) / 100.0)));
}

TEST_CASE("estimator errors") {
  const ShotHistogram ok = hist({10, 0, 0, 0});
  CHECK_THROWS_AS(estimate_energy({ShotHistogram{}, ok}, {}), BatchError);
  CHECK_THROWS_AS(estimate_energy({ok, hist({5, 0, 0, 0})}, {}), BatchError);
  ShotHistogram wrong = ok;
  wrong.shots = 11;
  CHECK_THROWS_AS(estimate_energy({wrong, wrong}, {}), BatchError);
}

TEST_CASE("same-params aggregation") {
  CHECK_THROWS_AS(aggregate_same_params({}), BatchError);
  const EnergyEstimate one{-1.0, 0.1, 1000};
  const EnergyEstimate agg1 = aggregate_same_params({one});
  CHECK(agg1.value == -1.0);
  CHECK(agg1.std_err == doctest::Approx(0.1));

  // p equal estimates shrink the error by 1/sqrt(p).
  for (int p : {4, 16, 25}) {
    const EnergyEstimate a = aggregate_same_params(std::vector<EnergyEstimate>(p, one));
    CHECK(a.value == doctest::Approx(-1.0));
    CHECK(a.std_err == doctest::Approx(0.1 / std::sqrt(p)));
    CHECK(a.shots_per_setting == 1000u * p);
  }

  // Shot weighting and exact-mode equal weighting.
  const EnergyEstimate w = aggregate_same_params({{0.0, 0.1, 3000}, {1.0, 0.1, 1000}});
  CHECK(w.value == doctest::Approx(0.25));
  const EnergyEstimate x = aggregate_same_params({{0.0, 0.0, 0}, {1.0, 0.0, 0}});
  CHECK(x.value == doctest::Approx(0.5));
}

TEST_CASE("crosstalk flag marks only neighbouring pairs") {
  const DeviceTopology t = line();
  BatchJob job;
  job.assignments = {{{0, 1}, {0.2, 0.2}}, {{2, 3}, {0.2, 0.2}}, {{4, 5}, {0.2, 0.2}}};
  job.exact_expectation = true;
  const BatchResult quiet = run_batch(job, t, {1, 0.0});
  for (const auto& p : quiet.pairs) CHECK_FALSE(p.crosstalk);
  const BatchResult loud = run_batch(job, t, {1, 0.05});
  CHECK(loud.pairs[0].crosstalk);
  CHECK(loud.pairs[1].crosstalk);
  CHECK_FALSE(loud.pairs[2].crosstalk);
  CHECK(pair_energy(loud.pairs[0], loud, {}).value != pair_energy(quiet.pairs[0], quiet, {}).value);
  CHECK(pair_energy(loud.pairs[2], loud, {}).value == pair_energy(quiet.pairs[2], quiet, {}).value);
}

TEST_CASE("confusion measurement") {
  const DeviceTopology t = line();
  const auto exact = measure_confusions(t, {{0, 1}, {4, 5}}, 0, 1);
  CHECK(exact.at({0, 1}).shots_used == 0);
  CHECK(exact.at({0, 1}).matrix(2, 0) == doctest::Approx(0.02));
  const auto a = measure_confusions(t, {{0, 1}, {4, 5}}, 2000, 1);
  const auto b = measure_confusions(t, {{0, 1}, {4, 5}}, 2000, 1);
  CHECK(a.at({4, 5}).matrix == b.at({4, 5}).matrix);
}
