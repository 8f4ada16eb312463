// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "pvqe/optimizers.hpp"

#include <map>
#include <memory>

namespace pvqe {

/// What every device-backed evaluator needs. `confusions` switches NI on;
/// it must hold a matrix for every pair.
struct DeviceContext {
  std::shared_ptr<const DeviceTopology> topology;
  std::vector<QubitPair> pairs;  ///< best pair first
  HubbardParams model;
  std::uint64_t shots = 1000;
  bool exact_expectation = false;
  BatchOptions options;
  std::shared_ptr<const std::map<QubitPair, ConfusionMatrix>> confusions;
};

/// Counts device batches and hands out a fresh job seed per batch, so
/// repeated queries of the same point see independent shot noise.
class BatchRunner {
 public:
  BatchRunner(DeviceContext ctx, std::uint64_t seed);

  const DeviceContext& context() const { return ctx_; }
  std::uint64_t batches_run() const { return calls_; }

  /// Runs one batch. Assignment i uses pairs[i]; throws BatchError when
  /// there are more assignments than pairs.
  BatchResult run(const std::vector<AnsatzParams>& params);

  /// Raw and (if NI is on) readout-inverted estimate for one pair outcome.
  Evaluation evaluate(const PairOutcome& outcome, const BatchResult& batch) const;

 private:
  DeviceContext ctx_;
  std::uint64_t seed_;
  std::uint64_t calls_ = 0;
};

/// Same-parameter mode: one batch with identical params on every pair,
/// pooled with aggregate_same_params.
PointEvaluator same_params_evaluator(std::shared_ptr<BatchRunner> runner);

/// Different-parameter mode: point i runs on pair i mod p; more points than
/// pairs spill into further batches.
BatchEvaluator batch_evaluator(std::shared_ptr<BatchRunner> runner);

struct TfloResult {
  Evaluation measured;   ///< at the requested point
  Evaluation reference;  ///< at (0, theta)
  double reference_exact = 0.0;
  double raw = 0.0;      ///< raw estimate, no correction
  double ni = 0.0;       ///< NI only (equals raw without NI)
  double tflo = 0.0;     ///< raw, TFLO corrected
  double tflo_ni = 0.0;  ///< NI then TFLO
};

/// Evaluates `a` and its phi = 0 reference with `evaluate` and applies the
/// single-point correction. The reference's exact energy comes from the oracle.
TfloResult tflo_evaluate(const PointEvaluator& evaluate, const AnsatzParams& a,
                         const HubbardParams& h);

}  // namespace pvqe
