// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "pvqe/noisy_sim.hpp"

#include <stdexcept>
#include <string>

namespace pvqe {

class MitigationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Readout confusion of one pair: entry (i, j) is P(measure i | prepared j).
struct ConfusionMatrix {
  Matrix4 matrix = Matrix4::Identity();
  std::uint64_t shots_used = 0;  ///< per prepared basis state; 0 for exact matrices

  /// Throws MitigationError unless columns sum to 1 (1e-9), entries lie in
  /// [0, 1] and the 2-norm condition number is at most kMaxCondition.
  void validate() const;
  double condition_number() const;

  static constexpr double kMaxCondition = 100.0;
};

/// Confusion matrix implied by the noise model, without sampling.
ConfusionMatrix exact_confusion(const PairNoiseSpec& n);

/// Prepares each basis state ideally and samples `shots` readouts of it.
ConfusionMatrix measure_confusion(const PairNoiseSpec& n, std::uint64_t shots, RngStream& stream);

/// N^-1 applied to a measured distribution. Entries may come out slightly
/// negative; they are returned as is.
Distribution invert_readout(const Distribution& measured, const ConfusionMatrix& n);
Distribution invert_readout(const ShotHistogram& hist, const ConfusionMatrix& n);

/// Single-point TFLO: shifts the estimate by the reference point's known error.
inline double tflo_correct(double estimate, double reference_exact, double reference_measured) {
  return estimate + reference_exact - reference_measured;
}

std::string confusion_to_json(const ConfusionMatrix& n);
/// Validates after parsing.
ConfusionMatrix confusion_from_json(const std::string& text);

}  // namespace pvqe
