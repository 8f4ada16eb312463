// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace pvqe {

class CostModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Modeled wall time of a sequence of device batches:
///   batches * (t_base + beta * p + settings * shots * tau).
struct CostModel {
  double t_base = 0.0;  ///< seconds per batch
  double beta = 0.0;    ///< seconds per parallel pair per batch
  double tau = 0.0;     ///< seconds per shot per setting
};

/// Throws CostModelError when p, batches, shots or settings is < 1.
double predict_wall_time(const CostModel& m, int p, std::uint64_t batches, std::uint64_t shots,
                         int settings = 2);

struct TimingObservation {
  int p = 1;
  std::uint64_t batches = 1;
  std::uint64_t shots = 1;
  int settings = 2;
  double seconds = 0.0;
};

struct CostFit {
  CostModel model;
  std::vector<double> residuals;  ///< predicted - observed, per observation
  double rms = 0.0;
};

/// Nonnegative least squares for (t_base, beta, tau). The three unknowns
/// allow the active set to be enumerated exhaustively, so the result is the
/// exact NNLS optimum. Columns are scaled to unit norm before solving.
/// Throws CostModelError with fewer than 3 observations or fewer than 2
/// distinct p values.
CostFit calibrate_cost_model(const std::vector<TimingObservation>& obs);

/// Published timings the default model is fitted to:
///   25 pairs, 16 batches, 10^4 shots: 220 s   (heatmap, parallel)
///   1 pair, 400 batches, 10^4 shots: 3960 s   (heatmap, one pair)
///   1 pair, 60 batches, 10^3 shots: 245 s     (SPSA, one pair)
///   25 pairs, 60 batches, 10^3 shots: 420 s   (SPSA, parallel)
/// The SPSA runs are taken as 20 iterations of 3 evaluations each.
std::vector<TimingObservation> reference_observations();

std::string cost_model_to_json(const CostModel& m);
/// Throws CostModelError on a malformed file or a negative parameter.
CostModel cost_model_from_json(const std::string& text);
CostModel load_cost_model(const std::filesystem::path& path);

// Speedup scenarios. Each returns serial time / parallel time.

/// N-point landscape scan: one pair for N batches versus p pairs for
/// ceil(N/p) batches.
double heatmap_speedup(const CostModel& m, int points, int p, std::uint64_t shots);

/// Same-parameter SPSA: identical batch count, the parallel run just carries
/// p pairs per batch.
double spsa_speedup(const CostModel& m, int p, int iterations, std::uint64_t shots);

/// MGD with p sample points per iteration plus one center evaluation. Serial:
/// p + 1 single-pair batches per iteration. Parallel: one p-pair batch and one
/// single-pair batch for the center.
double mgd_speedup(const CostModel& m, int p, int iterations, std::uint64_t shots);

}  // namespace pvqe
