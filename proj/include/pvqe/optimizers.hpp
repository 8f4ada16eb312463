// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "pvqe/executor.hpp"
#include "pvqe/rng.hpp"

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace pvqe {

class OptimizerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Coordinates the optimizer steps in: x = (phi_scale * phi, theta_scale * theta).
/// Gains and trust radii are in these units; evaluators, traces and start
/// points stay in ansatz angles.
struct AngleFrame {
  double phi_scale = 1.0;
  double theta_scale = 1.0;

  /// The compiled circuit's rotation angles, (U phi, 2 t theta). Falls back
  /// to a unit scale for a vanishing coefficient.
  static AngleFrame circuit(const HubbardParams& h);

  AnsatzParams to_frame(const AnsatzParams& a) const {
    return {a.phi * phi_scale, a.theta * theta_scale};
  }
  AnsatzParams to_ansatz(const AnsatzParams& x) const {
    return {x.phi / phi_scale, x.theta / theta_scale};
  }
};

struct SpsaConfig {
  double alpha = 0.602;
  double gamma = 0.101;
  double a = 0.15;
  double c = 0.2;
  double A = 1.0;
  int iterations = 100;
  std::uint64_t shots = 1000;
  AngleFrame frame;

  /// Throws OptimizerError unless gains are positive, alpha > gamma and iterations >= 1.
  void validate() const;
  double a_k(int k) const;  ///< a / (k + A)^alpha, k >= 1
  double c_k(int k) const;  ///< c / k^gamma
};

struct MgdConfig {
  double alpha = 0.602;
  double delta = 0.6;
  double xi = 0.101;
  double l = 0.2;
  double gamma = 0.6;
  double A = 1.0;
  std::optional<double> eta;
  int iterations = 50;
  std::uint64_t shots = 1000;
  /// Also evaluate the center once per iteration for the trace. Never used
  /// by the update.
  bool track_center = true;
  AngleFrame frame;

  void validate() const;
  double delta_k(int k) const;  ///< delta / k^xi
  double gamma_k(int k) const;  ///< gamma / (k + A)^alpha
};

/// Estimates for one parameter point. `ni` is present when readout
/// inversion is on; the optimizers follow `ni` when present, else `raw`.
struct Evaluation {
  EnergyEstimate raw;
  std::optional<EnergyEstimate> ni;

  const EnergyEstimate& best() const { return ni ? *ni : raw; }
};

using PointEvaluator = std::function<Evaluation(const AnsatzParams&)>;
/// Evaluates all points in one device batch.
using BatchEvaluator = std::function<std::vector<Evaluation>(const std::vector<AnsatzParams>&)>;
/// Exact energy for diagnostics. Its result is only recorded.
using Diagnostics = std::function<double(const AnsatzParams&)>;

struct TraceRecord {
  int iteration = 0;
  AnsatzParams center;           ///< parameters before this iteration's update
  std::optional<Evaluation> at_center;
  double exact = 0.0;            ///< NaN without diagnostics
  std::vector<AnsatzParams> samples;
};

struct OptTrace {
  std::vector<TraceRecord> records;
  AnsatzParams final_params;
  int evaluator_calls = 0;  ///< device batches issued
};

/// One-stage SPSA. Each iteration evaluates the center, then theta + c_k Delta
/// and theta - c_k Delta, in that order.
OptTrace spsa_run(const SpsaConfig& cfg, const PointEvaluator& evaluate, AnsatzParams start,
                  RngStream& stream, const Diagnostics& diagnostics = {});

/// round(6 eta). Results below 6 leave the surrogate under-determined; this
/// is reported through `underdetermined` rather than an error.
int n_points_from_eta(double eta, bool* underdetermined = nullptr);

/// Quadratic surrogate c0 + c1 x + c2 y + c3 x^2 + c4 x y + c5 y^2 in offsets.
/// Minimizes sum_i (r_i / s_i)^2 + |c|^2 / l^2, which is the weighted ridge
/// problem with weights mean(s^2)/s_i^2 and strength mean(s^2)/l^2. When all
/// s_i are zero the fit is plain least squares. Throws OptimizerError when the
/// system is singular.
Eigen::Matrix<double, 6, 1> fit_quadratic_surrogate(const std::vector<Eigen::Vector2d>& offsets,
                                                    const std::vector<double>& values,
                                                    const std::vector<double>& std_errs,
                                                    double l);

/// Model gradient descent with `points` samples per iteration, drawn uniformly
/// from the box of half-width delta_k around the center.
OptTrace mgd_run(const MgdConfig& cfg, const BatchEvaluator& evaluate, AnsatzParams start,
                 int points, RngStream& stream, const Diagnostics& diagnostics = {});

/// CSV columns: iteration,phi,theta,e_raw,e_ni,e_exact.
void write_trace_csv(std::ostream& out, const OptTrace& trace);

}  // namespace pvqe
