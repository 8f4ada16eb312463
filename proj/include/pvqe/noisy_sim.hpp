// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "pvqe/circuit.hpp"
#include "pvqe/rng.hpp"

#include <array>
#include <cstdint>

namespace pvqe {

/// Probabilities over bitstrings b0b1, index = 2*b0 + b1.
using Distribution = std::array<double, 4>;

/// Asymmetric readout flips of one qubit.
struct ReadoutError {
  double p01 = 0.0;  ///< P(read 1 | prepared 0)
  double p10 = 0.0;  ///< P(read 0 | prepared 1)
};

/// Noise acting on one qubit pair.
struct PairNoiseSpec {
  double cz_fidelity = 1.0;
  double depol_p = 0.0;
  std::array<ReadoutError, 2> readout{};
  double crosstalk_p = 0.0;

  /// Builds a spec whose depol_p is derived from the CZ fidelity.
  static PairNoiseSpec from_fidelity(double cz_fidelity, std::array<ReadoutError, 2> readout = {},
                                     double crosstalk_p = 0.0);
  static PairNoiseSpec noiseless() { return {}; }

  /// Throws std::invalid_argument when any rate is out of range.
  void validate() const;
};

/// p with average gate fidelity f for rho -> (1-p) rho + p I/4:
/// p = 4(1 - f)/3, clamped to [0, 1]. Throws for f outside (0, 1].
double fidelity_to_depolarizing(double f);

/// Density matrix of one qubit pair.
class DensityMatrix {
 public:
  DensityMatrix() : rho_(Matrix4c::Zero()) { rho_(0, 0) = 1.0; }
  explicit DensityMatrix(const Matrix4c& rho) : rho_(rho) {}

  static DensityMatrix pure(const Vector4c& psi) { return DensityMatrix(psi * psi.adjoint()); }
  static DensityMatrix basis(int index);
  static DensityMatrix maximally_mixed() { return DensityMatrix(Matrix4c::Identity() / 4.0); }

  const Matrix4c& matrix() const { return rho_; }

  void apply_unitary(const Matrix4c& u) { rho_ = u * rho_ * u.adjoint(); }
  void depolarize(double p);

  double trace() const { return rho_.trace().real(); }
  /// Hermitian, unit trace and positive semidefinite within `tol`.
  bool is_valid(double tol = 1e-10) const;

  Distribution diagonal() const;

 private:
  Matrix4c rho_;
};

/// Trace distance 0.5 * ||a - b||_1.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

struct ShotHistogram {
  std::array<std::uint64_t, 4> counts{};
  std::uint64_t shots = 0;

  Distribution normalized() const;
};

/// Runs the circuit from |00><00|. Gates are exact; after the CZ the pair is
/// depolarized with depol_p and, if `crosstalk_active`, a second time with
/// crosstalk_p.
DensityMatrix run_circuit(const NativeCircuit& c, const PairNoiseSpec& n,
                          bool crosstalk_active = false);

/// 4x4 column-stochastic readout map M_q0 ⊗ M_q1.
Matrix4 readout_matrix(const std::array<ReadoutError, 2>& readout);

/// Computational-basis populations pushed through the readout map.
Distribution exact_distribution(const DensityMatrix& rho, const PairNoiseSpec& n);

/// Multinomial draw. Throws std::invalid_argument when shots == 0.
ShotHistogram sample_shots(const Distribution& d, std::uint64_t shots, RngStream& stream);
ShotHistogram sample_shots(const DensityMatrix& rho, const PairNoiseSpec& n, std::uint64_t shots,
                           RngStream& stream);

/// Total variation distance between two probability (or quasi-probability) vectors.
double tv_distance(const Distribution& a, const Distribution& b);

}  // namespace pvqe
