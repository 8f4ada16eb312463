// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <complex>

namespace pvqe {

using Complex = std::complex<double>;
using Matrix4c = Eigen::Matrix4cd;
using Matrix4 = Eigen::Matrix4d;
using Vector4c = Eigen::Vector4cd;

/// Two-site half-filled Hubbard model constants.
struct HubbardParams {
  double t = 1.0;  ///< tunnelling amplitude, > 0
  double U = 2.0;  ///< onsite Coulomb repulsion, >= 0

  /// Throws std::invalid_argument when t <= 0, U < 0 or either is not finite.
  void validate() const;
};

/// Variational angles of one Hamiltonian-variational layer.
struct AnsatzParams {
  double phi = 0.0;    ///< onsite evolution time
  double theta = 0.0;  ///< hopping evolution time
};

/// Amplitudes over |q0 q1> with q0 as the most significant bit.
using StateVector = Vector4c;

/// The compressed two-qubit Hamiltonian and its two commuting-group parts.
struct Hamiltonian2 {
  Matrix4 matrix;    ///< hop_part + os_part
  Matrix4 hop_part;  ///< -t (X⊗I + I⊗X)
  Matrix4 os_part;   ///< (U/2)(I + Z⊗Z)
};

Hamiltonian2 hamiltonian(const HubbardParams& h);

/// |++>, the ground state of the hopping term.
StateVector initial_state();

/// exp(i theta H_hop) exp(i phi H_os) |++>, computed by exact
/// eigendecomposition of each part. The global phase is arbitrary.
StateVector ideal_state(const AnsatzParams& a, const HubbardParams& h = {});

/// <psi(a)| H_C |psi(a)> from ideal_state.
double exact_energy(const AnsatzParams& a, const HubbardParams& h = {});

/// Closed form of exact_energy:
///   E = -2t cos(U phi) + U/2 - (U/2) sin(U phi) sin(4 t theta).
/// Much cheaper than the matrix-exponential path; used for landscape scans.
double closed_form_energy(const AnsatzParams& a, const HubbardParams& h = {});

/// Smallest eigenvalue of the full Hamiltonian.
double exact_ground_energy(const HubbardParams& h = {});

/// Expectation of a real symmetric observable in a pure state.
double expectation(const StateVector& psi, const Matrix4& observable);

/// |<a|b>|^2, insensitive to global phase.
double state_fidelity(const StateVector& a, const StateVector& b);

/// exp(i s A) for real symmetric A, via eigendecomposition.
Matrix4c exp_i_hermitian(const Matrix4& a, double s);

namespace pauli {
Matrix4 XI();
Matrix4 IX();
Matrix4 ZZ();
}  // namespace pauli

}  // namespace pvqe
