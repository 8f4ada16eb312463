// SPDX-License-Identifier: Apache-2.0
#include "pvqe/hubbard.hpp"

#include <cmath>
#include <stdexcept>

namespace pvqe {

namespace {

Eigen::Matrix2d sigma_x() {
  Eigen::Matrix2d m;
  m << 0, 1, 1, 0;
  return m;
}

Eigen::Matrix2d sigma_z() {
  Eigen::Matrix2d m;
  m << 1, 0, 0, -1;
  return m;
}

// Kronecker product with the first factor acting on q0 (most significant bit).
Matrix4 kron(const Eigen::Matrix2d& a, const Eigen::Matrix2d& b) {
  Matrix4 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

}  // namespace

void HubbardParams::validate() const {
  if (!std::isfinite(t) || !std::isfinite(U))
    throw std::invalid_argument("HubbardParams: non-finite value");
  if (t <= 0.0) throw std::invalid_argument("HubbardParams: t must be > 0");
  if (U < 0.0) throw std::invalid_argument("HubbardParams: U must be >= 0");
}

namespace pauli {
Matrix4 XI() { return kron(sigma_x(), Eigen::Matrix2d::Identity()); }
Matrix4 IX() { return kron(Eigen::Matrix2d::Identity(), sigma_x()); }
Matrix4 ZZ() { return kron(sigma_z(), sigma_z()); }
}  // namespace pauli

Hamiltonian2 hamiltonian(const HubbardParams& h) {
  Hamiltonian2 out;
  out.hop_part = -h.t * (pauli::XI() + pauli::IX());
  out.os_part = 0.5 * h.U * (Matrix4::Identity() + pauli::ZZ());
  out.matrix = out.hop_part + out.os_part;
  return out;
}

StateVector initial_state() { return StateVector::Constant(Complex(0.5, 0.0)); }

Matrix4c exp_i_hermitian(const Matrix4& a, double s) {
  Eigen::SelfAdjointEigenSolver<Matrix4> es(a);
  const Matrix4c v = es.eigenvectors().cast<Complex>();
  Vector4c phases;
  for (int k = 0; k < 4; ++k)
    phases(k) = std::exp(Complex(0.0, s * es.eigenvalues()(k)));
  return v * phases.asDiagonal() * v.adjoint();
}

StateVector ideal_state(const AnsatzParams& a, const HubbardParams& h) {
  const Hamiltonian2 ham = hamiltonian(h);
  StateVector psi = exp_i_hermitian(ham.os_part, a.phi) * initial_state();
  psi = exp_i_hermitian(ham.hop_part, a.theta) * psi;
  return psi;
}

double expectation(const StateVector& psi, const Matrix4& observable) {
  return (psi.adjoint() * observable.cast<Complex>() * psi)(0, 0).real();
}

double state_fidelity(const StateVector& a, const StateVector& b) {
  return std::norm(a.dot(b));
}

double exact_energy(const AnsatzParams& a, const HubbardParams& h) {
  return expectation(ideal_state(a, h), hamiltonian(h).matrix);
}

double closed_form_energy(const AnsatzParams& a, const HubbardParams& h) {
  const double onsite = h.U * a.phi;
  return -2.0 * h.t * std::cos(onsite) + 0.5 * h.U -
         0.5 * h.U * std::sin(onsite) * std::sin(4.0 * h.t * a.theta);
}

double exact_ground_energy(const HubbardParams& h) {
  Eigen::SelfAdjointEigenSolver<Matrix4> es(hamiltonian(h).matrix, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace pvqe
