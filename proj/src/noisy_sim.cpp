// SPDX-License-Identifier: Apache-2.0
#include "pvqe/noisy_sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pvqe {

double fidelity_to_depolarizing(double f) {
  if (!(f > 0.0 && f <= 1.0)) throw std::invalid_argument("CZ fidelity must lie in (0, 1]");
  return std::clamp(4.0 * (1.0 - f) / 3.0, 0.0, 1.0);
}

PairNoiseSpec PairNoiseSpec::from_fidelity(double cz_fidelity, std::array<ReadoutError, 2> readout,
                                           double crosstalk_p) {
  PairNoiseSpec n;
  n.cz_fidelity = cz_fidelity;
  n.depol_p = fidelity_to_depolarizing(cz_fidelity);
  n.readout = readout;
  n.crosstalk_p = crosstalk_p;
  n.validate();
  return n;
}

void PairNoiseSpec::validate() const {
  if (!(cz_fidelity > 0.0 && cz_fidelity <= 1.0))
    throw std::invalid_argument("cz_fidelity out of (0, 1]");
  if (!(depol_p >= 0.0 && depol_p <= 1.0)) throw std::invalid_argument("depol_p out of [0, 1]");
  if (!(crosstalk_p >= 0.0 && crosstalk_p <= 1.0))
    throw std::invalid_argument("crosstalk_p out of [0, 1]");
  for (const ReadoutError& r : readout) {
    if (!(r.p01 >= 0.0 && r.p01 < 0.5) || !(r.p10 >= 0.0 && r.p10 < 0.5))
      throw std::invalid_argument("readout error rates must lie in [0, 0.5)");
  }
}

DensityMatrix DensityMatrix::basis(int index) {
  Matrix4c rho = Matrix4c::Zero();
  rho(index, index) = 1.0;
  return DensityMatrix(rho);
}

void DensityMatrix::depolarize(double p) {
  if (p == 0.0) return;
  const Complex tr = rho_.trace();
  rho_ = (1.0 - p) * rho_ + p * tr / 4.0 * Matrix4c::Identity();
}

bool DensityMatrix::is_valid(double tol) const {
  if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
  if (std::abs(rho_.trace() - Complex(1.0, 0.0)) > tol) return false;
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(rho_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

Distribution DensityMatrix::diagonal() const {
  return {rho_(0, 0).real(), rho_(1, 1).real(), rho_(2, 2).real(), rho_(3, 3).real()};
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  const Matrix4c diff = a.matrix() - b.matrix();
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(diff, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

Distribution ShotHistogram::normalized() const {
  Distribution d{};
  if (shots == 0) return d;
  for (int i = 0; i < 4; ++i) d[i] = static_cast<double>(counts[i]) / static_cast<double>(shots);
  return d;
}

DensityMatrix run_circuit(const NativeCircuit& c, const PairNoiseSpec& n, bool crosstalk_active) {
  DensityMatrix rho;
  for (const NativeGate& g : c.gates) {
    rho.apply_unitary(gate_unitary(g));
    if (g.kind == GateKind::CZ) {
      rho.depolarize(n.depol_p);
      if (crosstalk_active) rho.depolarize(n.crosstalk_p);
    }
  }
  return rho;
}

Matrix4 readout_matrix(const std::array<ReadoutError, 2>& readout) {
  auto single = [](const ReadoutError& r) {
    Eigen::Matrix2d m;
    m << 1.0 - r.p01, r.p10, r.p01, 1.0 - r.p10;
    return m;
  };
  const Eigen::Matrix2d a = single(readout[0]);
  const Eigen::Matrix2d b = single(readout[1]);
  Matrix4 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

Distribution exact_distribution(const DensityMatrix& rho, const PairNoiseSpec& n) {
  const Distribution pop = rho.diagonal();
  const Eigen::Vector4d measured =
      readout_matrix(n.readout) * Eigen::Vector4d(pop[0], pop[1], pop[2], pop[3]);
  Distribution d{};
  double total = 0.0;
  for (int i = 0; i < 4; ++i) {
    d[i] = std::max(0.0, measured(i));
    total += d[i];
  }
  for (double& x : d) x /= total;
  return d;
}

ShotHistogram sample_shots(const Distribution& d, std::uint64_t shots, RngStream& stream) {
  if (shots == 0) throw std::invalid_argument("sample_shots: shots must be >= 1");
  std::array<double, 3> cumulative{d[0], d[0] + d[1], d[0] + d[1] + d[2]};
  ShotHistogram h;
  h.shots = shots;
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double u = stream.uniform();
    int k = 3;
    if (u < cumulative[0]) k = 0;
    else if (u < cumulative[1]) k = 1;
    else if (u < cumulative[2]) k = 2;
    ++h.counts[k];
  }
  return h;
}

ShotHistogram sample_shots(const DensityMatrix& rho, const PairNoiseSpec& n, std::uint64_t shots,
                           RngStream& stream) {
  return sample_shots(exact_distribution(rho, n), shots, stream);
}

double tv_distance(const Distribution& a, const Distribution& b) {
  double s = 0.0;
  for (int i = 0; i < 4; ++i) s += std::abs(a[i] - b[i]);
  return 0.5 * s;
}

}  // namespace pvqe
