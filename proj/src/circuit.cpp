// SPDX-License-Identifier: Apache-2.0
#include "pvqe/circuit.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace pvqe {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::Matrix2cd rx_matrix(double angle) {
  const double c = std::cos(angle / 2), s = std::sin(angle / 2);
  Eigen::Matrix2cd m;
  m << c, Complex(0, -s), Complex(0, -s), c;
  return m;
}

Eigen::Matrix2cd rz_matrix(double angle) {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  m(0, 0) = std::exp(Complex(0, -angle / 2));
  m(1, 1) = std::exp(Complex(0, angle / 2));
  return m;
}

Matrix4c on_qubit(int q, const Eigen::Matrix2cd& g) {
  Matrix4c out = Matrix4c::Zero();
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  const Eigen::Matrix2cd& a = q == 0 ? g : id;
  const Eigen::Matrix2cd& b = q == 0 ? id : g;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

bool is_half_pi_multiple(double angle) {
  const double k = angle / (kPi / 2);
  return std::abs(k - std::round(k)) < 1e-9;
}

}  // namespace

const char* to_string(MeasurementSetting s) {
  return s == MeasurementSetting::Onsite ? "onsite" : "hopping";
}

SignMap sign_map(MeasurementSetting s) {
  if (s == MeasurementSetting::Onsite) return {{+1, -1}};
  return {{+1, +1}};
}

NativeCircuit build_circuit(const AnsatzParams& a, MeasurementSetting s, const HubbardParams& h) {
  const double onsite = h.U * a.phi;
  const double hop = 2.0 * h.t * a.theta;
  NativeCircuit c;
  c.setting = s;
  c.gates = {
      NativeGate::rx(0, -kPi / 2),       NativeGate::rx(1, -kPi / 2),
      NativeGate::rz(1, -kPi + onsite),  NativeGate::rx(1, kPi / 2),
      NativeGate::cz(0, 1),              NativeGate::rx(0, -kPi / 2),
  };
  if (s == MeasurementSetting::Hopping) {
    c.gates.push_back(NativeGate::rx(1, kPi));
  } else {
    c.gates.push_back(NativeGate::rz(0, kPi + hop));
    c.gates.push_back(NativeGate::rx(0, -kPi / 2));
    c.gates.push_back(NativeGate::rz(1, kPi - hop));
    c.gates.push_back(NativeGate::rx(1, kPi / 2));
  }
  return c;
}

void validate(const NativeGate& g) {
  auto in_range = [](int q) { return q == 0 || q == 1; };
  if (g.kind == GateKind::CZ) {
    if (!in_range(g.targets[0]) || !in_range(g.targets[1]) || g.targets[0] == g.targets[1])
      throw CircuitError("CZ needs two distinct targets in {0,1}");
    return;
  }
  if (!in_range(g.targets[0]) || g.targets[1] != -1)
    throw CircuitError("single-qubit gate needs exactly one target in {0,1}");
  if (!std::isfinite(g.angle)) throw CircuitError("non-finite gate angle");
  if (g.kind == GateKind::RX && !is_half_pi_multiple(g.angle))
    throw CircuitError("RX angle must be a multiple of pi/2");
}

Matrix4c gate_unitary(const NativeGate& g) {
  validate(g);
  switch (g.kind) {
    case GateKind::RX:
      return on_qubit(g.targets[0], rx_matrix(g.angle));
    case GateKind::RZ:
      return on_qubit(g.targets[0], rz_matrix(g.angle));
    case GateKind::CZ:
      break;
  }
  Matrix4c cz = Matrix4c::Identity();
  cz(3, 3) = -1.0;
  return cz;
}

Matrix4c circuit_unitary(const NativeCircuit& c) {
  Matrix4c u = Matrix4c::Identity();
  for (const NativeGate& g : c.gates) u = gate_unitary(g) * u;
  return u;
}

std::string dump(const NativeCircuit& c) {
  std::ostringstream out;
  out.precision(17);
  for (const NativeGate& g : c.gates) {
    switch (g.kind) {
      case GateKind::RX: out << "RX " << g.angle << ' ' << g.targets[0]; break;
      case GateKind::RZ: out << "RZ " << g.angle << ' ' << g.targets[0]; break;
      case GateKind::CZ: out << "CZ " << g.targets[0] << ' ' << g.targets[1]; break;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace pvqe
