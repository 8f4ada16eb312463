// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "pvqe/hubbard.hpp"

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace pvqe {

enum class GateKind { RX, RZ, CZ };

/// One gate of the native set. RX angles are restricted to multiples of pi/2.
struct NativeGate {
  GateKind kind = GateKind::RZ;
  double angle = 0.0;  ///< unused for CZ
  std::array<int, 2> targets{0, -1};  ///< second entry is -1 for 1-qubit gates

  static NativeGate rx(int q, double angle) { return {GateKind::RX, angle, {q, -1}}; }
  static NativeGate rz(int q, double angle) { return {GateKind::RZ, angle, {q, -1}}; }
  static NativeGate cz(int a, int b) { return {GateKind::CZ, 0.0, {a, b}}; }
};

enum class MeasurementSetting { Onsite = 0, Hopping = 1 };

inline constexpr std::array<MeasurementSetting, 2> kAllSettings{MeasurementSetting::Onsite,
                                                               MeasurementSetting::Hopping};

const char* to_string(MeasurementSetting s);

struct NativeCircuit {
  std::vector<NativeGate> gates;
  MeasurementSetting setting = MeasurementSetting::Onsite;
};

class CircuitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Measured bit b on qubit i maps to eigenvalue sign[i] * (1 - 2b).
///
/// Frozen after matching noiseless simulation of the compiled circuits against
/// the exact ansatz state: the onsite circuit reads Z⊗Z with q1 flipped, the
/// hopping circuit reads X⊗I and I⊗X directly.
struct SignMap {
  std::array<int, 2> sign;
};

SignMap sign_map(MeasurementSetting s);

/// Compiled one-layer circuit for a measurement setting.
///
/// Gate angles are scaled from the ansatz angles: the onsite rotation is
/// U*phi and the hopping rotation 2*t*theta, so the circuit prepares the
/// ansatz state of `h` (up to a fixed local frame) for any valid h.
///
/// Gate order: RX(-pi/2) q0; RX(-pi/2), RZ(-pi + U phi), RX(pi/2) q1; CZ;
/// RX(-pi/2) q0; then RX(pi) q1 for Hopping, or RZ(pi + 2t theta), RX(-pi/2)
/// on q0 and RZ(pi - 2t theta), RX(pi/2) on q1 for Onsite.
NativeCircuit build_circuit(const AnsatzParams& a, MeasurementSetting s,
                            const HubbardParams& h = {});

/// Throws CircuitError on an out-of-range target, repeated CZ target or a
/// non-native RX angle.
void validate(const NativeGate& g);

Matrix4c gate_unitary(const NativeGate& g);

/// Product of gate matrices in circuit order.
Matrix4c circuit_unitary(const NativeCircuit& c);

/// One gate per line: "KIND angle targets...". Debug aid only.
std::string dump(const NativeCircuit& c);

}  // namespace pvqe
