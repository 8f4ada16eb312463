// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "pvqe/noisy_sim.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pvqe {

/// Unordered qubit pair, stored with a < b.
struct QubitPair {
  int a = 0;
  int b = 0;

  static QubitPair of(int x, int y) { return x < y ? QubitPair{x, y} : QubitPair{y, x}; }
  bool touches(int q) const { return a == q || b == q; }
  auto operator<=>(const QubitPair&) const = default;
};

struct Coupler {
  QubitPair pair;
  double cz_fidelity = 1.0;
};

class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Chip graph: qubits, CZ-capable couplers with fidelities, readout errors.
/// Immutable once built; construction validates every invariant.
class DeviceTopology {
 public:
  DeviceTopology() = default;
  /// Throws CalibrationError on duplicate qubits or couplers, self loops,
  /// unknown qubit ids, fidelities outside (0, 1] or readout rates outside [0, 0.5).
  DeviceTopology(std::vector<int> qubits, std::vector<Coupler> couplers,
                 std::map<int, ReadoutError> readout, std::string name = {},
                 std::string comment = {});

  const std::vector<int>& qubits() const { return qubits_; }
  const std::vector<Coupler>& couplers() const { return couplers_; }
  const std::map<int, ReadoutError>& readout() const { return readout_; }
  const std::string& name() const { return name_; }
  const std::string& comment() const { return comment_; }

  bool has_qubit(int q) const;
  /// Coupler for the pair, if the chip has one.
  std::optional<Coupler> coupler(QubitPair p) const;
  bool adjacent(int x, int y) const { return coupler(QubitPair::of(x, y)).has_value(); }
  /// Readout error of a qubit; zero when the calibration omits it.
  ReadoutError readout_of(int q) const;

 private:
  std::vector<int> qubits_;
  std::vector<Coupler> couplers_;
  std::map<int, ReadoutError> readout_;
  std::map<QubitPair, std::size_t> index_;
  std::string name_;
  std::string comment_;
};

/// Parses the JSON calibration schema:
///   {"name": str?, "comment": str?, "qubits": [int...],
///    "edges": [[a, b, fidelity]...], "readout": {"id": [eps01, eps10]...}}
DeviceTopology parse_calibration(const std::string& json_text);
DeviceTopology load_calibration(const std::filesystem::path& path);
std::string calibration_to_json(const DeviceTopology& t);

enum class SelectionMethod { Greedy, MaxWeightMatching };

struct PairSelection {
  std::vector<QubitPair> pairs;
  SelectionMethod method = SelectionMethod::Greedy;
  std::optional<double> fidelity_cap;
};

/// Repeatedly takes the best remaining coupler and removes both its qubits.
/// Ties go to the lexicographically smallest pair. Couplers below
/// `fidelity_cap` are never taken.
PairSelection greedy_select(const DeviceTopology& t, std::optional<int> max_pairs = {},
                            std::optional<double> fidelity_cap = {});

/// Exact maximum-total-fidelity matching. Fidelities are weighted in units
/// of 1e-6, which is finer than any calibration file resolution. The result
/// is listed by non-increasing fidelity.
PairSelection max_weight_matching(const DeviceTopology& t);

double total_fidelity(const DeviceTopology& t, const PairSelection& s);

/// Throws CalibrationError when the pair is not a coupler of t.
PairNoiseSpec noise_spec_for_pair(const DeviceTopology& t, QubitPair pair,
                                  double crosstalk_p = 0.0);

/// True when some qubit of x is coupled to some qubit of y.
bool pairs_neighbor(const DeviceTopology& t, QubitPair x, QubitPair y);

}  // namespace pvqe
