// SPDX-License-Identifier: Apache-2.0
#include "pvqe/device.hpp"

#include "pvqe/matching.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace pvqe {

using nlohmann::json;

DeviceTopology::DeviceTopology(std::vector<int> qubits, std::vector<Coupler> couplers,
                               std::map<int, ReadoutError> readout, std::string name,
                               std::string comment)
    : qubits_(std::move(qubits)),
      couplers_(std::move(couplers)),
      readout_(std::move(readout)),
      name_(std::move(name)),
      comment_(std::move(comment)) {
  std::set<int> ids;
  for (int q : qubits_)
    if (!ids.insert(q).second) throw CalibrationError("duplicate qubit id " + std::to_string(q));

  for (std::size_t i = 0; i < couplers_.size(); ++i) {
    Coupler& c = couplers_[i];
    c.pair = QubitPair::of(c.pair.a, c.pair.b);
    const std::string label = "coupler [" + std::to_string(c.pair.a) + ", " +
                              std::to_string(c.pair.b) + "]";
    if (c.pair.a == c.pair.b) throw CalibrationError(label + " is a self loop");
    if (!ids.count(c.pair.a) || !ids.count(c.pair.b))
      throw CalibrationError(label + " references an unknown qubit");
    if (!(c.cz_fidelity > 0.0 && c.cz_fidelity <= 1.0))
      throw CalibrationError(label + " fidelity out of range (0, 1]");
    if (!index_.emplace(c.pair, i).second) throw CalibrationError("duplicate " + label);
  }

  for (const auto& [q, r] : readout_) {
    if (!ids.count(q)) throw CalibrationError("readout for unknown qubit " + std::to_string(q));
    if (!(r.p01 >= 0.0 && r.p01 < 0.5) || !(r.p10 >= 0.0 && r.p10 < 0.5))
      throw CalibrationError("readout rates of qubit " + std::to_string(q) +
                             " out of range [0, 0.5)");
  }
}

bool DeviceTopology::has_qubit(int q) const {
  return std::find(qubits_.begin(), qubits_.end(), q) != qubits_.end();
}

std::optional<Coupler> DeviceTopology::coupler(QubitPair p) const {
  auto it = index_.find(QubitPair::of(p.a, p.b));
  if (it == index_.end()) return std::nullopt;
  return couplers_[it->second];
}

ReadoutError DeviceTopology::readout_of(int q) const {
  auto it = readout_.find(q);
  return it == readout_.end() ? ReadoutError{} : it->second;
}

DeviceTopology parse_calibration(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw CalibrationError(std::string("calibration parse error: ") + e.what());
  }
  try {
    if (!doc.is_object()) throw CalibrationError("calibration must be a JSON object");
    std::vector<int> qubits = doc.at("qubits").get<std::vector<int>>();
    std::vector<Coupler> couplers;
    for (const json& e : doc.at("edges")) {
      if (!e.is_array() || e.size() != 3)
        throw CalibrationError("each edge must be [a, b, fidelity]");
      couplers.push_back({QubitPair{e[0].get<int>(), e[1].get<int>()}, e[2].get<double>()});
    }
    std::map<int, ReadoutError> readout;
    if (doc.contains("readout")) {
      for (const auto& [key, value] : doc.at("readout").items()) {
        int q = 0;
        std::size_t used = 0;
        try {
          q = std::stoi(key, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != key.size()) throw CalibrationError("readout key '" + key + "' is not an id");
        if (!value.is_array() || value.size() != 2)
          throw CalibrationError("readout entries must be [eps01, eps10]");
        readout[q] = {value[0].get<double>(), value[1].get<double>()};
      }
    }
    return DeviceTopology(std::move(qubits), std::move(couplers), std::move(readout),
                          doc.value("name", std::string{}), doc.value("comment", std::string{}));
  } catch (const json::exception& e) {
    throw CalibrationError(std::string("calibration schema error: ") + e.what());
  }
}

DeviceTopology load_calibration(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CalibrationError("cannot open calibration file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_calibration(buf.str());
}

std::string calibration_to_json(const DeviceTopology& t) {
  json doc;
  doc["name"] = t.name();
  doc["comment"] = t.comment();
  doc["qubits"] = t.qubits();
  doc["edges"] = json::array();
  for (const Coupler& c : t.couplers())
    doc["edges"].push_back(json::array({c.pair.a, c.pair.b, c.cz_fidelity}));
  doc["readout"] = json::object();
  for (const auto& [q, r] : t.readout()) doc["readout"][std::to_string(q)] = {r.p01, r.p10};
  return doc.dump(1);
}

namespace {

// Best first; ties broken by smallest (a, b).
bool better(const Coupler& x, const Coupler& y) {
  if (x.cz_fidelity != y.cz_fidelity) return x.cz_fidelity > y.cz_fidelity;
  return x.pair < y.pair;
}

}  // namespace

PairSelection greedy_select(const DeviceTopology& t, std::optional<int> max_pairs,
                            std::optional<double> fidelity_cap) {
  std::vector<Coupler> order = t.couplers();
  std::sort(order.begin(), order.end(), better);
  PairSelection sel;
  sel.method = SelectionMethod::Greedy;
  sel.fidelity_cap = fidelity_cap;
  std::set<int> used;
  for (const Coupler& c : order) {
    if (max_pairs && static_cast<int>(sel.pairs.size()) >= *max_pairs) break;
    if (fidelity_cap && c.cz_fidelity < *fidelity_cap) break;
    if (used.count(c.pair.a) || used.count(c.pair.b)) continue;
    used.insert(c.pair.a);
    used.insert(c.pair.b);
    sel.pairs.push_back(c.pair);
  }
  return sel;
}

PairSelection max_weight_matching(const DeviceTopology& t) {
  std::map<int, int> index;
  for (int q : t.qubits()) index.emplace(q, static_cast<int>(index.size()));
  std::vector<matching::WeightedEdge> edges;
  edges.reserve(t.couplers().size());
  for (const Coupler& c : t.couplers())
    edges.push_back({index.at(c.pair.a), index.at(c.pair.b), std::llround(c.cz_fidelity * 1e6)});
  const std::vector<int> mate = matching::max_weight_matching(static_cast<int>(index.size()), edges);

  std::vector<Coupler> chosen;
  for (const Coupler& c : t.couplers())
    if (mate[index.at(c.pair.a)] == index.at(c.pair.b)) chosen.push_back(c);
  std::sort(chosen.begin(), chosen.end(), better);

  PairSelection sel;
  sel.method = SelectionMethod::MaxWeightMatching;
  for (const Coupler& c : chosen) sel.pairs.push_back(c.pair);
  return sel;
}

double total_fidelity(const DeviceTopology& t, const PairSelection& s) {
  double total = 0.0;
  for (const QubitPair& p : s.pairs) total += t.coupler(p).value().cz_fidelity;
  return total;
}

PairNoiseSpec noise_spec_for_pair(const DeviceTopology& t, QubitPair pair, double crosstalk_p) {
  const auto c = t.coupler(pair);
  if (!c)
    throw CalibrationError("pair [" + std::to_string(pair.a) + ", " + std::to_string(pair.b) +
                           "] is not a coupler");
  return PairNoiseSpec::from_fidelity(c->cz_fidelity,
                                      {t.readout_of(c->pair.a), t.readout_of(c->pair.b)},
                                      crosstalk_p);
}

bool pairs_neighbor(const DeviceTopology& t, QubitPair x, QubitPair y) {
  for (int p : {x.a, x.b})
    for (int q : {y.a, y.b})
      if (p != q && t.adjacent(p, q)) return true;
  return false;
}

}  // namespace pvqe
