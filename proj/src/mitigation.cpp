// SPDX-License-Identifier: Apache-2.0
#include "pvqe/mitigation.hpp"

#include <cmath>

#include <json.hpp>

namespace pvqe {

void ConfusionMatrix::validate() const {
  for (int j = 0; j < 4; ++j) {
    double col = 0.0;
    for (int i = 0; i < 4; ++i) {
      const double x = matrix(i, j);
      if (!(x >= 0.0 && x <= 1.0)) throw MitigationError("confusion entry outside [0, 1]");
      col += x;
    }
    if (std::abs(col - 1.0) > 1e-9) throw MitigationError("confusion column does not sum to 1");
  }
  const double cond = condition_number();
  if (!(cond <= kMaxCondition))
    throw MitigationError("confusion matrix is singular or ill-conditioned (cond = " +
                          std::to_string(cond) + ")");
}

double ConfusionMatrix::condition_number() const {
  Eigen::JacobiSVD<Matrix4> svd(matrix);
  const auto& s = svd.singularValues();
  if (s(3) <= 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / s(3);
}

ConfusionMatrix exact_confusion(const PairNoiseSpec& n) {
  return {readout_matrix(n.readout), 0};
}

ConfusionMatrix measure_confusion(const PairNoiseSpec& n, std::uint64_t shots, RngStream& stream) {
  ConfusionMatrix out;
  out.shots_used = shots;
  for (int j = 0; j < 4; ++j) {
    const ShotHistogram h = sample_shots(DensityMatrix::basis(j), n, shots, stream);
    const Distribution col = h.normalized();
    for (int i = 0; i < 4; ++i) out.matrix(i, j) = col[i];
  }
  return out;
}

Distribution invert_readout(const Distribution& measured, const ConfusionMatrix& n) {
  n.validate();
  const Eigen::Vector4d d(measured[0], measured[1], measured[2], measured[3]);
  const Eigen::Vector4d q = n.matrix.partialPivLu().solve(d);
  return {q(0), q(1), q(2), q(3)};
}

Distribution invert_readout(const ShotHistogram& hist, const ConfusionMatrix& n) {
  return invert_readout(hist.normalized(), n);
}

std::string confusion_to_json(const ConfusionMatrix& n) {
  nlohmann::json doc;
  doc["shots_used"] = n.shots_used;
  doc["matrix"] = nlohmann::json::array();
  for (int i = 0; i < 4; ++i)
    doc["matrix"].push_back({n.matrix(i, 0), n.matrix(i, 1), n.matrix(i, 2), n.matrix(i, 3)});
  return doc.dump();
}

ConfusionMatrix confusion_from_json(const std::string& text) {
  ConfusionMatrix out;
  try {
    const auto doc = nlohmann::json::parse(text);
    const auto& rows = doc.at("matrix");
    if (!rows.is_array() || rows.size() != 4) throw MitigationError("matrix must be 4x4");
    for (int i = 0; i < 4; ++i) {
      if (!rows[i].is_array() || rows[i].size() != 4) throw MitigationError("matrix must be 4x4");
      for (int j = 0; j < 4; ++j) out.matrix(i, j) = rows[i][j].get<double>();
    }
    out.shots_used = doc.value("shots_used", std::uint64_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw MitigationError(std::string("confusion JSON: ") + e.what());
  }
  out.validate();
  return out;
}

}  // namespace pvqe
