// SPDX-License-Identifier: Apache-2.0
#include "pvqe/cost_model.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

namespace pvqe {

double predict_wall_time(const CostModel& m, int p, std::uint64_t batches, std::uint64_t shots,
                         int settings) {
  if (p < 1 || batches < 1 || shots < 1 || settings < 1)
    throw CostModelError("predict_wall_time: p, batches, shots and settings must be >= 1");
  const double per_batch = m.t_base + m.beta * p + settings * static_cast<double>(shots) * m.tau;
  return static_cast<double>(batches) * per_batch;
}

CostFit calibrate_cost_model(const std::vector<TimingObservation>& obs) {
  if (obs.size() < 3) throw CostModelError("calibrate_cost_model: need at least 3 observations");
  std::set<int> distinct_p;
  for (const auto& o : obs) {
    if (o.p < 1 || o.batches < 1 || o.shots < 1 || o.settings < 1 || !(o.seconds >= 0.0))
      throw CostModelError("calibrate_cost_model: invalid observation");
    distinct_p.insert(o.p);
  }
  if (distinct_p.size() < 2)
    throw CostModelError("calibrate_cost_model: rank deficient (observations need 2 distinct p)");

  const auto n = static_cast<Eigen::Index>(obs.size());
  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& o = obs[static_cast<std::size_t>(i)];
    const double b = static_cast<double>(o.batches);
    a(i, 0) = b;
    a(i, 1) = b * o.p;
    a(i, 2) = b * o.settings * static_cast<double>(o.shots);
    y(i) = o.seconds;
  }
  const Eigen::Vector3d scale = a.colwise().norm().transpose();
  const Eigen::MatrixXd as = a * scale.cwiseInverse().asDiagonal();
  if (Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(as).rank() < 3)
    throw CostModelError("calibrate_cost_model: rank deficient design");

  Eigen::Vector3d best = Eigen::Vector3d::Zero();
  double best_sse = y.squaredNorm();
  for (int mask = 1; mask < 8; ++mask) {
    std::vector<Eigen::Index> cols;
    for (int j = 0; j < 3; ++j)
      if (mask & (1 << j)) cols.push_back(j);
    Eigen::MatrixXd sub(n, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k)
      sub.col(static_cast<Eigen::Index>(k)) = as.col(cols[k]);
    const Eigen::VectorXd x = sub.colPivHouseholderQr().solve(y);
    if ((x.array() < 0.0).any()) continue;
    const double sse = (sub * x - y).squaredNorm();
    if (sse < best_sse - 1e-12 * (1.0 + best_sse)) {
      best_sse = sse;
      best.setZero();
      for (std::size_t k = 0; k < cols.size(); ++k) best(cols[k]) = x(static_cast<Eigen::Index>(k));
    }
  }
  const Eigen::Vector3d coef = best.cwiseQuotient(scale);

  CostFit fit;
  fit.model = {coef(0), coef(1), coef(2)};
  const Eigen::VectorXd r = a * coef - y;
  fit.residuals.assign(r.data(), r.data() + r.size());
  fit.rms = std::sqrt(r.squaredNorm() / static_cast<double>(n));
  return fit;
}

std::vector<TimingObservation> reference_observations() {
  return {
      {25, 16, 10000, 2, 220.0},
      {1, 400, 10000, 2, 3960.0},
      {1, 60, 1000, 2, 245.0},
      {25, 60, 1000, 2, 420.0},
  };
}

std::string cost_model_to_json(const CostModel& m) {
  nlohmann::ordered_json doc;
  doc["t_base"] = m.t_base;
  doc["beta"] = m.beta;
  doc["tau"] = m.tau;
  return doc.dump(2) + "\n";
}

CostModel cost_model_from_json(const std::string& text) {
  CostModel m;
  try {
    const auto doc = nlohmann::json::parse(text);
    m.t_base = doc.at("t_base").get<double>();
    m.beta = doc.at("beta").get<double>();
    m.tau = doc.at("tau").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw CostModelError(std::string("cost model JSON: ") + e.what());
  }
  if (!(m.t_base >= 0.0 && m.beta >= 0.0 && m.tau >= 0.0))
    throw CostModelError("cost model parameters must be >= 0");
  return m;
}

CostModel load_cost_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CostModelError("cannot open cost model " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return cost_model_from_json(ss.str());
}

double heatmap_speedup(const CostModel& m, int points, int p, std::uint64_t shots) {
  if (points < 1 || p < 1) throw CostModelError("heatmap_speedup: points and p must be >= 1");
  const auto batches = static_cast<std::uint64_t>((points + p - 1) / p);
  return predict_wall_time(m, 1, static_cast<std::uint64_t>(points), shots) /
         predict_wall_time(m, p, batches, shots);
}

double spsa_speedup(const CostModel& m, int p, int iterations, std::uint64_t shots) {
  if (iterations < 1) throw CostModelError("spsa_speedup: iterations must be >= 1");
  const auto batches = static_cast<std::uint64_t>(3 * iterations);
  return predict_wall_time(m, 1, batches, shots) / predict_wall_time(m, p, batches, shots);
}

double mgd_speedup(const CostModel& m, int p, int iterations, std::uint64_t shots) {
  if (iterations < 1) throw CostModelError("mgd_speedup: iterations must be >= 1");
  const auto k = static_cast<std::uint64_t>(iterations);
  const double serial = predict_wall_time(m, 1, k * static_cast<std::uint64_t>(p + 1), shots);
  const double parallel = predict_wall_time(m, p, k, shots) + predict_wall_time(m, 1, k, shots);
  return serial / parallel;
}

}  // namespace pvqe
