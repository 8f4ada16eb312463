// SPDX-License-Identifier: Apache-2.0
#include "pvqe/optimizers.hpp"

#include "pvqe/report.hpp"

#include <cmath>
#include <limits>

namespace pvqe {

AngleFrame AngleFrame::circuit(const HubbardParams& h) {
  return {h.U > 0 ? h.U : 1.0, h.t > 0 ? 2.0 * h.t : 1.0};
}

namespace {

void check_frame(const AngleFrame& f) {
  if (!(f.phi_scale > 0 && f.theta_scale > 0 && std::isfinite(f.phi_scale) &&
        std::isfinite(f.theta_scale)))
    throw OptimizerError("angle frame scales must be positive");
}

}  // namespace

void SpsaConfig::validate() const {
  if (!(a > 0 && c > 0 && alpha > 0 && gamma > 0 && A >= 0))
    throw OptimizerError("SPSA gains must be positive");
  if (!(alpha > gamma)) throw OptimizerError("SPSA requires alpha > gamma");
  if (iterations < 1) throw OptimizerError("SPSA iterations must be >= 1");
  check_frame(frame);
}

double SpsaConfig::a_k(int k) const { return a / std::pow(k + A, alpha); }
double SpsaConfig::c_k(int k) const { return c / std::pow(static_cast<double>(k), gamma); }

void MgdConfig::validate() const {
  if (!(delta > 0)) throw OptimizerError("MGD delta must be > 0");
  if (!(xi > 0 && xi < alpha)) throw OptimizerError("MGD requires 0 < xi < alpha");
  if (!(gamma > 0 && l > 0 && A >= 0)) throw OptimizerError("MGD gains must be positive");
  if (iterations < 1) throw OptimizerError("MGD iterations must be >= 1");
  check_frame(frame);
}

double MgdConfig::delta_k(int k) const { return delta / std::pow(static_cast<double>(k), xi); }
double MgdConfig::gamma_k(int k) const { return gamma / std::pow(k + A, alpha); }

OptTrace spsa_run(const SpsaConfig& cfg, const PointEvaluator& evaluate, AnsatzParams start,
                  RngStream& stream, const Diagnostics& diagnostics) {
  cfg.validate();
  const AngleFrame& f = cfg.frame;
  OptTrace trace;
  AnsatzParams x = f.to_frame(start);
  for (int k = 1; k <= cfg.iterations; ++k) {
    TraceRecord rec;
    rec.iteration = k;
    rec.center = f.to_ansatz(x);
    rec.exact = diagnostics ? diagnostics(rec.center) : std::numeric_limits<double>::quiet_NaN();
    rec.at_center = evaluate(rec.center);

    const double ck = cfg.c_k(k);
    const int d0 = stream.rademacher();
    const int d1 = stream.rademacher();
    const AnsatzParams plus = f.to_ansatz({x.phi + ck * d0, x.theta + ck * d1});
    const AnsatzParams minus = f.to_ansatz({x.phi - ck * d0, x.theta - ck * d1});
    const double diff = evaluate(plus).best().value - evaluate(minus).best().value;
    trace.evaluator_calls += 3;

    const double ak = cfg.a_k(k);
    x.phi -= ak * diff / (2.0 * ck * d0);
    x.theta -= ak * diff / (2.0 * ck * d1);
    rec.samples = {plus, minus};
    trace.records.push_back(std::move(rec));
  }
  trace.final_params = f.to_ansatz(x);
  return trace;
}

int n_points_from_eta(double eta, bool* underdetermined) {
  if (!(eta > 0)) throw OptimizerError("eta must be > 0");
  const int n = static_cast<int>(std::lround(eta * 6.0));
  if (underdetermined) *underdetermined = n < 6;
  return n;
}

Eigen::Matrix<double, 6, 1> fit_quadratic_surrogate(const std::vector<Eigen::Vector2d>& offsets,
                                                    const std::vector<double>& values,
                                                    const std::vector<double>& std_errs,
                                                    double l) {
  const std::size_t n = offsets.size();
  if (n == 0 || values.size() != n || std_errs.size() != n)
    throw OptimizerError("surrogate fit: mismatched inputs");

  double mean_var = 0.0;
  for (double s : std_errs) mean_var += s * s;
  mean_var /= static_cast<double>(n);
  const bool noiseless = mean_var == 0.0;

  Eigen::Matrix<double, 6, 6> lhs = Eigen::Matrix<double, 6, 6>::Zero();
  Eigen::Matrix<double, 6, 1> rhs = Eigen::Matrix<double, 6, 1>::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = offsets[i](0), y = offsets[i](1);
    Eigen::Matrix<double, 6, 1> f;
    f << 1.0, x, y, x * x, x * y, y * y;
    double w = 1.0;
    if (!noiseless) {
      // A zero error among noisy points would dominate; floor it.
      const double var = std::max(std_errs[i] * std_errs[i], 1e-12 * mean_var);
      w = mean_var / var;
    }
    lhs += w * f * f.transpose();
    rhs += w * values[i] * f;
  }
  if (!noiseless) lhs.diagonal().array() += mean_var / (l * l);

  Eigen::FullPivLU<Eigen::Matrix<double, 6, 6>> lu(lhs);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) throw OptimizerError("surrogate fit is under-determined");
  return lu.solve(rhs);
}

OptTrace mgd_run(const MgdConfig& cfg, const BatchEvaluator& evaluate, AnsatzParams start,
                 int points, RngStream& stream, const Diagnostics& diagnostics) {
  cfg.validate();
  if (points < 1) throw OptimizerError("MGD needs at least one point per iteration");
  const AngleFrame& f = cfg.frame;
  OptTrace trace;
  AnsatzParams x = f.to_frame(start);
  for (int k = 1; k <= cfg.iterations; ++k) {
    TraceRecord rec;
    rec.iteration = k;
    rec.center = f.to_ansatz(x);
    rec.exact = diagnostics ? diagnostics(rec.center) : std::numeric_limits<double>::quiet_NaN();

    const double dk = cfg.delta_k(k);
    std::vector<Eigen::Vector2d> offsets(static_cast<std::size_t>(points));
    std::vector<AnsatzParams> pts;
    pts.reserve(offsets.size());
    for (auto& o : offsets) {
      o(0) = stream.uniform(-dk, dk);
      o(1) = stream.uniform(-dk, dk);
      pts.push_back(f.to_ansatz({x.phi + o(0), x.theta + o(1)}));
    }
    const std::vector<Evaluation> evals = evaluate(pts);
    ++trace.evaluator_calls;
    if (evals.size() != pts.size()) throw OptimizerError("batch evaluator returned wrong count");
    if (cfg.track_center) {
      rec.at_center = evaluate({rec.center}).at(0);
      ++trace.evaluator_calls;
    }

    std::vector<double> values, errs;
    for (const Evaluation& e : evals) {
      values.push_back(e.best().value);
      errs.push_back(e.best().std_err);
    }
    const auto coef = fit_quadratic_surrogate(offsets, values, errs, cfg.l);
    const double gk = cfg.gamma_k(k);
    x.phi -= gk * coef(1);
    x.theta -= gk * coef(2);
    rec.samples = std::move(pts);
    trace.records.push_back(std::move(rec));
  }
  trace.final_params = f.to_ansatz(x);
  return trace;
}

void write_trace_csv(std::ostream& out, const OptTrace& trace) {
  out << "iteration,phi,theta,e_raw,e_ni,e_exact\n";
  for (const TraceRecord& r : trace.records) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double raw = r.at_center ? r.at_center->raw.value : nan;
    const double ni = r.at_center && r.at_center->ni ? r.at_center->ni->value : nan;
    out << r.iteration << ',' << fmt_double(r.center.phi) << ',' << fmt_double(r.center.theta)
        << ',' << fmt_double(raw) << ',' << fmt_double(ni) << ',' << fmt_double(r.exact) << '\n';
  }
}

}  // namespace pvqe
