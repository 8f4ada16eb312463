// SPDX-License-Identifier: Apache-2.0
#include "pvqe/optimizers.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace pvqe;

namespace {

Evaluation value(double v, double se = 0.0) { return {{v, se, 1000}, std::nullopt}; }

PointEvaluator point_fn(double (*f)(const AnsatzParams&)) {
  return [f](const AnsatzParams& a) { return value(f(a)); };
}

BatchEvaluator batch_fn(double (*f)(const AnsatzParams&)) {
  return [f](const std::vector<AnsatzParams>& pts) {
    std::vector<Evaluation> out;
    for (const auto& p : pts) out.push_back(value(f(p)));
    return out;
  };
}

double bowl(const AnsatzParams& a) {
  return (a.phi - 0.3) * (a.phi - 0.3) + 2.0 * (a.theta + 0.2) * (a.theta + 0.2);
}

double energy(const AnsatzParams& a) { return exact_energy(a); }

}  // namespace

TEST_CASE("SPSA gain sequences") {
  const SpsaConfig c;
  CHECK(c.a_k(1) == doctest::Approx(0.15 / std::pow(2.0, 0.602)).epsilon(1e-14));
  CHECK(c.a_k(1) == doctest::Approx(0.09882).epsilon(1e-4));
  CHECK(c.c_k(1) == doctest::Approx(0.2));
  for (int k = 1; k < 100; ++k) {
    CHECK(c.a_k(k + 1) < c.a_k(k));
    CHECK(c.c_k(k + 1) < c.c_k(k));
  }
  SpsaConfig bad;
  bad.gamma = 0.7;
  CHECK_THROWS_AS(bad.validate(), OptimizerError);
  bad = {};
  bad.iterations = 0;
  CHECK_THROWS_AS(bad.validate(), OptimizerError);
}

TEST_CASE("MGD gain sequences") {
  const MgdConfig c;
  CHECK(c.delta_k(1) == doctest::Approx(0.6));
  CHECK(c.gamma_k(1) == doctest::Approx(0.6 / std::pow(2.0, 0.602)));
  CHECK(c.delta_k(50) < c.delta_k(2));
  MgdConfig bad;
  bad.xi = 0.7;
  CHECK_THROWS_AS(bad.validate(), OptimizerError);
  bad = {};
  bad.frame.phi_scale = 0.0;
  CHECK_THROWS_AS(bad.validate(), OptimizerError);
}

TEST_CASE("eta maps to the number of sample points") {
  bool under = true;
  CHECK(n_points_from_eta(2.0, &under) == 12);
  CHECK_FALSE(under);
  CHECK(n_points_from_eta(1.5, &under) == 9);
  CHECK(n_points_from_eta(1.0, &under) == 6);
  CHECK_FALSE(under);
  CHECK(n_points_from_eta(0.5, &under) == 3);
  CHECK(under);
  CHECK_THROWS_AS(n_points_from_eta(0.0), OptimizerError);
}

TEST_CASE("angle frame round trip") {
  const AngleFrame f = AngleFrame::circuit({1.0, 2.0});
  CHECK(f.phi_scale == 2.0);
  CHECK(f.theta_scale == 2.0);
  const AnsatzParams a{0.37, -1.2};
  const AnsatzParams b = f.to_ansatz(f.to_frame(a));
  CHECK(b.phi == doctest::Approx(a.phi));
  CHECK(b.theta == doctest::Approx(a.theta));
  CHECK(AngleFrame::circuit({1.0, 0.0}).phi_scale == 1.0);
}

TEST_CASE("constant objective leaves both optimizers in place") {
  RngStream s1(1), s2(2);
  const auto flat = [](const AnsatzParams&) { return 1.5; };
  SpsaConfig sc;
  sc.iterations = 20;
  const OptTrace t1 = spsa_run(
      sc, [&](const AnsatzParams& a) { return value(flat(a)); }, {0.4, 0.5}, s1);
  CHECK(t1.final_params.phi == 0.4);
  CHECK(t1.final_params.theta == 0.5);

  MgdConfig mc;
  mc.iterations = 10;
  const OptTrace t2 = mgd_run(
      mc,
      [&](const std::vector<AnsatzParams>& pts) {
        return std::vector<Evaluation>(pts.size(), value(1.5));
      },
      {0.4, 0.5}, 12, s2);
  CHECK(std::abs(t2.final_params.phi - 0.4) < 1e-10);
  CHECK(std::abs(t2.final_params.theta - 0.5) < 1e-10);
}

TEST_CASE("adding a constant to the objective does not change the path") {
  SpsaConfig sc;
  sc.iterations = 30;
  RngStream a(5), b(5);
  const OptTrace t1 = spsa_run(sc, point_fn(bowl), {1.0, 1.0}, a);
  const OptTrace t2 = spsa_run(
      sc, [](const AnsatzParams& p) { return value(bowl(p) + 7.25); }, {1.0, 1.0}, b);
  CHECK(t1.final_params.phi == doctest::Approx(t2.final_params.phi).epsilon(1e-12));
  CHECK(t1.final_params.theta == doctest::Approx(t2.final_params.theta).epsilon(1e-12));
}

TEST_CASE("both optimizers find the minimum of a bowl") {
  RngStream a(3), b(4);
  SpsaConfig sc;
  sc.iterations = 300;
  sc.a = 0.5;
  const OptTrace t1 = spsa_run(sc, point_fn(bowl), {1.0, 0.6}, a);
  CHECK(bowl(t1.final_params) < 1e-3);

  MgdConfig mc;
  mc.iterations = 100;
  const OptTrace t2 = mgd_run(mc, batch_fn(bowl), {1.0, 0.6}, 12, b);
  CHECK(bowl(t2.final_params) < 1e-4);
}

TEST_CASE("quadratic surrogate recovers an exact quadratic") {
  RngStream s(21);
  const Eigen::Matrix<double, 6, 1> truth = (Eigen::Matrix<double, 6, 1>() << 0.5, -1.2, 0.8,
                                             2.0, -0.4, 1.1)
                                                .finished();
  std::vector<Eigen::Vector2d> offs;
  std::vector<double> vals, errs;
  for (int i = 0; i < 12; ++i) {
    const Eigen::Vector2d o(s.uniform(-0.5, 0.5), s.uniform(-0.5, 0.5));
    offs.push_back(o);
    vals.push_back(truth(0) + truth(1) * o(0) + truth(2) * o(1) + truth(3) * o(0) * o(0) +
                   truth(4) * o(0) * o(1) + truth(5) * o(1) * o(1));
    errs.push_back(0.0);
  }
  const auto c = fit_quadratic_surrogate(offs, vals, errs, 0.2);
  CHECK((c - truth).cwiseAbs().maxCoeff() < 1e-8);

  // Five points cannot determine six coefficients without the prior.
  offs.resize(5);
  vals.resize(5);
  errs.resize(5);
  CHECK_THROWS_AS(fit_quadratic_surrogate(offs, vals, errs, 0.2), OptimizerError);
  // With noise the prior regularises the fit.
  std::fill(errs.begin(), errs.end(), 0.05);
  CHECK_NOTHROW(fit_quadratic_surrogate(offs, vals, errs, 0.2));
  CHECK_THROWS_AS(fit_quadratic_surrogate({}, {}, {}, 0.2), OptimizerError);
}

TEST_CASE("surrogate gradient error shrinks with the sampling radius") {
  const AnsatzParams c{0.5, 0.1};
  const double h = 1e-6;
  const double gx = (energy({c.phi + h, c.theta}) - energy({c.phi - h, c.theta})) / (2 * h);
  const double gy = (energy({c.phi, c.theta + h}) - energy({c.phi, c.theta - h})) / (2 * h);
  double prev = 1e9;
  for (double delta : {0.4, 0.2, 0.1, 0.05}) {
    RngStream s(8);
    std::vector<Eigen::Vector2d> offs;
    std::vector<double> vals, errs;
    for (int i = 0; i < 12; ++i) {
      const Eigen::Vector2d o(s.uniform(-delta, delta), s.uniform(-delta, delta));
      offs.push_back(o);
      vals.push_back(energy({c.phi + o(0), c.theta + o(1)}));
      errs.push_back(0.0);
    }
    const auto coef = fit_quadratic_surrogate(offs, vals, errs, 0.2);
    const double err = std::hypot(coef(1) - gx, coef(2) - gy);
    CHECK(err < prev);
    CHECK(err < 3.0 * delta);
    prev = err;
  }
}

TEST_CASE("trace records every iteration") {
  RngStream s(6);
  SpsaConfig sc;
  sc.iterations = 7;
  const OptTrace t = spsa_run(sc, point_fn(energy), {0.6, 0.8}, s, energy);
  REQUIRE(t.records.size() == 7);
  CHECK(t.evaluator_calls == 21);
  for (std::size_t i = 0; i < t.records.size(); ++i) {
    CHECK(t.records[i].iteration == static_cast<int>(i) + 1);
    CHECK(t.records[i].exact == doctest::Approx(energy(t.records[i].center)));
    CHECK(t.records[i].at_center.has_value());
    CHECK(t.records[i].samples.size() == 2);
  }
  CHECK(t.records[0].center.phi == 0.6);

  RngStream m(6);
  MgdConfig mc;
  mc.iterations = 4;
  const OptTrace tm = mgd_run(mc, batch_fn(energy), {0.6, 0.8}, 9, m);
  CHECK(tm.evaluator_calls == 8);
  CHECK(tm.records.at(2).samples.size() == 9);
  CHECK(std::isnan(tm.records[0].exact));
  mc.track_center = false;
  RngStream m2(6);
  CHECK(mgd_run(mc, batch_fn(energy), {0.6, 0.8}, 9, m2).evaluator_calls == 4);

  std::ostringstream os;
  write_trace_csv(os, t);
  const std::string csv = os.str();
  CHECK(csv.rfind("iteration,phi,theta,e_raw,e_ni,e_exact\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 8);
}

TEST_CASE("MGD samples stay inside the box around the centre") {
  RngStream s(12);
  MgdConfig mc;
  mc.iterations = 5;
  mc.frame = AngleFrame::circuit({});
  const OptTrace t = mgd_run(mc, batch_fn(energy), {0.2, 0.4}, 12, s);
  for (const TraceRecord& r : t.records) {
    const double dk = mc.delta_k(r.iteration);
    for (const AnsatzParams& p : r.samples) {
      CHECK(std::abs(p.phi - r.center.phi) * mc.frame.phi_scale <= dk + 1e-12);
      CHECK(std::abs(p.theta - r.center.theta) * mc.frame.theta_scale <= dk + 1e-12);
    }
  }
}
