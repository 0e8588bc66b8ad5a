#include <cmath>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "mdopt/model.hpp"
#include "mdopt/seasonality.hpp"

using namespace mdopt;
using fixtures::mat2;
using fixtures::vec;

namespace {

// Product form of the demand laws, written out term by term.
double ce_demand(const ModelParams& m, const Vec& inv, const Vec& p, int i) {
  double s = m.base_demand()(i);
  for (int j = 0; j < m.n(); ++j) s *= std::pow(inv(j), m.alpha()(i, j)) * std::pow(p(j), m.gamma()(i, j));
  return s;
}

double exp_demand(const ModelParams& m, const Vec& inv, const Vec& p, int i) {
  double s = m.base_demand()(i);
  for (int j = 0; j < m.n(); ++j) s *= std::pow(inv(j), m.alpha()(i, j)) * std::exp(m.gamma()(i, j) * p(j));
  return s;
}

ModelParams three_item(DemandKind kind) {
  Mat g(3, 3), a(3, 3);
  g << -2.0, 0.3, 0.1, 0.2, -1.7, 0.4, 0.05, 0.1, -2.5;
  a << 0.4, -0.05, 0.0, 0.1, 0.3, -0.02, 0.0, 0.0, 0.6;
  return ModelParams(vec({3.0, 5.0, 2.0}), g, a, vec({0.5, 1.0, 0.2}), kind);
}

}  // namespace

TEST(Demand, ConstantElasticityMatchesProductForm) {
  const ModelParams m = three_item(DemandKind::ConstantElasticity);
  const Vec inv = vec({40.0, 12.5, 3.0}), p = vec({2.0, 3.5, 1.25});
  const Vec s = demand(m, inv, p);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(s(i), ce_demand(m, inv, p, i), 1e-13 * s(i));
}

TEST(Demand, ExponentialMatchesProductForm) {
  const ModelParams m = three_item(DemandKind::Exponential);
  const Vec inv = vec({40.0, 12.5, 3.0}), p = vec({0.7, 1.1, 0.4});
  const Vec s = demand(m, inv, p);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(s(i), exp_demand(m, inv, p, i), 1e-13 * s(i));
}

TEST(Demand, ElasticityMatrixIsLogLogDerivative) {
  for (DemandKind kind : {DemandKind::ConstantElasticity, DemandKind::Exponential}) {
    const ModelParams m = three_item(kind);
    const Vec inv = vec({10.0, 20.0, 5.0}), p = vec({1.3, 0.9, 2.2});
    const Mat g = elasticity_matrix(m, p);
    const double h = 1e-6;
    for (int j = 0; j < 3; ++j) {
      Vec pp = p, pm = p;
      pp(j) *= std::exp(h);
      pm(j) *= std::exp(-h);
      const Vec d = (demand(m, inv, pp).array().log() - demand(m, inv, pm).array().log()).matrix() / (2 * h);
      for (int i = 0; i < 3; ++i) EXPECT_NEAR(g(i, j), d(i), 1e-8);
    }
  }
}

TEST(Demand, JacobiansMatchCentralDifferences) {
  for (DemandKind kind : {DemandKind::ConstantElasticity, DemandKind::Exponential}) {
    const ModelParams m = three_item(kind);
    const Vec inv = vec({10.0, 20.0, 5.0}), p = vec({1.3, 0.9, 2.2});
    const auto jac = demand_jacobians(m, inv, p);
    for (int j = 0; j < 3; ++j) {
      const double hp = 1e-6 * p(j), hi = 1e-6 * inv(j);
      Vec pp = p, pm = p, ip = inv, im = inv;
      pp(j) += hp;
      pm(j) -= hp;
      ip(j) += hi;
      im(j) -= hi;
      const Vec dp = (demand(m, inv, pp) - demand(m, inv, pm)) / (2 * hp);
      const Vec di = (demand(m, ip, p) - demand(m, im, p)) / (2 * hi);
      for (int i = 0; i < 3; ++i) {
        EXPECT_NEAR(jac.dS_dp(i, j), dp(i), 1e-7 * std::max(1.0, std::abs(dp(i))));
        EXPECT_NEAR(jac.dS_dI(i, j), di(i), 1e-7 * std::max(1.0, std::abs(di(i))));
      }
    }
  }
}

TEST(Demand, OneItemConstantElasticityByHand) {
  // 400 * 25^0.5 * 4^-2 = 125
  const ModelParams m(vec({400.0}), Mat::Constant(1, 1, -2.0), Mat::Constant(1, 1, 0.5), Vec::Zero(1),
                      DemandKind::ConstantElasticity);
  EXPECT_NEAR(demand(m, vec({25.0}), vec({4.0}))(0), 125.0, 1e-12);
}

TEST(Demand, RejectsNonPositiveState) {
  const ModelParams m = fixtures::example_model();
  EXPECT_THROW(demand(m, vec({0.0, 1.0}), vec({1.0, 1.0})), DomainError);
  EXPECT_THROW(demand(m, vec({1.0, 1.0}), vec({-1.0, 1.0})), DomainError);
  EXPECT_THROW(demand(m, vec({1.0}), vec({1.0, 1.0})), DomainError);
}

TEST(Demand, FloorClampsSoldOutItems) {
  const ModelParams m = fixtures::example_model();
  const EvalOptions opt{1e-6};
  const Vec s0 = demand(m, vec({0.0, 50.0}), vec({2.0, 2.0}), opt);
  const Vec s1 = demand(m, vec({1e-6, 50.0}), vec({2.0, 2.0}));
  EXPECT_DOUBLE_EQ(s0(0), s1(0));
  const auto jac = demand_jacobians(m, vec({0.0, 50.0}), vec({2.0, 2.0}), opt);
  EXPECT_EQ(jac.dS_dI(0, 0), 0.0);
  EXPECT_NEAR(inventory_floor_for(vec({3.0, -7.0})), 7e-9, 1e-24);
}

TEST(ModelParams, ValidatesConstruction) {
  EXPECT_THROW(ModelParams(vec({0.0}), Mat::Constant(1, 1, -2), Mat::Zero(1, 1), Vec::Zero(1),
                           DemandKind::ConstantElasticity),
               DomainError);
  EXPECT_THROW(ModelParams(vec({1.0}), Mat::Constant(1, 1, -2), Mat::Zero(1, 1), vec({-1.0}),
                           DemandKind::ConstantElasticity),
               DomainError);
  EXPECT_THROW(ModelParams(vec({1.0, 1.0}), Mat::Constant(1, 1, -2), Mat::Zero(2, 2), Vec::Zero(2),
                           DemandKind::ConstantElasticity),
               DomainError);
  EXPECT_THROW(ModelParams(vec({1.0}), Mat::Constant(1, 1, NAN), Mat::Zero(1, 1), Vec::Zero(1),
                           DemandKind::ConstantElasticity),
               DomainError);
  const ModelParams m = fixtures::example_model().with_base_demand(vec({2.0, 3.0}));
  EXPECT_EQ(m.base_demand()(1), 3.0);
  EXPECT_EQ(m.gamma()(0, 1), 0.25);
}

TEST(ModelParams, DemandTransferenceIsAlphaEntry) {
  const ModelParams m = fixtures::replenishment_model();
  EXPECT_EQ(demand_transference(m, 0, 1), -2.0);
  EXPECT_EQ(demand_transference(m, 1, 0), -0.5);
  EXPECT_THROW(demand_transference(m, 2, 0), DomainError);
}

TEST(Seasonality, UniformIsLinear) {
  const Seasonality s = Seasonality::uniform(4.0);
  EXPECT_DOUBLE_EQ(s.density(1.0), 0.25);
  EXPECT_DOUBLE_EQ(s.cumulative(1.0), 0.25);
  EXPECT_DOUBLE_EQ(s.cumulative(4.0), 1.0);
  EXPECT_DOUBLE_EQ(s.inverse_cumulative(0.5), 2.0);
}

TEST(Seasonality, PiecewiseLinearIntegratesExactly) {
  // Raw density 1 -> 3 on [0, 2], 3 -> 1 on [2, 3]: mass 4 + 2 = 6.
  const Seasonality s({{0.0, 1.0}, {2.0, 3.0}, {3.0, 1.0}});
  EXPECT_NEAR(s.density(1.0), 2.0 / 6.0, 1e-15);
  // Integral of 1 + t on [0, 1] = 1.5.
  EXPECT_NEAR(s.cumulative(1.0), 1.5 / 6.0, 1e-15);
  EXPECT_NEAR(s.cumulative(2.5), (4.0 + 0.5 * (3.0 + 2.0) * 0.5) / 6.0, 1e-15);
  for (double u : {0.01, 0.2, 0.5, 0.66, 0.9, 0.999}) EXPECT_NEAR(s.cumulative(s.inverse_cumulative(u)), u, 1e-13);
}

TEST(Seasonality, RejectsBadKnots) {
  EXPECT_THROW(Seasonality({{0.0, 1.0}}), DomainError);
  EXPECT_THROW(Seasonality({{0.5, 1.0}, {1.0, 1.0}}), DomainError);
  EXPECT_THROW(Seasonality({{0.0, 1.0}, {0.0, 1.0}}), DomainError);
  EXPECT_THROW(Seasonality({{0.0, -1.0}, {1.0, 1.0}}), DomainError);
  EXPECT_THROW(Seasonality({{0.0, 0.0}, {1.0, 0.0}}), DomainError);
  EXPECT_THROW(Seasonality::uniform(1.0).density(1.5), DomainError);
}

TEST(Snapshot, DerivesRevenueAndLerner) {
  const ModelParams m = fixtures::replenishment_model();
  const StateSnapshot s = make_snapshot(m, 0.0, vec({1.0, 2.0}), vec({2.0, 4.0}), vec({3.0, 0.5}),
                                        vec({-1.0, -1.0}), vec({3.0, 0.5}));
  EXPECT_DOUBLE_EQ(s.R(0), 6.0);
  EXPECT_DOUBLE_EQ(s.R(1), 2.0);
  EXPECT_DOUBLE_EQ(s.l(0), 0.5);
  EXPECT_DOUBLE_EQ(s.l(1), 0.75);
  EXPECT_DOUBLE_EQ(s.P(1), 1.5);
}

TEST(Objective, ConstantPolicyIntegratesAgainstDensity) {
  // sigma integrates to one, so a constant integrand g gives g.
  const ModelParams m = fixtures::replenishment_model();
  const Seasonality season({{0.0, 1.0}, {1.0, 4.0}, {2.0, 2.0}});
  Trajectory tr;
  const Vec p = vec({2.0, 4.0}), s = vec({3.0, 0.5}), rho2 = vec({1.0, 2.0});
  for (int k = 0; k <= 2000; ++k) {
    const double t = 2.0 * k / 2000;
    tr.grid.push_back(t);
    tr.tau.push_back(1.0 - season.cumulative(t));
    tr.sigma.push_back(season.density(t));
    tr.states.push_back(make_snapshot(m, t, vec({1.0, 1.0}), p, s, vec({-1.0, -1.0}), rho2));
  }
  // <p, S> = 8, <c, rho2> = 3. The density kink sits on a grid node, so the
  // trapezoid rule is exact for the piecewise-linear sigma.
  EXPECT_NEAR(objective(m, tr, ObjectiveMode::Revenue), 8.0, 1e-12);
  EXPECT_NEAR(objective(m, tr, ObjectiveMode::Profit), 5.0, 1e-12);
}

TEST(Trajectory, ValidationCatchesShapeErrors) {
  Trajectory tr;
  tr.grid = {0.0, 1.0};
  tr.tau = {1.0};
  EXPECT_THROW(validate_trajectory(tr), DomainError);
}
