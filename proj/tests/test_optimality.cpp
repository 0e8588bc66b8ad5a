#include <cmath>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "mdopt/closedform.hpp"
#include "mdopt/optimality.hpp"

using namespace mdopt;
using fixtures::mat2;
using fixtures::vec;

TEST(Adjoint, OneItemStationarityByHand) {
  // p + lambda = -S / (dS/dp) = -p / gamma, so lambda = -p (1 + 1/gamma).
  const ModelParams m(vec({400.0}), Mat::Constant(1, 1, -2.0), Mat::Constant(1, 1, 0.5), Vec::Zero(1),
                      DemandKind::ConstantElasticity);
  const Vec p = vec({3.0}), inv = vec({50.0});
  const auto s = make_snapshot(m, 0.0, inv, p, demand(m, inv, p), Vec::Zero(1), Vec::Zero(1));
  EXPECT_NEAR(recover_lambda(m, s)(0), -1.5, 1e-14);
}

TEST(Adjoint, ExponentialStationarityByHand) {
  // dS/dp = gamma S, so p + lambda = -1/gamma.
  const ModelParams m(vec({10.0}), Mat::Constant(1, 1, -0.5), Mat::Zero(1, 1), Vec::Zero(1),
                      DemandKind::Exponential);
  const Vec p = vec({4.0}), inv = vec({1.0});
  const auto s = make_snapshot(m, 0.0, inv, p, demand(m, inv, p), Vec::Zero(1), Vec::Zero(1));
  EXPECT_NEAR(recover_lambda(m, s)(0), 2.0 - 4.0, 1e-14);
}

TEST(Hamiltonian, FormsAgreeWhenStationary) {
  const ModelParams m = fixtures::example_model();
  const Vec inv = vec({100.0, 150.0}), p = vec({3.0, 2.0});
  auto s = make_snapshot(m, 0.0, inv, p, demand(m, inv, p), Vec::Zero(2), Vec::Zero(2));
  s.lambda = recover_lambda(m, s);
  const auto h = hamiltonian_invariant(m, s);
  EXPECT_TRUE(h.consistent(1e-12));
  // With rho2 = 0 the elasticity form is <R, G^-1 1>, minus the revenue invariant.
  EXPECT_NEAR(h.elasticity_form, -revenue_elasticity_invariant(m, s), 1e-12 * std::abs(h.elasticity_form));
}

TEST(Hamiltonian, ExponentialSalesInvariantIsMinusRevenueForm) {
  const ModelParams m(vec({5.0, 7.0}), mat2(-0.6, 0.1, 0.05, -0.4), mat2(0.2, 0.0, 0.0, 0.1), Vec::Zero(2),
                      DemandKind::Exponential);
  const Vec inv = vec({10.0, 20.0}), p = vec({2.0, 3.0});
  const auto s = make_snapshot(m, 0.0, inv, p, demand(m, inv, p), Vec::Zero(2), Vec::Zero(2));
  EXPECT_NEAR(exponential_sales_invariant(m, s), -revenue_elasticity_invariant(m, s), 1e-12);
}

TEST(Invariants, ClosedFormMarkdownConservesAll) {
  const auto sol = md_multi(fixtures::example_model(), FixedInventory{vec({200.0, 300.0})});
  const auto reports = invariance_report(sol.model, sol.trajectory, {"all"}, 1e-10);
  ASSERT_EQ(reports.size(), 3u);
  for (const auto& r : reports) {
    EXPECT_TRUE(r.pass) << r.name << " " << r.max_rel_dev;
    EXPECT_EQ(r.values.size(), sol.trajectory.size());
  }
}

TEST(Invariants, OneItemDefaultsIncludeRevenue) {
  const auto sol = md_one_item(-2.0, 0.5, 100.0, 400.0, Seasonality::uniform(1.0));
  const auto reports = invariance_report(sol.model, sol.trajectory, {"all"}, 1e-8);
  bool saw_revenue = false;
  for (const auto& r : reports) {
    EXPECT_TRUE(r.pass) << r.name;
    saw_revenue = saw_revenue || r.name == "revenue_1";
  }
  EXPECT_TRUE(saw_revenue);
}

TEST(Invariants, PerturbedPriceIsCaught) {
  auto sol = md_multi(fixtures::example_model(), FixedInventory{vec({200.0, 300.0})});
  auto& s = sol.trajectory.states[100];
  Vec p = s.p;
  p(0) *= 1.05;
  s = make_snapshot(sol.model, s.t, s.I, p, demand(sol.model, s.I, p), s.lambda, s.rho2);
  const auto reports = invariance_report(sol.model, sol.trajectory, {"hamiltonian", "revenue_elasticity"}, 1e-6);
  for (const auto& r : reports) EXPECT_FALSE(r.pass) << r.name;
}

TEST(Invariants, WindowTrimsEnds) {
  auto sol = md_one_item(-2.0, 0.5, 100.0, 400.0, Seasonality::uniform(1.0), GridSpec{100});
  auto& s = sol.trajectory.states[1];
  Vec p = s.p * 1.1;
  s = make_snapshot(sol.model, s.t, s.I, p, demand(sol.model, s.I, p), s.lambda, s.rho2);
  EXPECT_FALSE(invariance_report(sol.model, sol.trajectory, {"revenue"}, 1e-8)[0].pass);
  EXPECT_TRUE(invariance_report(sol.model, sol.trajectory, {"revenue"}, 1e-8, ReportWindow{0.05, 0.05})[0].pass);
}

TEST(Invariants, UnknownNameRejected) {
  const auto sol = md_one_item(-2.0, 0.5, 100.0, 400.0, Seasonality::uniform(1.0), GridSpec{10});
  EXPECT_THROW(invariance_report(sol.model, sol.trajectory, {"momentum"}, 1e-6), DomainError);
}

TEST(Invariants, MaxRelativeDeviation) {
  EXPECT_DOUBLE_EQ(max_relative_deviation({1.0, 2.0, 3.0}), 1.0);
  EXPECT_DOUBLE_EQ(max_relative_deviation({5.0, 5.0}), 0.0);
  EXPECT_DOUBLE_EQ(max_relative_deviation({}), 0.0);
}

TEST(EulerLagrange, ClosedFormResidualsAreSmall) {
  const auto sol = md_multi(fixtures::example_model(), FixedInventory{vec({200.0, 300.0})}, GridSpec{2000});
  const auto r = el_residuals(sol.model, sol.trajectory);
  const std::size_t tail = sol.trajectory.size() / 20;
  EXPECT_LE(sup_norm(r.stationarity, &r.stationarity_scale), 1e-12);
  // The adjoint equation is checked with finite differences of lambda on the grid.
  EXPECT_LE(sup_norm(r.adjoint, &r.adjoint_scale, 1, tail), 1e-4);
  EXPECT_LE(sup_norm(r.sign_lambda), 0.0);
}

TEST(EulerLagrange, WrongAdjointShowsUp) {
  auto sol = md_one_item(-2.0, 0.5, 100.0, 400.0, Seasonality::uniform(1.0), GridSpec{200});
  for (auto& s : sol.trajectory.states) s.lambda *= 0.5;
  const auto r = el_residuals(sol.model, sol.trajectory);
  EXPECT_GT(sup_norm(r.stationarity, &r.stationarity_scale), 0.1);
}

TEST(Lerner, EquilibriumSatisfiesInverseElasticityRule) {
  const ModelParams m = fixtures::replenishment_model();
  const auto eq = cr_multi(m, 10.0);
  const auto s = make_snapshot(m, 0.0, eq.I_star, eq.p_star, demand(m, eq.I_star, eq.p_star), -m.unit_cost(),
                               demand(m, eq.I_star, eq.p_star));
  const auto lc = lerner_rule_check(m, s);
  EXPECT_LE(lc.residual.norm(), 1e-10 * s.R.norm());
  EXPECT_TRUE(lc.feasible);
  EXPECT_LE(degeneracy_check(m, s).norm(), 1e-10 * s.P.norm());
}

TEST(MatrixConditions, DiagonalDominanceAndHighlyNegative) {
  const auto good = matrix_conditions(mat2(-2.0, 0.25, 0.25, -1.5));
  EXPECT_TRUE(good.diag_dominant);
  EXPECT_TRUE(good.highly_negative_on(vec({0.7, 0.65})));
  const auto bad = matrix_conditions(mat2(-0.2, 0.25, 0.25, -1.5));
  EXPECT_FALSE(bad.diag_dominant);
  // (1 + 1/gamma) R < 0 when |gamma| < 1.
  EXPECT_FALSE(matrix_conditions(Mat::Constant(1, 1, -0.5)).highly_negative_on(vec({1.0})));
  EXPECT_THROW(matrix_conditions(mat2(1.0, 2.0, 2.0, 4.0)), NumericalError);
}
