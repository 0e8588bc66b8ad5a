#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "mdopt/errors.hpp"
#include "mdopt/linalg.hpp"
#include "mdopt/model.hpp"
#include "mdopt/optimality.hpp"
#include "mdopt/seasonality.hpp"

namespace mdopt {

// Closed-form markdown trajectories are evaluated at tau >= kTauFloor; the
// terminal point still records I(T) = 0 exactly.
inline constexpr double kTauFloor = 1e-9;

/// Grid for emitting closed-form trajectories. A uniform grid has `intervals`
/// equal steps in t. A graded grid is geometric in tau = 1 - cumulative
/// seasonality (ratio 1 + graded_ratio) from tau = 1 down to graded_floor,
/// followed by the terminal point; it keeps the relative spacing small where
/// the markdown curves steepen.
struct GridSpec {
  int intervals = 400;
  bool graded = false;
  double graded_ratio = 1e-3;
  double graded_floor = 1e-6;
};

struct GridPoints {
  std::vector<double> t;
  std::vector<double> tau;
};

inline GridPoints make_grid(const Seasonality& season, const GridSpec& spec) {
  GridPoints g;
  const double T = season.horizon();
  if (!spec.graded) {
    if (spec.intervals < 2) throw DomainError("grid: need at least 2 intervals");
    for (int k = 0; k <= spec.intervals; ++k) {
      const double t = (k == spec.intervals) ? T : T * k / spec.intervals;
      g.t.push_back(t);
      g.tau.push_back(k == spec.intervals ? 0.0 : 1.0 - season.cumulative(t));
    }
    return g;
  }
  if (!(spec.graded_ratio > 0.0) || !(spec.graded_floor > 0.0 && spec.graded_floor < 1.0))
    throw DomainError("grid: graded ratio and floor must be positive, floor below 1");
  double tau = 1.0;
  while (tau >= spec.graded_floor) {
    const double t = (tau == 1.0) ? 0.0 : season.inverse_cumulative(1.0 - tau);
    if (g.t.empty() || t > g.t.back()) {
      g.t.push_back(t);
      g.tau.push_back(tau);
    }
    tau /= (1.0 + spec.graded_ratio);
  }
  if (T > g.t.back()) {
    g.t.push_back(T);
    g.tau.push_back(0.0);
  } else {
    g.tau.back() = 0.0;
  }
  return g;
}

// ---------------------------------------------------------------------------
// Continuous replenishment

/// One-item replenishment price gamma c / (gamma + 1); needs gamma < -1.
inline double cr_one_item(double gamma, double c) {
  if (!(gamma < -1.0)) {
    std::ostringstream os;
    os << "one-item replenishment needs gamma < -1 so that gamma/(gamma+1) >= 1; got gamma = "
       << gamma;
    throw HypothesisViolation(os.str());
  }
  if (!(c >= 0.0)) throw DomainError("one-item replenishment: unit cost must be nonnegative");
  return gamma * c / (gamma + 1.0);
}

struct CREquilibrium {
  Vec p_star;
  Vec I_star;
  Vec P_star;
  Vec R_star;
  Vec l_star;
  double r_scale = 1.0;
  // Residual diagnostics (relative).
  double lerner_residual = 0.0;
  double degeneracy_residual = 0.0;
  double demand_residual = 0.0;
};

/// Constant-price, constant-inventory replenishment equilibrium for a
/// constant-elasticity model whose inventory-effect matrix alpha has rank
/// n - 1 with a positive left null vector P. Prices follow from the Lerner
/// rule gamma^T P = -R; inventory solves alpha log I = log R - log S0 -
/// (1 + gamma) log p + (log r) 1 with r picked so the right side lies in
/// range(alpha) and the free null(alpha) component matching the geometric
/// mean of I to `inventory_scale`.
inline CREquilibrium cr_multi(const ModelParams& m, double inventory_scale) {
  if (m.kind() != DemandKind::ConstantElasticity)
    throw HypothesisViolation("replenishment equilibrium needs the constant-elasticity model");
  if (!(inventory_scale > 0.0)) throw DomainError("replenishment equilibrium: inventory scale must be positive");
  const int n = m.n();
  const Mat& alpha = m.alpha();
  const Mat& gamma = m.gamma();

  Eigen::JacobiSVD<Mat> svd(alpha, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const int rank = numerical_rank(alpha);
  if (rank != n - 1) {
    std::ostringstream os;
    os << "replenishment equilibrium needs rank(alpha) = n - 1 = " << n - 1 << "; got " << rank;
    throw HypothesisViolation(os.str());
  }
  Vec left_null = svd.matrixU().col(n - 1);
  if (left_null.sum() < 0.0) left_null = -left_null;
  const double sign_tol = 1e-12 * left_null.norm();
  if (!(left_null.minCoeff() > sign_tol))
    throw HypothesisViolation("replenishment equilibrium: null vector of alpha^T not one-signed");

  const Vec ones = Vec::Ones(n);
  const double ones_projection = left_null.dot(ones);
  if (std::abs(ones_projection) <= 1e-10 * std::sqrt(static_cast<double>(n)))
    throw HypothesisViolation("replenishment equilibrium: 1_n lies in range(alpha)");

  const Vec p_dir = left_null / left_null.sum();
  const Vec r_dir = -gamma.transpose() * p_dir;
  if (!(r_dir.minCoeff() > 0.0))
    throw HypothesisViolation("replenishment equilibrium: revenue -gamma^T P is not positive");
  const Vec l = p_dir.cwiseQuotient(r_dir);
  for (int i = 0; i < n; ++i) {
    if (!(l(i) > 0.0 && l(i) < 1.0)) {
      std::ostringstream os;
      os << "replenishment equilibrium: Lerner index l[" << i << "] = " << l(i)
         << " outside (0,1); gamma is not highly negative on R";
      throw HypothesisViolation(os.str());
    }
    if (!(m.unit_cost()(i) > 0.0))
      throw HypothesisViolation("replenishment equilibrium: unit costs must be positive");
  }
  const Vec p = m.unit_cost().cwiseQuotient(ones - l);

  const Mat one_plus_gamma = Mat::Identity(n, n) + gamma;
  const Vec b = r_dir.array().log().matrix() - m.base_demand().array().log().matrix() -
                one_plus_gamma * p.array().log().matrix();
  const double log_r = -left_null.dot(b) / ones_projection;
  const Vec rhs = b + log_r * ones;

  Vec log_i = Vec::Zero(n);
  if (rank > 0) {
    Eigen::JacobiSVD<Mat> ls(alpha, Eigen::ComputeThinU | Eigen::ComputeThinV);
    ls.setThreshold(kRankTol);
    log_i = ls.solve(rhs);
    const double res = relative_residual(alpha, log_i, rhs);
    if (!(res <= kSolveResidualTol)) {
      std::ostringstream os;
      os << "replenishment equilibrium: inventory system residual " << res;
      throw NumericalError(os.str());
    }
  }
  const Vec right_null = svd.matrixV().col(n - 1);
  const double null_mean = right_null.mean();
  if (std::abs(null_mean) <= 1e-12)
    throw HypothesisViolation("replenishment equilibrium: null(alpha) cannot move the inventory scale");
  log_i += ((std::log(inventory_scale) - log_i.mean()) / null_mean) * right_null;

  CREquilibrium eq;
  eq.r_scale = std::exp(log_r);
  eq.p_star = p;
  eq.I_star = log_i.array().exp().matrix();
  eq.P_star = eq.r_scale * p_dir;
  eq.R_star = eq.r_scale * r_dir;
  eq.l_star = l;

  eq.lerner_residual = (gamma.transpose() * eq.P_star + eq.R_star).norm() / eq.R_star.norm();
  if (!(eq.lerner_residual <= kSolveResidualTol))
    throw NumericalError("replenishment equilibrium: Lerner rule residual too large");
  eq.degeneracy_residual =
      (alpha.transpose() * eq.P_star).norm() / std::max(alpha.norm() * eq.P_star.norm(), 1e-300);
  const Vec s = demand(m, eq.I_star, eq.p_star);
  eq.demand_residual = max_abs((eq.p_star.cwiseProduct(s) - eq.R_star).cwiseQuotient(eq.R_star));
  if (!(eq.demand_residual <= 1e-8)) {
    std::ostringstream os;
    os << "replenishment equilibrium: demand does not reproduce R/p (relative " << eq.demand_residual << ")";
    throw NumericalError(os.str());
  }
  return eq;
}

/// Constant trajectory of a replenishment equilibrium: rho2 = S, lambda = -c.
inline Trajectory cr_trajectory(const ModelParams& m, const CREquilibrium& eq,
                                const Seasonality& season, const GridSpec& grid = {}) {
  GridSpec uniform = grid;
  uniform.graded = false;
  const GridPoints g = make_grid(season, uniform);
  const Vec s = demand(m, eq.I_star, eq.p_star);
  Trajectory tr;
  for (std::size_t k = 0; k < g.t.size(); ++k) {
    tr.grid.push_back(g.t[k]);
    tr.tau.push_back(g.tau[k]);
    tr.sigma.push_back(season.density(g.t[k]));
    tr.states.push_back(make_snapshot(m, g.t[k], eq.I_star, eq.p_star, s, -m.unit_cost(), s));
  }
  tr.objective = objective(m, tr, ObjectiveMode::Profit);
  return tr;
}

// ---------------------------------------------------------------------------
// Markdown

/// Parameters of the markdown solution p = p0 tau^mu, I = I0 tau^a with
/// tau = 1 - cumulative seasonality and lambda = C p.
struct ClosedFormMD {
  Vec mu;
  Vec a;
  Vec theta;
  Vec p0;
  Vec I0;
  // Constant revenue rate. Per unit time when the horizon was solved for
  // (unit_time_measure), de-seasoned otherwise.
  Vec R;
  Vec C;
  double T = 0.0;
  bool unit_time_measure = false;
  // p0 I0 a: total markdown revenue per item, equal to the de-seasoned revenue rate.
  Vec revenue_total;
  Vec revenue_direction;
  double revenue_scale = 1.0;
  // Base demand of the model the trajectory was generated with.
  Vec S0_effective;

  // Relative residuals of the defining relations.
  double exponent_residual = 0.0;     // [1 - alpha^-1 (1 + gamma)] mu = 1
  double consistency_residual = 0.0;  // (1 + alpha theta) mu = -gamma mu
  double revenue_residual = 0.0;      // (theta alpha^T + 1)(gamma^T)^-1 R = -R
  double boundary_residual = 0.0;     // initial price/inventory conditions
  double demand_residual = 0.0;       // max |p S / R - 1| along the emitted grid
};

struct MarkdownSolution {
  ClosedFormMD form;
  ModelParams model;  // model the trajectory's demand is evaluated with
  Seasonality seasonality;
  Trajectory trajectory;
};

// Horizon solved for: I0 fixed, measure dt with uniform seasonality. The
// model's S0 is the base demand per unit time. Square for two items.
struct FixedInventory {
  Vec I0;
};

// Horizon and seasonality given; the direction of I0 is solved for and only
// its geometric mean is fixed. The model's S0 is the de-seasoned base demand.
struct InventoryMagnitude {
  double geometric_mean;
  Seasonality seasonality;
};

using MarkdownBoundary = std::variant<FixedInventory, InventoryMagnitude>;

namespace detail {

inline Trajectory emit_markdown(const ModelParams& m, ClosedFormMD& form, const Seasonality& season,
                                const GridSpec& grid) {
  const GridPoints g = make_grid(season, grid);
  const int n = m.n();
  Trajectory tr;
  tr.grid = g.t;
  tr.tau = g.tau;
  tr.sigma.reserve(g.t.size());
  tr.states.reserve(g.t.size());
  double worst = 0.0;
  for (std::size_t k = 0; k < g.t.size(); ++k) {
    const double tau = std::max(g.tau[k], kTauFloor);
    Vec p(n), inv(n);
    for (int i = 0; i < n; ++i) {
      p(i) = form.p0(i) * std::pow(tau, form.mu(i));
      inv(i) = g.tau[k] == 0.0 ? 0.0 : form.I0(i) * std::pow(tau, form.a(i));
    }
    Vec s;
    if (g.tau[k] == 0.0) {
      s = form.revenue_total.cwiseQuotient(p);
    } else {
      s = demand(m, inv, p);
      worst = std::max(worst, max_abs((p.cwiseProduct(s) - form.revenue_total).cwiseQuotient(form.revenue_total)));
    }
    Vec lambda = form.C.cwiseProduct(p);
    tr.sigma.push_back(season.density(g.t[k]));
    tr.states.push_back(make_snapshot(m, g.t[k], std::move(inv), std::move(p), std::move(s),
                                      std::move(lambda), Vec::Zero(n)));
  }
  form.demand_residual = worst;
  if (!(worst <= 1e-8)) {
    std::ostringstream os;
    os << "closed-form markdown: revenue not constant along the trajectory (relative " << worst << ")";
    throw NumericalError(os.str());
  }
  tr.objective = objective(m, tr, ObjectiveMode::Revenue);
  return tr;
}

}  // namespace detail

/// One-item markdown for S = S0 I^alpha p^gamma:
///   theta = -(gamma + 1)/alpha,  p = p0 tau^(1/(1+theta)),  I = I0 tau^(theta/(1+theta)),
/// with p0 fixed by S0 I0^alpha p0^gamma = I0 theta/(1+theta). alpha = 0 is the
/// theta -> infinity limit: constant price and I = I0 tau.
inline MarkdownSolution md_one_item(double gamma, double alpha, double I0, double S0,
                                    const Seasonality& season, const GridSpec& grid = {}) {
  if (!(gamma < -1.0)) {
    std::ostringstream os;
    os << "one-item markdown needs gamma < -1; got " << gamma;
    throw HypothesisViolation(os.str());
  }
  if (!(alpha >= 0.0)) throw HypothesisViolation("one-item markdown needs alpha >= 0");
  if (!(I0 > 0.0) || !(S0 > 0.0)) throw DomainError("one-item markdown: I0 and S0 must be positive");

  ModelParams m(Vec::Constant(1, S0), Mat::Constant(1, 1, gamma), Mat::Constant(1, 1, alpha),
                Vec::Zero(1), DemandKind::ConstantElasticity);
  ClosedFormMD f;
  double mu, a, theta;
  if (alpha == 0.0) {
    theta = std::numeric_limits<double>::infinity();
    mu = 0.0;
    a = 1.0;
  } else {
    theta = -(gamma + 1.0) / alpha;
    mu = 1.0 / (1.0 + theta);
    a = theta / (1.0 + theta);
  }
  const double p0 = std::pow(I0 * a / (S0 * std::pow(I0, alpha)), 1.0 / gamma);
  f.mu = Vec::Constant(1, mu);
  f.a = Vec::Constant(1, a);
  f.theta = Vec::Constant(1, theta);
  f.p0 = Vec::Constant(1, p0);
  f.I0 = Vec::Constant(1, I0);
  f.revenue_total = Vec::Constant(1, p0 * I0 * a);
  f.R = f.revenue_total;
  f.revenue_direction = Vec::Constant(1, -gamma * mu);
  f.revenue_scale = f.revenue_direction(0) > 0.0 ? f.R(0) / f.revenue_direction(0) : 1.0;
  f.C = Vec::Constant(1, -(1.0 + 1.0 / gamma));
  f.T = season.horizon();
  f.S0_effective = Vec::Constant(1, S0);
  Trajectory tr = detail::emit_markdown(m, f, season, grid);
  return MarkdownSolution{std::move(f), std::move(m), season, std::move(tr)};
}

/// Positive diagonal delta with delta gamma delta^-1 = gamma^T: the identity for
/// symmetric gamma, diag(1, g12/g21) for a 2 x 2 gamma with same-signed
/// off-diagonal entries. Other cases are rejected.
inline Vec transpose_similarity(const Mat& gamma) {
  const int n = static_cast<int>(gamma.rows());
  const double scale = std::max(gamma.cwiseAbs().maxCoeff(), 1e-300);
  if ((gamma - gamma.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale) return Vec::Ones(n);
  if (n == 2 && gamma(0, 1) * gamma(1, 0) > 0.0) {
    Vec d(2);
    d << 1.0, gamma(0, 1) / gamma(1, 0);
    const Mat check = d.asDiagonal() * gamma * d.cwiseInverse().asDiagonal();
    if ((check - gamma.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale) return d;
  }
  throw HypothesisViolation(
      "closed-form markdown needs gamma symmetric or 2x2 with same-signed off-diagonal entries");
}

/// Multivariate markdown for the constant-elasticity model with positive
/// diagonal alpha: p = p0 tau^mu, I = I0 tau^(1 - mu), every item's revenue
/// rate constant.
inline MarkdownSolution md_multi(const ModelParams& m, const MarkdownBoundary& boundary,
                                 const GridSpec& grid = {}) {
  if (m.kind() != DemandKind::ConstantElasticity)
    throw HypothesisViolation("closed-form markdown needs the constant-elasticity model");
  const int n = m.n();
  const Mat& alpha = m.alpha();
  const Mat& gamma = m.gamma();
  const Mat eye = Mat::Identity(n, n);
  const Vec ones = Vec::Ones(n);

  const double amax = std::max(alpha.cwiseAbs().maxCoeff(), 1e-300);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i != j && std::abs(alpha(i, j)) > 1e-12 * amax)
        throw HypothesisViolation("closed-form markdown needs a diagonal alpha");
      if (i == j && !(alpha(i, i) > 0.0))
        throw HypothesisViolation("closed-form markdown needs a positive diagonal alpha");
    }
  const Vec alpha_diag = alpha.diagonal();
  const Vec delta = transpose_similarity(gamma);

  ClosedFormMD f;
  const Mat exponent_matrix = eye - alpha_diag.cwiseInverse().asDiagonal() * (eye + gamma);
  f.mu = solve_checked(exponent_matrix, ones, "closed-form markdown: price exponent system");
  f.exponent_residual = relative_residual(exponent_matrix, f.mu, ones);
  for (int i = 0; i < n; ++i) {
    if (!(f.mu(i) > 0.0 && f.mu(i) < 1.0)) {
      std::ostringstream os;
      os << "closed-form markdown: price exponent mu[" << i << "] = " << f.mu(i) << " outside (0,1)";
      throw HypothesisViolation(os.str());
    }
  }
  f.a = ones - f.mu;
  f.theta = f.a.cwiseQuotient(f.mu);

  const Vec consistency = f.mu + alpha_diag.cwiseProduct(f.theta).cwiseProduct(f.mu) + gamma * f.mu;
  f.consistency_residual = consistency.norm() / (f.mu.norm() * (1.0 + gamma.norm()));
  if (!(f.consistency_residual <= kSolveResidualTol))
    throw HypothesisViolation("closed-form markdown: exponent consistency check failed");

  const Vec v = delta.cwiseProduct(f.mu);
  f.revenue_direction = -gamma.transpose() * v;
  if (!(f.revenue_direction.minCoeff() > 0.0))
    throw HypothesisViolation("closed-form markdown: revenue direction -gamma^T V is not positive");
  const Vec gt_inv_r = solve_checked(gamma.transpose(), f.revenue_direction, "closed-form markdown: gamma^T");
  const Vec rev_check =
      (alpha_diag.cwiseProduct(f.theta).asDiagonal() * gt_inv_r) + gt_inv_r + f.revenue_direction;
  f.revenue_residual = rev_check.norm() / f.revenue_direction.norm();
  if (!(f.revenue_residual <= kSolveResidualTol))
    throw HypothesisViolation("closed-form markdown: revenue eigenvector condition failed");

  f.C = -(f.revenue_direction + gt_inv_r).cwiseQuotient(f.revenue_direction);
  for (int i = 0; i < n; ++i) {
    if (!(f.C(i) <= 0.0)) {
      std::ostringstream os;
      os << "closed-form markdown: adjoint sign violated (C[" << i << "] = " << f.C(i)
         << " > 0); gamma is not highly negative on R";
      throw HypothesisViolation(os.str());
    }
  }

  const Vec log_rd = f.revenue_direction.array().log().matrix();
  const Vec log_a = f.a.array().log().matrix();
  const Vec log_s0 = m.base_demand().array().log().matrix();
  const Mat one_plus_gamma = eye + gamma;

  Seasonality season = Seasonality::uniform(1.0);
  ModelParams model = m;
  if (const auto* fixed = std::get_if<FixedInventory>(&boundary)) {
    if (n != 2)
      throw HypothesisViolation(
          "closed-form markdown with fixed I0 and free horizon needs exactly two items");
    if (fixed->I0.size() != n || !(fixed->I0.minCoeff() > 0.0))
      throw DomainError("closed-form markdown: I0 must hold n positive entries");
    const Vec log_i0 = fixed->I0.array().log().matrix();
    // Unknowns: log p0 (n), log r, log T.
    Mat A = Mat::Zero(2 * n, n + 2);
    Vec b(2 * n);
    for (int i = 0; i < n; ++i) {
      A(i, i) = -1.0;
      A(i, n) = 1.0;
      A(i, n + 1) = 1.0;
      b(i) = log_i0(i) + log_a(i) - log_rd(i);
      A.row(n + i).head(n) = -one_plus_gamma.row(i);
      A(n + i, n) = 1.0;
      b(n + i) = log_s0(i) + alpha_diag(i) * log_i0(i) - log_rd(i);
    }
    const Vec z = solve_checked(A, b, "closed-form markdown: boundary system");
    f.boundary_residual = relative_residual(A, z, b);
    f.p0 = z.head(n).array().exp().matrix();
    f.revenue_scale = std::exp(z(n));
    f.T = std::exp(z(n + 1));
    f.I0 = fixed->I0;
    f.R = f.revenue_scale * f.revenue_direction;
    f.revenue_total = f.R * f.T;
    f.unit_time_measure = true;
    f.S0_effective = m.base_demand() * f.T;
    season = Seasonality::uniform(f.T);
    model = m.with_base_demand(f.S0_effective);
  } else {
    const auto& mag = std::get<InventoryMagnitude>(boundary);
    if (!(mag.geometric_mean > 0.0))
      throw DomainError("closed-form markdown: inventory magnitude must be positive");
    // Unknowns: log p0 (n), log r, log I0 (n).
    const int dim = 2 * n + 1;
    Mat A = Mat::Zero(dim, dim);
    Vec b(dim);
    for (int i = 0; i < n; ++i) {
      A(i, i) = -1.0;
      A(i, n) = 1.0;
      A(i, n + 1 + i) = -1.0;
      b(i) = log_a(i) - log_rd(i);
      A.row(n + i).head(n) = -one_plus_gamma.row(i);
      A(n + i, n) = 1.0;
      A(n + i, n + 1 + i) = -alpha_diag(i);
      b(n + i) = log_s0(i) - log_rd(i);
      A(2 * n, n + 1 + i) = 1.0 / n;
    }
    b(2 * n) = std::log(mag.geometric_mean);
    const Vec z = solve_checked(A, b, "closed-form markdown: boundary system");
    f.boundary_residual = relative_residual(A, z, b);
    f.p0 = z.head(n).array().exp().matrix();
    f.revenue_scale = std::exp(z(n));
    f.I0 = z.tail(n).array().exp().matrix();
    f.T = mag.seasonality.horizon();
    f.R = f.revenue_scale * f.revenue_direction;
    f.revenue_total = f.R;
    f.unit_time_measure = false;
    f.S0_effective = m.base_demand();
    season = mag.seasonality;
  }
  const Vec balance = f.p0.cwiseProduct(f.I0).cwiseProduct(f.a);
  if (!(max_abs((balance - f.revenue_total).cwiseQuotient(f.revenue_total)) <= 1e-9))
    throw NumericalError("closed-form markdown: flow balance p0 I0 a = R not met");

  Trajectory tr = detail::emit_markdown(model, f, season, grid);
  return MarkdownSolution{std::move(f), std::move(model), std::move(season), std::move(tr)};
}

// ---------------------------------------------------------------------------
// Spectra

/// Real eigenvalues of a square matrix, sorted ascending. An eigenvalue is
/// real when its imaginary part is below 1e-9 max(1, |lambda|).
inline std::vector<double> real_spectrum(const Mat& m) {
  Eigen::EigenSolver<Mat> es(m, false);
  if (es.info() != Eigen::Success) throw NumericalError("eigen solver did not converge");
  std::vector<double> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const auto ev = es.eigenvalues()(i);
    if (std::abs(ev.imag()) <= 1e-9 * std::max(1.0, std::abs(ev))) out.push_back(ev.real());
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// True when the real eigenvalues of AB and A^T B^T agree as multisets within
/// 1e-8 max(1, |lambda|).
inline bool eigen_lemma_check(const Mat& a, const Mat& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw DomainError("eigen lemma: need square matrices of equal size");
  for (const Mat* x : {&a, &b}) {
    if (numerical_rank(*x, 1e-14) < x->rows()) throw DomainError("eigen lemma: singular input");
  }
  const auto s1 = real_spectrum(a * b);
  const auto s2 = real_spectrum(a.transpose() * b.transpose());
  if (s1.size() != s2.size()) return false;
  for (std::size_t i = 0; i < s1.size(); ++i)
    if (std::abs(s1[i] - s2[i]) > 1e-8 * std::max(1.0, std::abs(s1[i]))) return false;
  return true;
}

}  // namespace mdopt
