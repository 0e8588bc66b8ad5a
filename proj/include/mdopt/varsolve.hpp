#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mdopt/errors.hpp"
#include "mdopt/linalg.hpp"
#include "mdopt/model.hpp"
#include "mdopt/seasonality.hpp"

namespace mdopt {

struct SolverConfig {
  int N = 400;
  int max_iters = 20000;  // per penalty round
  double tol = 1e-8;      // relative reduced projected-gradient norm
  double constraint_tol = 1e-4;
  double armijo = 1e-4;
  double initial_step = 1.0;
  double penalty_initial = 1.0;
  double penalty_growth = 10.0;
  int penalty_rounds = 5;
  double price_bound_factor = 1e3;  // log-price box is init +- log(factor)
  double max_step = 0.25;           // largest change of any control per iteration
  bool verify_gradient = true;
  std::uint64_t seed = 0;

  void validate() const {
    if (N < 10) throw DomainError("solver: N must be at least 10");
    if (max_iters < 1) throw DomainError("solver: max_iters must be positive");
    if (!(tol > 0.0) || !(constraint_tol > 0.0)) throw DomainError("solver: tolerances must be positive");
    if (!(armijo > 0.0 && armijo < 0.5)) throw DomainError("solver: armijo constant must lie in (0, 0.5)");
    if (!(initial_step > 0.0)) throw DomainError("solver: initial step must be positive");
    if (!(penalty_initial > 0.0) || !(penalty_growth >= 1.0) || penalty_rounds < 1)
      throw DomainError("solver: invalid penalty schedule");
    if (!(price_bound_factor > 1.0)) throw DomainError("solver: price bound factor must exceed 1");
    if (!(max_step > 0.0)) throw DomainError("solver: max_step must be positive");
  }
};

struct SolverResult {
  Trajectory trajectory;
  double objective = 0.0;  // quadrature without the terminal penalty
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0.0;         // relative reduced projected gradient at exit
  double constraint_violation = 0.0;  // max |I(T) - target| / I_ref
  bool bound_active = false;          // some log-price sits on its box bound
  double gradient_check_error = 0.0;  // finite-difference check at the first iterate
  std::string message;
};

enum class ProblemKind { Markdown, Replenishment };

/// Single-shooting transcription. Controls per interval k = 0..N-1 are the
/// log-prices u_k and, for replenishment, rho_k with rho2 = rho_k^2. Inventory
/// advances by Heun's method (explicit trapezoid) on dI/dt = (rho2 - S) sigma,
/// and each interval contributes h/2 [sigma_k g(I_k) + sigma_k+1 g(I~_k+1)]
/// with g = <p, S> - <c, rho2> and I~ the predictor. The terminal penalty is
/// W |(I_N - target) / I_ref|^2.
class TranscribedProblem {
 public:
  TranscribedProblem(ModelParams m, Vec I0, Vec target, Vec I_ref, Seasonality season, int N,
                     ProblemKind kind)
      : m_(std::move(m)),
        I0_(std::move(I0)),
        target_(std::move(target)),
        ref_(std::move(I_ref)),
        season_(std::move(season)),
        N_(N),
        kind_(kind) {
    const int n = m_.n();
    if (I0_.size() != n || target_.size() != n || ref_.size() != n)
      throw DomainError("transcription: boundary vectors must have n entries");
    if (!(I0_.minCoeff() > 0.0) || !(ref_.minCoeff() > 0.0))
      throw DomainError("transcription: initial and reference inventory must be positive");
    if (N_ < 1) throw DomainError("transcription: need at least one interval");
    h_ = season_.horizon() / N_;
    sigma_.resize(N_ + 1);
    grid_.resize(N_ + 1);
    for (int k = 0; k <= N_; ++k) {
      grid_[k] = k == N_ ? season_.horizon() : k * h_;
      sigma_[k] = season_.density(grid_[k]);
    }
    floor_ = inventory_floor_for(ref_.cwiseMax(I0_));
  }

  int items() const { return m_.n(); }
  int intervals() const { return N_; }
  int stride() const { return kind_ == ProblemKind::Replenishment ? 2 * items() : items(); }
  int dim() const { return N_ * stride(); }
  ProblemKind kind() const { return kind_; }
  const ModelParams& model() const { return m_; }
  const std::vector<double>& grid() const { return grid_; }

  struct Rollout {
    std::vector<Vec> I;  // N + 1 states
    double stage = 0.0;
    double penalty = 0.0;
    double value() const { return stage - penalty; }
  };

  Rollout rollout(const Vec& x, double weight) const {
    check(x);
    const int n = items();
    Rollout r;
    r.I.reserve(N_ + 1);
    r.I.push_back(I0_);
    for (int k = 0; k < N_; ++k) {
      const Vec p = price(x, k);
      const Vec rho2 = replenishment(x, k);
      const Vec& inv = r.I.back();
      const Vec sa = demand(m_, smooth_floor(inv), p);
      const Vec fa = (rho2 - sa) * sigma_[k];
      const Vec pred = inv + h_ * fa;
      const Vec sb = demand(m_, smooth_floor(pred), p);
      const Vec fb = (rho2 - sb) * sigma_[k + 1];
      const double cost = m_.unit_cost().dot(rho2);
      r.stage += 0.5 * h_ * (sigma_[k] * (p.dot(sa) - cost) + sigma_[k + 1] * (p.dot(sb) - cost));
      r.I.push_back(inv + 0.5 * h_ * (fa + fb));
    }
    const Vec dev = (r.I.back() - target_).cwiseQuotient(ref_);
    r.penalty = weight * dev.squaredNorm();
    (void)n;
    return r;
  }

  double value(const Vec& x, double weight) const { return rollout(x, weight).value(); }

  // Penalized value; `grad` receives its gradient and `costate` (if given)
  // the derivative of the penalized value with respect to each I_k.
  double value_and_gradient(const Vec& x, double weight, Vec& grad,
                            std::vector<Vec>* costate = nullptr) const {
    const Rollout r = rollout(x, weight);
    Mat terminal(items(), 1);
    terminal.col(0) = -2.0 * weight * (r.I.back() - target_).cwiseQuotient(ref_.cwiseProduct(ref_));
    Mat g;
    sweep(x, r, terminal, Vec::Ones(1), g, costate);
    grad = g.col(0);
    return r.value();
  }

  // Gradient of the penalized value (column 0) together with the Jacobian of
  // the scaled terminal deviation (I_N - target) / I_ref (columns 1..n), from
  // one reverse sweep.
  double value_gradient_and_terminal(const Vec& x, double weight, Mat& out) const {
    const Rollout r = rollout(x, weight);
    const int n = items();
    Mat terminal = Mat::Zero(n, n + 1);
    terminal.col(0) = -2.0 * weight * (r.I.back() - target_).cwiseQuotient(ref_.cwiseProduct(ref_));
    terminal.rightCols(n) = ref_.cwiseInverse().asDiagonal();
    Vec stage_weight = Vec::Zero(n + 1);
    stage_weight(0) = 1.0;
    sweep(x, r, terminal, stage_weight, out, nullptr);
    return r.value();
  }

  /// Constant sell-out price for markdown (stock I0 sold at constant price
  /// with inventory effect evaluated at I0 / 2), the one-item Lerner price
  /// for replenishment (cost x 1.5 when gamma_ii >= -1). rho starts at
  /// sqrt(S) so replenishment balances demand.
  Vec initial_point() const {
    const int n = items();
    Vec logp(n);
    if (kind_ == ProblemKind::Markdown) {
      const Vec target_sales = I0_;
      const Vec rhs = target_sales.array().log().matrix() - m_.base_demand().array().log().matrix() -
                      m_.alpha() * (0.5 * I0_).array().log().matrix();
      bool ok = true;
      Vec sol;
      try {
        sol = solve_checked(m_.gamma(), rhs, "initial price");
      } catch (const NumericalError&) {
        ok = false;
      }
      if (ok && m_.kind() == DemandKind::ConstantElasticity) {
        logp = sol;
      } else if (ok && sol.minCoeff() > 0.0) {
        logp = sol.array().log().matrix();
      } else {
        for (int i = 0; i < n; ++i) {
          const double g = m_.gamma()(i, i);
          const double scale = m_.kind() == DemandKind::ConstantElasticity ? rhs(i) / g : std::log(std::abs(rhs(i) / g) + 1.0);
          logp(i) = std::isfinite(scale) ? scale : 0.0;
        }
      }
    } else {
      for (int i = 0; i < n; ++i) {
        const double g = m_.gamma()(i, i);
        const double c = m_.unit_cost()(i);
        const double base = c > 0.0 ? c : 1.0;
        const double p = (g < -1.0 && c > 0.0) ? g * c / (g + 1.0) : 1.5 * base;
        logp(i) = std::log(p);
      }
    }
    Vec x(dim());
    const Vec s = demand(m_, I0_, logp.array().exp().matrix());
    for (int k = 0; k < N_; ++k) {
      x.segment(k * stride(), n) = logp;
      if (kind_ == ProblemKind::Replenishment) x.segment(k * stride() + n, n) = s.cwiseSqrt();
    }
    return x;
  }

  /// Terminal multiplier estimate nu minimizing |g_stage + A nu| with A the
  /// Jacobian of the scaled terminal deviation: the first-order multiplier of
  /// I_N = target. The penalty gradient tends to it only as W grows, and is
  /// zero at an exactly feasible point.
  Vec terminal_multiplier(const Vec& x) const {
    const int n = items();
    Mat grads;
    value_gradient_and_terminal(x, 0.0, grads);
    const Mat a = grads.rightCols(n);
    Mat gram = a.transpose() * a;
    gram.diagonal().array() += 1e-14 * std::max(gram.trace(), 1e-300);
    return -gram.ldlt().solve(a.transpose() * grads.col(0));
  }

  /// Node trajectory: node prices are geometric means of the adjacent interval
  /// prices, rho2 their arithmetic mean, lambda = -dL/dI_k for the Lagrangian
  /// with the estimated terminal multiplier.
  Trajectory trajectory(const Vec& x) const {
    const Rollout r = rollout(x, 0.0);
    Mat terminal(items(), 1);
    terminal.col(0) = terminal_multiplier(x).cwiseQuotient(ref_);
    Mat g;
    std::vector<Vec> costate;
    sweep(x, r, terminal, Vec::Ones(1), g, &costate);
    Trajectory tr;
    tr.grid = grid_;
    tr.sigma = sigma_;
    for (int k = 0; k <= N_; ++k) {
      const int lo = std::max(k - 1, 0), hi = std::min(k, N_ - 1);
      const Vec logp = 0.5 * (x.segment(lo * stride(), items()) + x.segment(hi * stride(), items()));
      const Vec p = logp.array().exp().matrix();
      const Vec rho2 = 0.5 * (replenishment(x, lo) + replenishment(x, hi));
      const Vec s = demand(m_, smooth_floor(r.I[k]), p);
      tr.tau.push_back(k == N_ ? 0.0 : 1.0 - season_.cumulative(grid_[k]));
      tr.states.push_back(make_snapshot(m_, grid_[k], r.I[k], p, s, -costate[k], rho2));
    }
    tr.objective = r.stage;
    return tr;
  }

  double constraint_violation(const Rollout& r) const {
    return max_abs((r.I.back() - target_).cwiseQuotient(ref_));
  }

 private:
  void check(const Vec& x) const {
    if (x.size() != dim()) throw DomainError("transcription: control vector has the wrong size");
  }
  Vec price(const Vec& x, int k) const {
    return x.segment(k * stride(), items()).array().exp().matrix();
  }
  Vec replenishment(const Vec& x, int k) const {
    if (kind_ == ProblemKind::Markdown) return Vec::Zero(items());
    return x.segment(k * stride() + items(), items()).array().square().matrix();
  }

  // Reverse recursion through the Heun step. Column j carries the terminal
  // costate terminal.col(j) and counts the stage objective with weight
  // stage_weight(j); grads.col(j) receives d/dx. costate (column 0) is d/dI_k.
  void sweep(const Vec& x, const Rollout& r, const Mat& terminal, const Vec& stage_weight, Mat& grads,
             std::vector<Vec>* costate) const {
    const int n = items();
    const int cols = static_cast<int>(terminal.cols());
    grads.setZero(dim(), cols);
    Mat beta = terminal;
    if (costate) {
      costate->assign(N_ + 1, Vec());
      (*costate)[N_] = beta.col(0);
    }
    for (int k = N_ - 1; k >= 0; --k) {
      const Vec p = price(x, k);
      const Vec rho2 = replenishment(x, k);
      const Vec& inv = r.I[k];
      const double sa_w = sigma_[k], sb_w = sigma_[k + 1];
      const Vec sa = demand(m_, smooth_floor(inv), p);
      const DemandJacobians ja = floored_jacobians(inv, p);
      const Vec pred = inv + h_ * (rho2 - sa) * sa_w;
      const Vec sb = demand(m_, smooth_floor(pred), p);
      const DemandJacobians jb = floored_jacobians(pred, p);
      for (int j = 0; j < cols; ++j) {
        const double w = stage_weight(j);
        const Vec b = beta.col(j);
        const Vec pm = w * p - b;
        const Vec b_pred = sb_w * 0.5 * h_ * (jb.dS_dI.transpose() * pm);
        grads.col(j).segment(k * stride(), n) =
            p.cwiseProduct(0.5 * h_ * sa_w * (w * sa + ja.dS_dp.transpose() * pm) -
                           h_ * sa_w * (ja.dS_dp.transpose() * b_pred) +
                           0.5 * h_ * sb_w * (w * sb + jb.dS_dp.transpose() * pm));
        if (kind_ == ProblemKind::Replenishment) {
          const Vec rho = x.segment(k * stride() + n, n);
          grads.col(j).segment(k * stride() + n, n) = 2.0 * rho.cwiseProduct(
              0.5 * h_ * (sa_w + sb_w) * (b - w * m_.unit_cost()) + h_ * sa_w * b_pred);
        }
        beta.col(j) = b + b_pred + sa_w * (ja.dS_dI.transpose() * (0.5 * h_ * pm - h_ * b_pred));
      }
      if (costate) (*costate)[k] = beta.col(0);
    }
  }

  // Demand sees a smoothed max(I, eps): eps + (d + sqrt(d^2 + 4 eps^2)) / 2
  // with d = I - eps. Like the hard clamp it holds demand at the floor level
  // once inventory overshoots zero, but without the kink the terminal
  // penalty would otherwise push the last predictor onto.
  Vec smooth_floor(const Vec& inv) const {
    Vec out(inv.size());
    const double e2 = 4.0 * floor_ * floor_;
    for (Eigen::Index i = 0; i < inv.size(); ++i) {
      const double d = inv(i) - floor_, r = std::sqrt(d * d + e2);
      out(i) = floor_ + (d >= 0.0 ? 0.5 * (d + r) : 0.5 * e2 / (r - d));
    }
    return out;
  }
  DemandJacobians floored_jacobians(const Vec& inv, const Vec& p) const {
    DemandJacobians j = demand_jacobians(m_, smooth_floor(inv), p);
    Vec slope(inv.size());
    const double e2 = 4.0 * floor_ * floor_;
    for (Eigen::Index i = 0; i < inv.size(); ++i) {
      const double d = inv(i) - floor_, r = std::sqrt(d * d + e2);
      slope(i) = d >= 0.0 ? 0.5 * (1.0 + d / r) : 0.5 * e2 / (r * (r - d));
    }
    j.dS_dI = j.dS_dI * slope.asDiagonal();
    return j;
  }

  ModelParams m_;
  Vec I0_, target_, ref_;
  Seasonality season_;
  int N_;
  ProblemKind kind_;
  double h_ = 0.0;
  std::vector<double> sigma_, grid_;
  double floor_ = 0.0;
};

/// Largest relative disagreement between the analytic gradient and central
/// differences, max_j |fd_j - g_j| / |g|_inf, over the coordinates `coords`
/// (all when empty).
inline double gradient_check(const TranscribedProblem& prob, const Vec& x, double weight,
                             std::vector<int> coords = {}, double rel_step = 1e-6) {
  Vec g;
  prob.value_and_gradient(x, weight, g);
  if (coords.empty())
    for (int j = 0; j < prob.dim(); ++j) coords.push_back(j);
  const double gmax = std::max(max_abs(g), 1e-300);
  double worst = 0.0;
  for (int j : coords) {
    const double step = rel_step * std::max(1.0, std::abs(x(j)));
    Vec xp = x, xm = x;
    xp(j) += step;
    xm(j) -= step;
    const double fd = (prob.value(xp, weight) - prob.value(xm, weight)) / (2.0 * step);
    worst = std::max(worst, std::abs(fd - g(j)) / gmax);
  }
  return worst;
}

/// Directional version: |D_d J - g.d| / |g|_2 |d|_2 along `dirs` unit
/// directions. Cheap enough to run inside a solve.
inline double directional_gradient_check(const TranscribedProblem& prob, const Vec& x, double weight,
                                         const std::vector<Vec>& dirs, double step = 1e-5) {
  Vec g;
  prob.value_and_gradient(x, weight, g);
  const double gnorm = std::max(g.norm(), 1e-300);
  double worst = 0.0;
  for (const Vec& d0 : dirs) {
    const Vec d = d0 / d0.norm();
    const double fd = (prob.value(x + step * d, weight) - prob.value(x - step * d, weight)) / (2.0 * step);
    worst = std::max(worst, std::abs(fd - g.dot(d)) / gnorm);
  }
  return worst;
}

namespace detail {

struct Box {
  Vec lo, hi;
  Vec project(Vec x) const { return x.cwiseMax(lo).cwiseMin(hi); }
};

// Gradient with components pointing out of the box removed.
inline Vec projected_gradient(const Vec& x, const Vec& g, const Box& box) {
  Vec pg = g;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if ((x(j) <= box.lo(j) && g(j) < 0.0) || (x(j) >= box.hi(j) && g(j) > 0.0)) pg(j) = 0.0;
  }
  return pg;
}

// Projected gradient with its component along the terminal-constraint
// normals (columns of a) removed: the stationarity residual of the
// constrained transcription, which the penalty gradient cannot pollute.
inline Vec reduced_gradient(const Vec& pg, Mat a) {
  for (Eigen::Index j = 0; j < pg.size(); ++j)
    if (pg(j) == 0.0) a.row(j).setZero();
  Mat gram = a.transpose() * a;
  gram.diagonal().array() += 1e-14 * std::max(gram.trace(), 1e-300);
  return pg - a * gram.ldlt().solve(a.transpose() * pg);
}

inline SolverResult run_solver(const TranscribedProblem& prob, const SolverConfig& cfg,
                               const Vec* start = nullptr, Vec* x_out = nullptr) {
  cfg.validate();
  const int n = prob.items();
  const Vec x_init = prob.initial_point();
  Vec x = start ? *start : x_init;
  Box box;
  box.lo = Vec::Constant(x.size(), -std::numeric_limits<double>::infinity());
  box.hi = Vec::Constant(x.size(), std::numeric_limits<double>::infinity());
  const double span = std::log(cfg.price_bound_factor);
  for (int k = 0; k < prob.intervals(); ++k)
    for (int i = 0; i < n; ++i) {
      const int j = k * prob.stride() + i;
      box.lo(j) = x_init(j) - span;
      box.hi(j) = x_init(j) + span;
    }

  x = box.project(x);
  const double j_ref = std::max(std::abs(prob.rollout(x_init, 0.0).stage), 1e-12);
  SolverResult res;

  if (cfg.verify_gradient) {
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<Vec> dirs;
    for (int d = 0; d < 3; ++d) {
      Vec v(x.size());
      for (Eigen::Index j = 0; j < v.size(); ++j) v(j) = nd(rng);
      dirs.push_back(v);
    }
    Vec g;
    prob.value_and_gradient(x, cfg.penalty_initial * j_ref, g);
    if (g.norm() > 0.0) dirs.push_back(g);
    res.gradient_check_error = directional_gradient_check(prob, x, cfg.penalty_initial * j_ref, dirs);
  }

  // Each round ascends the penalized objective along d = (mu + 2W A A^T)^-1 g
  // restricted to free variables, where A is the Jacobian of the scaled
  // terminal deviation and 1/mu the Barzilai-Borwein step. The low-rank term
  // absorbs the penalty curvature so the step is not throttled as W grows.
  double weight = cfg.penalty_initial * j_ref;
  double rel_grad = 0.0;
  for (int round = 0; round < cfg.penalty_rounds; ++round) {
    const bool last = round + 1 == cfg.penalty_rounds;
    const double round_tol = last ? cfg.tol : cfg.tol * 100.0;
    Mat grads;
    double f = prob.value_gradient_and_terminal(x, weight, grads);
    Vec pg = projected_gradient(x, grads.col(0), box);
    double step = cfg.initial_step / std::max(max_abs(pg), 1e-300);
    Vec x_prev, pg_prev;
    for (int it = 0; it < cfg.max_iters; ++it) {
      rel_grad = reduced_gradient(pg, grads.rightCols(n)).norm() / std::max(std::abs(f), j_ref);
      if (rel_grad <= round_tol) break;
      if (it > 0) {
        const Vec s = x - x_prev;
        const Vec y = pg_prev - pg;  // ascent: negated gradient difference
        const double sy = s.dot(y);
        step = sy > 0.0 ? s.squaredNorm() / sy : step * 2.0;
      }
      Mat a = grads.rightCols(n);
      for (Eigen::Index j = 0; j < pg.size(); ++j)
        if (pg(j) == 0.0 && grads(j, 0) != 0.0) a.row(j).setZero();
      const Mat small = Mat::Identity(n, n) / (2.0 * weight * step) + a.transpose() * a;
      const Vec dir = pg - a * small.ldlt().solve(a.transpose() * pg);

      // Armijo backtracking by halving.
      const Vec& g = grads.col(0);
      Vec x_new;
      double f_new = f;
      bool accepted = false;
      double t = std::min(step, cfg.max_step / std::max(max_abs(dir), 1e-300));
      for (int bt = 0; bt < 60; ++bt) {
        x_new = box.project(x + t * dir);
        const double predicted = g.dot(x_new - x);
        if (!(predicted > 0.0)) break;
        f_new = prob.value(x_new, weight);
        if (std::isfinite(f_new) && f_new >= f + cfg.armijo * predicted) {
          accepted = true;
          break;
        }
        t *= 0.5;
      }
      ++res.iterations;
      if (!accepted) break;
      x_prev = x;
      pg_prev = pg;
      x = x_new;
      f = prob.value_gradient_and_terminal(x, weight, grads);
      pg = projected_gradient(x, grads.col(0), box);
    }
    rel_grad = reduced_gradient(pg, grads.rightCols(n)).norm() / std::max(std::abs(f), j_ref);
    if (!last) weight *= cfg.penalty_growth;
  }

  const auto roll = prob.rollout(x, weight);
  res.trajectory = prob.trajectory(x);
  res.objective = roll.stage;
  res.gradient_norm = rel_grad;
  res.constraint_violation = prob.constraint_violation(roll);
  for (int k = 0; k < prob.intervals() && !res.bound_active; ++k)
    for (int i = 0; i < n; ++i) {
      const int j = k * prob.stride() + i;
      if (x(j) <= box.lo(j) || x(j) >= box.hi(j)) res.bound_active = true;
    }
  res.converged = rel_grad <= cfg.tol && res.constraint_violation <= cfg.constraint_tol;
  std::ostringstream os;
  os << (res.converged ? "converged" : "not converged") << ": relative gradient " << rel_grad
     << ", constraint violation " << res.constraint_violation << ", iterations " << res.iterations;
  if (res.bound_active) os << "; price bound active (no interior optimum found)";
  res.message = os.str();
  if (x_out) *x_out = x;
  return res;
}

}  // namespace detail

/// Markdown: sell I0 down to zero over the seasonality horizon.
inline SolverResult solve_md(const ModelParams& m, const Vec& I0, const Seasonality& season,
                             const SolverConfig& cfg = {}) {
  cfg.validate();
  TranscribedProblem prob(m, I0, Vec::Zero(m.n()), I0, season, cfg.N, ProblemKind::Markdown);
  return detail::run_solver(prob, cfg);
}

/// Replenishment: I(0) = I(T) = I_bounds with free nonnegative restocking.
inline SolverResult solve_cr(const ModelParams& m, const Vec& I_bounds, const Seasonality& season,
                             const SolverConfig& cfg = {}) {
  cfg.validate();
  TranscribedProblem prob(m, I_bounds, I_bounds, I_bounds, season, cfg.N, ProblemKind::Replenishment);
  return detail::run_solver(prob, cfg);
}

struct TrajectoryComparison {
  double sup_rel_dev_p = 0.0;
  double sup_rel_dev_I = 0.0;
  double obj_rel_dev = 0.0;
};

namespace detail {

inline Vec interpolate_state(const Trajectory& tr, double t, Vec StateSnapshot::*field) {
  const auto& g = tr.grid;
  if (t <= g.front()) return tr.states.front().*field;
  if (t >= g.back()) return tr.states.back().*field;
  const auto it = std::upper_bound(g.begin(), g.end(), t);
  const std::size_t k = static_cast<std::size_t>(std::distance(g.begin(), it));
  const double w = (t - g[k - 1]) / (g[k] - g[k - 1]);
  return (1.0 - w) * (tr.states[k - 1].*field) + w * (tr.states[k].*field);
}

}  // namespace detail

/// Sup relative deviations of b from a over grid points of a with
/// t <= (1 - exclude_tail_frac) T; b is linearly interpolated onto a's grid.
inline TrajectoryComparison compare_trajectories(const Trajectory& a, const Trajectory& b,
                                                 double exclude_tail_frac) {
  validate_trajectory(a);
  validate_trajectory(b);
  if (a.size() == 0 || b.size() == 0) throw DomainError("compare: empty trajectory");
  if (a.items() != b.items()) throw DomainError("compare: item counts differ");
  if (!(exclude_tail_frac >= 0.0 && exclude_tail_frac < 1.0))
    throw DomainError("compare: tail fraction must lie in [0, 1)");
  const double t0 = a.grid.front();
  const double cutoff = t0 + (1.0 - exclude_tail_frac) * (a.grid.back() - t0);
  TrajectoryComparison c;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double t = a.grid[k];
    if (t > cutoff) break;
    const Vec pb = detail::interpolate_state(b, t, &StateSnapshot::p);
    const Vec ib = detail::interpolate_state(b, t, &StateSnapshot::I);
    const auto& s = a.states[k];
    for (int i = 0; i < a.items(); ++i) {
      c.sup_rel_dev_p = std::max(c.sup_rel_dev_p, std::abs(pb(i) - s.p(i)) / std::abs(s.p(i)));
      if (s.I(i) != 0.0)
        c.sup_rel_dev_I = std::max(c.sup_rel_dev_I, std::abs(ib(i) - s.I(i)) / std::abs(s.I(i)));
    }
  }
  c.obj_rel_dev = a.objective != 0.0 ? std::abs(b.objective - a.objective) / std::abs(a.objective)
                                     : std::abs(b.objective);
  return c;
}

}  // namespace mdopt
