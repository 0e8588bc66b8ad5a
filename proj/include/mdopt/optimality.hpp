#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mdopt/errors.hpp"
#include "mdopt/linalg.hpp"
#include "mdopt/model.hpp"

namespace mdopt {

/// Adjoint (flow-constraint multiplier) implied by price stationarity:
///   p + lambda = -[(dS/dp)^T]^-1 S.
inline Vec recover_lambda(const ModelParams& m, const StateSnapshot& s) {
  const Mat dsdp = s.S.asDiagonal() * elasticity_matrix(m, s.p) * s.p.cwiseInverse().asDiagonal();
  const Vec x = solve_checked(dsdp.transpose(), s.S, "recover_lambda: transposed price Jacobian");
  return -s.p - x;
}

struct HamiltonianValue {
  double multiplier_form;  // <c + lambda, rho2> - <p + lambda, S>
  double elasticity_form;  // -<p - c, rho2> + <R, G^-1 (1 - rho2 / S)>

  // The two forms coincide whenever lambda satisfies price stationarity.
  bool consistent(double rel_tol = 1e-8) const {
    const double scale = std::max({std::abs(multiplier_form), std::abs(elasticity_form), 1e-300});
    return std::abs(multiplier_form - elasticity_form) <= rel_tol * scale;
  }
};

inline HamiltonianValue hamiltonian_invariant(const ModelParams& m, const StateSnapshot& s) {
  const Vec& c = m.unit_cost();
  HamiltonianValue h{};
  h.multiplier_form = (c + s.lambda).dot(s.rho2) - (s.p + s.lambda).dot(s.S);
  const Mat g = elasticity_matrix(m, s.p);
  const Vec w = Vec::Ones(m.n()) - s.rho2.cwiseQuotient(s.S);
  const Vec gw = solve_checked(g, w, "hamiltonian: elasticity matrix");
  h.elasticity_form = -(s.p - c).dot(s.rho2) + s.R.dot(gw);
  return h;
}

/// -<R, G^-1 1>, with G the current elasticity matrix; constant on optimal
/// trajectories for both markdown and continuous replenishment.
inline double revenue_elasticity_invariant(const ModelParams& m, const StateSnapshot& s) {
  const Mat g = elasticity_matrix(m, s.p);
  const Vec x = solve_checked(g, Vec::Ones(m.n()), "revenue invariant: elasticity matrix");
  return -s.R.dot(x);
}

/// <S, gamma^-1 1>; the exponential-model specialization of the invariant above
/// (equal to minus it, since G = gamma diag(p)).
inline double exponential_sales_invariant(const ModelParams& m, const StateSnapshot& s) {
  const Vec x = solve_checked(m.gamma(), Vec::Ones(m.n()), "sales invariant: gamma");
  return s.S.dot(x);
}

struct ELResiduals {
  // Per grid point, one entry per item.
  std::vector<Vec> stationarity;
  std::vector<Vec> adjoint;
  std::vector<Vec> complementarity;
  // Per grid point, worst positive part of lambda.
  std::vector<double> sign_lambda;
  // Magnitudes the residuals are measured against: |p|_inf for stationarity,
  // max(|d lambda/dt|_inf, |rhs|_inf) for the adjoint equation.
  std::vector<double> stationarity_scale;
  std::vector<double> adjoint_scale;
};

// Largest residual entry over grid points [skip_head, size - skip_tail),
// optionally divided by a per-point scale.
inline double sup_norm(const std::vector<Vec>& series, const std::vector<double>* scale = nullptr,
                       std::size_t skip_head = 0, std::size_t skip_tail = 0) {
  double worst = 0.0;
  for (std::size_t k = skip_head; k + skip_tail < series.size(); ++k) {
    double v = max_abs(series[k]);
    if (scale) v /= std::max((*scale)[k], 1e-300);
    worst = std::max(worst, v);
  }
  return worst;
}

inline double sup_norm(const std::vector<double>& series, std::size_t skip_head = 0,
                       std::size_t skip_tail = 0) {
  double worst = 0.0;
  for (std::size_t k = skip_head; k + skip_tail < series.size(); ++k)
    worst = std::max(worst, std::abs(series[k]));
  return worst;
}

// Derivative of a sampled series at point k; three-point Lagrange formula on
// a nonuniform grid (central in the interior, one-sided at the ends).
inline Vec grid_derivative(const std::vector<double>& t, const std::vector<Vec>& y, std::size_t k) {
  const std::size_t n = t.size();
  std::size_t a, b, c;
  if (k == 0) {
    a = 0; b = 1; c = 2;
  } else if (k + 1 == n) {
    a = n - 3; b = n - 2; c = n - 1;
  } else {
    a = k - 1; b = k; c = k + 1;
  }
  const double x = t[k], xa = t[a], xb = t[b], xc = t[c];
  const double wa = ((x - xb) + (x - xc)) / ((xa - xb) * (xa - xc));
  const double wb = ((x - xa) + (x - xc)) / ((xb - xa) * (xb - xc));
  const double wc = ((x - xa) + (x - xb)) / ((xc - xa) * (xc - xb));
  return wa * y[a] + wb * y[b] + wc * y[c];
}

/// Residuals of the first-order optimality system along a trajectory:
/// price stationarity, the adjoint equation d lambda/dt = sigma (dS/dI)^T (p + lambda),
/// complementarity min(|lambda + c|, |rho|) and the sign condition lambda <= 0.
inline ELResiduals el_residuals(const ModelParams& m, const Trajectory& tr) {
  validate_trajectory(tr);
  if (tr.size() < 3) throw DomainError("el_residuals: need at least 3 grid points");
  if (tr.sigma.size() != tr.size())
    throw DomainError("el_residuals: trajectory carries no seasonality density");

  const EvalOptions opt{inventory_floor_for(tr.states.front().I)};
  const std::size_t n = tr.size();
  std::vector<Vec> lambdas;
  lambdas.reserve(n);
  for (const auto& s : tr.states) lambdas.push_back(s.lambda);

  ELResiduals r;
  r.stationarity.reserve(n);
  r.adjoint.reserve(n);
  r.complementarity.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& s = tr.states[k];
    const Mat dsdp = s.S.asDiagonal() * elasticity_matrix(m, s.p) * s.p.cwiseInverse().asDiagonal();
    const Vec shift = solve_checked(dsdp.transpose(), s.S, "el_residuals: transposed price Jacobian");
    r.stationarity.push_back(s.p + s.lambda + shift);
    r.stationarity_scale.push_back(max_abs(s.p));

    const Vec ie = detail::effective_inventory(m, s.I, opt);
    Vec inv_scale = ie.cwiseInverse();
    for (Eigen::Index i = 0; i < ie.size(); ++i)
      if (s.I(i) < opt.inventory_floor) inv_scale(i) = 0.0;
    const Mat dsdi = s.S.asDiagonal() * m.alpha() * inv_scale.asDiagonal();
    const Vec rhs = tr.sigma[k] * (dsdi.transpose() * (s.p + s.lambda));
    const Vec dl = grid_derivative(tr.grid, lambdas, k);
    r.adjoint.push_back(dl - rhs);
    r.adjoint_scale.push_back(std::max(max_abs(dl), max_abs(rhs)));

    const Vec rho = s.rho2.cwiseMax(0.0).cwiseSqrt();
    r.complementarity.push_back((s.lambda + m.unit_cost()).cwiseAbs().cwiseMin(rho));
    r.sign_lambda.push_back(std::max(0.0, s.lambda.maxCoeff()));
  }
  return r;
}

struct LernerCheck {
  Vec residual;   // G^T P + R; zero under the generalized inverse-elasticity rule
  bool feasible;  // (1 + (G^T)^-1) R >= 0 componentwise
};

inline LernerCheck lerner_rule_check(const ModelParams& m, const StateSnapshot& s) {
  const Mat g = elasticity_matrix(m, s.p);
  LernerCheck out;
  out.residual = g.transpose() * s.P + s.R;
  const Vec x = s.R + solve_checked(g.transpose(), s.R, "lerner check: transposed elasticity");
  const double slack = 1e-12 * max_abs(s.R);
  out.feasible = (x.array() >= -slack).all();
  return out;
}

/// alpha^T P; must vanish for a continuous-replenishment equilibrium.
inline Vec degeneracy_check(const ModelParams& m, const StateSnapshot& s) {
  return m.alpha().transpose() * s.P;
}

struct MatrixConditions {
  Mat gamma;
  bool diag_dominant = false;

  // "Highly negative" on a concrete revenue vector: (1 + (G^T)^-1) R >= 0.
  bool highly_negative_on(const Vec& revenue) const {
    const Vec x = revenue + solve_checked(gamma.transpose(), revenue, "highly negative: gamma^T");
    const double slack = 1e-12 * max_abs(revenue);
    return (x.array() >= -slack).all();
  }
};

inline MatrixConditions matrix_conditions(const Mat& gamma) {
  if (gamma.rows() != gamma.cols()) throw DomainError("matrix conditions: gamma must be square");
  if (!std::isfinite(condition_number(gamma)) || condition_number(gamma) > 1e14) {
    std::ostringstream os;
    os << "matrix conditions: gamma^T is singular (condition number " << condition_number(gamma) << ")";
    throw NumericalError(os.str());
  }
  MatrixConditions mc;
  mc.gamma = gamma;
  mc.diag_dominant = true;
  for (Eigen::Index i = 0; i < gamma.rows(); ++i) {
    double off = 0.0;
    for (Eigen::Index j = 0; j < gamma.cols(); ++j)
      if (j != i) off += std::abs(gamma(i, j));
    if (!(gamma(i, i) < 0.0) || !(off < std::abs(gamma(i, i)))) mc.diag_dominant = false;
  }
  return mc;
}

// ---------------------------------------------------------------------------
// Invariance reports

struct InvariantReport {
  std::string name;
  std::vector<double> values;
  double max_rel_dev = 0.0;
  bool pass = false;
};

// Portion of the horizon a report is judged on, as fractions trimmed from
// each end. Values are still reported for every grid point.
struct ReportWindow {
  double head_fraction = 0.0;
  double tail_fraction = 0.0;
};

inline constexpr double kRelDevFloor = 1e-12;

inline double max_relative_deviation(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double lo = v.front(), hi = v.front(), sum = 0.0;
  for (double x : v) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
    sum += x;
  }
  const double mean = sum / static_cast<double>(v.size());
  return (hi - lo) / std::max(std::abs(mean), kRelDevFloor);
}

inline const std::vector<std::string>& known_invariants() {
  static const std::vector<std::string> names = {
      "hamiltonian", "hamiltonian_elasticity", "revenue_elasticity", "exponential_sales", "revenue",
      "sales"};
  return names;
}

// Invariants that apply to a model: the Hamiltonian in both forms and the
// revenue/elasticity invariant always; the sales invariant for exponential
// demand; per-item revenue (constant elasticity) or sales (exponential) for a
// single item.
inline std::vector<std::string> default_invariants(const ModelParams& m) {
  std::vector<std::string> out = {"hamiltonian", "hamiltonian_elasticity", "revenue_elasticity"};
  if (m.kind() == DemandKind::Exponential) out.push_back("exponential_sales");
  if (m.n() == 1) out.push_back(m.kind() == DemandKind::ConstantElasticity ? "revenue" : "sales");
  return out;
}

inline std::vector<InvariantReport> invariance_report(const ModelParams& m, const Trajectory& tr,
                                                      const std::vector<std::string>& which,
                                                      double tol, ReportWindow window = {}) {
  validate_trajectory(tr);
  std::vector<std::string> names;
  for (const auto& w : which) {
    if (w == "all") {
      for (auto& d : default_invariants(m)) names.push_back(d);
      continue;
    }
    if (std::find(known_invariants().begin(), known_invariants().end(), w) ==
        known_invariants().end())
      throw DomainError("invariance report: unknown invariant '" + w + "'");
    names.push_back(w);
  }

  std::vector<std::size_t> in_window;
  if (!tr.grid.empty()) {
    const double t0 = tr.grid.front(), t1 = tr.grid.back();
    const double lo = t0 + window.head_fraction * (t1 - t0);
    const double hi = t1 - window.tail_fraction * (t1 - t0);
    for (std::size_t k = 0; k < tr.size(); ++k)
      if (tr.grid[k] >= lo && tr.grid[k] <= hi) in_window.push_back(k);
  }

  auto finish = [&](std::string name, std::vector<double> values) {
    InvariantReport r;
    r.name = std::move(name);
    std::vector<double> judged;
    judged.reserve(in_window.size());
    for (auto k : in_window) judged.push_back(values[k]);
    r.values = std::move(values);
    r.max_rel_dev = max_relative_deviation(judged);
    r.pass = r.max_rel_dev <= tol;
    return r;
  };

  std::vector<InvariantReport> out;
  for (const auto& name : names) {
    if (name == "revenue" || name == "sales") {
      for (int i = 0; i < m.n(); ++i) {
        std::vector<double> v;
        v.reserve(tr.size());
        for (const auto& s : tr.states) v.push_back(name == "revenue" ? s.R(i) : s.S(i));
        out.push_back(finish(name + "_" + std::to_string(i + 1), std::move(v)));
      }
      continue;
    }
    std::vector<double> v;
    v.reserve(tr.size());
    for (const auto& s : tr.states) {
      if (name == "hamiltonian")
        v.push_back(hamiltonian_invariant(m, s).multiplier_form);
      else if (name == "hamiltonian_elasticity")
        v.push_back(hamiltonian_invariant(m, s).elasticity_form);
      else if (name == "revenue_elasticity")
        v.push_back(revenue_elasticity_invariant(m, s));
      else
        v.push_back(exponential_sales_invariant(m, s));
    }
    out.push_back(finish(name, std::move(v)));
  }
  return out;
}

}  // namespace mdopt
