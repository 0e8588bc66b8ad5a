#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mdopt/errors.hpp"
#include "mdopt/linalg.hpp"
#include "mdopt/seasonality.hpp"

namespace mdopt {

enum class DemandKind { ConstantElasticity, Exponential };

inline std::string_view to_string(DemandKind k) {
  return k == DemandKind::ConstantElasticity ? "constant_elasticity" : "exponential";
}

/// Multi-item demand model
///
///   constant elasticity:  log S = log S0 + alpha log I + gamma log p
///   exponential:          log S = log S0 + alpha log I + gamma p
///
/// Immutable after construction; the constructor enforces positive base demand,
/// nonnegative unit costs and n x n effect matrices.
class ModelParams {
 public:
  ModelParams(Vec base_demand, Mat gamma, Mat alpha, Vec unit_cost, DemandKind kind)
      : base_demand_(std::move(base_demand)),
        gamma_(std::move(gamma)),
        alpha_(std::move(alpha)),
        unit_cost_(std::move(unit_cost)),
        kind_(kind) {
    const auto n = base_demand_.size();
    if (n == 0) throw DomainError("model: item count must be positive");
    if (gamma_.rows() != n || gamma_.cols() != n) throw DomainError("model: gamma must be n x n");
    if (alpha_.rows() != n || alpha_.cols() != n) throw DomainError("model: alpha must be n x n");
    if (unit_cost_.size() != n) throw DomainError("model: unit cost must have n entries");
    if (!base_demand_.allFinite() || !gamma_.allFinite() || !alpha_.allFinite() ||
        !unit_cost_.allFinite())
      throw DomainError("model: parameters must be finite");
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!(base_demand_(i) > 0.0)) {
        std::ostringstream os;
        os << "model: base demand S0[" << i << "] = " << base_demand_(i) << " must be positive";
        throw DomainError(os.str());
      }
      if (unit_cost_(i) < 0.0) {
        std::ostringstream os;
        os << "model: unit cost c[" << i << "] = " << unit_cost_(i) << " must be nonnegative";
        throw DomainError(os.str());
      }
    }
  }

  int n() const { return static_cast<int>(base_demand_.size()); }
  const Vec& base_demand() const { return base_demand_; }
  const Mat& gamma() const { return gamma_; }
  const Mat& alpha() const { return alpha_; }
  const Vec& unit_cost() const { return unit_cost_; }
  DemandKind kind() const { return kind_; }

  ModelParams with_base_demand(Vec s0) const {
    return ModelParams(std::move(s0), gamma_, alpha_, unit_cost_, kind_);
  }

 private:
  Vec base_demand_;
  Mat gamma_;
  Mat alpha_;
  Vec unit_cost_;
  DemandKind kind_;
};

// Inventory floor used when evaluating demand near a sold-out state. A floor
// of zero means inventories must be strictly positive.
struct EvalOptions {
  double inventory_floor = 0.0;
};

// Floor for trajectories that run inventory down to zero: 1e-9 of the
// largest inventory seen.
inline double inventory_floor_for(const Vec& reference_inventory) {
  return 1e-9 * max_abs(reference_inventory);
}

namespace detail {

inline void check_dims(const ModelParams& m, const Vec& v, const char* what) {
  if (v.size() != m.n()) {
    std::ostringstream os;
    os << what << ": expected " << m.n() << " entries, got " << v.size();
    throw DomainError(os.str());
  }
}

inline void check_prices(const ModelParams& m, const Vec& p) {
  check_dims(m, p, "price");
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!(p(i) > 0.0) || !std::isfinite(p(i))) {
      std::ostringstream os;
      os << "price p[" << i << "] = " << p(i) << " must be positive and finite";
      throw DomainError(os.str());
    }
  }
}

// Returns the inventory actually used for evaluation, applying the floor.
inline Vec effective_inventory(const ModelParams& m, const Vec& inv, const EvalOptions& opt) {
  check_dims(m, inv, "inventory");
  Vec out = inv;
  for (Eigen::Index i = 0; i < inv.size(); ++i) {
    const double v = inv(i);
    if (!std::isfinite(v) || (opt.inventory_floor <= 0.0 && !(v > 0.0))) {
      std::ostringstream os;
      os << "inventory I[" << i << "] = " << v << " must be positive and finite";
      throw DomainError(os.str());
    }
    out(i) = std::max(v, opt.inventory_floor);
  }
  return out;
}

}  // namespace detail

/// Demand rate S(I, p); strictly positive.
inline Vec demand(const ModelParams& m, const Vec& inv, const Vec& p, EvalOptions opt = {}) {
  detail::check_prices(m, p);
  const Vec ie = detail::effective_inventory(m, inv, opt);
  Vec log_s = m.base_demand().array().log().matrix() + m.alpha() * ie.array().log().matrix();
  if (m.kind() == DemandKind::ConstantElasticity)
    log_s += m.gamma() * p.array().log().matrix();
  else
    log_s += m.gamma() * p;
  return log_s.array().exp().matrix();
}

/// Cross-elasticity matrix diag(S)^-1 dS/dp diag(p). Constant (gamma) for the
/// constant-elasticity model, gamma diag(p) for the exponential model.
inline Mat elasticity_matrix(const ModelParams& m, const Vec& p) {
  detail::check_prices(m, p);
  if (m.kind() == DemandKind::ConstantElasticity) return m.gamma();
  return m.gamma() * p.asDiagonal();
}

inline Mat inventory_effect_matrix(const ModelParams& m) { return m.alpha(); }

struct DemandJacobians {
  Mat dS_dp;
  Mat dS_dI;
};

// Jacobians of demand. When a floor clamps an inventory component, demand
// no longer depends on it and the matching column of dS_dI is zero.
inline DemandJacobians demand_jacobians(const ModelParams& m, const Vec& inv, const Vec& p,
                                        EvalOptions opt = {}) {
  const Vec s = demand(m, inv, p, opt);
  const Vec ie = detail::effective_inventory(m, inv, opt);
  DemandJacobians j;
  j.dS_dp = s.asDiagonal() * elasticity_matrix(m, p) * p.cwiseInverse().asDiagonal();
  Vec inv_scale = ie.cwiseInverse();
  for (Eigen::Index i = 0; i < inv.size(); ++i)
    if (inv(i) < opt.inventory_floor) inv_scale(i) = 0.0;
  j.dS_dI = s.asDiagonal() * m.alpha() * inv_scale.asDiagonal();
  return j;
}

/// Demand transferred from item i to item j as item i sells out. For the
/// constant-coefficient models alpha does not depend on inventory, so the
/// limit is alpha(i, j).
inline double demand_transference(const ModelParams& m, int i, int j) {
  if (i < 0 || j < 0 || i >= m.n() || j >= m.n()) {
    std::ostringstream os;
    os << "demand transference: index (" << i << ", " << j << ") out of range for n = " << m.n();
    throw DomainError(os.str());
  }
  return m.alpha()(i, j);
}

/// Per-time state of a price/inventory policy. Quantities are de-seasoned:
/// the inventory flow is dI/dt = (rho2 - S) sigma.
struct StateSnapshot {
  double t = 0.0;
  Vec I;
  Vec p;
  Vec S;
  Vec R;  // p * S
  Vec P;  // l * R
  Vec l;  // (p - c) / p
  Vec lambda;
  Vec rho2;
};

// Builds a snapshot from the primary quantities; R, l and P are derived so
// that R = p S and P = l R hold exactly.
inline StateSnapshot make_snapshot(const ModelParams& m, double t, Vec inv, Vec p, Vec s,
                                   Vec lambda, Vec rho2) {
  detail::check_prices(m, p);
  detail::check_dims(m, inv, "inventory");
  detail::check_dims(m, s, "demand");
  detail::check_dims(m, lambda, "lambda");
  detail::check_dims(m, rho2, "rho2");
  StateSnapshot snap;
  snap.t = t;
  snap.R = p.cwiseProduct(s);
  snap.l = (p - m.unit_cost()).cwiseQuotient(p);
  snap.P = snap.l.cwiseProduct(snap.R);
  snap.I = std::move(inv);
  snap.p = std::move(p);
  snap.S = std::move(s);
  snap.lambda = std::move(lambda);
  snap.rho2 = std::move(rho2);
  return snap;
}

/// Time-discretized policy. `tau` is 1 - cumulative seasonality and `sigma`
/// the seasonality density at each grid point; `sigma` may be empty for
/// trajectories read back from CSV.
struct Trajectory {
  std::vector<double> grid;
  std::vector<double> tau;
  std::vector<double> sigma;
  std::vector<StateSnapshot> states;
  double objective = 0.0;

  std::size_t size() const { return grid.size(); }
  int items() const { return states.empty() ? 0 : static_cast<int>(states.front().p.size()); }
};

inline void validate_trajectory(const Trajectory& tr) {
  const std::size_t n = tr.grid.size();
  if (tr.states.size() != n || tr.tau.size() != n || (!tr.sigma.empty() && tr.sigma.size() != n)) {
    std::ostringstream os;
    os << "trajectory: inconsistent lengths (grid " << n << ", states " << tr.states.size()
       << ", tau " << tr.tau.size() << ", sigma " << tr.sigma.size() << ")";
    throw DomainError(os.str());
  }
  for (std::size_t k = 1; k < n; ++k)
    if (!(tr.grid[k] > tr.grid[k - 1]))
      throw DomainError("trajectory: grid must be strictly increasing");
}

enum class ObjectiveMode { Profit, Revenue };

/// Trapezoidal quadrature of the objective integrand against sigma dt:
/// <p, S> - <c, rho2> for profit, <p, S> for revenue.
inline double objective(const ModelParams& m, const Trajectory& tr, ObjectiveMode mode) {
  validate_trajectory(tr);
  if (tr.sigma.size() != tr.grid.size())
    throw DomainError("objective: trajectory carries no seasonality density");
  auto integrand = [&](const StateSnapshot& s) {
    double v = s.p.dot(s.S);
    if (mode == ObjectiveMode::Profit) v -= m.unit_cost().dot(s.rho2);
    return v;
  };
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < tr.size(); ++k) {
    const double h = tr.grid[k + 1] - tr.grid[k];
    total += 0.5 * h *
             (tr.sigma[k] * integrand(tr.states[k]) + tr.sigma[k + 1] * integrand(tr.states[k + 1]));
  }
  return total;
}

/// Largest relative residual of dI/dt + (S - rho2) sigma at interior points,
/// with dI/dt from second-order differences on the (possibly nonuniform) grid.
/// Each residual is scaled by max(|S sigma|, |rho2 sigma|, |dI/dt|).
inline double flow_residual(const Trajectory& tr, std::size_t skip_head = 1, std::size_t skip_tail = 1) {
  validate_trajectory(tr);
  if (tr.sigma.size() != tr.grid.size())
    throw DomainError("flow residual: trajectory carries no seasonality density");
  double worst = 0.0;
  for (std::size_t k = std::max<std::size_t>(skip_head, 1); k + std::max<std::size_t>(skip_tail, 1) < tr.size(); ++k) {
    const double h0 = tr.grid[k] - tr.grid[k - 1];
    const double h1 = tr.grid[k + 1] - tr.grid[k];
    const Vec& a = tr.states[k - 1].I;
    const Vec& b = tr.states[k].I;
    const Vec& c = tr.states[k + 1].I;
    const Vec didt = (-h1 / (h0 * (h0 + h1))) * a + ((h1 - h0) / (h0 * h1)) * b + (h0 / (h1 * (h0 + h1))) * c;
    const auto& s = tr.states[k];
    const Vec flow = (s.S - s.rho2) * tr.sigma[k];
    for (Eigen::Index i = 0; i < didt.size(); ++i) {
      const double scale = std::max({std::abs(s.S(i) * tr.sigma[k]), std::abs(s.rho2(i) * tr.sigma[k]),
                                     std::abs(didt(i)), 1e-300});
      worst = std::max(worst, std::abs(didt(i) + flow(i)) / scale);
    }
  }
  return worst;
}

}  // namespace mdopt
