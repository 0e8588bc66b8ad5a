#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>
#include <vector>

#include "mdopt/errors.hpp"

namespace mdopt {

struct SeasonalityValue {
  double density;
  double cumulative;
};

/// Piecewise-linear seasonality density on [0, T], normalized to unit mass.
///
/// The cumulative is integrated exactly per segment, so it is a piecewise
/// quadratic with cumulative(0) = 0 and cumulative(T) = 1.
class Seasonality {
 public:
  struct Knot {
    double t;
    double density;
  };

  // Knots must start at t = 0, be strictly increasing and carry nonnegative,
  // finite densities with positive total mass. The horizon is the last knot.
  explicit Seasonality(std::vector<Knot> knots) : knots_(std::move(knots)) {
    if (knots_.size() < 2) throw DomainError("seasonality: need at least two knots");
    for (std::size_t i = 0; i < knots_.size(); ++i) {
      const auto& k = knots_[i];
      if (!std::isfinite(k.t) || !std::isfinite(k.density)) {
        std::ostringstream os;
        os << "seasonality: knot " << i << " is not finite";
        throw DomainError(os.str());
      }
      if (k.density < 0.0) {
        std::ostringstream os;
        os << "seasonality: knot " << i << " has negative density " << k.density;
        throw DomainError(os.str());
      }
      if (i > 0 && !(k.t > knots_[i - 1].t)) {
        std::ostringstream os;
        os << "seasonality: knot times not strictly increasing at knot " << i;
        throw DomainError(os.str());
      }
    }
    if (knots_.front().t != 0.0) throw DomainError("seasonality: first knot must be at t = 0");

    prefix_.assign(knots_.size(), 0.0);
    for (std::size_t i = 1; i < knots_.size(); ++i) {
      const double dt = knots_[i].t - knots_[i - 1].t;
      prefix_[i] = prefix_[i - 1] + 0.5 * dt * (knots_[i].density + knots_[i - 1].density);
    }
    const double mass = prefix_.back();
    if (!(mass > 0.0)) throw DomainError("seasonality: density has zero mass");
    for (auto& k : knots_) k.density /= mass;
    for (auto& c : prefix_) c /= mass;
  }

  static Seasonality uniform(double horizon) {
    if (!(horizon > 0.0) || !std::isfinite(horizon))
      throw DomainError("seasonality: horizon must be positive and finite");
    return Seasonality({{0.0, 1.0}, {horizon, 1.0}});
  }

  double horizon() const { return knots_.back().t; }
  const std::vector<Knot>& knots() const { return knots_; }

  SeasonalityValue eval(double t) const {
    const double T = horizon();
    const double slack = 1e-12 * T;
    if (!(t >= -slack && t <= T + slack)) {
      std::ostringstream os;
      os << "seasonality: t = " << t << " outside [0, " << T << "]";
      throw DomainError(os.str());
    }
    t = std::clamp(t, 0.0, T);
    if (t == T) return {knots_.back().density, 1.0};
    const std::size_t i = segment(t);
    const auto& a = knots_[i];
    const auto& b = knots_[i + 1];
    const double width = b.t - a.t;
    const double d = t - a.t;
    const double slope = (b.density - a.density) / width;
    return {a.density + slope * d, prefix_[i] + a.density * d + 0.5 * slope * d * d};
  }

  double density(double t) const { return eval(t).density; }
  double cumulative(double t) const { return eval(t).cumulative; }

  // Smallest t with cumulative(t) = u, for u in [0, 1].
  double inverse_cumulative(double u) const {
    if (!(u >= 0.0 && u <= 1.0)) throw DomainError("seasonality: cumulative level outside [0, 1]");
    if (u == 0.0) return 0.0;
    if (u == 1.0) {
      // Trailing zero-density segments do not advance the cumulative.
      std::size_t i = knots_.size() - 1;
      while (i > 0 && prefix_[i - 1] >= 1.0) --i;
      return knots_[i].t;
    }
    auto it = std::lower_bound(prefix_.begin(), prefix_.end(), u);
    std::size_t i = static_cast<std::size_t>(std::distance(prefix_.begin(), it));
    i = std::clamp<std::size_t>(i, 1, knots_.size() - 1) - 1;
    const auto& a = knots_[i];
    const auto& b = knots_[i + 1];
    const double width = b.t - a.t;
    const double slope = (b.density - a.density) / width;
    const double need = u - prefix_[i];
    double d;
    if (std::abs(slope) * width <= 1e-14 * std::max(a.density, b.density)) {
      d = need / a.density;
    } else {
      // 0.5 slope d^2 + a.density d - need = 0, stable root.
      const double disc = std::max(0.0, a.density * a.density + 2.0 * slope * need);
      d = 2.0 * need / (a.density + std::sqrt(disc));
    }
    return std::clamp(a.t + d, a.t, b.t);
  }

 private:
  std::size_t segment(double t) const {
    auto it = std::upper_bound(knots_.begin(), knots_.end(), t,
                               [](double v, const Knot& k) { return v < k.t; });
    std::size_t i = static_cast<std::size_t>(std::distance(knots_.begin(), it));
    return std::clamp<std::size_t>(i, 1, knots_.size() - 1) - 1;
  }

  std::vector<Knot> knots_;
  std::vector<double> prefix_;
};

}  // namespace mdopt
