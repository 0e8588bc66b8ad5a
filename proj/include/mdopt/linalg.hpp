#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "mdopt/errors.hpp"

namespace mdopt {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Relative residual bound every accepted linear solve must meet.
inline constexpr double kSolveResidualTol = 1e-10;

// Singular values below this fraction of the largest are treated as zero.
inline constexpr double kRankTol = 1e-10;

inline double condition_number(const Mat& a) {
  Eigen::JacobiSVD<Mat> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 1.0;
  const double smin = s(s.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

inline int numerical_rank(const Mat& a, double rel_tol = kRankTol) {
  Eigen::JacobiSVD<Mat> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * s(0)) ++r;
  return r;
}

inline double relative_residual(const Mat& a, const Vec& x, const Vec& b) {
  const double scale = a.norm() * x.norm() + b.norm();
  if (scale == 0.0) return 0.0;
  return (a * x - b).norm() / scale;
}

// Solves a x = b with a pivoted LU and rejects the answer unless the residual
// is below kSolveResidualTol. `what` names the system in error messages.
inline Vec solve_checked(const Mat& a, const Vec& b, const std::string& what) {
  if (a.rows() != a.cols() || a.rows() != b.size())
    throw NumericalError(what + ": dimension mismatch");
  Eigen::FullPivLU<Mat> lu(a);
  if (!lu.isInvertible()) {
    std::ostringstream os;
    os << what << ": singular matrix (condition number " << condition_number(a) << ")";
    throw NumericalError(os.str());
  }
  Vec x = lu.solve(b);
  const double res = relative_residual(a, x, b);
  if (!(res <= kSolveResidualTol)) {
    std::ostringstream os;
    os << what << ": residual " << res << " exceeds " << kSolveResidualTol
       << " (condition number " << condition_number(a) << ")";
    throw NumericalError(os.str());
  }
  return x;
}

inline double max_abs(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

inline double geometric_mean(const Vec& v) { return std::exp(v.array().log().mean()); }

inline bool all_finite(const Vec& v) { return v.allFinite(); }

}  // namespace mdopt
