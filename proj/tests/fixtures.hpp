#pragma once

#include <random>

#include "mdopt/model.hpp"
#include "mdopt/seasonality.hpp"
#include "mdopt/varsolve.hpp"

namespace fixtures {

using mdopt::DemandKind;
using mdopt::Mat;
using mdopt::ModelParams;
using mdopt::Vec;

inline Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

inline Mat mat2(double a, double b, double c, double d) {
  Mat m(2, 2);
  m << a, b, c, d;
  return m;
}

// Two-item markdown example: alpha = diag(0.5, 0.3), symmetric gamma, unit base demand.
inline ModelParams example_model() {
  return ModelParams(vec({1.0, 1.0}), mat2(-2.0, 0.25, 0.25, -1.5), mat2(0.5, 0.0, 0.0, 0.3), Vec::Zero(2),
                     DemandKind::ConstantElasticity);
}

// Replenishment instance whose alpha has rank one with a positive left null vector.
inline ModelParams replenishment_model() {
  return ModelParams(vec({1.0, 1.0}), mat2(-2.0, 0.25, 0.25, -1.5), mat2(1.0, -2.0, -0.5, 1.0), vec({1.0, 1.0}),
                     DemandKind::ConstantElasticity);
}

struct RandomInstance {
  ModelParams model;
  Vec I0;
  mdopt::ProblemKind kind;
};

// Diagonally dominant gamma, small negative cross inventory effects.
inline RandomInstance random_instance(std::uint64_t seed, int n, bool replenishment) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Mat g = Mat::Zero(n, n), a = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    g(i, i) = -1.5 - u(rng);
    a(i, i) = 0.2 + 0.5 * u(rng);
    for (int j = 0; j < n; ++j)
      if (i != j) {
        g(i, j) = 0.2 * u(rng);
        a(i, j) = -0.1 * u(rng);
      }
  }
  Vec s0(n), c(n), i0(n);
  for (int i = 0; i < n; ++i) {
    s0(i) = 5.0 + 10.0 * u(rng);
    c(i) = 0.5 + u(rng);
    i0(i) = 10.0 + 20.0 * u(rng);
  }
  const DemandKind kind = u(rng) < 0.5 ? DemandKind::ConstantElasticity : DemandKind::Exponential;
  return RandomInstance{ModelParams(s0, g, a, c, kind), i0,
                        replenishment ? mdopt::ProblemKind::Replenishment : mdopt::ProblemKind::Markdown};
}

inline mdopt::Seasonality bumpy_season() { return mdopt::Seasonality({{0.0, 1.0}, {0.5, 2.0}, {1.0, 0.5}}); }

inline mdopt::TranscribedProblem transcribe(const RandomInstance& r, int N) {
  const int n = r.model.n();
  const bool cr = r.kind == mdopt::ProblemKind::Replenishment;
  return mdopt::TranscribedProblem(r.model, r.I0, cr ? r.I0 : Vec::Zero(n), r.I0, bumpy_season(), N, r.kind);
}

// Initial point nudged off its structured values so no coordinate is special.
inline Vec jittered_start(const mdopt::TranscribedProblem& p, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  Vec x = p.initial_point();
  for (Eigen::Index j = 0; j < x.size(); ++j) x(j) += u(rng);
  return x;
}

}  // namespace fixtures
