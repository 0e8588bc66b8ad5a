#pragma once

// Subcommand bodies for the mdopt binary. Each returns a process exit code and
// writes human-readable output to the given streams, so tests can drive them
// without spawning a process.

#include <cstdio>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mdopt/closedform.hpp"
#include "mdopt/io.hpp"
#include "mdopt/optimality.hpp"
#include "mdopt/varsolve.hpp"

namespace mdopt::cli {

using io::json;

enum ExitCode : int { kOk = 0, kInputError = 1, kHypothesis = 2, kNoConvergence = 3 };

// Maps library exceptions onto exit codes. A failed numerical precondition
// (singular matrix, residual check) counts as a violated hypothesis.
template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const DomainError& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const HypothesisViolation& e) {
    err << "hypothesis violated: " << e.what() << "\n";
    return kHypothesis;
  } catch (const NumericalError& e) {
    err << "hypothesis violated: " << e.what() << "\n";
    return kHypothesis;
  }
}

inline std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline std::string short_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

// ---------------------------------------------------------------------------
// solve

enum class Method { Closed, Numeric, Both };

struct SolveOptions {
  std::string config;
  Method method = Method::Both;
  std::optional<double> tol;
  std::optional<std::string> out;
  std::optional<int> grid;
  double compare_tail = 0.05;
};

namespace detail {

inline json invariant_summary(const ModelParams& m, const Trajectory& tr) {
  json out = json::object();
  const auto reports = invariance_report(m, tr, {"all"}, 0.0, ReportWindow{0.05, 0.05});
  for (const auto& r : reports) out[r.name] = r.max_rel_dev;
  return out;
}

struct ClosedOutcome {
  Trajectory trajectory;
  ModelParams model;
  Seasonality season;
  json result;
  Vec I0;  // initial (markdown) or equilibrium (replenishment) inventory
};

inline Seasonality resolve_season(const io::ModelDocument& doc, const io::RunConfig& cfg, bool required) {
  if (doc.seasonality) {
    if (cfg.boundary.T && std::abs(*cfg.boundary.T - doc.seasonality->horizon()) > 1e-12 * *cfg.boundary.T)
      throw InputError("/boundary/T: disagrees with the model's seasonality horizon");
    return *doc.seasonality;
  }
  if (cfg.boundary.T) return Seasonality::uniform(*cfg.boundary.T);
  if (required) throw InputError("/boundary: this problem needs a horizon T or a model seasonality block");
  return Seasonality::uniform(1.0);
}

inline bool has_horizon(const io::ModelDocument& doc, const io::RunConfig& cfg) {
  return doc.seasonality.has_value() || cfg.boundary.T.has_value();
}

inline Vec boundary_I0(const io::RunConfig& cfg, int n) {
  if (!cfg.boundary.I0) throw InputError("/boundary/I0: required here");
  if (cfg.boundary.I0->size() != n) {
    std::ostringstream os;
    os << "/boundary/I0: expected " << n << " entries, got " << cfg.boundary.I0->size();
    throw InputError(os.str());
  }
  return *cfg.boundary.I0;
}

inline double inventory_magnitude(const io::RunConfig& cfg, int n) {
  if (cfg.boundary.I0_geometric_mean) return *cfg.boundary.I0_geometric_mean;
  return geometric_mean(boundary_I0(cfg, n));
}

inline ClosedOutcome closed_markdown(const io::ModelDocument& doc, const io::RunConfig& cfg, const GridSpec& grid) {
  const ModelParams& m = doc.params;
  if (m.kind() != DemandKind::ConstantElasticity)
    throw HypothesisViolation("closed-form markdown needs the constant-elasticity model");
  MarkdownSolution sol = [&] {
    if (m.n() == 1) {
      const Vec I0 = boundary_I0(cfg, 1);
      return md_one_item(m.gamma()(0, 0), m.alpha()(0, 0), I0(0), m.base_demand()(0),
                         resolve_season(doc, cfg, true), grid);
    }
    if (!has_horizon(doc, cfg)) return md_multi(m, FixedInventory{boundary_I0(cfg, m.n())}, grid);
    if (cfg.boundary.I0 && !cfg.boundary.I0_geometric_mean)
      throw HypothesisViolation(
          "closed-form markdown cannot fix both the horizon and every initial inventory; "
          "give I0_geometric_mean or drop T");
    return md_multi(m, InventoryMagnitude{*cfg.boundary.I0_geometric_mean, resolve_season(doc, cfg, true)}, grid);
  }();
  json r = io::closed_form_json(sol);
  r["invariants"] = invariant_summary(sol.model, sol.trajectory);
  return ClosedOutcome{std::move(sol.trajectory), std::move(sol.model), std::move(sol.seasonality), std::move(r),
                       sol.form.I0};
}

inline ClosedOutcome closed_replenishment(const io::ModelDocument& doc, const io::RunConfig& cfg,
                                          const GridSpec& grid) {
  const ModelParams& m = doc.params;
  const Seasonality season = resolve_season(doc, cfg, true);
  if (m.n() == 1) cr_one_item(m.gamma()(0, 0), m.unit_cost()(0));
  const CREquilibrium eq = cr_multi(m, inventory_magnitude(cfg, m.n()));
  Trajectory tr = cr_trajectory(m, eq, season, grid);
  json r = io::equilibrium_json(eq);
  r["objective"] = tr.objective;
  r["invariants"] = invariant_summary(m, tr);
  return ClosedOutcome{std::move(tr), m, season, std::move(r), eq.I_star};
}

}  // namespace detail

inline int cmd_solve(const SolveOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    io::RunConfig cfg = io::load_config(opt.config);
    if (opt.tol) {
      if (!(*opt.tol > 0.0)) throw InputError("--tol: must be positive");
      cfg.solver.tol = *opt.tol;
    }
    if (opt.grid) {
      if (*opt.grid < 10) throw InputError("--grid: need at least 10 intervals");
      cfg.grid.intervals = *opt.grid;
      cfg.solver.N = *opt.grid;
    }
    const io::fs::path out_dir = opt.out ? io::fs::path(*opt.out) : io::output_dir(cfg);
    const io::ModelDocument doc = io::resolve_model(cfg);
    const int n = doc.params.n();
    const bool markdown = cfg.problem == io::Problem::Markdown;
    const GridSpec grid{cfg.grid.intervals, cfg.grid.graded};

    std::optional<detail::ClosedOutcome> closed;
    if (opt.method != Method::Numeric) {
      closed = markdown ? detail::closed_markdown(doc, cfg, grid) : detail::closed_replenishment(doc, cfg, grid);
      io::write_trajectory_csv(out_dir / "closed_trajectory.csv", closed->trajectory);
      io::write_atomic(out_dir / "closed_result.json", io::dump(closed->result));
      out << "closed form: objective " << io::fmt(closed->trajectory.objective) << "\n";
    }
    if (opt.method == Method::Closed) return kOk;

    // The numeric solve runs on the same problem the closed form describes.
    // A two-item markdown without a horizon gets its horizon (and per-unit-time
    // base demand) from the closed form.
    ModelParams model = doc.params;
    Seasonality season = Seasonality::uniform(1.0);
    Vec I0;
    const bool needs_closed_setup =
        markdown && (!detail::has_horizon(doc, cfg) || !cfg.boundary.I0) && n > 1;
    if (needs_closed_setup && !closed) closed = detail::closed_markdown(doc, cfg, grid);
    if (needs_closed_setup) {
      model = closed->model;
      season = closed->season;
      I0 = closed->I0;
    } else {
      season = detail::resolve_season(doc, cfg, true);
      if (cfg.boundary.I0) {
        I0 = detail::boundary_I0(cfg, n);
      } else if (closed) {
        I0 = closed->I0;
      } else if (!markdown) {
        I0 = Vec::Constant(n, *cfg.boundary.I0_geometric_mean);
      } else {
        throw InputError("/boundary/I0: the numeric markdown solve needs initial inventories");
      }
    }

    const SolverResult res = markdown ? solve_md(model, I0, season, cfg.solver) : solve_cr(model, I0, season, cfg.solver);
    json r = io::solver_result_json(res);
    if (res.converged) r["invariants"] = detail::invariant_summary(model, res.trajectory);
    io::write_trajectory_csv(out_dir / "numeric_trajectory.csv", res.trajectory);
    io::write_atomic(out_dir / "numeric_result.json", io::dump(r));
    out << "numeric: objective " << io::fmt(res.objective) << ", " << res.iterations << " iterations, "
        << (res.converged ? "converged" : "not converged") << "\n";

    if (closed) {
      const auto cmp = compare_trajectories(closed->trajectory, res.trajectory, opt.compare_tail);
      io::write_atomic(out_dir / "comparison.json", io::dump(io::comparison_json(cmp, opt.compare_tail)));
      out << "comparison: objective " << sci(cmp.obj_rel_dev) << ", price " << sci(cmp.sup_rel_dev_p)
          << ", inventory " << sci(cmp.sup_rel_dev_I) << " (relative)\n";
    }
    if (res.bound_active) {
      err << "hypothesis violated: no interior optimum; a price reached its search bound (" << res.message << ")\n";
      return kHypothesis;
    }
    if (!res.converged) {
      err << "solver did not converge: " << res.message << "\n";
      return kNoConvergence;
    }
    return kOk;
  });
}

// ---------------------------------------------------------------------------
// verify

struct VerifyOptions {
  std::string trajectory;
  std::string model;
  std::vector<std::string> invariants = {"all"};
  double tol = 1e-6;
  double window = 0.0;  // fraction trimmed from each end before judging
  std::optional<std::string> out;
};

inline int cmd_verify(const VerifyOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    if (!(opt.tol > 0.0)) throw InputError("--tol: must be positive");
    if (!(opt.window >= 0.0 && opt.window < 0.5)) throw InputError("--window: must lie in [0, 0.5)");
    const io::ModelDocument doc = io::load_model(opt.model);
    std::size_t mismatched = 0;
    const Trajectory tr = io::read_trajectory_csv(opt.trajectory, doc.params, &mismatched);
    if (mismatched > 0)
      err << "warning: " << mismatched << " rows have R columns that disagree with p S; R was recomputed\n";
    if (opt.invariants.empty()) {
      err << "warning: no invariants requested; nothing to check\n";
      out << "0 invariants checked\n";
      return kOk;
    }
    std::vector<InvariantReport> reports;
    try {
      reports = invariance_report(doc.params, tr, opt.invariants, opt.tol, ReportWindow{opt.window, opt.window});
    } catch (const DomainError& e) {
      throw InputError(e.what());
    }
    bool all = true;
    out << std::left << std::setw(24) << "invariant" << std::setw(14) << "max_rel_dev" << std::setw(12) << "tol"
        << "result\n";
    for (const auto& r : reports) {
      out << std::left << std::setw(24) << r.name << std::setw(14) << sci(r.max_rel_dev) << std::setw(12)
          << sci(opt.tol) << (r.pass ? "pass" : "FAIL") << "\n";
      if (!r.pass) {
        all = false;
        // Point at the grid row that strays furthest from the series mean.
        double mean = 0.0;
        for (double v : r.values) mean += v;
        mean /= static_cast<double>(r.values.size());
        std::size_t worst = 0;
        for (std::size_t k = 1; k < r.values.size(); ++k)
          if (std::abs(r.values[k] - mean) > std::abs(r.values[worst] - mean)) worst = k;
        out << "  largest departure at row " << worst + 1 << " (t = " << io::fmt(tr.grid[worst]) << ")\n";
      }
      if (opt.out) io::write_atomic(io::fs::path(*opt.out) / ("invariant_" + r.name + ".csv"), io::report_csv(r, tr));
    }
    return all ? kOk : kHypothesis;
  });
}

// ---------------------------------------------------------------------------
// reproduce-example

struct ExampleFixture {
  Mat alpha;
  Mat gamma;
  Vec I0;
  // Published figures.
  Vec mu;
  Vec theta_mu;
  Vec revenue_direction;
  double ratio;
  Vec R0;
  Vec p0;
  double T;
};

inline ExampleFixture example_fixture() {
  ExampleFixture f;
  f.alpha = Mat::Zero(2, 2);
  f.alpha.diagonal() << 0.5, 0.3;
  f.gamma.resize(2, 2);
  f.gamma << -2.0, 0.25, 0.25, -1.5;
  f.I0.resize(2);
  f.I0 << 200.0, 300.0;
  f.mu.resize(2);
  f.mu << 0.417, 0.505;
  f.theta_mu.resize(2);
  f.theta_mu << 0.582, 0.494;
  f.revenue_direction.resize(2);
  f.revenue_direction << 0.708, 0.653;
  f.ratio = 1.084;
  f.R0.resize(2);
  f.R0 << 5.183, 4.781;
  f.p0.resize(2);
  f.p0 << 3.424, 2.480;
  f.T = 77.0;
  return f;
}

// Base demand implied by published p0 and R: log S0 = log R - alpha log I0 - (1 + gamma) log p0.
inline Vec back_solve_base_demand(const ExampleFixture& f) {
  const Mat one_plus_gamma = Mat::Identity(2, 2) + f.gamma;
  const Vec log_s0 = f.R0.array().log().matrix() - f.alpha * f.I0.array().log().matrix() -
                     one_plus_gamma * f.p0.array().log().matrix();
  return log_s0.array().exp().matrix();
}

struct ExampleRow {
  std::string name;
  double computed;
  double published;
  double tol;
  bool relative;
  bool pass() const {
    const double dev = std::abs(computed - published) / (relative ? std::abs(published) : 1.0);
    return dev <= tol;
  }
};

inline std::vector<ExampleRow> example_rows(const ExampleFixture& f, const MarkdownSolution& sol) {
  const auto& c = sol.form;
  std::vector<ExampleRow> rows;
  for (int i = 0; i < 2; ++i)
    rows.push_back({"mu_" + std::to_string(i + 1), c.mu(i), f.mu(i), 5e-4, false});
  for (int i = 0; i < 2; ++i)
    rows.push_back({"theta_mu_" + std::to_string(i + 1), c.a(i), f.theta_mu(i), 2e-3, false});
  for (int i = 0; i < 2; ++i)
    rows.push_back({"R_direction_" + std::to_string(i + 1), c.revenue_direction(i), f.revenue_direction(i), 1e-2, true});
  rows.push_back({"R_1/R_2", c.R(0) / c.R(1), f.ratio, 1e-3, false});
  for (int i = 0; i < 2; ++i) rows.push_back({"R(0)_" + std::to_string(i + 1), c.R(i), f.R0(i), 1e-2, true});
  for (int i = 0; i < 2; ++i) rows.push_back({"p(0)_" + std::to_string(i + 1), c.p0(i), f.p0(i), 1e-2, true});
  rows.push_back({"T", c.T, f.T, 1e-2, true});
  return rows;
}

inline int cmd_reproduce_example(std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const ExampleFixture f = example_fixture();
    const Vec s0_implied = back_solve_base_demand(f);
    // Base demand is not printed with the example; the published p0 and R
    // imply unit base demand, which is what the pipeline runs with.
    const Vec s0 = Vec::Ones(2);
    const ModelParams m(s0, f.gamma, f.alpha, Vec::Zero(2), DemandKind::ConstantElasticity);
    const MarkdownSolution sol = md_multi(m, FixedInventory{f.I0});
    const auto rows = example_rows(f, sol);

    out << "two-item markdown example\n";
    out << "  alpha = diag(0.5, 0.3), gamma = [[-2, 0.25], [0.25, -1.5]], I0 = (200, 300)\n";
    out << "  base demand implied by published p(0), R(0): (" << fixed(s0_implied(0)) << ", "
        << fixed(s0_implied(1)) << "); using (1, 1)\n\n";
    out << std::left << std::setw(16) << "quantity" << std::setw(14) << "computed" << std::setw(12) << "published"
        << std::setw(16) << "tolerance" << "result\n";
    bool all = true;
    for (const auto& r : rows) {
      const std::string tol = r.relative ? fixed(r.tol * 100.0, 1) + "% rel" : fixed(r.tol, 4) + " abs";
      out << std::left << std::setw(16) << r.name << std::setw(14) << fixed(r.computed) << std::setw(12)
          << fixed(r.published, 3) << std::setw(16) << tol << (r.pass() ? "pass" : "FAIL") << "\n";
      all = all && r.pass();
    }
    out << "\nnote: the published text also calls the R ratio \"about 1.804\"; the revenue vectors it prints\n"
           "      give 1.084, so 1.804 is read as a transposed-digit typo and 1.084 is checked.\n";
    out << "note: the published mu is truncated to three digits (mu_1 = 0.41758...), so mu_1 misses a\n"
           "      5e-4 absolute tolerance by a hair; every other quantity is consistent with it.\n";
    out << "\nresiduals: exponent " << sci(sol.form.exponent_residual) << ", revenue condition "
        << sci(sol.form.revenue_residual) << ", boundary " << sci(sol.form.boundary_residual) << "\n";
    out << (all ? "all quantities match\n" : "some quantities outside tolerance\n");
    return all ? kOk : kHypothesis;
  });
}

// ---------------------------------------------------------------------------
// check-model

inline std::string yes_no(bool b) { return b ? "yes" : "no"; }

inline int cmd_check_model(const std::string& model_path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const io::ModelDocument doc = io::load_model(model_path);
    const ModelParams& m = doc.params;
    const int n = m.n();
    out << "items: " << n << ", demand model: " << to_string(m.kind()) << "\n";
    out << "gamma condition number: " << sci(condition_number(m.gamma())) << "\n";
    try {
      const auto mc = matrix_conditions(m.gamma());
      out << "gamma negative diagonal and row diagonally dominant: " << yes_no(mc.diag_dominant) << "\n";
    } catch (const NumericalError& e) {
      out << "gamma: " << e.what() << "\n";
    }
    const double gscale = std::max(m.gamma().cwiseAbs().maxCoeff(), 1e-300);
    const bool symmetric = (m.gamma() - m.gamma().transpose()).cwiseAbs().maxCoeff() <= 1e-12 * gscale;
    out << "gamma symmetric: " << yes_no(symmetric) << "\n";
    if (!symmetric) {
      try {
        const Vec d = transpose_similarity(m.gamma());
        out << "diagonal similarity to gamma^T: (";
        for (int i = 0; i < n; ++i) out << (i ? ", " : "") << short_num(d(i));
        out << ")\n";
      } catch (const HypothesisViolation&) {
        out << "diagonal similarity to gamma^T: none found\n";
      }
    }
    const Mat& a = m.alpha();
    bool diagonal = true;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && a(i, j) != 0.0) diagonal = false;
    out << "alpha rank: " << numerical_rank(a) << " of " << n << ", diagonal: " << yes_no(diagonal) << "\n";
    out << "demand transference (inventory effect of j on i):\n";
    for (int i = 0; i < n; ++i) {
      out << " ";
      for (int j = 0; j < n; ++j) out << " " << std::setw(12) << short_num(demand_transference(m, i, j));
      out << "\n";
    }

    auto probe = [&](const char* what, auto&& f) {
      try {
        f();
        out << what << ": applicable\n";
      } catch (const HypothesisViolation& e) {
        out << what << ": not applicable (" << e.what() << ")\n";
      } catch (const NumericalError& e) {
        out << what << ": not applicable (" << e.what() << ")\n";
      }
    };
    if (n == 1) {
      probe("one-item markdown closed form", [&] {
        if (m.kind() != DemandKind::ConstantElasticity)
          throw HypothesisViolation("needs the constant-elasticity model");
        md_one_item(m.gamma()(0, 0), a(0, 0), 1.0, m.base_demand()(0), Seasonality::uniform(1.0), GridSpec{10});
      });
      probe("one-item replenishment price", [&] { cr_one_item(m.gamma()(0, 0), m.unit_cost()(0)); });
    } else {
      probe("multi-item markdown closed form", [&] {
        md_multi(m, InventoryMagnitude{1.0, Seasonality::uniform(1.0)}, GridSpec{10});
      });
    }
    probe("replenishment equilibrium", [&] { cr_multi(m, 1.0); });
    return kOk;
  });
}

}  // namespace mdopt::cli
