#pragma once

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <unistd.h>
#include <vector>

#include <json.hpp>

#include "mdopt/closedform.hpp"
#include "mdopt/errors.hpp"
#include "mdopt/model.hpp"
#include "mdopt/optimality.hpp"
#include "mdopt/seasonality.hpp"
#include "mdopt/varsolve.hpp"

namespace mdopt::io {

using json = nlohmann::json;
namespace fs = std::filesystem;

// 17 significant digits round-trips any double.
inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw InputError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw InputError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(source + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Field readers with JSON-pointer positions in every error

namespace detail {

inline const json& field(const json& obj, const std::string& key, const std::string& at) {
  if (!obj.is_object()) throw InputError(at + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw InputError(at + ": missing field '" + key + "'");
  return *it;
}

inline double number(const json& v, const std::string& at) {
  if (!v.is_number()) throw InputError(at + ": expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw InputError(at + ": number is not finite");
  return d;
}

inline int integer(const json& v, const std::string& at) {
  if (!v.is_number_integer()) throw InputError(at + ": expected an integer");
  return v.get<int>();
}

inline bool boolean(const json& v, const std::string& at) {
  if (!v.is_boolean()) throw InputError(at + ": expected true or false");
  return v.get<bool>();
}

inline Vec vector(const json& v, const std::string& at, std::optional<int> size = std::nullopt) {
  if (!v.is_array()) throw InputError(at + ": expected an array");
  if (size && static_cast<int>(v.size()) != *size) {
    std::ostringstream os;
    os << at << ": expected " << *size << " entries, got " << v.size();
    throw InputError(os.str());
  }
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(i) = number(v[i], at + "/" + std::to_string(i));
  return out;
}

inline Mat matrix(const json& v, const std::string& at, int n) {
  if (!v.is_array() || static_cast<int>(v.size()) != n) {
    std::ostringstream os;
    os << at << ": expected " << n << " rows";
    throw InputError(os.str());
  }
  Mat out(n, n);
  for (int i = 0; i < n; ++i) out.row(i) = vector(v[i], at + "/" + std::to_string(i), n).transpose();
  return out;
}

inline void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& at) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw InputError(at + ": unknown field '" + it.key() + "'");
  }
}

inline json to_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline json to_json(const Mat& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(to_json(Vec(m.row(i).transpose())));
  return a;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Model documents

struct ModelDocument {
  ModelParams params;
  std::optional<Seasonality> seasonality;
};

inline DemandKind parse_kind(const json& v, const std::string& at) {
  if (!v.is_string()) throw InputError(at + ": expected a string");
  const auto s = v.get<std::string>();
  if (s == "constant_elasticity" || s == "ConstantElasticity") return DemandKind::ConstantElasticity;
  if (s == "exponential" || s == "Exponential") return DemandKind::Exponential;
  throw InputError(at + ": unknown model kind '" + s + "' (constant_elasticity or exponential)");
}

inline Seasonality parse_seasonality(const json& j, const std::string& at) {
  if (!j.is_object()) throw InputError(at + ": expected an object");
  detail::reject_unknown(j, {"T", "knots"}, at);
  std::optional<double> T;
  if (j.contains("T")) {
    T = detail::number(j["T"], at + "/T");
    if (!(*T > 0.0)) throw InputError(at + "/T: horizon must be positive");
  }
  if (!j.contains("knots")) {
    if (!T) throw InputError(at + ": needs T or knots");
    return Seasonality::uniform(*T);
  }
  const json& ks = j["knots"];
  if (!ks.is_array()) throw InputError(at + "/knots: expected an array of [t, density] pairs");
  std::vector<Seasonality::Knot> knots;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const std::string here = at + "/knots/" + std::to_string(i);
    const Vec pair = detail::vector(ks[i], here, 2);
    knots.push_back({pair(0), pair(1)});
  }
  if (T && (knots.empty() || std::abs(knots.back().t - *T) > 1e-12 * *T))
    throw InputError(at + ": last knot must sit at T");
  try {
    return Seasonality(std::move(knots));
  } catch (const DomainError& e) {
    throw InputError(at + ": " + e.what());
  }
}

inline json seasonality_to_json(const Seasonality& s) {
  json ks = json::array();
  for (const auto& k : s.knots()) ks.push_back({k.t, k.density});
  return {{"T", s.horizon()}, {"knots", ks}};
}

inline ModelDocument parse_model(const json& j, const std::string& at = "") {
  if (!j.is_object()) throw InputError((at.empty() ? "/" : at) + ": model must be an object");
  detail::reject_unknown(j, {"n", "kind", "S0", "gamma", "alpha", "c", "seasonality"}, at);
  const int n = detail::integer(detail::field(j, "n", at), at + "/n");
  if (n < 1) throw InputError(at + "/n: item count must be positive");
  const DemandKind kind = parse_kind(detail::field(j, "kind", at), at + "/kind");
  Vec s0 = detail::vector(detail::field(j, "S0", at), at + "/S0", n);
  Mat gamma = detail::matrix(detail::field(j, "gamma", at), at + "/gamma", n);
  Mat alpha = detail::matrix(detail::field(j, "alpha", at), at + "/alpha", n);
  Vec c = j.contains("c") ? detail::vector(j["c"], at + "/c", n) : Vec::Zero(n);
  for (int i = 0; i < n; ++i) {
    if (!(s0(i) > 0.0)) throw InputError(at + "/S0/" + std::to_string(i) + ": base demand must be positive");
    if (c(i) < 0.0) throw InputError(at + "/c/" + std::to_string(i) + ": unit cost must be nonnegative");
  }
  std::optional<Seasonality> season;
  if (j.contains("seasonality")) season = parse_seasonality(j["seasonality"], at + "/seasonality");
  return ModelDocument{ModelParams(std::move(s0), std::move(gamma), std::move(alpha), std::move(c), kind),
                       std::move(season)};
}

inline json model_to_json(const ModelParams& m, const std::optional<Seasonality>& s = std::nullopt) {
  json j = {{"n", m.n()},
            {"kind", std::string(to_string(m.kind()))},
            {"S0", detail::to_json(m.base_demand())},
            {"gamma", detail::to_json(m.gamma())},
            {"alpha", detail::to_json(m.alpha())},
            {"c", detail::to_json(m.unit_cost())}};
  if (s) j["seasonality"] = seasonality_to_json(*s);
  return j;
}

inline ModelDocument load_model(const fs::path& path) {
  return parse_model(parse_json_text(read_file(path), path.string()));
}

// ---------------------------------------------------------------------------
// Run configuration

enum class Problem { Markdown, Replenishment };

inline std::string to_string(Problem p) { return p == Problem::Markdown ? "markdown" : "cr"; }

struct Boundary {
  std::optional<Vec> I0;
  std::optional<double> I0_geometric_mean;
  std::optional<double> T;
};

struct GridConfig {
  int intervals = 400;
  bool graded = false;
};

struct RunConfig {
  json model;  // path string (relative to the config file) or inline model document
  Problem problem = Problem::Markdown;
  Boundary boundary;
  SolverConfig solver;
  std::string outputs = "out";
  GridConfig grid;
  fs::path base_dir;  // where relative paths resolve; not serialized
};

inline bool operator==(const SolverConfig& a, const SolverConfig& b) {
  return a.N == b.N && a.max_iters == b.max_iters && a.tol == b.tol && a.constraint_tol == b.constraint_tol &&
         a.armijo == b.armijo && a.initial_step == b.initial_step && a.penalty_initial == b.penalty_initial &&
         a.penalty_growth == b.penalty_growth && a.penalty_rounds == b.penalty_rounds &&
         a.price_bound_factor == b.price_bound_factor && a.max_step == b.max_step &&
         a.verify_gradient == b.verify_gradient && a.seed == b.seed;
}

inline bool operator==(const RunConfig& a, const RunConfig& b) {
  const bool i0_same = a.boundary.I0.has_value() == b.boundary.I0.has_value() &&
                       (!a.boundary.I0 || *a.boundary.I0 == *b.boundary.I0);
  return a.model == b.model && a.problem == b.problem && i0_same &&
         a.boundary.I0_geometric_mean == b.boundary.I0_geometric_mean && a.boundary.T == b.boundary.T &&
         a.solver == b.solver && a.outputs == b.outputs && a.grid.intervals == b.grid.intervals &&
         a.grid.graded == b.grid.graded;
}

inline SolverConfig parse_solver(const json& j, const std::string& at) {
  SolverConfig c;
  if (!j.is_object()) throw InputError(at + ": expected an object");
  detail::reject_unknown(j,
                         {"N", "max_iters", "tol", "constraint_tol", "armijo", "initial_step", "penalty_initial",
                          "penalty_growth", "penalty_rounds", "price_bound_factor", "max_step",
                          "verify_gradient", "seed"},
                         at);
  if (j.contains("N")) c.N = detail::integer(j["N"], at + "/N");
  if (j.contains("max_iters")) c.max_iters = detail::integer(j["max_iters"], at + "/max_iters");
  if (j.contains("tol")) c.tol = detail::number(j["tol"], at + "/tol");
  if (j.contains("constraint_tol")) c.constraint_tol = detail::number(j["constraint_tol"], at + "/constraint_tol");
  if (j.contains("armijo")) c.armijo = detail::number(j["armijo"], at + "/armijo");
  if (j.contains("initial_step")) c.initial_step = detail::number(j["initial_step"], at + "/initial_step");
  if (j.contains("penalty_initial")) c.penalty_initial = detail::number(j["penalty_initial"], at + "/penalty_initial");
  if (j.contains("penalty_growth")) c.penalty_growth = detail::number(j["penalty_growth"], at + "/penalty_growth");
  if (j.contains("penalty_rounds")) c.penalty_rounds = detail::integer(j["penalty_rounds"], at + "/penalty_rounds");
  if (j.contains("price_bound_factor"))
    c.price_bound_factor = detail::number(j["price_bound_factor"], at + "/price_bound_factor");
  if (j.contains("max_step")) c.max_step = detail::number(j["max_step"], at + "/max_step");
  if (j.contains("verify_gradient")) c.verify_gradient = detail::boolean(j["verify_gradient"], at + "/verify_gradient");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw InputError(at + "/seed: expected a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  try {
    c.validate();
  } catch (const DomainError& e) {
    throw InputError(at + ": " + e.what());
  }
  return c;
}

inline json solver_to_json(const SolverConfig& c) {
  return {{"N", c.N},
          {"max_iters", c.max_iters},
          {"tol", c.tol},
          {"constraint_tol", c.constraint_tol},
          {"armijo", c.armijo},
          {"initial_step", c.initial_step},
          {"penalty_initial", c.penalty_initial},
          {"penalty_growth", c.penalty_growth},
          {"penalty_rounds", c.penalty_rounds},
          {"price_bound_factor", c.price_bound_factor},
          {"max_step", c.max_step},
          {"verify_gradient", c.verify_gradient},
          {"seed", c.seed}};
}

inline RunConfig parse_config(const json& j, const fs::path& base_dir = {}) {
  if (!j.is_object()) throw InputError("/: config must be an object");
  detail::reject_unknown(j, {"model", "problem", "boundary", "solver", "outputs", "grid"}, "");
  RunConfig c;
  c.base_dir = base_dir;
  c.model = detail::field(j, "model", "");
  if (c.model.is_object()) {
    parse_model(c.model, "/model");
  } else if (!c.model.is_string()) {
    throw InputError("/model: expected a file path or an inline model object");
  }
  const json& pr = detail::field(j, "problem", "");
  if (!pr.is_string()) throw InputError("/problem: expected \"markdown\" or \"cr\"");
  const auto ps = pr.get<std::string>();
  if (ps == "markdown")
    c.problem = Problem::Markdown;
  else if (ps == "cr")
    c.problem = Problem::Replenishment;
  else
    throw InputError("/problem: expected \"markdown\" or \"cr\", got \"" + ps + "\"");

  if (j.contains("boundary")) {
    const json& b = j["boundary"];
    if (!b.is_object()) throw InputError("/boundary: expected an object");
    detail::reject_unknown(b, {"I0", "I0_geometric_mean", "T"}, "/boundary");
    if (b.contains("I0")) {
      c.boundary.I0 = detail::vector(b["I0"], "/boundary/I0");
      for (Eigen::Index i = 0; i < c.boundary.I0->size(); ++i)
        if (!((*c.boundary.I0)(i) > 0.0))
          throw InputError("/boundary/I0/" + std::to_string(i) + ": inventory must be positive");
    }
    if (b.contains("I0_geometric_mean")) {
      c.boundary.I0_geometric_mean = detail::number(b["I0_geometric_mean"], "/boundary/I0_geometric_mean");
      if (!(*c.boundary.I0_geometric_mean > 0.0))
        throw InputError("/boundary/I0_geometric_mean: must be positive");
    }
    if (b.contains("T")) {
      c.boundary.T = detail::number(b["T"], "/boundary/T");
      if (!(*c.boundary.T > 0.0)) throw InputError("/boundary/T: horizon must be positive");
    }
  }
  if (!c.boundary.I0 && !c.boundary.I0_geometric_mean)
    throw InputError("/boundary: needs I0 or I0_geometric_mean");
  if (j.contains("solver")) c.solver = parse_solver(j["solver"], "/solver");
  if (j.contains("outputs")) {
    if (!j["outputs"].is_string()) throw InputError("/outputs: expected a directory path");
    c.outputs = j["outputs"].get<std::string>();
  }
  if (j.contains("grid")) {
    const json& g = j["grid"];
    if (!g.is_object()) throw InputError("/grid: expected an object");
    detail::reject_unknown(g, {"intervals", "graded"}, "/grid");
    if (g.contains("intervals")) c.grid.intervals = detail::integer(g["intervals"], "/grid/intervals");
    if (g.contains("graded")) c.grid.graded = detail::boolean(g["graded"], "/grid/graded");
    if (c.grid.intervals < 2) throw InputError("/grid/intervals: need at least 2");
  }
  return c;
}

inline json config_to_json(const RunConfig& c) {
  json b = json::object();
  if (c.boundary.I0) b["I0"] = detail::to_json(*c.boundary.I0);
  if (c.boundary.I0_geometric_mean) b["I0_geometric_mean"] = *c.boundary.I0_geometric_mean;
  if (c.boundary.T) b["T"] = *c.boundary.T;
  return {{"model", c.model},
          {"problem", to_string(c.problem)},
          {"boundary", b},
          {"solver", solver_to_json(c.solver)},
          {"outputs", c.outputs},
          {"grid", {{"intervals", c.grid.intervals}, {"graded", c.grid.graded}}}};
}

inline RunConfig load_config(const fs::path& path) {
  return parse_config(parse_json_text(read_file(path), path.string()), path.parent_path());
}

inline ModelDocument resolve_model(const RunConfig& c) {
  if (c.model.is_object()) return parse_model(c.model, "/model");
  fs::path p = c.model.get<std::string>();
  if (p.is_relative()) p = c.base_dir / p;
  if (!fs::exists(p)) throw InputError("/model: file not found: " + p.string());
  return load_model(p);
}

inline fs::path output_dir(const RunConfig& c) {
  fs::path p = c.outputs;
  return p.is_relative() ? c.base_dir / p : p;
}

// ---------------------------------------------------------------------------
// Trajectory CSV: t, tau, I_*, p_*, S_*, R_*, lambda_*, rho2_*

inline const std::vector<std::string>& csv_blocks() {
  static const std::vector<std::string> b = {"I", "p", "S", "R", "lambda", "rho2"};
  return b;
}

inline std::string csv_header(int n) {
  std::string h = "t,tau";
  for (const auto& b : csv_blocks())
    for (int i = 1; i <= n; ++i) h += "," + b + "_" + std::to_string(i);
  return h;
}

inline std::string trajectory_csv(const Trajectory& tr) {
  validate_trajectory(tr);
  const int n = tr.items();
  std::string out = csv_header(n) + "\n";
  for (std::size_t k = 0; k < tr.size(); ++k) {
    const auto& s = tr.states[k];
    out += fmt(tr.grid[k]);
    out += "," + fmt(tr.tau[k]);
    for (const Vec* v : {&s.I, &s.p, &s.S, &s.R, &s.lambda, &s.rho2})
      for (int i = 0; i < n; ++i) out += "," + fmt((*v)(i));
    out += "\n";
  }
  return out;
}

inline void write_trajectory_csv(const fs::path& path, const Trajectory& tr) { write_atomic(path, trajectory_csv(tr)); }

/// Parses a trajectory CSV against a model. R, P and l are recomputed from p
/// and S; rows whose stored R differs from p S by more than 1e-9 relative are
/// counted in `r_mismatch`.
inline Trajectory parse_trajectory_csv(const std::string& text, const ModelParams& m,
                                       const std::string& source = "trajectory",
                                       std::size_t* r_mismatch = nullptr) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw InputError(source + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const int n = m.n();
  if (line != csv_header(n)) {
    std::ostringstream os;
    os << source << ":1: header does not match " << n << "-item layout (expected \"" << csv_header(n) << "\")";
    throw InputError(os.str());
  }
  const std::size_t cols = 2 + csv_blocks().size() * n;
  Trajectory tr;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> v;
    std::size_t pos = 0;
    while (true) {
      const std::size_t end = line.find(',', pos);
      const std::string cell = line.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
      double d = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), d);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size() || !std::isfinite(d)) {
        std::ostringstream os;
        os << source << ":" << lineno << ": column " << v.size() + 1 << ": not a finite number: '" << cell << "'";
        throw InputError(os.str());
      }
      v.push_back(d);
      if (end == std::string::npos) break;
      pos = end + 1;
    }
    if (v.size() != cols) {
      std::ostringstream os;
      os << source << ":" << lineno << ": expected " << cols << " columns, got " << v.size();
      throw InputError(os.str());
    }
    auto block = [&](std::size_t b) {
      Vec out(n);
      for (int i = 0; i < n; ++i) out(i) = v[2 + b * n + i];
      return out;
    };
    tr.grid.push_back(v[0]);
    tr.tau.push_back(v[1]);
    try {
      StateSnapshot s = make_snapshot(m, v[0], block(0), block(1), block(2), block(4), block(5));
      const Vec r_col = block(3);
      bool agrees = true;
      for (int i = 0; i < n; ++i)
        agrees = agrees && std::abs(r_col(i) - s.R(i)) <= 1e-9 * std::max(std::abs(s.R(i)), 1e-300);
      if (!agrees && r_mismatch) ++*r_mismatch;
      tr.states.push_back(std::move(s));
    } catch (const DomainError& e) {
      std::ostringstream os;
      os << source << ":" << lineno << ": " << e.what();
      throw InputError(os.str());
    }
  }
  if (tr.size() == 0) throw InputError(source + ": no data rows");
  try {
    validate_trajectory(tr);
  } catch (const DomainError& e) {
    throw InputError(source + ": " + e.what());
  }
  return tr;
}

inline Trajectory read_trajectory_csv(const fs::path& path, const ModelParams& m,
                                      std::size_t* r_mismatch = nullptr) {
  return parse_trajectory_csv(read_file(path), m, path.string(), r_mismatch);
}

// ---------------------------------------------------------------------------
// Result documents

inline json closed_form_json(const MarkdownSolution& s) {
  const auto& f = s.form;
  json theta = json::array();
  for (Eigen::Index i = 0; i < f.theta.size(); ++i) {
    if (std::isfinite(f.theta(i)))
      theta.push_back(f.theta(i));
    else
      theta.push_back(nullptr);  // alpha = 0 limit
  }
  return {{"mu", detail::to_json(f.mu)},
          {"a", detail::to_json(f.a)},
          {"theta", theta},
          {"p0", detail::to_json(f.p0)},
          {"I0", detail::to_json(f.I0)},
          {"R", detail::to_json(f.R)},
          {"R_per_unit_time", f.unit_time_measure},
          {"revenue_total", detail::to_json(f.revenue_total)},
          {"revenue_direction", detail::to_json(f.revenue_direction)},
          {"revenue_scale", f.revenue_scale},
          {"C", detail::to_json(f.C)},
          {"T", f.T},
          {"S0_effective", detail::to_json(f.S0_effective)},
          {"objective", s.trajectory.objective},
          {"residuals",
           {{"exponent", f.exponent_residual},
            {"consistency", f.consistency_residual},
            {"revenue_condition", f.revenue_residual},
            {"boundary", f.boundary_residual},
            {"revenue_constancy", f.demand_residual}}}};
}

inline json equilibrium_json(const CREquilibrium& e) {
  return {{"p_star", detail::to_json(e.p_star)},
          {"I_star", detail::to_json(e.I_star)},
          {"P_star", detail::to_json(e.P_star)},
          {"R_star", detail::to_json(e.R_star)},
          {"l_star", detail::to_json(e.l_star)},
          {"r_scale", e.r_scale},
          {"residuals",
           {{"lerner", e.lerner_residual}, {"degeneracy", e.degeneracy_residual}, {"demand", e.demand_residual}}}};
}

inline json solver_result_json(const SolverResult& r) {
  return {{"objective", r.objective},
          {"converged", r.converged},
          {"iterations", r.iterations},
          {"gradient_norm", r.gradient_norm},
          {"constraint_violation", r.constraint_violation},
          {"bound_active", r.bound_active},
          {"gradient_check_error", r.gradient_check_error},
          {"message", r.message}};
}

inline json comparison_json(const TrajectoryComparison& c, double exclude_tail_frac) {
  return {{"sup_rel_dev_p", c.sup_rel_dev_p},
          {"sup_rel_dev_I", c.sup_rel_dev_I},
          {"obj_rel_dev", c.obj_rel_dev},
          {"exclude_tail_frac", exclude_tail_frac}};
}

/// Invariant report CSV: "t,value" rows then a "max_rel_dev,<v>" summary row.
inline std::string report_csv(const InvariantReport& r, const Trajectory& tr) {
  std::string out = "t,value\n";
  for (std::size_t k = 0; k < r.values.size(); ++k) out += fmt(tr.grid[k]) + "," + fmt(r.values[k]) + "\n";
  out += "max_rel_dev," + fmt(r.max_rel_dev) + "\n";
  return out;
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace mdopt::io
