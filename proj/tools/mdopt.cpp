#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mdopt/cli.hpp"

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace mdopt::cli;
  CLI::App app{"Markdown and replenishment price/inventory trajectories"};
  app.require_subcommand(1);

  SolveOptions solve;
  std::string method = "both";
  auto* s = app.add_subcommand("solve", "Solve a configured problem in closed form and/or numerically");
  s->add_option("--config", solve.config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  s->add_option("--method", method, "closed, numeric or both")
      ->check(CLI::IsMember({"closed", "numeric", "both"}));
  s->add_option("--tol", solve.tol, "Solver tolerance (relative reduced gradient)");
  s->add_option("--out", solve.out, "Output directory (overrides the config)");
  s->add_option("--grid", solve.grid, "Grid intervals for emission and the numeric solve");

  VerifyOptions verify;
  std::string invariants = "all";
  auto* v = app.add_subcommand("verify", "Check conservation laws along a trajectory CSV");
  v->add_option("--trajectory", verify.trajectory, "Trajectory CSV")->required()->check(CLI::ExistingFile);
  v->add_option("--model", verify.model, "Model document (JSON)")->required()->check(CLI::ExistingFile);
  v->add_option("--invariants", invariants, "Comma-separated invariant names, or 'all'");
  v->add_option("--tol", verify.tol, "Largest accepted relative deviation");
  v->add_option("--window", verify.window, "Fraction of the horizon ignored at each end");
  v->add_option("--out", verify.out, "Directory for per-invariant CSV reports");

  app.add_subcommand("reproduce-example", "Recompute the two-item markdown example and compare");

  std::string model_path;
  auto* c = app.add_subcommand("check-model", "Report matrix properties and which closed forms apply");
  c->add_option("--model", model_path, "Model document (JSON)")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  if (*s) {
    static const std::map<std::string, Method> methods = {
        {"closed", Method::Closed}, {"numeric", Method::Numeric}, {"both", Method::Both}};
    solve.method = methods.at(method);
    return cmd_solve(solve, std::cout, std::cerr);
  }
  if (*v) {
    verify.invariants = split_list(invariants);
    return cmd_verify(verify, std::cout, std::cerr);
  }
  if (*c) return cmd_check_model(model_path, std::cout, std::cerr);
  return cmd_reproduce_example(std::cout, std::cerr);
}
