#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "mdopt/cli.hpp"
#include "mdopt/io.hpp"

using namespace mdopt;
using fixtures::vec;
namespace fs = std::filesystem;

namespace {

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mdopt_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

const char* kModel = R"({
  "n": 2, "kind": "constant_elasticity", "S0": [1, 1],
  "gamma": [[-2, 0.25], [0.25, -1.5]], "alpha": [[0.5, 0], [0, 0.3]]
})";

}  // namespace

TEST(ModelDocument, ParsesAndSerializes) {
  const auto doc = io::parse_model(io::json::parse(kModel));
  EXPECT_EQ(doc.params.n(), 2);
  EXPECT_EQ(doc.params.gamma()(1, 0), 0.25);
  EXPECT_TRUE(doc.params.unit_cost().isZero());
  EXPECT_FALSE(doc.seasonality.has_value());
  const auto again = io::parse_model(io::model_to_json(doc.params));
  EXPECT_EQ(again.params.gamma(), doc.params.gamma());
  EXPECT_EQ(again.params.kind(), doc.params.kind());
}

TEST(ModelDocument, ErrorsCarryPositions) {
  auto j = io::json::parse(kModel);
  j["gamma"][1][0] = "x";
  EXPECT_NE(error_of([&] { io::parse_model(j); }).find("/gamma/1/0"), std::string::npos);
  j = io::json::parse(kModel);
  j["S0"] = {1.0};
  EXPECT_NE(error_of([&] { io::parse_model(j); }).find("/S0"), std::string::npos);
  j = io::json::parse(kModel);
  j["kind"] = "linear";
  EXPECT_NE(error_of([&] { io::parse_model(j); }).find("/kind"), std::string::npos);
  j = io::json::parse(kModel);
  j["gama"] = 1;
  EXPECT_NE(error_of([&] { io::parse_model(j); }).find("gama"), std::string::npos);
  j = io::json::parse(kModel);
  j["seasonality"] = {{"T", 2.0}, {"knots", {{0.0, 1.0}, {1.0, 1.0}}}};
  EXPECT_NE(error_of([&] { io::parse_model(j); }).find("/seasonality"), std::string::npos);
  EXPECT_NE(error_of([] { io::parse_json_text("{\n  \"n\": 2,\n  oops\n}", "m.json"); }).find("line 3"),
            std::string::npos);
}

TEST(ModelDocument, Seasonality) {
  auto j = io::json::parse(kModel);
  j["seasonality"] = {{"T", 2.0}, {"knots", {{0.0, 1.0}, {1.0, 3.0}, {2.0, 1.0}}}};
  const auto doc = io::parse_model(j);
  ASSERT_TRUE(doc.seasonality.has_value());
  EXPECT_DOUBLE_EQ(doc.seasonality->horizon(), 2.0);
  EXPECT_DOUBLE_EQ(doc.seasonality->density(1.0), 0.75);
  j["seasonality"] = {{"T", 3.0}};
  EXPECT_DOUBLE_EQ(io::parse_model(j).seasonality->density(1.0), 1.0 / 3.0);
}

TEST(RunConfig, RoundTrips) {
  const auto j = io::json::parse(R"({
    "model": "m.json", "problem": "markdown",
    "boundary": {"I0": [200, 300], "T": 5.5},
    "solver": {"N": 123, "tol": 1e-7, "seed": 9, "verify_gradient": false},
    "outputs": "runs/a", "grid": {"intervals": 77, "graded": true}
  })");
  const auto a = io::parse_config(j);
  EXPECT_EQ(a.solver.N, 123);
  EXPECT_EQ(a.solver.seed, 9u);
  EXPECT_FALSE(a.solver.verify_gradient);
  EXPECT_TRUE(a.grid.graded);
  const auto b = io::parse_config(io::json::parse(io::config_to_json(a).dump()));
  EXPECT_TRUE(a == b);
  auto c = b;
  c.solver.max_step = 0.3;
  EXPECT_FALSE(a == c);
}

TEST(RunConfig, InlineModelRoundTrips) {
  auto j = io::json::parse(R"({"problem": "cr", "boundary": {"I0_geometric_mean": 4}})");
  j["model"] = io::json::parse(kModel);
  const auto a = io::parse_config(j);
  EXPECT_TRUE(a == io::parse_config(io::config_to_json(a)));
  EXPECT_EQ(io::resolve_model(a).params.n(), 2);
}

TEST(RunConfig, Rejections) {
  auto base = io::json::parse(R"({"model": "m.json", "problem": "markdown", "boundary": {"I0": [1, 2]}})");
  auto j = base;
  j["problem"] = "clearance";
  EXPECT_NE(error_of([&] { io::parse_config(j); }).find("/problem"), std::string::npos);
  j = base;
  j["solver"] = {{"step", 1}};
  EXPECT_NE(error_of([&] { io::parse_config(j); }).find("step"), std::string::npos);
  j = base;
  j["solver"] = {{"N", 3}};
  EXPECT_NE(error_of([&] { io::parse_config(j); }).find("/solver"), std::string::npos);
  j = base;
  j["boundary"] = io::json::object();
  EXPECT_NE(error_of([&] { io::parse_config(j); }).find("/boundary"), std::string::npos);
  j = base;
  j["boundary"]["I0"][1] = -2;
  EXPECT_NE(error_of([&] { io::parse_config(j); }).find("/boundary/I0/1"), std::string::npos);
  j = base;
  const auto cfg = io::parse_config(j, "/nonexistent");
  EXPECT_NE(error_of([&] { io::resolve_model(cfg); }).find("not found"), std::string::npos);
}

TEST(TrajectoryCsv, RoundTripsExactly) {
  const auto sol = md_multi(fixtures::example_model(), FixedInventory{vec({200.0, 300.0})}, GridSpec{50});
  const std::string text = io::trajectory_csv(sol.trajectory);
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "t,tau,I_1,I_2,p_1,p_2,S_1,S_2,R_1,R_2,lambda_1,lambda_2,rho2_1,rho2_2");
  std::size_t mismatched = 0;
  const auto back = io::parse_trajectory_csv(text, sol.model, "csv", &mismatched);
  EXPECT_EQ(mismatched, 0u);
  ASSERT_EQ(back.size(), sol.trajectory.size());
  for (std::size_t k = 0; k < back.size(); ++k) {
    EXPECT_EQ(back.grid[k], sol.trajectory.grid[k]);
    EXPECT_EQ(back.tau[k], sol.trajectory.tau[k]);
    const auto& a = back.states[k];
    const auto& b = sol.trajectory.states[k];
    EXPECT_EQ(a.I, b.I);
    EXPECT_EQ(a.p, b.p);
    EXPECT_EQ(a.S, b.S);
    EXPECT_EQ(a.R, b.R);
    EXPECT_EQ(a.lambda, b.lambda);
  }
  EXPECT_EQ(io::trajectory_csv(back), text);
}

TEST(TrajectoryCsv, SchemaErrors) {
  const auto sol = md_one_item(-2.0, 0.5, 100.0, 400.0, Seasonality::uniform(1.0), GridSpec{10});
  const std::string text = io::trajectory_csv(sol.trajectory);
  // A one-item file against a two-item model.
  EXPECT_NE(error_of([&] { io::parse_trajectory_csv(text, fixtures::example_model()); }).find("header"),
            std::string::npos);
  std::string bad = text;
  bad.replace(bad.find('\n') + 1, 1, "z");
  EXPECT_NE(error_of([&] { io::parse_trajectory_csv(bad, sol.model, "f.csv"); }).find("f.csv:2"),
            std::string::npos);
  std::string short_row = text.substr(0, text.find('\n') + 1) + "0,1,2\n";
  EXPECT_NE(error_of([&] { io::parse_trajectory_csv(short_row, sol.model); }).find("columns"), std::string::npos);
  EXPECT_NE(error_of([&] { io::parse_trajectory_csv("", sol.model); }).find("empty"), std::string::npos);
}

TEST(AtomicWrite, ReplacesContentWithoutLeftovers) {
  const fs::path dir = scratch("atomic");
  const fs::path f = dir / "sub" / "a.txt";
  io::write_atomic(f, "one");
  io::write_atomic(f, "two");
  EXPECT_EQ(io::read_file(f), "two");
  int entries = 0;
  for (const auto& e : fs::directory_iterator(f.parent_path())) {
    (void)e;
    ++entries;
  }
  EXPECT_EQ(entries, 1);
}

TEST(ReportCsv, ListsValuesThenSummary) {
  const auto sol = md_one_item(-2.0, 0.5, 100.0, 400.0, Seasonality::uniform(1.0), GridSpec{10});
  const auto r = invariance_report(sol.model, sol.trajectory, {"hamiltonian"}, 1e-6)[0];
  const std::string csv = io::report_csv(r, sol.trajectory);
  EXPECT_EQ(csv.rfind("t,value\n", 0), 0u);
  EXPECT_NE(csv.find("max_rel_dev,"), std::string::npos);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 13);
}
