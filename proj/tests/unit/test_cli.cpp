#include <gtest/gtest.h>

#include <sstream>

#include "safeset/cli.hpp"
#include "safeset/io.hpp"
#include "temp_dir.hpp"

namespace safeset {
namespace {

using testing::slurp;
using testing::spit;
using testing::TempDir;

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "safeset");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

Json fixed_point_doc() {
    return Json::parse(R"({
      "system": {"name": "fixed_point"},
      "oss": {"continuous": [
        {"name": "x", "lower": 0.0, "upper": 1.0, "delta": 0.125},
        {"name": "y", "lower": 0.0, "upper": 1.0, "delta": 0.125}], "horizon": 5},
      "epsilon": 0.05, "beta": 0.001, "seed": 7
    })");
}

Json line_doc(Json params) {
    Json doc = Json::parse(R"({
      "oss": {"continuous": [{"name": "x", "lower": 0.0, "upper": 12.0, "delta": 0.5}], "horizon": 3},
      "epsilon": 0.05, "beta": 0.001, "seed": 2
    })");
    doc["system"] = Json{{"name", "hazard_field"}, {"params", std::move(params)}};
    return doc;
}

std::string write_config(const TempDir& dir, const std::string& name, const Json& doc) {
    const auto path = dir / name;
    spit(path, doc.dump());
    return path;
}

/// Centroid CSV over line_doc's lattice holding the given cell indices.
std::string write_line_set(const TempDir& dir, const std::string& name, const std::vector<int>& cells) {
    std::string csv = "id,x\n";
    for (const int k : cells) {
        csv += std::to_string(k) + "," + format_real(0.5 + k) + "\n";
    }
    const auto path = dir / name;
    spit(path, csv);
    return path;
}

TEST(Cli, QuantifyFixedPointCertifiesAfter135Runs) {
    const TempDir dir("cli_quantify");
    const auto config = write_config(dir, "fp.json", fixed_point_doc());
    const auto r = run_cli({"quantify", "--config", config, "--out", dir / "out"});
    EXPECT_EQ(r.code, 0) << r.err;
    const auto report = Json::parse(slurp(dir / "out/report.json"));
    EXPECT_EQ(report["verdict"], "certified");
    EXPECT_EQ(report["counters"]["total_runs"], 135);
    EXPECT_EQ(report["counters"]["final_size"], 16);
    EXPECT_EQ(report["config"]["seed"], 7);
    std::istringstream runs(slurp(dir / "out/runs.jsonl"));
    EXPECT_EQ(read_runs_jsonl(runs).size(), 135u);
    const auto csv = slurp(dir / "out/centroids.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 17);
}

TEST(Cli, SeedFlagOverridesTheConfig) {
    const TempDir dir("cli_seed");
    const auto config = write_config(dir, "fp.json", fixed_point_doc());
    ASSERT_EQ(run_cli({"quantify", "--config", config, "--out", dir / "out", "--seed", "99"}).code, 0);
    EXPECT_EQ(Json::parse(slurp(dir / "out/report.json"))["config"]["seed"], 99);
}

TEST(Cli, BudgetExhaustedExitsTwo) {
    const TempDir dir("cli_budget");
    auto doc = line_doc({{"region_lower", {0.0}}, {"region_upper", {12.0}}, {"fail_probability", 0.02},
                         {"sink", {-1.0}}});
    doc["epsilon"] = 0.01;
    doc["beta"] = 0.01;
    doc["max_runs"] = 459;
    const auto r = run_cli({"quantify", "--config", write_config(dir, "c.json", doc), "--out", dir / "out"});
    EXPECT_EQ(r.code, 2) << r.err;
    EXPECT_EQ(Json::parse(slurp(dir / "out/report.json"))["verdict"], "budget_exhausted");
}

TEST(Cli, InvalidEpsilonExitsOne) {
    const TempDir dir("cli_eps");
    auto doc = fixed_point_doc();
    doc["epsilon"] = 0.0;
    const auto r = run_cli({"quantify", "--config", write_config(dir, "c.json", doc), "--out", dir / "out"});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(r.err.rfind("error: ", 0), 0u);
}

TEST(Cli, UsageErrorsExitOne) {
    EXPECT_EQ(run_cli({}).code, 1);
    EXPECT_EQ(run_cli({"quantify"}).code, 1);
    EXPECT_EQ(run_cli({"frobnicate", "--config", "x.json"}).code, 1);
    EXPECT_EQ(run_cli({"quantify", "--config", "/nonexistent.json"}).code, 1);
}

TEST(Cli, ValidateFixedPointExitsZero) {
    const TempDir dir("cli_validate_ok");
    const auto config = write_config(dir, "fp.json", fixed_point_doc());
    ASSERT_EQ(run_cli({"quantify", "--config", config, "--out", dir / "q"}).code, 0);
    const auto r = run_cli({"validate", "--config", config, "--set", dir / "q/centroids.csv", "--out", dir / "v"});
    EXPECT_EQ(r.code, 0) << r.err;
    const auto verdict = Json::parse(slurp(dir / "v/verdict.json"));
    EXPECT_EQ(verdict["outcome"], "validated");
    EXPECT_EQ(verdict["runs_used"], 135);
    EXPECT_TRUE(verdict["witness"].is_null());
}

TEST(Cli, ValidateFailingCellExitsThreeWithTrace) {
    const TempDir dir("cli_validate_fail");
    const auto config = write_config(
        dir, "c.json", line_doc({{"region_lower", {0.0}}, {"region_upper", {12.0}}, {"sink", {-1.0}}}));
    const auto set = write_line_set(dir, "s.csv", {3, 4});
    const auto r = run_cli({"validate", "--config", config, "--set", set, "--out", dir / "v"});
    EXPECT_EQ(r.code, 3) << r.err;
    const auto verdict = Json::parse(slurp(dir / "v/verdict.json"));
    EXPECT_EQ(verdict["outcome"], "falsified");
    EXPECT_EQ(verdict["witness"]["trace_csv"], "witness_trace.csv");
    EXPECT_EQ(slurp(dir / "v/witness_trace.csv").rfind("t,x,flag\n", 0), 0u);
}

TEST(Cli, ValidateEscapingRunExitsFour) {
    const TempDir dir("cli_validate_escape");
    const auto config = write_config(dir, "c.json", line_doc({{"drift", {1.0}}}));
    const auto set = write_line_set(dir, "s.csv", {3});
    const auto r = run_cli({"validate", "--config", config, "--set", set, "--out", dir / "v"});
    EXPECT_EQ(r.code, 4) << r.err;
    const auto verdict = Json::parse(slurp(dir / "v/verdict.json"));
    EXPECT_EQ(verdict["outcome"], "coverage_violated");
    EXPECT_EQ(verdict["witness"]["escaping_step"], 1);
}

TEST(Cli, CompareTwoSetsDifferingInOneCell) {
    const TempDir dir("cli_compare_two");
    const auto config = write_config(dir, "c.json", line_doc(Json::object()));
    const auto a = write_line_set(dir, "a.csv", {0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
    const auto b = write_line_set(dir, "b.csv", {0, 1, 2, 3, 4, 5, 6, 7, 8, 10});
    const auto r = run_cli({"compare", "--config", config, "--set", a, "--set", b, "--out", dir / "c"});
    EXPECT_EQ(r.code, 0) << r.err;
    const auto j = Json::parse(slurp(dir / "c/compare.json"));
    EXPECT_DOUBLE_EQ(j["iou"].get<double>(), 9.0 / 11.0);
    EXPECT_EQ(j["unsound_count"], 1);
    EXPECT_EQ(j["missed_count"], 1);
}

TEST(Cli, CompareFiveIdenticalSets) {
    const TempDir dir("cli_compare_five");
    const auto config = write_config(dir, "c.json", line_doc(Json::object()));
    std::vector<std::string> args{"compare", "--config", config, "--out", dir / "c"};
    for (int i = 0; i < 5; ++i) {
        args.push_back("--set");
        args.push_back(write_line_set(dir, "s" + std::to_string(i) + ".csv", {1, 4, 6}));
    }
    const auto r = run_cli(args);
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(Json::parse(slurp(dir / "c/compare.json"))["iou"], 1.0);
}

TEST(Cli, CompareNeedsTwoSets) {
    const TempDir dir("cli_compare_one");
    const auto config = write_config(dir, "c.json", line_doc(Json::object()));
    const auto a = write_line_set(dir, "a.csv", {0});
    EXPECT_EQ(run_cli({"compare", "--config", config, "--set", a, "--out", dir / "c"}).code, 1);
}

TEST(Cli, OracleThenPlot) {
    const TempDir dir("cli_oracle_plot");
    auto doc = fixed_point_doc();
    doc["oracle_trials"] = 3;
    const auto config = write_config(dir, "fp.json", doc);
    ASSERT_EQ(run_cli({"oracle", "--config", config, "--out", dir / "o"}).code, 0);
    EXPECT_NE(slurp(dir / "o/oracle.csv").find("id,x,y,p_hat,M\n"), std::string::npos);
    const auto r = run_cli({"plot", "--config", config, "--set", dir / "o/oracle.csv", "--dims", "x,y", "--out",
                            dir / "p"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(slurp(dir / "p/plot.svg").find("</svg>"), std::string::npos);
}

TEST(Cli, PlotUnknownDimsExitsOne) {
    const TempDir dir("cli_plot_bad");
    const auto config = write_config(dir, "fp.json", fixed_point_doc());
    ASSERT_EQ(run_cli({"quantify", "--config", config, "--out", dir / "q"}).code, 0);
    const auto r = run_cli({"plot", "--config", config, "--set", dir / "q/centroids.csv", "--dims", "x,zz", "--out",
                            dir / "p"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("zz"), std::string::npos);
}

}  // namespace
}  // namespace safeset
