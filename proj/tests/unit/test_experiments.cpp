#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>

#include "divplan/error.hpp"
#include "divplan/experiments.hpp"
#include "divplan/polytope.hpp"

using namespace divplan;
using namespace divplan::exp;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("divplan_test_" + name);
    fs::remove_all(dir);
    return dir;
}

ExperimentPlan quick_compare() {
    auto plan = ExperimentPlan::defaults(Experiment::kCompare);
    plan.trials = 3;
    plan.solver = SolverChoice::kFrankWolfe;
    return plan;
}

} // namespace

TEST_SUITE("experiments") {

TEST_CASE("seed derivation") {
    CHECK(derive_seed(1, 2, 0.5) == derive_seed(1, 2, 0.5));
    CHECK(derive_seed(1, 2, 0.5) != derive_seed(1, 3, 0.5));
    CHECK(derive_seed(1, 2, 0.5) != derive_seed(1, 2, 0.6));
    CHECK(derive_seed(1, 2, 0.5) != derive_seed(2, 2, 0.5));
    CHECK(derive_seed(1, 2, 0.0) == derive_seed(1, 2, -0.0));
}

TEST_CASE("study defaults") {
    const auto lam = ExperimentPlan::defaults(Experiment::kSweepLambda);
    CHECK(lam.layout == grid::Layout::kNineRoom);
    CHECK(lam.k == 6);
    CHECK(lam.grid.front() == 0.0);
    const auto alpha = ExperimentPlan::defaults(Experiment::kSweepAlpha);
    CHECK(alpha.trials == 20);
    CHECK(alpha.layout == grid::Layout::kFourRoom);
    CHECK(ExperimentPlan::defaults(Experiment::kCompare).solver == SolverChoice::kBoth);
    CHECK(ExperimentPlan::defaults(Experiment::kSweepK).lambda == 8.0);
}

TEST_CASE("plan validation") {
    auto plan = ExperimentPlan::defaults(Experiment::kSweepLambda);
    plan.trials = 0;
    CHECK_THROWS_AS(plan.validate(), DomainError);
    plan.trials = 1;
    plan.grid = {};
    CHECK_THROWS_AS(plan.validate(), DomainError);
    plan.grid = {4, 2};
    CHECK_THROWS_AS(plan.validate(), DomainError);
    plan.grid = {2, 2};
    CHECK_THROWS_AS(plan.validate(), DomainError);
    plan.grid = {0, 2};
    CHECK_NOTHROW(plan.validate());

    auto k = ExperimentPlan::defaults(Experiment::kSweepK);
    k.grid = {2, 2.5};
    CHECK_THROWS_AS(k.validate(), DomainError);
    auto alpha = ExperimentPlan::defaults(Experiment::kSweepAlpha);
    alpha.grid = {0.5, 1.2};
    CHECK_THROWS_AS(alpha.validate(), DomainError);
}

TEST_CASE("records cover every trial and solver once, in order") {
    auto plan = ExperimentPlan::defaults(Experiment::kSweepK);
    plan.grid = {2, 3};
    plan.trials = 2;
    const auto result = run(plan);
    REQUIRE(result.records.size() == 4);
    std::size_t i = 0;
    for (double v : plan.grid) {
        for (std::size_t t = 0; t < 2; ++t, ++i) {
            CHECK(result.records[i].swept_value == v);
            CHECK(result.records[i].trial == t);
            CHECK(result.records[i].ok());
        }
    }
    REQUIRE(result.find(3, "fw") != nullptr);
    CHECK(result.find(4, "fw") == nullptr);
}

TEST_CASE("summary recomputes from records") {
    const auto result = run(quick_compare());
    const auto* row = result.find(8, "fw");
    REQUIRE(row != nullptr);
    double sum = 0.0, sum_jsd = 0.0;
    for (const auto& r : result.records) {
        sum += r.mean_reward_per_policy;
        sum_jsd += r.mean_pairwise_jsd;
    }
    const double mean = sum / 3.0;
    double sq = 0.0;
    for (const auto& r : result.records) sq += (r.mean_reward_per_policy - mean) * (r.mean_reward_per_policy - mean);
    CHECK(std::abs(row->mean_reward_per_policy - mean) < 1e-12);
    CHECK(std::abs(row->sd_reward - std::sqrt(sq / 2.0)) < 1e-12);
    CHECK(std::abs(row->mean_pairwise_jsd - sum_jsd / 3.0) < 1e-12);
    for (const auto& r : result.records) {
        CHECK(r.optimal_reward >= r.mean_reward_per_policy - 1e-9);
        CHECK(r.world_seed == derive_seed(0, r.trial, 8.0));
    }
}

TEST_CASE("failed records are listed but left out of the means") {
    std::vector<TrialRecord> records(3);
    for (std::size_t i = 0; i < 3; ++i) {
        records[i].trial = i;
        records[i].solver = "fw";
        records[i].mean_reward_per_policy = static_cast<double>(i);
    }
    records[2].error = "boom";
    const auto rows = summarize(records);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].trials == 2);
    CHECK(rows[0].mean_reward_per_policy == 0.5);
    std::ostringstream os;
    write_trials_csv(os, records);
    CHECK(os.str().find(",boom\n") != std::string::npos);
}

TEST_CASE("output files are byte-identical across runs and worker counts") {
    auto plan = quick_compare();
    plan.out_dir = scratch("det_a");
    run(plan);
    auto again = plan;
    again.out_dir = scratch("det_b");
    again.workers = 3;
    run(again);
    for (const char* name : {"summary.csv"}) {
        CHECK(slurp(*plan.out_dir / name) == slurp(*again.out_dir / name));
    }
    const auto summary = slurp(*plan.out_dir / "summary.csv");
    CHECK(summary.rfind("swept_value,solver,trials,mean_reward_per_policy,sd_reward,mean_pairwise_jsd,sd_jsd,"
                        "optimal_reward_ref,mean_iterations\n",
                        0) == 0);
    CHECK(fs::exists(*plan.out_dir / "runtime.csv"));
    CHECK(fs::exists(*plan.out_dir / "trials.csv"));
    CHECK(fs::exists(*plan.out_dir / "plan.json"));
    CHECK(fs::exists(*plan.out_dir / "fw_8" / "trace_2.csv"));
    CHECK(fs::exists(*plan.out_dir / "fw_8" / "occupancy_2_1.svg"));
    fs::remove_all(*plan.out_dir);
    fs::remove_all(*again.out_dir);
}

TEST_CASE("reward-only sweep point matches the optimum") {
    auto plan = ExperimentPlan::defaults(Experiment::kSweepLambda);
    plan.grid = {0};
    plan.trials = 2;
    const auto result = run(plan);
    const auto* row = result.find(0, "fw");
    REQUIRE(row != nullptr);
    CHECK(std::abs(row->mean_reward_per_policy - row->optimal_reward_ref) <= 0.01 * std::abs(row->optimal_reward_ref));
    CHECK(row->mean_pairwise_jsd < 1e-9);
}

TEST_CASE("single run artifacts") {
    auto plan = ExperimentPlan::defaults(Experiment::kSingle);
    plan.out_dir = scratch("single");
    plan.emit_monitor = true;
    const auto result = run_single(plan);
    CHECK(result.report.final_set.size() == 6);
    for (int i = 0; i < 6; ++i) CHECK(fs::exists(*plan.out_dir / ("occupancy_0_" + std::to_string(i) + ".svg")));
    CHECK(!fs::exists(*plan.out_dir / "occupancy_0_6.svg"));
    CHECK(slurp(*plan.out_dir / "trace_0.csv").rfind("t,objective,fw_gap,", 0) == 0);
    CHECK(slurp(*plan.out_dir / "monitor_0.csv").rfind("t,min_measure,scaled_min_measure\n", 0) == 0);
    CHECK(fs::exists(*plan.out_dir / "world.json"));
    CHECK(result.optimal_reward > result.report.mean_reward_per_policy());
    fs::remove_all(*plan.out_dir);

    plan.solver = SolverChoice::kBoth;
    CHECK_THROWS_AS(run_single(plan), DomainError);
}

}
