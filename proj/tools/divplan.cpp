// divplan: run diverse-policy experiments on generated grid worlds.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "divplan/experiments.hpp"
#include "divplan/gridworld.hpp"
#include "divplan/mdp_io.hpp"
#include "divplan/report_io.hpp"

namespace {

using divplan::exp::Experiment;
using divplan::exp::ExperimentPlan;

struct Verb {
    ExperimentPlan plan;
    std::string layout;
    std::string solver;
    std::string pga_stop = "difference";
    std::string out;
    bool no_artifacts = false;
};

const std::map<std::string, divplan::PgaStopRule> kStopRules{
    {"mapping", divplan::PgaStopRule::kGradientMapping},
    {"difference", divplan::PgaStopRule::kIterateDifference},
};

CLI::App* add_verb(CLI::App& app, const char* name, const char* help, Experiment experiment, Verb& verb) {
    verb.plan = ExperimentPlan::defaults(experiment);
    verb.layout = verb.plan.layout == divplan::grid::Layout::kFourRoom ? "four" : "nine";
    verb.solver = std::string(divplan::exp::to_string(verb.plan.solver));
    auto& p = verb.plan;

    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--layout", verb.layout, "Grid layout")->check(CLI::IsMember({"four", "nine"}))->capture_default_str();
    sub->add_option("--trials", p.trials, "Random worlds per swept value")->capture_default_str();
    sub->add_option("--k", p.k, "Policies in the returned set")->capture_default_str();
    sub->add_option("--lambda", p.lambda, "Diversity weight")->capture_default_str();
    sub->add_option("--alpha", p.alpha, "Probability of the intended move")->capture_default_str();
    if (experiment == Experiment::kSweepLambda || experiment == Experiment::kSweepK ||
        experiment == Experiment::kSweepAlpha) {
        sub->add_option("--grid", p.grid, "Swept values, comma separated")->delimiter(',')->capture_default_str();
    }
    sub->add_option("--seed", p.seed, "Base seed")->capture_default_str();
    sub->add_option("--max-iters", p.max_iterations, "Solver iteration cap")->capture_default_str();
    sub->add_option("--fw-tol", p.fw_tolerance, "Frank-Wolfe gap tolerance")->capture_default_str();
    sub->add_option("--pga-tol", p.pga_tolerance, "PGA stopping tolerance")->capture_default_str();
    sub->add_option("--pga-stop", verb.pga_stop, "PGA stopping measure")
        ->check(CLI::IsMember({"mapping", "difference"}))
        ->capture_default_str();
    sub->add_option("--solver", verb.solver, "Solver(s) to run")
        ->check(CLI::IsMember({"fw", "pga", "both"}))
        ->capture_default_str();
    sub->add_option("--out", verb.out, "Output directory");
    sub->add_option("--workers", p.workers, "Worker threads")->capture_default_str();
    sub->add_flag("--emit-monitor", p.emit_monitor, "Write the convergence monitor series");
    sub->add_flag("--no-artifacts", verb.no_artifacts, "Skip per-trial traces and heatmaps");
    return sub;
}

ExperimentPlan resolve(Verb& verb) {
    auto plan = verb.plan;
    plan.layout = divplan::grid::parse_layout(verb.layout);
    plan.solver = divplan::exp::parse_solver(verb.solver);
    plan.pga_stop = kStopRules.at(verb.pga_stop);
    plan.artifacts = !verb.no_artifacts;
    if (!verb.out.empty()) plan.out_dir = verb.out;
    return plan;
}

void print_summary(const divplan::exp::ExperimentResult& result) {
    std::size_t failed = 0;
    for (const auto& rec : result.records) {
        if (!rec.ok()) {
            ++failed;
            std::cerr << "trial " << rec.trial << " value " << divplan::format_double(rec.swept_value) << " "
                      << rec.solver << ": " << rec.error << "\n";
        }
    }
    std::printf("%-10s %-4s %6s %12s %10s %10s %10s %12s %10s\n", "value", "alg", "trials", "reward/pol",
                "sd", "jsd", "sd", "optimal", "runtime_s");
    for (const auto& r : result.summary) {
        std::printf("%-10s %-4s %6zu %12.4f %10.4f %10.4f %10.4f %12.4f %10.3f\n",
                    divplan::format_double(r.swept_value).c_str(), r.solver.c_str(), r.trials,
                    r.mean_reward_per_policy, r.sd_reward, r.mean_pairwise_jsd, r.sd_jsd, r.optimal_reward_ref,
                    r.mean_runtime_seconds);
    }
    if (failed > 0) std::cerr << failed << " solver run(s) failed\n";
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << text;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Diverse near-optimal policy sets for average-reward MDPs"};
    app.require_subcommand(1);

    Verb compare, sweep_lambda, sweep_k, sweep_alpha, single;
    auto* compare_cmd = add_verb(app, "compare", "FW vs PGA on random worlds", Experiment::kCompare, compare);
    auto* lambda_cmd = add_verb(app, "sweep-lambda", "Sweep the diversity weight", Experiment::kSweepLambda, sweep_lambda);
    auto* k_cmd = add_verb(app, "sweep-k", "Sweep the set size", Experiment::kSweepK, sweep_k);
    auto* alpha_cmd = add_verb(app, "sweep-alpha", "Sweep the transition noise", Experiment::kSweepAlpha, sweep_alpha);
    auto* single_cmd = add_verb(app, "single", "One world, one solver, full artifacts", Experiment::kSingle, single);

    std::string render_layout = "four";
    std::uint64_t render_seed = 0;
    double render_alpha = 0.95;
    std::string render_out = "world.svg";
    std::string render_mdp;
    std::string render_spec;
    auto* render_cmd = app.add_subcommand("render", "Generate one world and draw it");
    render_cmd->add_option("--layout", render_layout, "Grid layout")->check(CLI::IsMember({"four", "nine"}))->capture_default_str();
    render_cmd->add_option("--seed", render_seed, "World seed")->capture_default_str();
    render_cmd->add_option("--alpha", render_alpha, "Probability of the intended move")->capture_default_str();
    render_cmd->add_option("--out", render_out, "SVG path")->capture_default_str();
    render_cmd->add_option("--mdp-json", render_mdp, "Also export the MDP");
    render_cmd->add_option("--spec-json", render_spec, "Also export the world description");

    CLI11_PARSE(app, argc, argv);

    try {
        const std::pair<CLI::App*, Verb*> sweeps[] = {
            {compare_cmd, &compare}, {lambda_cmd, &sweep_lambda}, {k_cmd, &sweep_k}, {alpha_cmd, &sweep_alpha}};
        for (const auto& [cmd, verb] : sweeps) {
            if (cmd->parsed()) {
                print_summary(divplan::exp::run(resolve(*verb)));
                return 0;
            }
        }
        if (single_cmd->parsed()) {
            const auto result = divplan::exp::run_single(resolve(single));
            std::cout << divplan::report_to_json(result.report) << "\n";
            std::cerr << "optimal reward " << divplan::format_double(result.optimal_reward) << ", monitor "
                      << (result.monitor.bounded ? "bounded" : "unbounded") << "\n";
            return 0;
        }
        if (render_cmd->parsed()) {
            const auto world = divplan::grid::generate(divplan::grid::parse_layout(render_layout), render_seed, render_alpha);
            write_file(render_out, divplan::grid::render_spec_svg(world.spec));
            if (!render_mdp.empty()) divplan::save_mdp(world.mdp, render_mdp);
            if (!render_spec.empty()) write_file(render_spec, divplan::grid::spec_to_json(world.spec) + "\n");
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
