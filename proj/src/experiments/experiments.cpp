#include "divplan/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "divplan/error.hpp"
#include "divplan/polytope.hpp"
#include "divplan/report_io.hpp"

namespace divplan::exp {

namespace fs = std::filesystem;

std::string_view to_string(Experiment e) {
    switch (e) {
        case Experiment::kCompare: return "compare";
        case Experiment::kSweepLambda: return "sweep_lambda";
        case Experiment::kSweepK: return "sweep_k";
        case Experiment::kSweepAlpha: return "sweep_alpha";
        case Experiment::kSingle: return "single";
    }
    return "unknown";
}

std::string_view to_string(SolverChoice s) {
    switch (s) {
        case SolverChoice::kFrankWolfe: return "fw";
        case SolverChoice::kPga: return "pga";
        case SolverChoice::kBoth: return "both";
    }
    return "unknown";
}

SolverChoice parse_solver(std::string_view text) {
    if (text == "fw") return SolverChoice::kFrankWolfe;
    if (text == "pga") return SolverChoice::kPga;
    if (text == "both") return SolverChoice::kBoth;
    throw DomainError("unknown solver '" + std::string(text) + "'");
}

ExperimentPlan ExperimentPlan::defaults(Experiment experiment) {
    ExperimentPlan plan;
    plan.experiment = experiment;
    switch (experiment) {
        case Experiment::kCompare:
            plan.solver = SolverChoice::kBoth;
            break;
        case Experiment::kSweepLambda:
            plan.layout = grid::Layout::kNineRoom;
            plan.k = 6;
            plan.grid = {0, 2, 4, 6, 8, 10};
            break;
        case Experiment::kSweepK:
            plan.layout = grid::Layout::kNineRoom;
            plan.grid = {2, 3, 4, 5, 6, 7, 8};
            break;
        case Experiment::kSweepAlpha:
            plan.trials = 20;
            plan.grid = {0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 1.0};
            break;
        case Experiment::kSingle:
            plan.layout = grid::Layout::kNineRoom;
            plan.trials = 1;
            plan.k = 6;
            break;
    }
    return plan;
}

namespace {

bool is_sweep(Experiment e) {
    return e == Experiment::kSweepLambda || e == Experiment::kSweepK || e == Experiment::kSweepAlpha;
}

} // namespace

void ExperimentPlan::validate() const {
    if (trials < 1) throw DomainError("trials must be >= 1");
    if (workers < 1) throw DomainError("workers must be >= 1");
    if (is_sweep(experiment)) {
        if (grid.empty()) throw DomainError("sweep grid must not be empty");
        if (std::adjacent_find(grid.begin(), grid.end(), std::greater_equal<>()) != grid.end()) {
            throw DomainError("sweep grid must be strictly increasing");
        }
        for (double v : grid) {
            if (!std::isfinite(v)) throw DomainError("sweep values must be finite");
            if (experiment == Experiment::kSweepK && (v < 1.0 || v != std::floor(v))) {
                throw DomainError("k values must be positive integers");
            }
            if (experiment == Experiment::kSweepAlpha && !(v > 0.0 && v <= 1.0)) {
                throw DomainError("alpha values must lie in (0, 1]");
            }
            if (experiment == Experiment::kSweepLambda && v < 0.0) {
                throw DomainError("lambda values must be nonnegative");
            }
        }
    }
    if (experiment == Experiment::kSingle && solver == SolverChoice::kBoth) {
        throw DomainError("single runs exactly one solver");
    }
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0, 1]");
}

std::string ExperimentPlan::to_json() const {
    nlohmann::json j;
    j["experiment"] = std::string(to_string(experiment));
    j["layout"] = std::string(grid::to_string(layout));
    j["trials"] = trials;
    j["k"] = k;
    j["lambda"] = lambda;
    j["alpha"] = alpha;
    j["grid"] = grid;
    j["seed"] = seed;
    j["max_iterations"] = max_iterations;
    j["fw_tolerance"] = fw_tolerance;
    j["pga_tolerance"] = pga_tolerance;
    j["solver"] = std::string(to_string(solver));
    j["pga_stop"] = pga_stop == PgaStopRule::kGradientMapping ? "mapping" : "difference";
    j["workers"] = workers;
    j["out_dir"] = out_dir ? out_dir->string() : "";
    j["artifacts"] = artifacts;
    j["emit_monitor"] = emit_monitor;
    return j.dump(2) + "\n";
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

} // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t trial, double value) {
    // +0.0 and -0.0 name the same grid point.
    const double canonical = value == 0.0 ? 0.0 : value;
    std::uint64_t h = splitmix64(base);
    h = splitmix64(h ^ trial);
    h = splitmix64(h ^ std::bit_cast<std::uint64_t>(canonical));
    return h;
}

const SummaryRow* ExperimentResult::find(double swept_value, std::string_view solver) const {
    for (const auto& row : summary) {
        if (row.swept_value == swept_value && row.solver == solver) return &row;
    }
    return nullptr;
}

namespace {

struct Job {
    double value;
    std::size_t trial;
};

std::vector<double> job_values(const ExperimentPlan& plan) {
    switch (plan.experiment) {
        case Experiment::kSweepLambda:
        case Experiment::kSweepK:
        case Experiment::kSweepAlpha: return plan.grid;
        default: return {plan.lambda};
    }
}

std::vector<std::string> solver_names(SolverChoice choice) {
    switch (choice) {
        case SolverChoice::kFrankWolfe: return {"fw"};
        case SolverChoice::kPga: return {"pga"};
        case SolverChoice::kBoth: return {"fw", "pga"};
    }
    return {};
}

SolverConfig solver_config(const ExperimentPlan& plan, std::uint64_t solver_seed) {
    SolverConfig cfg;
    cfg.k = plan.k;
    cfg.lambda = plan.lambda;
    cfg.max_iterations = plan.max_iterations;
    cfg.fw_gap_tolerance = plan.fw_tolerance;
    cfg.pga_step_tolerance = plan.pga_tolerance;
    cfg.pga_stop_rule = plan.pga_stop;
    cfg.seed = solver_seed;
    return cfg;
}

std::string value_tag(double v) { return format_double(v); }

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << text;
}

std::vector<std::string> write_heatmaps(const fs::path& dir, std::size_t trial,
                                        const grid::GridWorldSpec& spec, const SolveReport& report) {
    std::vector<std::string> paths;
    for (std::size_t i = 0; i < report.final_set.size(); ++i) {
        const auto path = dir / ("occupancy_" + std::to_string(trial) + "_" + std::to_string(i) + ".svg");
        write_text(path, grid::render_occupancy_svg(spec, report.final_set[i]));
        paths.push_back(path.string());
    }
    return paths;
}

void write_trial_artifacts(const fs::path& dir, std::size_t trial, const grid::GridWorldSpec& spec,
                           const SolveReport& report, bool emit_monitor, TrialRecord& record) {
    fs::create_directories(dir);
    {
        std::ofstream out(dir / ("trace_" + std::to_string(trial) + ".csv"), std::ios::binary);
        write_trace_csv(out, report);
    }
    if (emit_monitor) {
        std::ofstream out(dir / ("monitor_" + std::to_string(trial) + ".csv"), std::ios::binary);
        write_monitor_csv(out, convergence_monitor(report));
    }
    record.heatmaps = write_heatmaps(dir, trial, spec, report);
}

std::vector<TrialRecord> run_job(const ExperimentPlan& base, const Job& job) {
    ExperimentPlan plan = base;
    switch (plan.experiment) {
        case Experiment::kSweepLambda: plan.lambda = job.value; break;
        case Experiment::kSweepK: plan.k = static_cast<std::size_t>(job.value); break;
        case Experiment::kSweepAlpha: plan.alpha = job.value; break;
        default: break;
    }

    const auto world_seed = derive_seed(plan.seed, job.trial, job.value);
    const auto solver_seed = splitmix64(world_seed ^ 0x5f3759dfull);
    std::vector<TrialRecord> records;
    for (const auto& name : solver_names(plan.solver)) {
        TrialRecord rec;
        rec.swept_value = job.value;
        rec.trial = job.trial;
        rec.solver = name;
        rec.world_seed = world_seed;
        rec.solver_seed = solver_seed;
        records.push_back(std::move(rec));
    }

    std::optional<grid::GridWorld> world;
    try {
        world = grid::generate(plan.layout, world_seed, plan.alpha);
        const double optimal = optimal_policy_lp(world->mdp).value;
        for (auto& rec : records) rec.optimal_reward = optimal;
    } catch (const std::exception& e) {
        for (auto& rec : records) rec.error = e.what();
        return records;
    }

    const auto cfg = solver_config(plan, solver_seed);
    for (auto& rec : records) {
        try {
            const auto report = rec.solver == "fw" ? frank_wolfe(world->mdp, cfg) : pga(world->mdp, cfg);
            rec.mean_reward_per_policy = report.mean_reward_per_policy();
            rec.mean_pairwise_jsd = report.average_pairwise_jsd();
            rec.objective = report.objective;
            rec.runtime_seconds = report.wall_time;
            rec.iterations = report.per_iteration.size();
            rec.termination = std::string(to_string(report.termination));
            if (plan.out_dir && plan.artifacts) {
                const auto dir = *plan.out_dir / (rec.solver + "_" + value_tag(job.value));
                write_trial_artifacts(dir, job.trial, world->spec, report, plan.emit_monitor, rec);
            }
        } catch (const std::exception& e) {
            rec.error = e.what();
        }
    }
    return records;
}

void write_outputs(const ExperimentResult& result) {
    const auto& dir = *result.plan.out_dir;
    fs::create_directories(dir);
    write_text(dir / "plan.json", result.plan.to_json());
    {
        std::ofstream out(dir / "summary.csv", std::ios::binary);
        write_summary_csv(out, result.summary);
    }
    {
        std::ofstream out(dir / "runtime.csv", std::ios::binary);
        write_runtime_csv(out, result.summary);
    }
    {
        std::ofstream out(dir / "trials.csv", std::ios::binary);
        write_trials_csv(out, result.records);
    }
}

} // namespace

ExperimentResult run(const ExperimentPlan& plan) {
    plan.validate();
    if (plan.experiment == Experiment::kSingle) throw DomainError("use run_single for single runs");

    std::vector<Job> jobs;
    for (double v : job_values(plan)) {
        for (std::size_t t = 0; t < plan.trials; ++t) jobs.push_back({v, t});
    }

    std::vector<std::vector<TrialRecord>> slots(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (auto i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) {
            slots[i] = run_job(plan, jobs[i]);
        }
    };
    const auto thread_count = std::min(plan.workers, jobs.size());
    if (thread_count <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < thread_count; ++w) pool.emplace_back(worker);
    }

    ExperimentResult result;
    result.plan = plan;
    for (auto& slot : slots) {
        for (auto& rec : slot) result.records.push_back(std::move(rec));
    }
    result.summary = summarize(result.records);
    if (plan.out_dir) write_outputs(result);
    return result;
}

namespace {

ExperimentResult run_as(ExperimentPlan plan, Experiment experiment) {
    plan.experiment = experiment;
    return run(plan);
}

} // namespace

ExperimentResult run_compare(ExperimentPlan plan) { return run_as(std::move(plan), Experiment::kCompare); }
ExperimentResult run_sweep_lambda(ExperimentPlan plan) { return run_as(std::move(plan), Experiment::kSweepLambda); }
ExperimentResult run_sweep_k(ExperimentPlan plan) { return run_as(std::move(plan), Experiment::kSweepK); }
ExperimentResult run_sweep_alpha(ExperimentPlan plan) { return run_as(std::move(plan), Experiment::kSweepAlpha); }

SingleResult run_single(const ExperimentPlan& input) {
    ExperimentPlan plan = input;
    plan.experiment = Experiment::kSingle;
    plan.validate();
    const auto world_seed = derive_seed(plan.seed, 0, plan.lambda);
    auto world = grid::generate(plan.layout, world_seed, plan.alpha);
    const double optimal = optimal_policy_lp(world.mdp).value;
    const auto cfg = solver_config(plan, splitmix64(world_seed ^ 0x5f3759dfull));
    auto report = plan.solver == SolverChoice::kPga ? pga(world.mdp, cfg) : frank_wolfe(world.mdp, cfg);
    auto monitor = convergence_monitor(report);

    if (plan.out_dir) {
        const auto& dir = *plan.out_dir;
        fs::create_directories(dir);
        write_text(dir / "plan.json", plan.to_json());
        write_text(dir / "report.json", report_to_json(report) + "\n");
        write_text(dir / "world.json", grid::spec_to_json(world.spec) + "\n");
        write_text(dir / "layout.svg", grid::render_spec_svg(world.spec));
        {
            std::ofstream out(dir / "trace_0.csv", std::ios::binary);
            write_trace_csv(out, report);
        }
        if (plan.emit_monitor) {
            std::ofstream out(dir / "monitor_0.csv", std::ios::binary);
            write_monitor_csv(out, monitor);
        }
        if (plan.artifacts) write_heatmaps(dir, 0, world.spec, report);
    }
    return {std::move(world), std::move(report), std::move(monitor), optimal};
}

std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records) {
    std::vector<SummaryRow> rows;
    std::vector<std::vector<const TrialRecord*>> groups;
    for (const auto& rec : records) {
        auto it = std::find_if(rows.begin(), rows.end(), [&](const SummaryRow& r) {
            return r.swept_value == rec.swept_value && r.solver == rec.solver;
        });
        if (it == rows.end()) {
            SummaryRow row;
            row.swept_value = rec.swept_value;
            row.solver = rec.solver;
            rows.push_back(row);
            groups.emplace_back();
            it = rows.end() - 1;
        }
        if (rec.ok()) groups[static_cast<std::size_t>(it - rows.begin())].push_back(&rec);
    }

    auto mean_sd = [](const std::vector<const TrialRecord*>& g, auto field) {
        const auto n = static_cast<double>(g.size());
        if (g.empty()) return std::pair{std::nan(""), std::nan("")};
        double sum = 0.0;
        for (const auto* r : g) sum += field(*r);
        const double mean = sum / n;
        if (g.size() < 2) return std::pair{mean, 0.0};
        double sq = 0.0;
        for (const auto* r : g) sq += (field(*r) - mean) * (field(*r) - mean);
        return std::pair{mean, std::sqrt(sq / (n - 1.0))};
    };

    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto& row = rows[i];
        const auto& g = groups[i];
        row.trials = g.size();
        std::tie(row.mean_reward_per_policy, row.sd_reward) =
            mean_sd(g, [](const TrialRecord& r) { return r.mean_reward_per_policy; });
        std::tie(row.mean_pairwise_jsd, row.sd_jsd) =
            mean_sd(g, [](const TrialRecord& r) { return r.mean_pairwise_jsd; });
        row.optimal_reward_ref = mean_sd(g, [](const TrialRecord& r) { return r.optimal_reward; }).first;
        row.mean_iterations =
            mean_sd(g, [](const TrialRecord& r) { return static_cast<double>(r.iterations); }).first;
        std::tie(row.mean_runtime_seconds, row.sd_runtime_seconds) =
            mean_sd(g, [](const TrialRecord& r) { return r.runtime_seconds; });
    }
    return rows;
}

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
    os << "swept_value,solver,trials,mean_reward_per_policy,sd_reward,mean_pairwise_jsd,sd_jsd,"
          "optimal_reward_ref,mean_iterations\n";
    for (const auto& r : rows) {
        os << format_double(r.swept_value) << ',' << r.solver << ',' << r.trials << ','
           << format_double(r.mean_reward_per_policy) << ',' << format_double(r.sd_reward) << ','
           << format_double(r.mean_pairwise_jsd) << ',' << format_double(r.sd_jsd) << ','
           << format_double(r.optimal_reward_ref) << ',' << format_double(r.mean_iterations) << '\n';
    }
}

void write_runtime_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
    os << "swept_value,solver,trials,mean_runtime_s,sd_runtime_s\n";
    for (const auto& r : rows) {
        os << format_double(r.swept_value) << ',' << r.solver << ',' << r.trials << ','
           << format_double(r.mean_runtime_seconds) << ',' << format_double(r.sd_runtime_seconds) << '\n';
    }
}

void write_trials_csv(std::ostream& os, const std::vector<TrialRecord>& records) {
    os << "swept_value,trial,solver,world_seed,solver_seed,mean_reward_per_policy,mean_pairwise_jsd,"
          "objective,iterations,termination,optimal_reward_ref,runtime_s,status\n";
    for (const auto& r : records) {
        std::string status = r.ok() ? "ok" : r.error;
        std::replace(status.begin(), status.end(), ',', ';');
        std::replace(status.begin(), status.end(), '\n', ' ');
        os << format_double(r.swept_value) << ',' << r.trial << ',' << r.solver << ',' << r.world_seed
           << ',' << r.solver_seed << ',' << format_double(r.mean_reward_per_policy) << ','
           << format_double(r.mean_pairwise_jsd) << ',' << format_double(r.objective) << ','
           << r.iterations << ',' << r.termination << ',' << format_double(r.optimal_reward) << ','
           << format_double(r.runtime_seconds) << ',' << status << '\n';
    }
}

} // namespace divplan::exp
