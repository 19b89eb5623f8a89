// fieldrank: fit a low-rank field model, plan budgeted sampling cells,
// reconstruct the field from sparse observations, and run evaluation trials.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fieldrank/baselines.hpp"
#include "fieldrank/glrm.hpp"
#include "fieldrank/grid.hpp"
#include "fieldrank/planner.hpp"
#include "fieldrank/sim.hpp"

namespace fs = std::filesystem;
using namespace fieldrank;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

ObservationSet load_observations(const fs::path& path, const Region& region) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open observation file " + path.string());
    ObservationSet obs;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (lineno == 1 && line.rfind("cell_index", 0) == 0) continue;
        std::stringstream ss(line);
        std::string a, b;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b))
            throw FormatError(path.string() + ": line " + std::to_string(lineno) +
                              ": expected 'cell_index,value'");
        try {
            CellId cell = std::stoi(a);
            double value = std::stod(b);
            obs[region.dense_index(cell)] = value;
        } catch (const FormatError&) {
            throw;
        } catch (const std::out_of_range&) {
            throw;
        } catch (const std::invalid_argument& e) {
            throw FormatError(path.string() + ": line " + std::to_string(lineno) + ": " +
                              e.what());
        }
    }
    if (obs.empty()) throw FormatError(path.string() + ": no observations");
    return obs;
}

// Config file: key=value lines under a [subcommand] section, e.g. [synth].
void add_config_support(CLI::App* cmd) { cmd->configurable(true); }

struct SynthArgs {
    SynthConfig cfg;
    std::string out_dir;
    bool create = false;
};

void write_dataset(const SynthData& data, const fs::path& dir) {
    store_region(*data.region, dir / "region.txt");
    auto write_stack = [&](const std::vector<Snapshot>& snaps, const std::string& stem) {
        std::vector<fs::path> names;
        for (std::size_t i = 0; i < snaps.size(); ++i) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%s_%03zu.csv", stem.c_str(), i);
            store_snapshot(snaps[i], dir / buf);
            names.emplace_back(buf);  // manifest-relative
        }
        store_manifest(names, dir / (stem + ".manifest"));
    };
    write_stack(data.train, "train");
    write_stack(data.test, "test");
    write_stack(data.truth, "truth");
}

int run_synth(const SynthArgs& args) {
    fs::path dir(args.out_dir);
    if (!fs::exists(dir)) {
        if (!args.create) {
            std::cerr << "error: output directory " << dir
                      << " does not exist (use --create)\n";
            return kExitData;
        }
        fs::create_directories(dir);
    }
    SynthData data = synth_generate(args.cfg);
    write_dataset(data, dir);
    std::cout << "wrote dataset to " << dir.string() << " (rows=" << args.cfg.rows
              << " cols=" << args.cfg.cols << " T_train=" << args.cfg.t_train
              << " T_test=" << args.cfg.t_test << ")\n";
    return 0;
}

struct FitArgs {
    std::string manifest;
    std::string region_path;
    std::string out_model;
    FitConfig cfg;
};

int run_fit(const FitArgs& args) {
    auto region = std::make_shared<Region>(load_region(args.region_path));
    auto snaps = load_stack(args.manifest, region);
    DataMatrix data = stack_to_matrix(snaps);
    FitResult res = fit(data, args.cfg);
    save_model(res.model, args.out_model);
    std::cout << "fit rank " << args.cfg.rank << " model in " << res.iterations
              << " iterations, final objective " << res.objective_history.back() << "\n";
    return 0;
}

struct PlanArgs {
    std::string model_path;
    std::string region_path;
    std::string out_path;
    std::string method = "greedy";
    CellId start = 0;
    PlannerConfig cfg;
    int candidate_pool = 0;  // 0 = scan all cells
};

int run_plan(PlanArgs& args) {
    auto region = std::make_shared<Region>(load_region(args.region_path));
    LowRankModel model = load_model(args.model_path);
    if (args.candidate_pool > 0) args.cfg.candidate_pool = args.candidate_pool;

    SamplePlan p;
    if (args.method == "greedy") {
        p = plan(model.Y, *region, args.start, args.cfg);
    } else if (args.method.rfind("transect-", 0) == 0) {
        p = transect(*region, args.start, transect_direction_from_name(args.method.substr(9)),
                     args.cfg.budget);
    } else if (args.method == "random") {
        p = random_walk(*region, args.start, args.cfg.budget, args.cfg.seed);
    } else {
        std::cerr << "error: unknown method '" << args.method << "'\n";
        return kExitUsage;
    }
    if (std::isnan(p.fisher)) {
        std::vector<int> dense;
        for (CellId c : p.cells) dense.push_back(region->dense_index(c));
        p.fisher = fisher_info(model.Y, dense, args.cfg.jitter);
    }
    store_plan(p, *region, args.out_path);
    std::cout << "plan: " << p.cells.size() << " cells, cost " << p.cost << ", fisher "
              << p.fisher << (p.over_budget ? " (over budget: seed set only)" : "") << "\n";
    return 0;
}

struct CompleteArgs {
    std::string model_path;
    std::string region_path;
    std::string obs_path;
    std::string out_path;
};

int run_complete(const CompleteArgs& args) {
    auto region = std::make_shared<Region>(load_region(args.region_path));
    LowRankModel model = load_model(args.model_path);
    if (model.L() != region->num_valid())
        throw FormatError("model L does not match region valid-cell count");
    ObservationSet obs = load_observations(args.obs_path, *region);
    Completion c = complete(model, obs);
    if (c.low_sample)
        std::cerr << "warning: only " << obs.size() << " observations for a rank "
                  << model.rank() << " model; prediction is underdetermined\n";
    Snapshot pred;
    pred.region = region;
    pred.values = c.values;
    store_snapshot(pred, args.out_path);
    std::cout << "wrote prediction from " << obs.size() << " observations to " << args.out_path
              << "\n";
    return 0;
}

struct EvalArgs {
    std::string dataset_dir;
    std::string model_path;
    std::string out_dir = ".";
    TrialProtocol protocol;
    std::vector<double> budgets;
    int candidate_pool = 0;
    bool heatmaps = false;
};

int run_eval(EvalArgs& args) {
    fs::path dir(args.dataset_dir);
    auto region = std::make_shared<Region>(load_region(dir / "region.txt"));
    auto test = load_stack(dir / "test.manifest", region);
    LowRankModel model = load_model(args.model_path);
    if (model.L() != region->num_valid())
        throw FormatError("model L does not match region valid-cell count");
    if (!args.budgets.empty()) args.protocol.budgets = args.budgets;
    if (args.candidate_pool > 0) args.protocol.candidate_pool = args.candidate_pool;

    TrialResults results = run_trials(*region, test, model, args.protocol);
    fs::path out(args.out_dir);
    fs::create_directories(out);
    store_report_csv(results.reports, out / "report.csv");
    store_aggregate_csv(results.aggregates, out / "aggregate.csv");

    if (args.heatmaps) {
        // One heatmap per (method, budget): first start, first repeat, first
        // test snapshot.
        for (const auto& method : args.protocol.methods) {
            for (double budget : args.protocol.budgets) {
                const TrialReport* first = nullptr;
                for (const auto& r : results.reports)
                    if (r.method == method && r.budget == budget && !r.excluded) {
                        first = &r;
                        break;
                    }
                if (!first) continue;
                SamplePlan p = plan_for_method(method, model, *region, first->start, budget,
                                               args.protocol, args.protocol.seed + 1);
                ObservationSet obs = simulate_observations(test.front(), p);
                if (obs.empty()) continue;
                Completion c = complete(model, obs);
                std::ostringstream name;
                name << "heatmap_" << method << "_b" << budget << ".csv";
                store_snapshot(error_heatmap(c.values, test.front()), out / name.str());
            }
        }
    }
    std::cout << "wrote " << results.reports.size() << " trial rows and "
              << results.aggregates.size() << " aggregate rows to " << out.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Low-rank field modeling, budgeted informative sampling, and reconstruction"};
    app.require_subcommand(1);
    app.set_config("--config", "",
                   "Config file with key=value lines under a [subcommand] section");
    app.allow_config_extras(false);
    bool dump = false;
    app.add_flag("--dump-config", dump, "Print the effective config and exit");

    SynthArgs synth_args;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic dataset");
    synth_cmd->add_option("--out", synth_args.out_dir, "Output directory")->required();
    synth_cmd->add_flag("--create", synth_args.create, "Create the output directory");
    synth_cmd->add_option("--rows", synth_args.cfg.rows)->check(CLI::PositiveNumber);
    synth_cmd->add_option("--cols", synth_args.cfg.cols)->check(CLI::PositiveNumber);
    synth_cmd->add_option("--rank", synth_args.cfg.rank)->check(CLI::PositiveNumber);
    synth_cmd->add_option("--t-train", synth_args.cfg.t_train)->check(CLI::PositiveNumber);
    synth_cmd->add_option("--t-test", synth_args.cfg.t_test)->check(CLI::PositiveNumber);
    synth_cmd->add_option("--noise-sigma", synth_args.cfg.noise_sigma)
        ->check(CLI::NonNegativeNumber);
    synth_cmd->add_option("--missing-prob", synth_args.cfg.missing_prob)
        ->check(CLI::Range(0.0, 0.999999));
    synth_cmd->add_option("--smoothness", synth_args.cfg.smoothness)->check(CLI::PositiveNumber);
    synth_cmd->add_option("--seed", synth_args.cfg.seed);
    add_config_support(synth_cmd);

    FitArgs fit_args;
    auto* fit_cmd = app.add_subcommand("fit", "Fit a low-rank model to a snapshot stack");
    fit_cmd->add_option("--manifest", fit_args.manifest, "Stack manifest file")->required();
    fit_cmd->add_option("--region", fit_args.region_path, "Region manifest file")->required();
    fit_cmd->add_option("--out", fit_args.out_model, "Output model file")->required();
    fit_cmd->add_option("--rank", fit_args.cfg.rank)->check(CLI::PositiveNumber);
    fit_cmd->add_option("--max-iters", fit_args.cfg.max_iters)->check(CLI::PositiveNumber);
    fit_cmd->add_option("--rel-tol", fit_args.cfg.rel_tol)->check(CLI::PositiveNumber);
    fit_cmd->add_option("--ridge", fit_args.cfg.ridge)->check(CLI::NonNegativeNumber);
    fit_cmd->add_option("--seed", fit_args.cfg.seed);
    add_config_support(fit_cmd);

    PlanArgs plan_args;
    auto* plan_cmd = app.add_subcommand("plan", "Plan a budgeted sampling path");
    plan_cmd->add_option("--model", plan_args.model_path)->required();
    plan_cmd->add_option("--region", plan_args.region_path)->required();
    plan_cmd->add_option("--out", plan_args.out_path)->required();
    plan_cmd->add_option("--start", plan_args.start, "Start cell index (row-major)")
        ->check(CLI::NonNegativeNumber);
    plan_cmd->add_option("--budget", plan_args.cfg.budget)->check(CLI::NonNegativeNumber);
    plan_cmd
        ->add_option("--method", plan_args.method,
                     "greedy | transect-{up,down,left,right} | random")
        ->check(CLI::IsMember({"greedy", "transect-up", "transect-down", "transect-left",
                               "transect-right", "random"}));
    plan_cmd->add_option("--jitter", plan_args.cfg.jitter)->check(CLI::PositiveNumber);
    plan_cmd->add_option("--info-tol", plan_args.cfg.info_tol)->check(CLI::NonNegativeNumber);
    plan_cmd->add_option("--candidate-pool", plan_args.candidate_pool,
                         "Random candidate subset per iteration (0 = all cells)")
        ->check(CLI::NonNegativeNumber);
    plan_cmd->add_option("--seed", plan_args.cfg.seed);
    add_config_support(plan_cmd);

    CompleteArgs complete_args;
    auto* complete_cmd =
        app.add_subcommand("complete", "Predict the full region from sparse observations");
    complete_cmd->add_option("--model", complete_args.model_path)->required();
    complete_cmd->add_option("--region", complete_args.region_path)->required();
    complete_cmd->add_option("--obs", complete_args.obs_path, "Observation CSV")->required();
    complete_cmd->add_option("--out", complete_args.out_path)->required();
    add_config_support(complete_cmd);

    EvalArgs eval_args;
    auto* eval_cmd = app.add_subcommand("eval", "Run the multi-trial evaluation protocol");
    eval_cmd->add_option("--dataset", eval_args.dataset_dir, "Dataset directory from synth")
        ->required();
    eval_cmd->add_option("--model", eval_args.model_path)->required();
    eval_cmd->add_option("--out-dir", eval_args.out_dir);
    eval_cmd->add_option("--budgets", eval_args.budgets, "Budget list")->delimiter(',');
    eval_cmd->add_option("--starts", eval_args.protocol.n_starts, "Number of start cells")
        ->check(CLI::PositiveNumber);
    eval_cmd->add_option("--n-random", eval_args.protocol.n_random,
                         "Random-baseline repeats per condition")
        ->check(CLI::PositiveNumber);
    eval_cmd->add_option("--min-obs", eval_args.protocol.min_obs,
                         "Exclude trials with fewer observations")
        ->check(CLI::NonNegativeNumber);
    eval_cmd->add_option("--jitter", eval_args.protocol.jitter)->check(CLI::PositiveNumber);
    eval_cmd->add_option("--candidate-pool", eval_args.candidate_pool)
        ->check(CLI::NonNegativeNumber);
    eval_cmd->add_option("--seed", eval_args.protocol.seed);
    eval_cmd->add_flag("--heatmaps", eval_args.heatmaps, "Write error-heatmap CSVs");
    add_config_support(eval_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitUsage;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        if (dump) {
            std::cout << app.config_to_str(true, false);
            return 0;
        }
        if (sub == synth_cmd) return run_synth(synth_args);
        if (sub == fit_cmd) return run_fit(fit_args);
        if (sub == plan_cmd) return run_plan(plan_args);
        if (sub == complete_cmd) return run_complete(complete_args);
        if (sub == eval_cmd) return run_eval(eval_args);
        return kExitUsage;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}
