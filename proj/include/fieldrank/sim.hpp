#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fieldrank/baselines.hpp"
#include "fieldrank/glrm.hpp"
#include "fieldrank/grid.hpp"
#include "fieldrank/planner.hpp"

namespace fieldrank {

// Synthetic stand-in for the real environmental datasets: smooth rank-k*
// fields plus optional noise and missing entries.
struct SynthConfig {
    int rows = 20;
    int cols = 20;
    int rank = 3;
    int t_train = 20;
    int t_test = 5;
    double noise_sigma = 0.0;
    double missing_prob = 0.0;
    int smoothness = 4;  // low-frequency cosine fields mixed per component
    std::uint64_t seed = 0;
};

struct SynthData {
    RegionPtr region;
    std::vector<Snapshot> train;  // noisy, sparsified
    std::vector<Snapshot> test;   // noisy, sparsified
    std::vector<Snapshot> truth;  // noiseless, fully observed, test times
};

SynthData synth_generate(const SynthConfig& cfg);

// One entry per plan cell whose snapshot value is present.
ObservationSet simulate_observations(const Snapshot& snapshot, const SamplePlan& plan);

// Mean squared error over cells where truth is present; sampled cells are
// excluded unless include_sampled is set.
double reconstruction_error(const Eigen::VectorXd& pred, const Snapshot& truth,
                            const std::vector<int>& sampled_dense, bool include_sampled);

// MSE of predicting each test snapshot from all of its present cells: the
// reference "complete" condition, a lower bound for budgeted methods on
// noiseless data.
double complete_condition_mse(const LowRankModel& model, const std::vector<Snapshot>& test);

struct TrialReport {
    std::string method;
    double budget = 0.0;
    CellId start = 0;
    int repeat = 0;
    int n_observations = 0;  // minimum per-snapshot observation count
    double fisher = std::numeric_limits<double>::quiet_NaN();
    std::optional<double> recon_mse;
    bool excluded = false;
};

struct AggregateRow {
    std::string method;
    double budget = 0.0;
    double mean_fisher = std::numeric_limits<double>::quiet_NaN();
    double se_fisher = std::numeric_limits<double>::quiet_NaN();
    double mean_mse = std::numeric_limits<double>::quiet_NaN();
    double se_mse = std::numeric_limits<double>::quiet_NaN();
    int n_trials = 0;
};

struct TrialProtocol {
    std::vector<std::string> methods = {"greedy",        "transect-up",   "transect-down",
                                        "transect-left", "transect-right", "random"};
    std::vector<double> budgets = {5.0, 50.0, 200.0};
    int n_starts = 10;
    int n_random = 70;  // random-baseline repeats per condition
    int min_obs = 10;   // trials with fewer observations are excluded
    double jitter = 1e-9;
    double info_tol = 1e-12;
    std::optional<int> candidate_pool;
    std::uint64_t seed = 0;
};

struct TrialResults {
    std::vector<TrialReport> reports;
    std::vector<AggregateRow> aggregates;
};

TrialResults run_trials(const Region& region, const std::vector<Snapshot>& test,
                        const LowRankModel& model, const TrialProtocol& protocol);

// Build a plan for one named method ("greedy", "transect-<dir>", "random").
SamplePlan plan_for_method(const std::string& method, const LowRankModel& model,
                           const Region& region, CellId start, double budget,
                           const TrialProtocol& protocol, std::uint64_t seed);

std::vector<AggregateRow> aggregate_reports(const std::vector<TrialReport>& reports,
                                            const std::vector<std::string>& methods,
                                            const std::vector<double>& budgets);

void store_report_csv(const std::vector<TrialReport>& reports,
                      const std::filesystem::path& path);
void store_aggregate_csv(const std::vector<AggregateRow>& rows,
                         const std::filesystem::path& path);

// Per-cell |pred - truth| written as a snapshot CSV (plot-ready heatmap).
Snapshot error_heatmap(const Eigen::VectorXd& pred, const Snapshot& truth);

}  // namespace fieldrank
