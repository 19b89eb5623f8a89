#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fieldrank/cost.hpp"
#include "fieldrank/grid.hpp"

namespace fieldrank {

// log det(jitter*I + sum_{p in cells} Y_p Y_p^T) over dense column indices.
double fisher_info(const Eigen::MatrixXd& Y, const std::vector<int>& cells, double jitter);

// Cholesky factor of the Fisher matrix, maintained incrementally so the
// planner can score candidate cells without refactorizing.
struct FisherState {
    Eigen::MatrixXd chol_lower;
    double logdet = 0.0;

    int k() const { return static_cast<int>(chol_lower.rows()); }
};

FisherState state_init(const Eigen::MatrixXd& Y, const std::vector<int>& cells, double jitter);

// Rank-one update: returns a state for the set enlarged by one column.
// The input state is untouched.
FisherState state_with_column(const FisherState& state, const Eigen::VectorXd& y);
FisherState state_with_cell(const FisherState& state, const Eigen::MatrixXd& Y, int cell);

struct PlannerConfig {
    double budget = 0.0;
    double jitter = 1e-9;
    double info_tol = 1e-12;
    // Per-iteration random candidate subset size; absent = scan all valid cells.
    std::optional<int> candidate_pool;
    std::uint64_t seed = 0;
};

struct SamplePlan {
    CellId start = 0;
    std::vector<CellId> cells;       // unique, in selection order
    std::vector<CellId> path;        // waypoints as traveled (may revisit)
    double cost = 0.0;
    double fisher = std::numeric_limits<double>::quiet_NaN();
    double budget = 0.0;
    std::vector<CellId> init_cells;  // the k-1 seed cells plus start
    bool over_budget = false;        // seed set alone exceeded the budget
    std::string method = "greedy";
};

// Budgeted greedy: seed with start plus the k-1 nearest valid cells, then
// repeatedly add the feasible cell maximizing information gain per unit of
// added nearest-neighbor tour cost.
SamplePlan plan(const Eigen::MatrixXd& Y, const Region& region, CellId start,
                const PlannerConfig& cfg);

// Plan CSV: header order,cell_index,row,col; one line per waypoint in tour
// order; footer comments "# cost=... budget=... fisher=...".
void store_plan(const SamplePlan& plan, const Region& region,
                const std::filesystem::path& path);

}  // namespace fieldrank
