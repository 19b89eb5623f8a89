#include "fieldrank/planner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <Eigen/Dense>

namespace fieldrank {

namespace {

constexpr double kCostFloor = 1e-9;

// Cholesky factor of jitter*I + sum_c y_c y_c^T, computed by QR of the stacked
// matrix [sqrt(jitter)*I; Y_S^T].  Working on the square root avoids the
// precision loss of forming the Gram matrix when jitter dominates some
// directions, and keeps from-scratch values consistent with rank-one updates.
Eigen::MatrixXd fisher_factor(const Eigen::MatrixXd& Y, const std::vector<int>& cells,
                              double jitter) {
    const int k = static_cast<int>(Y.rows());
    const int n = static_cast<int>(cells.size());
    Eigen::MatrixXd A(k + n, k);
    A.topRows(k) = std::sqrt(jitter) * Eigen::MatrixXd::Identity(k, k);
    for (int i = 0; i < n; ++i) {
        int c = cells[i];
        if (c < 0 || c >= Y.cols())
            throw std::out_of_range("fisher_info: column " + std::to_string(c) + " out of range");
        A.row(k + i) = Y.col(c).transpose();
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
    Eigen::MatrixXd R = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    for (int j = 0; j < k; ++j) {
        if (R(j, j) == 0.0)
            throw NumericalError("fisher_info: factorization produced a zero pivot");
        if (R(j, j) < 0) R.row(j) = -R.row(j);
    }
    return R.transpose();
}

}  // namespace

double fisher_info(const Eigen::MatrixXd& Y, const std::vector<int>& cells, double jitter) {
    if (cells.empty()) throw std::invalid_argument("fisher_info: empty cell set");
    if (jitter <= 0) throw std::invalid_argument("fisher_info: jitter must be positive");
    Eigen::MatrixXd L = fisher_factor(Y, cells, jitter);
    return 2.0 * L.diagonal().array().log().sum();
}

FisherState state_init(const Eigen::MatrixXd& Y, const std::vector<int>& cells, double jitter) {
    if (jitter <= 0) throw std::invalid_argument("state_init: jitter must be positive");
    FisherState s;
    s.chol_lower = fisher_factor(Y, cells, jitter);
    s.logdet = 2.0 * s.chol_lower.diagonal().array().log().sum();
    return s;
}

FisherState state_with_column(const FisherState& state, const Eigen::VectorXd& y) {
    const int k = state.k();
    if (y.size() != k) throw std::invalid_argument("state_with_column: dimension mismatch");
    FisherState next = state;
    Eigen::VectorXd w = y;
    auto& L = next.chol_lower;
    // Rank-one Cholesky update of L L^T + w w^T via Givens rotations on the
    // stacked factor [L^T; w^T]; rotation coefficients are bounded by 1, which
    // keeps small jitter-scale pivots accurate.
    for (int j = 0; j < k; ++j) {
        double r = std::hypot(L(j, j), w[j]);
        double c = L(j, j) / r;
        double s = w[j] / r;
        L(j, j) = r;
        for (int i = j + 1; i < k; ++i) {
            double lij = L(i, j);
            L(i, j) = c * lij + s * w[i];
            w[i] = c * w[i] - s * lij;
        }
    }
    next.logdet = 2.0 * L.diagonal().array().log().sum();
    return next;
}

FisherState state_with_cell(const FisherState& state, const Eigen::MatrixXd& Y, int cell) {
    if (cell < 0 || cell >= Y.cols())
        throw std::out_of_range("state_with_cell: column " + std::to_string(cell) +
                                " out of range");
    return state_with_column(state, Y.col(cell));
}

SamplePlan plan(const Eigen::MatrixXd& Y, const Region& region, CellId start,
                const PlannerConfig& cfg) {
    if (!region.is_valid(start))
        throw std::invalid_argument("plan: start cell " + std::to_string(start) +
                                    " is not valid");
    if (Y.cols() != region.num_valid())
        throw std::invalid_argument("plan: Y columns != region valid-cell count");
    const int k = static_cast<int>(Y.rows());

    SamplePlan out;
    out.start = start;
    out.budget = cfg.budget;
    out.method = "greedy";

    // Seed: start plus the k-1 nearest valid cells (ties by lowest index).
    std::vector<std::pair<double, CellId>> by_dist;
    for (int d = 0; d < region.num_valid(); ++d) {
        CellId c = region.cell_of_dense(d);
        if (c == start) continue;
        by_dist.emplace_back(euclidean(region, start, c), c);
    }
    std::sort(by_dist.begin(), by_dist.end());
    out.cells.push_back(start);
    for (int i = 0; i < k - 1 && i < static_cast<int>(by_dist.size()); ++i)
        out.cells.push_back(by_dist[i].second);
    out.init_cells = out.cells;

    auto dense_cells = [&](const std::vector<CellId>& cells) {
        std::vector<int> d;
        d.reserve(cells.size());
        for (CellId c : cells) d.push_back(region.dense_index(c));
        return d;
    };

    double current_cost = nn_cost(region, start, out.cells);
    if (current_cost > cfg.budget) {
        out.over_budget = true;
        Tour t = nn_order(region, start, out.cells);
        out.path = t.order;
        out.cost = t.cost;
        out.fisher = fisher_info(Y, dense_cells(out.cells), cfg.jitter);
        return out;
    }

    std::vector<bool> selected(region.size(), false);
    for (CellId c : out.cells) selected[c] = true;

    FisherState state = state_init(Y, dense_cells(out.cells), cfg.jitter);
    std::mt19937_64 rng(cfg.seed);

    for (;;) {
        // Candidate pool: all unselected valid cells, or a random subset.
        std::vector<CellId> pool;
        for (int d = 0; d < region.num_valid(); ++d) {
            CellId c = region.cell_of_dense(d);
            if (!selected[c]) pool.push_back(c);
        }
        if (cfg.candidate_pool && static_cast<int>(pool.size()) > *cfg.candidate_pool) {
            std::shuffle(pool.begin(), pool.end(), rng);
            pool.resize(*cfg.candidate_pool);
            std::sort(pool.begin(), pool.end());
        }
        if (pool.empty()) break;

        CellId best_cell = -1;
        double best_ratio = 0.0;
        double best_cost = 0.0;
        std::vector<CellId> trial = out.cells;
        trial.push_back(-1);
        for (CellId x : pool) {
            trial.back() = x;
            double cost = nn_cost(region, start, trial);
            if (cost > cfg.budget) continue;  // Delta_x = 0, infeasible
            double gain = state_with_cell(state, Y, region.dense_index(x)).logdet - state.logdet;
            double ratio = gain / std::max(cost - current_cost, kCostFloor);
            if (ratio > best_ratio) {  // strict: ties keep the lowest index
                best_cell = x;
                best_ratio = ratio;
                best_cost = cost;
            }
        }
        if (best_cell < 0 || best_ratio <= cfg.info_tol) break;
        out.cells.push_back(best_cell);
        selected[best_cell] = true;
        state = state_with_cell(state, Y, region.dense_index(best_cell));
        current_cost = best_cost;
    }

    Tour t = nn_order(region, start, out.cells);
    out.path = t.order;
    out.cost = t.cost;
    out.fisher = fisher_info(Y, dense_cells(out.cells), cfg.jitter);
    return out;
}

void store_plan(const SamplePlan& plan, const Region& region,
                const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write plan file " + path.string());
    out.precision(17);
    out << "order,cell_index,row,col\n";
    for (std::size_t i = 0; i < plan.path.size(); ++i) {
        auto [r, c] = cell_coords(region, plan.path[i]);
        out << i << ',' << plan.path[i] << ',' << r << ',' << c << '\n';
    }
    out << "# cost=" << plan.cost << " budget=" << plan.budget << " fisher=" << plan.fisher
        << '\n';
}

}  // namespace fieldrank
