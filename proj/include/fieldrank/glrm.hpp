#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <vector>

#include <Eigen/Core>

#include "fieldrank/errors.hpp"
#include "fieldrank/grid.hpp"

namespace fieldrank {

// Rank-k factorization D ~= X^T Y. Columns of X are temporal factors,
// columns of Y spatial factors (one per valid cell, dense indexing).
struct LowRankModel {
    Eigen::MatrixXd X;  // k x T
    Eigen::MatrixXd Y;  // k x L

    int rank() const { return static_cast<int>(Y.rows()); }
    int T() const { return static_cast<int>(X.cols()); }
    int L() const { return static_cast<int>(Y.cols()); }
};

struct FitConfig {
    int rank = 5;
    int max_iters = 200;
    double rel_tol = 1e-6;
    double ridge = 1e-6;
    std::uint64_t seed = 0;
};

// Sparse observations of one snapshot, keyed by dense valid-cell index
// (the column index of Y).
using ObservationSet = std::map<int, double>;

struct FitResult {
    LowRankModel model;
    // Masked objective after each alternating sweep.
    std::vector<double> objective_history;
    // Objective plus ridge*(|X|_F^2 + |Y|_F^2); non-increasing per sweep.
    std::vector<double> regularized_history;
    int iterations = 0;
};

struct Completion {
    Eigen::VectorXd values;  // length L, fully populated
    Eigen::VectorXd latent;  // the estimated x
    bool low_sample = false;  // |S| < k: prediction underdetermined
};

// Alternating masked least squares for min |P_Omega(X^T Y - D)|_F^2
// (+ optional ridge on both factors). Deterministic given cfg.seed.
FitResult fit(const DataMatrix& data, const FitConfig& cfg);

// Sum of squared residuals over observed entries only.
double objective(const LowRankModel& model, const DataMatrix& data);

// Minimum-norm least-squares solution of |Y_S^T x - d_S|^2.
Eigen::VectorXd estimate_latent(const Eigen::MatrixXd& Y, const ObservationSet& obs);

// Predict the whole region as Y^T x from a sparse observation set.
Completion complete(const LowRankModel& model, const ObservationSet& obs);

// Binary model file: magic "GLRM1", LE u64 k, T, L, X row-major f64,
// Y row-major f64.
void save_model(const LowRankModel& model, const std::filesystem::path& path);
LowRankModel load_model(const std::filesystem::path& path);

}  // namespace fieldrank
