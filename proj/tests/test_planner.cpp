#include <doctest.h>

#include <fstream>
#include <random>

#include <Eigen/Dense>

#include "fieldrank/planner.hpp"

using namespace fieldrank;

namespace {

Eigen::MatrixXd random_factors(int k, int L, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd Y(k, L);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < L; ++j) Y(i, j) = gauss(rng);
    return Y;
}

std::vector<int> random_subset(int L, int max_size, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> count(1, max_size);
    std::uniform_int_distribution<int> pick(0, L - 1);
    std::vector<int> s;
    int n = count(rng);
    for (int i = 0; i < n; ++i) s.push_back(pick(rng));
    return s;
}

}  // namespace

TEST_CASE("fisher_info identity and 2x2 determinant oracles") {
    Eigen::MatrixXd Y(2, 2);
    Y << 1, 0, 0, 1;
    // det(I + eps I) = (1+eps)^2
    CHECK(fisher_info(Y, {0, 1}, 1e-9) == doctest::Approx(2e-9).epsilon(1e-3));

    Eigen::MatrixXd Y2(2, 2);
    Y2 << 1, 1, 0, 1;  // columns (1,0), (1,1): M = [[2,1],[1,1]], det 1
    CHECK(fisher_info(Y2, {0, 1}, 1e-9) == doctest::Approx(0.0).epsilon(1e-6));

    Eigen::MatrixXd Y3(2, 1);
    Y3 << 1, 0;  // same column twice: det = (2+eps)*eps
    double eps = 1e-9;
    CHECK(fisher_info(Y3, {0, 0}, eps) ==
          doctest::Approx(std::log((2 + eps) * eps)).epsilon(1e-9));

    CHECK_THROWS(fisher_info(Y, {}, 1e-9));
    CHECK_THROWS(fisher_info(Y, {5}, 1e-9));
    CHECK_THROWS(fisher_info(Y, {0}, 0.0));
}

TEST_CASE("incremental state matches from-scratch recomputation") {
    std::mt19937_64 rng(19);
    std::uniform_int_distribution<int> pick(0, 29);
    std::uniform_int_distribution<int> len(1, 20);
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::MatrixXd Y = random_factors(4, 30, 1000 + trial);
        std::vector<int> cells = {pick(rng)};
        FisherState state = state_init(Y, cells, 1e-9);
        int n = len(rng);
        for (int i = 0; i < n; ++i) {
            int c = pick(rng);
            FisherState next = state_with_cell(state, Y, c);
            cells.push_back(c);
            CHECK(std::abs(next.logdet - fisher_info(Y, cells, 1e-9)) < 1e-8);
            state = next;
        }
        // rebuilding from the member set reproduces logdet
        CHECK(std::abs(state_init(Y, cells, 1e-9).logdet - state.logdet) < 1e-8);
    }
}

TEST_CASE("state update leaves the original untouched and never decreases") {
    Eigen::MatrixXd Y = random_factors(3, 10, 77);
    FisherState s = state_init(Y, {0, 1, 2}, 1e-9);
    double before = s.logdet;
    FisherState t = state_with_cell(s, Y, 5);
    CHECK(s.logdet == before);
    CHECK(t.logdet >= before);

    // zero column: logdet unchanged
    Eigen::MatrixXd Yz = Y;
    Yz.col(7).setZero();
    FisherState z = state_with_cell(state_init(Yz, {0, 1, 2}, 1e-9), Yz, 7);
    CHECK(std::abs(z.logdet - state_init(Yz, {0, 1, 2}, 1e-9).logdet) < 1e-12);
}

TEST_CASE("jittered fisher information is monotone") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::MatrixXd Y = random_factors(3, 20, 2000 + trial);
        auto a = random_subset(20, 10, rng);
        std::uniform_int_distribution<int> pick(0, 19);
        int x = pick(rng);
        auto ax = a;
        ax.push_back(x);
        CHECK(fisher_info(Y, ax, 1e-9) >= fisher_info(Y, a, 1e-9) - 1e-12);
    }
}

TEST_CASE("jittered fisher information is submodular") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        int k = 2 + static_cast<int>(trial % 3);
        int L = 10 + static_cast<int>(trial % 21);
        Eigen::MatrixXd Y = random_factors(k, L, 3000 + trial);
        auto a = random_subset(L, 5, rng);
        auto b = a;
        for (int extra : random_subset(L, 5, rng)) b.push_back(extra);
        std::uniform_int_distribution<int> pick(0, L - 1);
        int x = pick(rng);
        auto ax = a;
        ax.push_back(x);
        auto bx = b;
        bx.push_back(x);
        double gain_a = fisher_info(Y, ax, 1e-9) - fisher_info(Y, a, 1e-9);
        double gain_b = fisher_info(Y, bx, 1e-9) - fisher_info(Y, b, 1e-9);
        CHECK(gain_a >= gain_b - 1e-9);
    }
}

TEST_CASE("plan with zero budget and rank 1 returns the start only") {
    auto r = Region::full(4, 4);
    Eigen::MatrixXd Y = random_factors(1, 16, 3);
    PlannerConfig cfg;
    cfg.budget = 0.0;
    auto p = plan(Y, r, 5, cfg);
    CHECK(p.cells == std::vector<CellId>{5});
    CHECK_FALSE(p.over_budget);
    CHECK(p.cost == 0.0);
    CHECK(p.fisher == doctest::Approx(fisher_info(Y, {r.dense_index(5)}, cfg.jitter)));
}

TEST_CASE("plan flags an over-budget seed set") {
    auto r = Region::full(4, 4);
    Eigen::MatrixXd Y = random_factors(3, 16, 4);
    PlannerConfig cfg;
    cfg.budget = 0.0;  // k-1 = 2 seed cells cannot be free
    auto p = plan(Y, r, 0, cfg);
    CHECK(p.over_budget);
    CHECK(p.cells.size() == 3);
    CHECK(p.cells == p.init_cells);
}

TEST_CASE("plan never selects a zero-information cell") {
    auto r = Region::full(3, 3);
    Eigen::MatrixXd Y = random_factors(2, 9, 8);
    Y.col(8).setZero();  // cell 8 carries no information at all
    PlannerConfig cfg;
    cfg.budget = 20.0;  // enough to visit the whole grid
    auto p = plan(Y, r, 0, cfg);
    CHECK(p.cells.size() == 8);  // all informative cells, not cell 8
    CHECK(std::find(p.cells.begin(), p.cells.end(), 8) == p.cells.end());
}

TEST_CASE("plan respects the budget and is deterministic") {
    auto r = Region::full(6, 6);
    Eigen::MatrixXd Y = random_factors(2, 36, 12);
    PlannerConfig cfg;
    cfg.budget = 8.0;
    cfg.seed = 5;
    auto a = plan(Y, r, 7, cfg);
    auto b = plan(Y, r, 7, cfg);
    CHECK(a.cells == b.cells);
    CHECK(a.cost <= cfg.budget);
    CHECK(a.cost == nn_cost(r, 7, a.cells));
    CHECK_THROWS(plan(Y, r, 100, cfg));
}

TEST_CASE("candidate pool subsampling still yields feasible plans") {
    auto r = Region::full(8, 8);
    Eigen::MatrixXd Y = random_factors(3, 64, 21);
    PlannerConfig cfg;
    cfg.budget = 10.0;
    cfg.candidate_pool = 10;
    cfg.seed = 3;
    auto p = plan(Y, r, 0, cfg);
    CHECK(p.cost <= cfg.budget);
    CHECK(p.cells.size() >= 3);
}

TEST_CASE("plan file format") {
    auto r = Region::full(3, 3);
    Eigen::MatrixXd Y = random_factors(1, 9, 2);
    PlannerConfig cfg;
    cfg.budget = 2.0;
    auto p = plan(Y, r, 4, cfg);
    auto path = std::filesystem::temp_directory_path() / "fieldrank_plan_test.csv";
    store_plan(p, r, path);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "order,cell_index,row,col");
    std::vector<std::string> rest;
    while (std::getline(in, line)) rest.push_back(line);
    REQUIRE(!rest.empty());
    CHECK(rest.back().rfind("# cost=", 0) == 0);
    CHECK(rest.size() == p.path.size() + 1);
}
