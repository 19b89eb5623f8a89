#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "fieldrank/grid.hpp"

using namespace fieldrank;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
    auto dir = fs::temp_directory_path() / "fieldrank_grid_tests";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("cell_coords row-major arithmetic") {
    auto r = Region::full(3, 3);
    CHECK(cell_coords(r, 0) == std::pair{0, 0});
    CHECK(cell_coords(r, 4) == std::pair{1, 1});
    CHECK_THROWS(cell_coords(r, 9));
    CHECK_THROWS(cell_coords(r, -1));
}

TEST_CASE("euclidean distance") {
    auto r = Region::full(5, 6);
    CHECK(euclidean(r, cell_from_coords(r, 0, 0), cell_from_coords(r, 3, 4)) ==
          doctest::Approx(5.0));
    CHECK(euclidean(r, 7, 7) == 0.0);
    CHECK(euclidean(r, cell_from_coords(r, 0, 0), cell_from_coords(r, 0, 2)) ==
          doctest::Approx(2.0));
    CHECK_THROWS(euclidean(r, 0, 100));
}

TEST_CASE("euclidean triangle inequality") {
    auto r = Region::full(8, 8);
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> pick(0, r.size() - 1);
    for (int i = 0; i < 200; ++i) {
        int a = pick(rng), b = pick(rng), c = pick(rng);
        CHECK(euclidean(r, a, b) <= euclidean(r, a, c) + euclidean(r, c, b) + 1e-12);
    }
}

TEST_CASE("neighbors connectivity and masking") {
    auto r = Region::full(3, 3);
    CHECK(neighbors(r, 4).size() == 8);
    CHECK(neighbors(r, 0).size() == 3);

    std::vector<std::uint8_t> mask(9, 1);
    mask[1] = 0;  // (0,1) invalid
    Region masked(3, 3, mask);
    auto n = neighbors(masked, 0);
    CHECK(n == std::vector<CellId>{3, 4});
    CHECK_THROWS(neighbors(masked, 1));
}

TEST_CASE("neighbors is symmetric") {
    std::vector<std::uint8_t> mask(5 * 5, 1);
    mask[7] = mask[12] = mask[18] = 0;
    Region r(5, 5, mask);
    for (int d = 0; d < r.num_valid(); ++d) {
        CellId a = r.cell_of_dense(d);
        for (CellId b : neighbors(r, a)) {
            auto back = neighbors(r, b);
            CHECK(std::find(back.begin(), back.end(), a) != back.end());
        }
    }
}

TEST_CASE("stack_to_matrix shapes and mask placement") {
    auto region = std::make_shared<Region>(Region::full(2, 2));
    auto snap = [&](std::initializer_list<double> vals) {
        Snapshot s;
        s.region = region;
        s.values = Eigen::Map<const Eigen::VectorXd>(std::data(vals), 4);
        return s;
    };
    double nan = std::numeric_limits<double>::quiet_NaN();

    auto full = stack_to_matrix({snap({1, 2, 3, 4}), snap({5, 6, 7, 8})});
    CHECK(full.T() == 2);
    CHECK(full.L() == 4);
    CHECK(full.mask.all());

    auto sparse = stack_to_matrix({snap({1, nan, 3, 4})});
    CHECK(sparse.mask.cast<int>().sum() == 3);
    CHECK_FALSE(sparse.mask(0, 1));

    auto three = stack_to_matrix({snap({1, 2, 3, 4}), snap({1, 2, 3, 4}), snap({1, 2, 3, 4})});
    CHECK(three.T() == 3);

    CHECK_THROWS(stack_to_matrix({}));
    auto other_region = std::make_shared<Region>(Region::full(2, 2));
    Snapshot mixed;
    mixed.region = other_region;
    mixed.values.setZero(4);
    CHECK_THROWS(stack_to_matrix({snap({1, 2, 3, 4}), mixed}));
}

TEST_CASE("projecting a stacked row reproduces the snapshot") {
    auto region = std::make_shared<Region>(Region::full(2, 3));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(0, 1);
    std::vector<Snapshot> snaps;
    for (int t = 0; t < 4; ++t) {
        Snapshot s;
        s.region = region;
        s.values.resize(6);
        for (int j = 0; j < 6; ++j)
            s.values[j] = unit(rng) < 0.3 ? std::numeric_limits<double>::quiet_NaN()
                                          : unit(rng);
        snaps.push_back(s);
    }
    auto d = stack_to_matrix(snaps);
    for (int t = 0; t < 4; ++t)
        for (int j = 0; j < 6; ++j) {
            CHECK(d.mask(t, j) == snaps[t].has(j));
            if (d.mask(t, j)) CHECK(d.values(t, j) == snaps[t].values[j]);
        }
}

TEST_CASE("snapshot CSV round trip") {
    std::vector<std::uint8_t> mask(3 * 4, 1);
    mask[5] = 0;
    auto region = std::make_shared<Region>(Region(3, 4, mask));
    Snapshot s;
    s.region = region;
    s.values.resize(region->num_valid());
    for (int j = 0; j < region->num_valid(); ++j) s.values[j] = 0.1 * j - 0.5;
    s.values[2] = std::numeric_limits<double>::quiet_NaN();

    auto path = temp_file("snap.csv");
    store_snapshot(s, path);
    Snapshot back = load_snapshot(path, region);
    for (int j = 0; j < region->num_valid(); ++j) {
        CHECK(back.has(j) == s.has(j));
        if (s.has(j)) CHECK(back.values[j] == s.values[j]);
    }
    // storing the loaded snapshot must be byte-identical
    auto path2 = temp_file("snap2.csv");
    store_snapshot(back, path2);
    std::ifstream f1(path), f2(path2);
    std::string a((std::istreambuf_iterator<char>(f1)), {});
    std::string b((std::istreambuf_iterator<char>(f2)), {});
    CHECK(a == b);
}

TEST_CASE("snapshot CSV error reporting") {
    auto region = std::make_shared<Region>(Region::full(2, 2));
    auto path = temp_file("bad.csv");

    {
        std::ofstream out(path);
        out << "1,2\n3\n";  // ragged
    }
    CHECK_THROWS_AS(load_snapshot(path, region), FormatError);

    {
        std::ofstream out(path);
        out << "1,2\n3,abc\n";
    }
    CHECK_THROWS_WITH_AS(load_snapshot(path, region),
                         doctest::Contains("row 1, col 1"), FormatError);

    {
        std::ofstream out(path);
        out << "1,nan\n3,4\n";
    }
    Snapshot s = load_snapshot(path, region);
    CHECK_FALSE(s.has(1));
}

TEST_CASE("region manifest round trip") {
    std::vector<std::uint8_t> mask(2 * 3, 1);
    mask[4] = 0;
    Region r(2, 3, mask);
    auto path = temp_file("region.txt");
    store_region(r, path);
    Region back = load_region(path);
    CHECK(back.rows() == 2);
    CHECK(back.cols() == 3);
    CHECK(back.valid_mask() == r.valid_mask());
}

TEST_CASE("stack manifest resolves relative paths") {
    auto region = std::make_shared<Region>(Region::full(2, 2));
    Snapshot s;
    s.region = region;
    s.values.setOnes(4);
    store_snapshot(s, temp_file("m0.csv"));
    store_manifest({"m0.csv"}, temp_file("stack.manifest"));
    auto snaps = load_stack(temp_file("stack.manifest"), region);
    CHECK(snaps.size() == 1);
    CHECK(snaps[0].values[0] == 1.0);
}

TEST_CASE("region validity bookkeeping") {
    CHECK_THROWS(Region(2, 2, std::vector<std::uint8_t>(3, 1)));
    CHECK_THROWS(Region(2, 2, std::vector<std::uint8_t>(4, 0)));  // L = 0
    std::vector<std::uint8_t> mask = {1, 0, 0, 1};
    Region r(2, 2, mask);
    CHECK(r.num_valid() == 2);
    CHECK(r.dense_index(3) == 1);
    CHECK(r.cell_of_dense(1) == 3);
    CHECK_THROWS(r.dense_index(1));
}
