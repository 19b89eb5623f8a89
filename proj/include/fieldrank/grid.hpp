#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "fieldrank/errors.hpp"

namespace fieldrank {

// Linear index into the full rows x cols grid, row-major.
using CellId = int;

// A grid-discretized 2-D region. Cells can be marked invalid (e.g. ocean);
// valid cells additionally carry a compact dense index in [0, L).
class Region {
public:
    Region(int rows, int cols, std::vector<std::uint8_t> valid_mask);

    static Region full(int rows, int cols);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int size() const { return rows_ * cols_; }

    // L: number of valid cells.
    int num_valid() const { return static_cast<int>(cell_of_dense_.size()); }

    bool in_range(CellId cell) const { return cell >= 0 && cell < size(); }
    bool is_valid(CellId cell) const;

    // Compact index of a valid cell; throws on invalid/out-of-range cells.
    int dense_index(CellId cell) const;
    CellId cell_of_dense(int dense) const;

    const std::vector<std::uint8_t>& valid_mask() const { return valid_; }

private:
    int rows_;
    int cols_;
    std::vector<std::uint8_t> valid_;
    std::vector<int> dense_of_cell_;  // -1 for invalid cells
    std::vector<CellId> cell_of_dense_;
};

using RegionPtr = std::shared_ptr<const Region>;

std::pair<int, int> cell_coords(const Region& region, CellId cell);
CellId cell_from_coords(const Region& region, int row, int col);

// Distance in cell-width units (grid spacing = 1).
double euclidean(const Region& region, CellId a, CellId b);

// 8-connected valid neighbors within grid bounds, ascending index order.
std::vector<CellId> neighbors(const Region& region, CellId cell);

// One time snapshot of the field over a region's valid cells.
// values has length L; NaN marks a missing observation.
struct Snapshot {
    RegionPtr region;
    Eigen::VectorXd values;

    bool has(int dense) const { return std::isfinite(values[dense]); }
    int num_present() const;
};

// D in R^{T x L} plus the observation mask realizing the projection onto
// observed entries. Masked-out values are ignored by all consumers.
struct DataMatrix {
    Eigen::MatrixXd values;
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask;

    int T() const { return static_cast<int>(values.rows()); }
    int L() const { return static_cast<int>(values.cols()); }
};

DataMatrix stack_to_matrix(const std::vector<Snapshot>& snapshots);

// Snapshot CSV: rows lines of cols comma-separated fields, each a decimal
// real or the literal "nan" (missing and invalid cells alike).
Snapshot load_snapshot(const std::filesystem::path& path, RegionPtr region);
void store_snapshot(const Snapshot& snapshot, const std::filesystem::path& path);

// Region manifest: "rows cols" then one line of 0/1 flags per grid row.
Region load_region(const std::filesystem::path& path);
void store_region(const Region& region, const std::filesystem::path& path);

// Stack manifest: snapshot CSV paths in time order, one per line.
// Relative paths are resolved against the manifest's directory.
std::vector<std::filesystem::path> load_manifest(const std::filesystem::path& path);
void store_manifest(const std::vector<std::filesystem::path>& paths,
                    const std::filesystem::path& path);

std::vector<Snapshot> load_stack(const std::filesystem::path& manifest, RegionPtr region);

}  // namespace fieldrank
