#include "fieldrank/grid.hpp"

#include <cmath>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

namespace fieldrank {

namespace {

std::string cell_str(CellId cell) { return "cell " + std::to_string(cell); }

}  // namespace

Region::Region(int rows, int cols, std::vector<std::uint8_t> valid_mask)
    : rows_(rows), cols_(cols), valid_(std::move(valid_mask)) {
    if (rows_ <= 0 || cols_ <= 0)
        throw std::invalid_argument("Region: rows and cols must be positive");
    if (valid_.size() != static_cast<std::size_t>(rows_) * cols_)
        throw std::invalid_argument("Region: mask length != rows*cols");
    dense_of_cell_.assign(valid_.size(), -1);
    for (int i = 0; i < size(); ++i) {
        if (valid_[i]) {
            dense_of_cell_[i] = static_cast<int>(cell_of_dense_.size());
            cell_of_dense_.push_back(i);
        }
    }
    if (cell_of_dense_.empty())
        throw std::invalid_argument("Region: at least one valid cell required");
}

Region Region::full(int rows, int cols) {
    if (rows <= 0 || cols <= 0)
        throw std::invalid_argument("Region: rows and cols must be positive");
    return Region(rows, cols, std::vector<std::uint8_t>(static_cast<std::size_t>(rows) * cols, 1));
}

bool Region::is_valid(CellId cell) const {
    return in_range(cell) && valid_[cell] != 0;
}

int Region::dense_index(CellId cell) const {
    if (!in_range(cell))
        throw std::out_of_range("Region::dense_index: " + cell_str(cell) + " out of range");
    int d = dense_of_cell_[cell];
    if (d < 0)
        throw std::invalid_argument("Region::dense_index: " + cell_str(cell) + " is not valid");
    return d;
}

CellId Region::cell_of_dense(int dense) const {
    if (dense < 0 || dense >= num_valid())
        throw std::out_of_range("Region::cell_of_dense: index out of range");
    return cell_of_dense_[dense];
}

std::pair<int, int> cell_coords(const Region& region, CellId cell) {
    if (!region.in_range(cell))
        throw std::out_of_range("cell_coords: " + cell_str(cell) + " out of range");
    return {cell / region.cols(), cell % region.cols()};
}

CellId cell_from_coords(const Region& region, int row, int col) {
    if (row < 0 || row >= region.rows() || col < 0 || col >= region.cols())
        throw std::out_of_range("cell_from_coords: coordinates out of range");
    return row * region.cols() + col;
}

double euclidean(const Region& region, CellId a, CellId b) {
    auto [ra, ca] = cell_coords(region, a);
    auto [rb, cb] = cell_coords(region, b);
    double dr = ra - rb;
    double dc = ca - cb;
    return std::sqrt(dr * dr + dc * dc);
}

std::vector<CellId> neighbors(const Region& region, CellId cell) {
    if (!region.is_valid(cell))
        throw std::invalid_argument("neighbors: " + cell_str(cell) + " is not a valid cell");
    auto [r, c] = cell_coords(region, cell);
    std::vector<CellId> out;
    for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
            if (dr == 0 && dc == 0) continue;
            int nr = r + dr, nc = c + dc;
            if (nr < 0 || nr >= region.rows() || nc < 0 || nc >= region.cols()) continue;
            CellId n = nr * region.cols() + nc;
            if (region.is_valid(n)) out.push_back(n);
        }
    }
    return out;  // loop order is already ascending row-major
}

int Snapshot::num_present() const {
    int n = 0;
    for (Eigen::Index i = 0; i < values.size(); ++i)
        if (std::isfinite(values[i])) ++n;
    return n;
}

DataMatrix stack_to_matrix(const std::vector<Snapshot>& snapshots) {
    if (snapshots.empty())
        throw std::invalid_argument("stack_to_matrix: empty snapshot list");
    const Region* region = snapshots.front().region.get();
    for (const auto& s : snapshots)
        if (s.region.get() != region)
            throw std::invalid_argument("stack_to_matrix: snapshots from mixed regions");
    const int T = static_cast<int>(snapshots.size());
    const int L = region->num_valid();
    DataMatrix d;
    d.values.setZero(T, L);
    d.mask.setConstant(T, L, false);
    for (int t = 0; t < T; ++t) {
        const auto& s = snapshots[t];
        if (s.values.size() != L)
            throw std::invalid_argument("stack_to_matrix: snapshot length != L");
        for (int j = 0; j < L; ++j) {
            if (s.has(j)) {
                d.values(t, j) = s.values[j];
                d.mask(t, j) = true;
            }
        }
    }
    return d;
}

namespace {

double parse_field(const std::string& tok, int row, int col, const std::filesystem::path& path) {
    if (tok == "nan") return std::numeric_limits<double>::quiet_NaN();
    double v;
    auto* first = tok.data();
    auto* last = tok.data() + tok.size();
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || p != last)
        throw FormatError(path.string() + ": row " + std::to_string(row) + ", col " +
                          std::to_string(col) + ": bad field '" + tok + "'");
    if (!std::isfinite(v))
        throw FormatError(path.string() + ": row " + std::to_string(row) + ", col " +
                          std::to_string(col) + ": non-finite value");
    return v;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

Snapshot load_snapshot(const std::filesystem::path& path, RegionPtr region) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open snapshot file " + path.string());
    Snapshot snap;
    snap.region = region;
    snap.values.setConstant(region->num_valid(), std::numeric_limits<double>::quiet_NaN());
    std::string line;
    for (int r = 0; r < region->rows(); ++r) {
        if (!std::getline(in, line))
            throw FormatError(path.string() + ": expected " + std::to_string(region->rows()) +
                              " rows, got " + std::to_string(r));
        std::stringstream ss(trim(line));
        std::string tok;
        int c = 0;
        while (std::getline(ss, tok, ',')) {
            if (c >= region->cols())
                throw FormatError(path.string() + ": row " + std::to_string(r) +
                                  ": too many fields");
            double v = parse_field(trim(tok), r, c, path);
            CellId cell = r * region->cols() + c;
            if (region->is_valid(cell))
                snap.values[region->dense_index(cell)] = v;
            ++c;
        }
        if (c != region->cols())
            throw FormatError(path.string() + ": row " + std::to_string(r) + ": expected " +
                              std::to_string(region->cols()) + " fields, got " +
                              std::to_string(c));
    }
    return snap;
}

void store_snapshot(const Snapshot& snapshot, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write snapshot file " + path.string());
    const Region& region = *snapshot.region;
    out.precision(17);
    for (int r = 0; r < region.rows(); ++r) {
        for (int c = 0; c < region.cols(); ++c) {
            if (c) out << ',';
            CellId cell = r * region.cols() + c;
            if (region.is_valid(cell) && snapshot.has(region.dense_index(cell)))
                out << snapshot.values[region.dense_index(cell)];
            else
                out << "nan";
        }
        out << '\n';
    }
}

Region load_region(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open region manifest " + path.string());
    int rows, cols;
    if (!(in >> rows >> cols) || rows <= 0 || cols <= 0)
        throw FormatError(path.string() + ": bad header, expected 'rows cols'");
    std::vector<std::uint8_t> mask;
    mask.reserve(static_cast<std::size_t>(rows) * cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            int f;
            if (!(in >> f) || (f != 0 && f != 1))
                throw FormatError(path.string() + ": bad validity flag at row " +
                                  std::to_string(r) + ", col " + std::to_string(c));
            mask.push_back(static_cast<std::uint8_t>(f));
        }
    }
    return Region(rows, cols, std::move(mask));
}

void store_region(const Region& region, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write region manifest " + path.string());
    out << region.rows() << ' ' << region.cols() << '\n';
    for (int r = 0; r < region.rows(); ++r) {
        for (int c = 0; c < region.cols(); ++c) {
            if (c) out << ' ';
            out << (region.valid_mask()[r * region.cols() + c] ? 1 : 0);
        }
        out << '\n';
    }
}

std::vector<std::filesystem::path> load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open stack manifest " + path.string());
    std::vector<std::filesystem::path> out;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty()) continue;
        std::filesystem::path p(line);
        if (p.is_relative()) p = path.parent_path() / p;
        out.push_back(p);
    }
    if (out.empty()) throw FormatError(path.string() + ": empty stack manifest");
    return out;
}

void store_manifest(const std::vector<std::filesystem::path>& paths,
                    const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write stack manifest " + path.string());
    for (const auto& p : paths) out << p.string() << '\n';
}

std::vector<Snapshot> load_stack(const std::filesystem::path& manifest, RegionPtr region) {
    std::vector<Snapshot> out;
    for (const auto& p : load_manifest(manifest)) out.push_back(load_snapshot(p, region));
    return out;
}

}  // namespace fieldrank
