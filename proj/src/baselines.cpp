#include "fieldrank/baselines.hpp"

#include <algorithm>
#include <random>
#include <set>

namespace fieldrank {

TransectDirection transect_direction_from_name(const std::string& name) {
    if (name == "up") return TransectDirection::up;
    if (name == "down") return TransectDirection::down;
    if (name == "left") return TransectDirection::left;
    if (name == "right") return TransectDirection::right;
    throw std::invalid_argument("unknown transect direction '" + name + "'");
}

std::string transect_direction_name(TransectDirection dir) {
    switch (dir) {
        case TransectDirection::up: return "up";
        case TransectDirection::down: return "down";
        case TransectDirection::left: return "left";
        case TransectDirection::right: return "right";
    }
    throw std::invalid_argument("bad transect direction");
}

namespace {

std::pair<int, int> direction_delta(TransectDirection dir) {
    switch (dir) {
        case TransectDirection::up: return {-1, 0};
        case TransectDirection::down: return {1, 0};
        case TransectDirection::left: return {0, -1};
        case TransectDirection::right: return {0, 1};
    }
    throw std::invalid_argument("bad transect direction");
}

bool step_ok(const Region& region, int r, int c) {
    if (r < 0 || r >= region.rows() || c < 0 || c >= region.cols()) return false;
    return region.is_valid(r * region.cols() + c);
}

}  // namespace

SamplePlan transect(const Region& region, CellId start, TransectDirection dir, double budget) {
    if (!region.is_valid(start))
        throw std::invalid_argument("transect: start cell " + std::to_string(start) +
                                    " is not valid");
    SamplePlan p;
    p.start = start;
    p.budget = budget;
    p.method = "transect-" + transect_direction_name(dir);
    p.path.push_back(start);
    p.cells.push_back(start);

    auto [dr, dc] = direction_delta(dir);
    auto [r, c] = cell_coords(region, start);
    bool reflected = false;
    while (p.cost + 1.0 <= budget) {
        int nr = r + dr, nc = c + dc;
        if (!step_ok(region, nr, nc)) {
            if (reflected) break;
            reflected = true;
            // One orthogonal step: pick the side with more remaining cells,
            // ties toward the positive row/col direction.
            int or_, oc_;
            if (dr != 0) {
                int pos = region.cols() - 1 - c, neg = c;
                oc_ = (pos >= neg) ? 1 : -1;
                or_ = 0;
            } else {
                int pos = region.rows() - 1 - r, neg = r;
                or_ = (pos >= neg) ? 1 : -1;
                oc_ = 0;
            }
            if (!step_ok(region, r + or_, c + oc_)) {
                or_ = -or_;
                oc_ = -oc_;
                if (!step_ok(region, r + or_, c + oc_)) break;
            }
            nr = r + or_;
            nc = c + oc_;
            dr = -dr;
            dc = -dc;
        }
        r = nr;
        c = nc;
        CellId cell = r * region.cols() + c;
        p.cost += 1.0;
        p.path.push_back(cell);
        if (std::find(p.cells.begin(), p.cells.end(), cell) == p.cells.end())
            p.cells.push_back(cell);
    }
    return p;
}

SamplePlan random_walk(const Region& region, CellId start, double budget, std::uint64_t seed) {
    if (!region.is_valid(start))
        throw std::invalid_argument("random_walk: start cell " + std::to_string(start) +
                                    " is not valid");
    SamplePlan p;
    p.start = start;
    p.budget = budget;
    p.method = "random";
    p.path.push_back(start);
    p.cells.push_back(start);

    std::mt19937_64 rng(seed);
    std::set<CellId> visited{start};
    CellId current = start;
    for (;;) {
        std::vector<CellId> affordable;
        for (CellId n : neighbors(region, current))
            if (p.cost + euclidean(region, current, n) <= budget) affordable.push_back(n);
        if (affordable.empty()) break;
        std::vector<CellId> fresh;
        for (CellId n : affordable)
            if (!visited.count(n)) fresh.push_back(n);
        const auto& pick_from = fresh.empty() ? affordable : fresh;
        std::uniform_int_distribution<std::size_t> pick(0, pick_from.size() - 1);
        CellId next = pick_from[pick(rng)];
        p.cost += euclidean(region, current, next);
        current = next;
        p.path.push_back(next);
        if (visited.insert(next).second) p.cells.push_back(next);
    }
    return p;
}

}  // namespace fieldrank
