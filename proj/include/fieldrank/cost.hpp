#pragma once

#include <vector>

#include "fieldrank/grid.hpp"

namespace fieldrank {

// Travel ordering produced by the nearest-neighbor walk. order[0] is the
// designated start; cost is the summed Euclidean distance over consecutive
// pairs.
struct Tour {
    std::vector<CellId> order;
    double cost = 0.0;
};

// Greedy nearest-neighbor ordering from start. At each step the unvisited
// point nearest to the current point is appended; ties break to the lowest
// cell index. Duplicates (including the start) are deduplicated.
Tour nn_order(const Region& region, CellId start, std::vector<CellId> points);

double nn_cost(const Region& region, CellId start, const std::vector<CellId>& points);

}  // namespace fieldrank
