#pragma once

#include <cstdint>

#include "fieldrank/planner.hpp"

namespace fieldrank {

enum class TransectDirection { up, down, left, right };

TransectDirection transect_direction_from_name(const std::string& name);
std::string transect_direction_name(TransectDirection dir);

// Straight-line path from start in dir, unit cost per step. On hitting a
// boundary or invalid cell with budget left, takes one orthogonal step and
// continues in the opposite direction; at most one reflection.
SamplePlan transect(const Region& region, CellId start, TransectDirection dir, double budget);

// Seeded random walk over 8-connected neighbors, preferring unvisited cells.
// May revisit (paying cost each time); revisits collapse in the cell set.
SamplePlan random_walk(const Region& region, CellId start, double budget, std::uint64_t seed);

}  // namespace fieldrank
