#include "fieldrank/cost.hpp"

#include <algorithm>

namespace fieldrank {

Tour nn_order(const Region& region, CellId start, std::vector<CellId> points) {
    if (!region.is_valid(start))
        throw std::invalid_argument("nn_order: start cell " + std::to_string(start) +
                                    " is not valid");
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    std::erase(points, start);
    for (CellId p : points)
        if (!region.is_valid(p))
            throw std::invalid_argument("nn_order: cell " + std::to_string(p) + " is not valid");

    Tour tour;
    tour.order.reserve(points.size() + 1);
    tour.order.push_back(start);
    std::vector<bool> visited(points.size(), false);
    CellId current = start;
    for (std::size_t step = 0; step < points.size(); ++step) {
        int best = -1;
        double best_d = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (visited[i]) continue;
            double d = euclidean(region, current, points[i]);
            // points is sorted, so the first of equal distances has lowest index
            if (best < 0 || d < best_d) {
                best = static_cast<int>(i);
                best_d = d;
            }
        }
        visited[best] = true;
        tour.cost += best_d;
        current = points[best];
        tour.order.push_back(current);
    }
    return tour;
}

double nn_cost(const Region& region, CellId start, const std::vector<CellId>& points) {
    return nn_order(region, start, points).cost;
}

}  // namespace fieldrank
