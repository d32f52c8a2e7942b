#ifndef ILMKIT_POPULATION_HPP
#define ILMKIT_POPULATION_HPP

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ilmkit/errors.hpp"

namespace ilm {

// Spatial population: ids are dense in [0, N), the pairwise Euclidean
// distance matrix is computed once at construction and immutable after.
class Population {
public:
    Population() = default;

    std::size_t size() const { return coords_.size(); }
    double x(std::size_t i) const { return coords_[i].first; }
    double y(std::size_t i) const { return coords_[i].second; }
    double distance(std::size_t i, std::size_t j) const { return dist_[i * coords_.size() + j]; }
    const std::vector<double>& distance_matrix() const { return dist_; }

    // True if any off-diagonal pair is coincident (power-law models reject
    // such populations up front; the kernel is singular at d = 0).
    bool has_coincident_pair() const {
        const std::size_t n = coords_.size();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (distance(i, j) == 0.0) return true;
        return false;
    }

    friend Population build_population(const std::vector<std::pair<double, double>>& coords);

private:
    std::vector<std::pair<double, double>> coords_;
    std::vector<double> dist_;  // row-major N x N, symmetric, zero diagonal
};

inline Population build_population(const std::vector<std::pair<double, double>>& coords) {
    if (coords.size() < 2) throw input_error("population needs at least 2 individuals");
    for (const auto& [cx, cy] : coords)
        if (!std::isfinite(cx) || !std::isfinite(cy)) throw input_error("non-finite coordinate");
    Population pop;
    pop.coords_ = coords;
    const std::size_t n = coords.size();
    pop.dist_.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = coords[i].first - coords[j].first;
            const double dy = coords[i].second - coords[j].second;
            const double d = std::hypot(dx, dy);
            pop.dist_[i * n + j] = d;
            pop.dist_[j * n + i] = d;
        }
    }
    return pop;
}

}  // namespace ilm

#endif
