#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace driftband {

// A point in the unit hypercube [0,1]^d.
using Point = std::vector<double>;

inline constexpr std::uint64_t kDefaultArmBudget = 1ull << 21;
inline constexpr int kMaxDimension = 16;

// Number of grid cells per axis for a mesh of width psi: ceil(1/psi),
// clamped to 1 for psi >= 1. Throws InvalidParameterError for psi <= 0.
int points_per_dim(double psi);

// Axis-aligned cell-center grid over [0,1]^d. Cells have l-inf diameter
// 1/k <= psi, so the centers form a psi-cover of the cube; the nearest
// center to any query is within 1/(2k) <= psi/2.
struct GridCover {
    int d = 1;
    double psi_target = 1.0;
    int k = 1;                  // cells per axis
    std::vector<Point> points;  // lexicographic in axis indices, size k^d

    std::size_t size() const { return points.size(); }
    double cell_radius() const { return 0.5 / static_cast<double>(k); }
};

GridCover build_cover(int d, double psi, std::uint64_t max_points = kDefaultArmBudget);

// Mesh width minimizing the regret trade-off for horizon T, Lipschitz
// constant L and covering dimension d:
//   psi = c * (log T / (T * L^2))^(1/(d+2))
// with natural log; the analysis constants are folded into c.
double optimal_psi(std::uint64_t T, double L, int d, double c = 1.0);

// Index of the nearest cover point to q under the l-inf metric, ties broken
// by lowest index. Throws InvalidParameterError on dimension mismatch.
std::size_t snap(const Point& q, const GridCover& cover);

} // namespace driftband
