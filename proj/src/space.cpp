#include "driftband/space.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "driftband/errors.hpp"

namespace driftband {

int points_per_dim(double psi) {
    if (!(psi > 0.0)) {
        throw InvalidParameterError("points_per_dim: psi must be > 0");
    }
    if (psi >= 1.0) {
        return 1;
    }
    return static_cast<int>(std::ceil(1.0 / psi));
}

GridCover build_cover(int d, double psi, std::uint64_t max_points) {
    if (d < 1 || d > kMaxDimension) {
        throw InvalidParameterError("build_cover: dimension must be in [1, 16]");
    }
    const int k = points_per_dim(psi);

    // k^d with overflow guard; the budget error names the offending count.
    std::uint64_t count = 1;
    bool overflow = false;
    for (int i = 0; i < d; ++i) {
        if (count > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(k)) {
            overflow = true;
            break;
        }
        count *= static_cast<std::uint64_t>(k);
    }
    if (overflow || count > max_points) {
        std::ostringstream msg;
        msg << "build_cover: k^d = ";
        if (overflow) {
            msg << std::pow(static_cast<double>(k), d);
        } else {
            msg << count;
        }
        msg << " exceeds the arm budget " << max_points;
        throw BudgetExceededError(msg.str());
    }

    GridCover cover;
    cover.d = d;
    cover.psi_target = psi;
    cover.k = k;
    cover.points.reserve(count);

    std::vector<int> idx(d, 0);
    Point p(d);
    const double denom = 2.0 * k;
    for (std::uint64_t n = 0; n < count; ++n) {
        for (int j = 0; j < d; ++j) {
            p[j] = (2.0 * idx[j] + 1.0) / denom;
        }
        cover.points.push_back(p);
        // advance the lexicographic counter, last axis fastest
        for (int j = d - 1; j >= 0; --j) {
            if (++idx[j] < k) break;
            idx[j] = 0;
        }
    }
    return cover;
}

double optimal_psi(std::uint64_t T, double L, int d, double c) {
    if (T < 2) {
        throw InvalidParameterError("optimal_psi: T must be >= 2 so log T > 0");
    }
    if (!(L > 0.0)) {
        throw InvalidParameterError("optimal_psi: L must be > 0");
    }
    if (d < 1) {
        throw InvalidParameterError("optimal_psi: d must be >= 1");
    }
    if (!(c > 0.0)) {
        throw InvalidParameterError("optimal_psi: c must be > 0");
    }
    const double Td = static_cast<double>(T);
    return c * std::pow(std::log(Td) / (Td * L * L), 1.0 / (d + 2));
}

std::size_t snap(const Point& q, const GridCover& cover) {
    if (static_cast<int>(q.size()) != cover.d) {
        throw InvalidParameterError("snap: point dimension does not match cover");
    }
    const int d = cover.d;
    const int k = cover.k;
    const double denom = 2.0 * k;

    // Per-axis distance to the nearest center, then the smallest cell index
    // whose center is within the overall l-inf radius. The product of those
    // per-axis choices is the lexicographically (= lowest-index) smallest
    // argmin of the l-inf distance.
    double radius = 0.0;
    for (int j = 0; j < d; ++j) {
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < k; ++i) {
            const double c = (2.0 * i + 1.0) / denom;
            best = std::min(best, std::abs(q[j] - c));
        }
        radius = std::max(radius, best);
    }

    std::size_t index = 0;
    for (int j = 0; j < d; ++j) {
        int chosen = k - 1;
        for (int i = 0; i < k; ++i) {
            const double c = (2.0 * i + 1.0) / denom;
            if (std::abs(q[j] - c) <= radius) {
                chosen = i;
                break;
            }
        }
        index = index * static_cast<std::size_t>(k) + static_cast<std::size_t>(chosen);
    }
    return index;
}

} // namespace driftband
