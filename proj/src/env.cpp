#include "driftband/env.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "driftband/errors.hpp"

namespace driftband {

namespace {

double coord_sum(const Point& p) {
    return std::accumulate(p.begin(), p.end(), 0.0);
}

double linf(const Point& a, const Point& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

Point sample_cube(int d, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Point p(d);
    for (auto& c : p) c = unit(rng);
    return p;
}

} // namespace

double MeanRewardModel::nu_star(const Point& x) const {
    return L * (static_cast<double>(d_a) + coord_sum(x));
}

double mean_reward(const MeanRewardModel& model, const Point& a, const Point* x) {
    if (static_cast<int>(a.size()) != model.d_a) {
        throw InvalidParameterError("mean_reward: arm dimension does not match model");
    }
    switch (model.kind) {
    case RewardKind::LinearStochastic:
        return model.L * coord_sum(a);
    case RewardKind::LinearContextual:
        if (x == nullptr) {
            throw InvalidParameterError("mean_reward: contextual model needs a context");
        }
        if (static_cast<int>(x->size()) != model.d_x) {
            throw InvalidParameterError("mean_reward: context dimension does not match model");
        }
        return model.L * (coord_sum(a) + coord_sum(*x));
    }
    throw InvalidParameterError("mean_reward: unknown reward kind");
}

double NoiseModel::stddev() const {
    if (scale_param < 0.0) {
        throw InvalidParameterError("NoiseModel: scale_param must be >= 0");
    }
    return interpretation == NoiseInterpretation::Variance ? std::sqrt(scale_param)
                                                           : scale_param;
}

double sample_reward(const MeanRewardModel& model, const NoiseModel& noise, const Point& a,
                     const Point* x, std::mt19937_64& rng) {
    const double mean = mean_reward(model, a, x);
    double value = mean;
    if (noise.scale_param > 0.0) {
        std::normal_distribution<double> dist(mean, noise.stddev());
        value = dist(rng);
    }
    if (noise.clip_to_unit) {
        value = std::clamp(value, 0.0, 1.0);
    }
    return value;
}

DriftDraw drift(const DriftModel& model, double kappa, std::mt19937_64& rng) {
    if (kappa < 0.0) {
        throw InvalidParameterError("drift: kappa must be >= 0");
    }
    if (model.ell_low < 0.0 || model.ell_high < model.ell_low) {
        throw InvalidParameterError("drift: need 0 <= ell_low <= ell_high");
    }
    double ell = model.ell_low;
    if (model.ell_high > model.ell_low) {
        std::uniform_real_distribution<double> dist(model.ell_low, model.ell_high);
        ell = dist(rng);
    }
    return DriftDraw{ell * kappa, ell};
}

double verify_lipschitz_fn(const std::function<double(const Point&, const Point&)>& mean_fn,
                           int d_a, int d_x, int n_pairs, std::mt19937_64& rng) {
    if (n_pairs < 1) {
        throw InvalidParameterError("verify_lipschitz: n_pairs must be >= 1");
    }
    double worst = 0.0;
    for (int i = 0; i < n_pairs; ++i) {
        const Point a1 = sample_cube(d_a, rng);
        const Point a2 = sample_cube(d_a, rng);
        const Point x1 = sample_cube(d_x, rng);
        const Point x2 = sample_cube(d_x, rng);
        const double dist = linf(a1, a2) + linf(x1, x2);
        if (dist == 0.0) continue;
        const double diff = std::abs(mean_fn(a1, x1) - mean_fn(a2, x2));
        worst = std::max(worst, diff / dist);
    }
    return worst;
}

double verify_lipschitz(const MeanRewardModel& model, int n_pairs, std::mt19937_64& rng) {
    const bool contextual = model.kind == RewardKind::LinearContextual;
    return verify_lipschitz_fn(
        [&](const Point& a, const Point& x) {
            return mean_reward(model, a, contextual ? &x : nullptr);
        },
        model.d_a, contextual ? model.d_x : 0, n_pairs, rng);
}

} // namespace driftband
