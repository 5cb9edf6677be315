#pragma once

#include <functional>
#include <optional>
#include <random>

#include "driftband/space.hpp"

namespace driftband {

enum class RewardKind {
    LinearStochastic,   // mu(a) = L * sum_i a_i
    LinearContextual,   // nu(a,x) = L * (sum_i a_i + sum_j x_j)
};

struct MeanRewardModel {
    RewardKind kind = RewardKind::LinearStochastic;
    double L = 1.0;     // Lipschitz constant
    int d_a = 1;
    int d_x = 0;        // 0 in the stochastic setting

    // Supremum of the mean over the continuous arm space (all-ones arm).
    double mu_star() const { return L * d_a; }
    // Per-context optimum nu(a*(x), x) for the linear model.
    double nu_star(const Point& x) const;
};

double mean_reward(const MeanRewardModel& model, const Point& a, const Point* x = nullptr);

enum class NoiseInterpretation { Variance, StdDev };

struct NoiseModel {
    double scale_param = 0.05;
    NoiseInterpretation interpretation = NoiseInterpretation::Variance;
    bool clip_to_unit = false;

    double stddev() const;
};

// mean + Gaussian noise; clamped to [0,1] afterwards when clip_to_unit is set.
// scale_param == 0 returns the mean exactly without consuming the generator.
double sample_reward(const MeanRewardModel& model, const NoiseModel& noise, const Point& a,
                     const Point* x, std::mt19937_64& rng);

// Linear drift channel: gamma_t(kappa) = ell_t * kappa with ell_t resampled
// uniformly from [ell_low, ell_high] each round.
struct DriftModel {
    double ell_low = 0.45;
    double ell_high = 0.55;

    double ell_max() const { return ell_high; }
};

struct DriftDraw {
    double gamma;
    double ell_t;
};

// Throws InvalidParameterError for kappa < 0 (compensation is non-negative
// by construction). When ell_low == ell_high no randomness is consumed.
DriftDraw drift(const DriftModel& model, double kappa, std::mt19937_64& rng);

// Max observed |mean(p) - mean(p')| / Phi(p, p') over sampled pairs, with
// Phi the l-inf metric on arms (plus the l-inf metric on contexts for the
// contextual product metric).
double verify_lipschitz(const MeanRewardModel& model, int n_pairs, std::mt19937_64& rng);

// Same check against an arbitrary mean function on [0,1]^{d_a} x [0,1]^{d_x}.
double verify_lipschitz_fn(const std::function<double(const Point&, const Point&)>& mean_fn,
                           int d_a, int d_x, int n_pairs, std::mt19937_64& rng);

} // namespace driftband
