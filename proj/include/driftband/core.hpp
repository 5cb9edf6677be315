#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "driftband/env.hpp"
#include "driftband/rng.hpp"
#include "driftband/space.hpp"

namespace driftband {

// Base of the exploration bonus: log t follows the loop round, log T pins
// the horizon (the deterministic drift bounds hold under the latter).
enum class LogMode { LogRound, LogHorizon };

struct ArmStats {
    std::uint64_t pulls = 0;
    double reward_sum = 0.0;   // sum of observed (drifted) rewards

    double empirical_mean() const {
        return pulls == 0 ? 0.0 : reward_sum / static_cast<double>(pulls);
    }
};

// mean + sqrt(2 log t / N); +inf for an unpulled arm so it is tried first.
double ucb_index(const ArmStats& stats, std::uint64_t t, LogMode mode, std::uint64_t T);

// Argmax of ucb_index / empirical mean, ties to the lowest index.
std::size_t select_principal(const std::vector<ArmStats>& stats, std::uint64_t t, LogMode mode,
                             std::uint64_t T);
std::size_t select_greedy(const std::vector<ArmStats>& stats);

// kappa_t = mean(g) - mean(a); non-negative whenever g is the greedy argmax.
double compensation(const std::vector<ArmStats>& stats, std::size_t g, std::size_t a);

struct StepRecord {
    std::uint64_t t = 0;            // 1-based round
    std::size_t principal_arm = 0;  // a_t
    std::size_t greedy_arm = 0;     // g_t
    double kappa = 0.0;
    double rho = 0.0;               // true noisy reward
    double gamma = 0.0;             // drift added to the report
    double observed = 0.0;          // rho + gamma
    double ell_t = 0.0;
    double pseudo_regret_inc = 0.0;   // mu* - mu(a_t)
    double realized_regret_inc = 0.0; // mu* - rho_t
};

struct RunResult {
    std::vector<StepRecord> records;
    std::vector<double> cum_pseudo_regret;
    std::vector<double> cum_realized_regret;
    std::vector<double> cum_compensation;
    std::vector<std::uint64_t> pull_counts;
    double discretization_gap = 0.0;  // mu* - best grid mean
};

// A finite arm set the loop can run against: true means for regret
// accounting plus a sampler for the noisy reward of one pull.
struct ArmSet {
    std::vector<double> means;
    double mu_star = 0.0;
    std::function<double(std::size_t, std::mt19937_64&)> sample;
};

// The sampler borrows the cover; keep it alive for the arm set's lifetime.
ArmSet make_grid_arm_set(const GridCover& cover, const MeanRewardModel& reward,
                         const NoiseModel& noise);

// One full episode of the incentivized UCB loop: principal picks by UCB,
// agent picks greedily, the gap is paid as compensation, and the observed
// reward is drifted by ell_t * kappa_t before entering the running means.
RunResult run_arm_episode(const ArmSet& arms, const DriftModel& drift_model, std::uint64_t T,
                          LogMode mode, EpisodeRngs& rngs);

RunResult run_episode(const GridCover& cover, const MeanRewardModel& reward,
                      const NoiseModel& noise, const DriftModel& drift_model, std::uint64_t T,
                      LogMode mode, EpisodeRngs& rngs);

enum class BaselineKind { GreedyOnly, UcbNoIncentive };

// GreedyOnly: the agent plays its empirical-best arm, nothing is paid and
// nothing drifts. UcbNoIncentive: the principal's UCB arm is pulled
// directly with kappa = 0 and clean feedback.
RunResult run_baseline_episode(const ArmSet& arms, BaselineKind kind, std::uint64_t T,
                               LogMode mode, EpisodeRngs& rngs);

} // namespace driftband
