#pragma once

#include <cstdint>
#include <vector>

#include "driftband/core.hpp"

namespace driftband {

// Same closed form as optimal_psi with the product-space dimension d_a + d_x.
double contextual_optimal_psi(std::uint64_t T, double L, int d_a, int d_x, double c = 1.0);

// Per-(snapped context, arm) statistics for the contextual loop. Rows are
// independent bandit instances; a row only changes on rounds whose snapped
// context lands in it.
struct ContextArmTable {
    GridCover arm_cover;
    GridCover ctx_cover;
    std::vector<std::vector<ArmStats>> rows;  // [ctx index][arm index]

    // Throws BudgetExceededError when |A0| * |X0| would pass the cell budget.
    static ContextArmTable make(GridCover arm_cover, GridCover ctx_cover);
};

enum class ContextSource { UniformIid, Replay };

struct ContextualRunResult {
    RunResult run;                        // principal_arm indexes the arm cover
    std::vector<Point> contexts;          // x_t per round
    std::vector<std::size_t> ctx_indices; // snapped row per round
    ContextArmTable table;                // final statistics
};

// One episode of the contextual incentivized UCB loop: observe x_t, snap it
// to the context grid, and run an incentivized UCB step restricted to that
// row. Rewards are drawn at the true context; pseudo-regret is measured
// against the continuous per-context optimum.
ContextualRunResult run_contextual_episode(const GridCover& arm_cover, const GridCover& ctx_cover,
                                           const MeanRewardModel& reward, const NoiseModel& noise,
                                           const DriftModel& drift_model, std::uint64_t T,
                                           LogMode mode, ContextSource source,
                                           const std::vector<Point>* replay, EpisodeRngs& rngs);

// Baseline policies restricted to the snapped row, with kappa = 0 and clean
// feedback, mirroring the stochastic baselines.
ContextualRunResult run_contextual_baseline_episode(
    const GridCover& arm_cover, const GridCover& ctx_cover, const MeanRewardModel& reward,
    const NoiseModel& noise, BaselineKind kind, std::uint64_t T, LogMode mode,
    ContextSource source, const std::vector<Point>* replay, EpisodeRngs& rngs);

} // namespace driftband
