#include "driftband/contextual.hpp"

#include <optional>
#include <random>
#include <utility>

#include "driftband/errors.hpp"

namespace driftband {

double contextual_optimal_psi(std::uint64_t T, double L, int d_a, int d_x, double c) {
    if (d_a < 1 || d_x < 0) {
        throw InvalidParameterError("contextual_optimal_psi: need d_a >= 1 and d_x >= 0");
    }
    return optimal_psi(T, L, d_a + d_x, c);
}

ContextArmTable ContextArmTable::make(GridCover arm_cover, GridCover ctx_cover) {
    const std::size_t cells = arm_cover.size() * ctx_cover.size();
    if (cells > kDefaultArmBudget) {
        throw BudgetExceededError("ContextArmTable: |A0| * |X0| = " + std::to_string(cells)
                                  + " exceeds the cell budget "
                                  + std::to_string(kDefaultArmBudget));
    }
    ContextArmTable table;
    table.rows.assign(ctx_cover.size(), std::vector<ArmStats>(arm_cover.size()));
    table.arm_cover = std::move(arm_cover);
    table.ctx_cover = std::move(ctx_cover);
    return table;
}

namespace {

ContextualRunResult run_loop(const GridCover& arm_cover, const GridCover& ctx_cover,
                             const MeanRewardModel& reward, const NoiseModel& noise,
                             const DriftModel& drift_model,
                             std::optional<BaselineKind> baseline, std::uint64_t T,
                             LogMode mode, ContextSource source,
                             const std::vector<Point>* replay, EpisodeRngs& rngs) {
    if (reward.kind != RewardKind::LinearContextual) {
        throw InvalidParameterError("run_contextual_episode: reward model must be contextual");
    }
    if (arm_cover.size() == 0 || ctx_cover.size() == 0) {
        throw InvalidStateError("run_contextual_episode: empty cover");
    }
    if (T < 1) {
        throw InvalidParameterError("run_contextual_episode: T must be >= 1");
    }
    if (source == ContextSource::Replay) {
        if (replay == nullptr || replay->size() < T) {
            throw InvalidParameterError(
                "run_contextual_episode: replay list must cover the horizon");
        }
    }

    ContextualRunResult out;
    out.table = ContextArmTable::make(arm_cover, ctx_cover);
    out.contexts.reserve(T);
    out.ctx_indices.reserve(T);
    out.run.records.reserve(T);
    out.run.cum_pseudo_regret.reserve(T);
    out.run.cum_realized_regret.reserve(T);
    out.run.cum_compensation.reserve(T);
    out.run.pull_counts.assign(arm_cover.size(), 0);

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double cum_pr = 0.0, cum_rr = 0.0, cum_comp = 0.0;

    for (std::uint64_t t = 1; t <= T; ++t) {
        Point x;
        if (source == ContextSource::Replay) {
            x = (*replay)[t - 1];
        } else {
            x.resize(ctx_cover.d);
            for (auto& c : x) c = unit(rngs.context);
        }
        const std::size_t xi = snap(x, out.table.ctx_cover);
        auto& row = out.table.rows[xi];

        StepRecord rec;
        rec.t = t;
        if (baseline) {
            rec.principal_arm = *baseline == BaselineKind::GreedyOnly
                                    ? select_greedy(row)
                                    : select_principal(row, t, mode, T);
            rec.greedy_arm = rec.principal_arm;
            rec.rho = sample_reward(reward, noise, out.table.arm_cover.points[rec.principal_arm],
                                    &x, rngs.reward);
            rec.observed = rec.rho;
        } else {
            rec.principal_arm = select_principal(row, t, mode, T);
            rec.greedy_arm = select_greedy(row);
            rec.kappa = compensation(row, rec.greedy_arm, rec.principal_arm);
            rec.rho = sample_reward(reward, noise, out.table.arm_cover.points[rec.principal_arm],
                                    &x, rngs.reward);
            const DriftDraw dd = drift(drift_model, rec.kappa, rngs.drift);
            rec.gamma = dd.gamma;
            rec.ell_t = dd.ell_t;
            rec.observed = rec.rho + rec.gamma;
        }

        row[rec.principal_arm].pulls += 1;
        row[rec.principal_arm].reward_sum += rec.observed;

        const double nu_star = reward.nu_star(x);
        rec.pseudo_regret_inc =
            nu_star - mean_reward(reward, out.table.arm_cover.points[rec.principal_arm], &x);
        rec.realized_regret_inc = nu_star - rec.rho;

        cum_pr += rec.pseudo_regret_inc;
        cum_rr += rec.realized_regret_inc;
        cum_comp += rec.kappa;
        out.run.records.push_back(rec);
        out.run.cum_pseudo_regret.push_back(cum_pr);
        out.run.cum_realized_regret.push_back(cum_rr);
        out.run.cum_compensation.push_back(cum_comp);
        ++out.run.pull_counts[rec.principal_arm];
        out.contexts.push_back(std::move(x));
        out.ctx_indices.push_back(xi);
    }

    // Worst-case per-round gap between the continuous optimum and the best
    // grid arm in the snapped row, maximized over this episode's contexts.
    std::vector<double> best_grid(out.table.ctx_cover.size(), -1e300);
    for (std::size_t xi = 0; xi < out.table.ctx_cover.size(); ++xi) {
        const Point& x0 = out.table.ctx_cover.points[xi];
        for (const auto& a0 : out.table.arm_cover.points) {
            best_grid[xi] = std::max(best_grid[xi], mean_reward(reward, a0, &x0));
        }
    }
    double gap = 0.0;
    for (std::uint64_t i = 0; i < T; ++i) {
        gap = std::max(gap, reward.nu_star(out.contexts[i]) - best_grid[out.ctx_indices[i]]);
    }
    out.run.discretization_gap = gap;

    return out;
}

} // namespace

ContextualRunResult run_contextual_episode(const GridCover& arm_cover, const GridCover& ctx_cover,
                                           const MeanRewardModel& reward, const NoiseModel& noise,
                                           const DriftModel& drift_model, std::uint64_t T,
                                           LogMode mode, ContextSource source,
                                           const std::vector<Point>* replay, EpisodeRngs& rngs) {
    return run_loop(arm_cover, ctx_cover, reward, noise, drift_model, std::nullopt, T, mode,
                    source, replay, rngs);
}

ContextualRunResult run_contextual_baseline_episode(
    const GridCover& arm_cover, const GridCover& ctx_cover, const MeanRewardModel& reward,
    const NoiseModel& noise, BaselineKind kind, std::uint64_t T, LogMode mode,
    ContextSource source, const std::vector<Point>* replay, EpisodeRngs& rngs) {
    return run_loop(arm_cover, ctx_cover, reward, noise, DriftModel{0.0, 0.0}, kind, T, mode,
                    source, replay, rngs);
}

} // namespace driftband
