#include "driftband/core.hpp"

#include <cmath>
#include <limits>
#include <queue>

#include "driftband/errors.hpp"

namespace driftband {

namespace {

double log_base(std::uint64_t t, LogMode mode, std::uint64_t T) {
    return std::log(static_cast<double>(mode == LogMode::LogRound ? t : T));
}

// Incremental argmax of the empirical means with the same semantics as a
// full select_greedy scan: unpulled arms count as mean 0, ties go to the
// lowest index. Pulled arms live in a lazy max-heap keyed (mean desc,
// index asc); stale entries are dropped when their stored mean no longer
// matches the arm's current mean.
class GreedyTracker {
public:
    explicit GreedyTracker(const std::vector<ArmStats>& stats)
        : stats_(stats), first_unpulled_(0) {
        skip_pulled();
    }

    void on_update(std::size_t arm) {
        heap_.push({stats_[arm].empirical_mean(), arm});
        if (arm == first_unpulled_) skip_pulled();
    }

    std::size_t best() {
        while (!heap_.empty()) {
            const auto& [mean, arm] = heap_.top();
            if (stats_[arm].pulls > 0 && stats_[arm].empirical_mean() == mean) break;
            heap_.pop();
        }
        const bool have_unpulled = first_unpulled_ < stats_.size();
        if (heap_.empty()) {
            return first_unpulled_;  // round 1: everything unpulled
        }
        const auto [mean, arm] = heap_.top();
        if (!have_unpulled) return arm;
        // compare against the implicit (0.0, first_unpulled_) entry
        if (mean > 0.0) return arm;
        if (mean < 0.0) return first_unpulled_;
        return std::min(arm, first_unpulled_);
    }

    std::size_t first_unpulled() const { return first_unpulled_; }

private:
    void skip_pulled() {
        while (first_unpulled_ < stats_.size() && stats_[first_unpulled_].pulls > 0) {
            ++first_unpulled_;
        }
    }

    struct Cmp {
        bool operator()(const std::pair<double, std::size_t>& a,
                        const std::pair<double, std::size_t>& b) const {
            if (a.first != b.first) return a.first < b.first;
            return a.second > b.second;
        }
    };

    const std::vector<ArmStats>& stats_;
    std::priority_queue<std::pair<double, std::size_t>,
                        std::vector<std::pair<double, std::size_t>>, Cmp>
        heap_;
    std::size_t first_unpulled_;
};

std::size_t principal_arm(const std::vector<ArmStats>& stats, const GreedyTracker& tracker,
                          std::uint64_t t, LogMode mode, std::uint64_t T) {
    // While unpulled arms remain, the lowest-indexed one holds the +inf
    // UCB index and wins every tie.
    if (tracker.first_unpulled() < stats.size()) {
        return tracker.first_unpulled();
    }
    const double two_log = 2.0 * log_base(t, mode, T);
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_arm = 0;
    for (std::size_t i = 0; i < stats.size(); ++i) {
        const double idx = stats[i].empirical_mean()
                           + std::sqrt(two_log / static_cast<double>(stats[i].pulls));
        if (idx > best) {
            best = idx;
            best_arm = i;
        }
    }
    return best_arm;
}

struct Accumulator {
    RunResult result;
    double cum_pr = 0.0, cum_rr = 0.0, cum_comp = 0.0;

    void init(std::size_t n_arms, std::uint64_t T) {
        result.records.reserve(T);
        result.cum_pseudo_regret.reserve(T);
        result.cum_realized_regret.reserve(T);
        result.cum_compensation.reserve(T);
        result.pull_counts.assign(n_arms, 0);
    }

    void push(const StepRecord& rec) {
        cum_pr += rec.pseudo_regret_inc;
        cum_rr += rec.realized_regret_inc;
        cum_comp += rec.kappa;
        result.records.push_back(rec);
        result.cum_pseudo_regret.push_back(cum_pr);
        result.cum_realized_regret.push_back(cum_rr);
        result.cum_compensation.push_back(cum_comp);
        ++result.pull_counts[rec.principal_arm];
    }
};

} // namespace

double ucb_index(const ArmStats& stats, std::uint64_t t, LogMode mode, std::uint64_t T) {
    if (stats.pulls == 0) {
        return std::numeric_limits<double>::infinity();
    }
    return stats.empirical_mean()
           + std::sqrt(2.0 * log_base(t, mode, T) / static_cast<double>(stats.pulls));
}

std::size_t select_principal(const std::vector<ArmStats>& stats, std::uint64_t t, LogMode mode,
                             std::uint64_t T) {
    if (stats.empty()) {
        throw InvalidStateError("select_principal: empty arm set");
    }
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_arm = 0;
    for (std::size_t i = 0; i < stats.size(); ++i) {
        const double idx = ucb_index(stats[i], t, mode, T);
        if (idx > best) {
            best = idx;
            best_arm = i;
        }
    }
    return best_arm;
}

std::size_t select_greedy(const std::vector<ArmStats>& stats) {
    if (stats.empty()) {
        throw InvalidStateError("select_greedy: empty arm set");
    }
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_arm = 0;
    for (std::size_t i = 0; i < stats.size(); ++i) {
        const double mean = stats[i].empirical_mean();
        if (mean > best) {
            best = mean;
            best_arm = i;
        }
    }
    return best_arm;
}

double compensation(const std::vector<ArmStats>& stats, std::size_t g, std::size_t a) {
    if (g >= stats.size() || a >= stats.size()) {
        throw InvalidParameterError("compensation: arm index out of range");
    }
    return stats[g].empirical_mean() - stats[a].empirical_mean();
}

ArmSet make_grid_arm_set(const GridCover& cover, const MeanRewardModel& reward,
                         const NoiseModel& noise) {
    ArmSet arms;
    arms.means.reserve(cover.size());
    for (const auto& p : cover.points) {
        arms.means.push_back(mean_reward(reward, p));
    }
    arms.mu_star = reward.mu_star();
    arms.sample = [&cover, reward, noise](std::size_t i, std::mt19937_64& rng) {
        return sample_reward(reward, noise, cover.points[i], nullptr, rng);
    };
    return arms;
}

RunResult run_arm_episode(const ArmSet& arms, const DriftModel& drift_model, std::uint64_t T,
                          LogMode mode, EpisodeRngs& rngs) {
    const std::size_t n = arms.means.size();
    if (n == 0) {
        throw InvalidStateError("run_arm_episode: empty arm set");
    }
    if (T < 1) {
        throw InvalidParameterError("run_arm_episode: T must be >= 1");
    }

    std::vector<ArmStats> stats(n);
    GreedyTracker tracker(stats);
    Accumulator acc;
    acc.init(n, T);

    double best_mean = arms.means[0];
    for (double m : arms.means) best_mean = std::max(best_mean, m);
    acc.result.discretization_gap = arms.mu_star - best_mean;

    for (std::uint64_t t = 1; t <= T; ++t) {
        const std::size_t a = principal_arm(stats, tracker, t, mode, T);
        const std::size_t g = tracker.best();
        const double kappa = compensation(stats, g, a);
        const double rho = arms.sample(a, rngs.reward);
        const DriftDraw dd = drift(drift_model, kappa, rngs.drift);
        const double observed = rho + dd.gamma;

        stats[a].pulls += 1;
        stats[a].reward_sum += observed;
        tracker.on_update(a);

        StepRecord rec;
        rec.t = t;
        rec.principal_arm = a;
        rec.greedy_arm = g;
        rec.kappa = kappa;
        rec.rho = rho;
        rec.gamma = dd.gamma;
        rec.observed = observed;
        rec.ell_t = dd.ell_t;
        rec.pseudo_regret_inc = arms.mu_star - arms.means[a];
        rec.realized_regret_inc = arms.mu_star - rho;
        acc.push(rec);
    }
    return acc.result;
}

RunResult run_episode(const GridCover& cover, const MeanRewardModel& reward,
                      const NoiseModel& noise, const DriftModel& drift_model, std::uint64_t T,
                      LogMode mode, EpisodeRngs& rngs) {
    const ArmSet arms = make_grid_arm_set(cover, reward, noise);
    return run_arm_episode(arms, drift_model, T, mode, rngs);
}

RunResult run_baseline_episode(const ArmSet& arms, BaselineKind kind, std::uint64_t T,
                               LogMode mode, EpisodeRngs& rngs) {
    const std::size_t n = arms.means.size();
    if (n == 0) {
        throw InvalidStateError("run_baseline_episode: empty arm set");
    }

    std::vector<ArmStats> stats(n);
    GreedyTracker tracker(stats);
    Accumulator acc;
    acc.init(n, T);

    double best_mean = arms.means[0];
    for (double m : arms.means) best_mean = std::max(best_mean, m);
    acc.result.discretization_gap = arms.mu_star - best_mean;

    for (std::uint64_t t = 1; t <= T; ++t) {
        const std::size_t a = kind == BaselineKind::GreedyOnly
                                  ? tracker.best()
                                  : principal_arm(stats, tracker, t, mode, T);
        const double rho = arms.sample(a, rngs.reward);

        stats[a].pulls += 1;
        stats[a].reward_sum += rho;
        tracker.on_update(a);

        StepRecord rec;
        rec.t = t;
        rec.principal_arm = a;
        rec.greedy_arm = a;
        rec.rho = rho;
        rec.observed = rho;
        rec.pseudo_regret_inc = arms.mu_star - arms.means[a];
        rec.realized_regret_inc = arms.mu_star - rho;
        acc.push(rec);
    }
    return acc.result;
}

} // namespace driftband
