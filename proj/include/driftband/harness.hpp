#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "driftband/contextual.hpp"
#include "driftband/core.hpp"

namespace driftband {

struct ExperimentConfig {
    enum class Mode { Stochastic, Contextual };

    Mode mode = Mode::Stochastic;
    std::uint64_t horizon = 20000;
    int d_a = 1;
    int d_x = 0;                  // used by the contextual mode only
    double lipschitz = 1.0;
    bool psi_auto = true;
    double psi_value = 0.0;       // used when psi_auto is false
    double psi_c = 1.0;           // multiplier for the auto policy
    NoiseModel noise;
    DriftModel drift;
    int trials = 10;
    std::uint64_t master_seed = 1;
    LogMode log_mode = LogMode::LogRound;
    std::vector<BaselineKind> baselines;
    int threads = 1;
    double bound_c = 1.0;
    std::uint64_t arm_budget = kDefaultArmBudget;

    int total_dim() const { return mode == Mode::Contextual ? d_a + d_x : d_a; }
    double effective_psi() const;
    void validate() const;        // throws ConfigError
};

struct SummaryRow {
    std::uint64_t t = 0;
    double mean_pseudo_regret = 0.0, ci_pseudo_regret = 0.0;
    double mean_realized_regret = 0.0, ci_realized_regret = 0.0;
    double mean_compensation = 0.0, ci_compensation = 0.0;
    double bound_value = 0.0;
};

struct BaselineSummary {
    BaselineKind kind = BaselineKind::GreedyOnly;
    std::vector<SummaryRow> rows;  // bound_value unused
};

struct ExperimentSummary {
    std::vector<SummaryRow> rows;
    std::size_t n_arms = 0;
    std::size_t n_contexts = 0;   // 0 in the stochastic mode
    double psi = 0.0;
    // OLS log-log slopes of the mean curves over checkpoints in [T/10, T].
    double slope_pseudo = 0.0;
    double slope_compensation = 0.0;
    double mean_final_pseudo = 0.0;
    double mean_final_realized = 0.0;
    double mean_final_compensation = 0.0;
    std::vector<BaselineSummary> baselines;
};

// 40 log-spaced checkpoints plus T, deduplicated.
std::vector<std::uint64_t> checkpoint_grid(std::uint64_t T, int n_points = 40);

// Sample mean and 95% normal-approximation CI half-width 1.96*sd/sqrt(n).
struct CiStats {
    double mean = 0.0;
    double ci = 0.0;
};
CiStats mean_ci(std::span<const double> values);

// Runs `trials` independent episodes with seeds derived from
// (master_seed, trial index) and aggregates the cumulative trajectories at
// the checkpoint grid. Deterministic given the config, whatever the thread
// count: workers fill per-trial slots and the reduction runs in index order.
ExperimentSummary run_experiment(const ExperimentConfig& config);

// Same accounting with a baseline policy in place of the incentivized loop.
ExperimentSummary run_baseline(const ExperimentConfig& config, BaselineKind kind);

// c * L^(d/(d+2)) * T^((d+1)/(d+2)) * (log T)^(1/(d+2))
double theoretical_bound(std::uint64_t T, int d, double L, double c_bound);

// OLS slope of log(value) against log(t). Needs >= 3 checkpoints with
// positive values and distinct t; throws DiagnosticUndefinedError otherwise.
double sublinearity_slope(const std::vector<std::pair<double, double>>& checkpoints);

// Exact expected pseudo-regret / compensation of the incentivized loop on a
// tiny Bernoulli instance, by exhaustive enumeration of reward outcomes.
struct OracleInstance {
    std::vector<double> p;        // per-arm success probabilities, <= 3 arms
    double ell = 0.5;             // deterministic drift slope
    std::uint64_t horizon = 6;    // <= 8
    LogMode log_mode = LogMode::LogRound;
};

struct OracleResult {
    double expected_pseudo_regret = 0.0;
    double expected_compensation = 0.0;
};

OracleResult brute_force_expectation(const OracleInstance& instance);

// Bernoulli arm set matching an oracle instance, for Monte-Carlo runs
// through the real episode loop.
ArmSet make_bernoulli_arm_set(const std::vector<double>& p);

// ------------------------------------------------------------------ checks

// Replays a finished trace against the deterministic invariants:
// kappa >= 0 (0 whenever a_t = g_t), kappa_t <= sqrt(2 log t / N_t(a_t))
// for pulled arms, observed = rho + gamma with gamma in
// [ell_low*kappa, ell_high*kappa], prefix-sum consistency, pull counts
// summing to T, and (log-T mode) the per-arm cumulative drift bound
// Gamma_T(a) <= 2*ell*sqrt(2*N_T(a)*log T).
struct TraceCheckReport {
    std::uint64_t steps = 0;
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
};

TraceCheckReport check_run_invariants(const RunResult& result, const DriftModel& drift_model,
                                      LogMode mode, std::uint64_t T, std::size_t n_arms);

// Adds the contextual-only checks: snapping distance <= psi/2 and row
// isolation (row pull totals match snapped-context occurrences).
TraceCheckReport check_contextual_invariants(const ContextualRunResult& result,
                                             const DriftModel& drift_model, LogMode mode,
                                             std::uint64_t T, double psi);

} // namespace driftband
