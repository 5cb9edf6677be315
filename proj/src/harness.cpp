#include "driftband/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "driftband/errors.hpp"

namespace driftband {

namespace {

// Cumulative trajectories of one trial sampled at the checkpoints.
struct TrialSample {
    std::vector<double> pseudo, realized, comp;
};

TrialSample sample_at(const RunResult& run, const std::vector<std::uint64_t>& checkpoints) {
    TrialSample s;
    s.pseudo.reserve(checkpoints.size());
    s.realized.reserve(checkpoints.size());
    s.comp.reserve(checkpoints.size());
    for (std::uint64_t t : checkpoints) {
        const std::size_t i = static_cast<std::size_t>(t) - 1;
        s.pseudo.push_back(run.cum_pseudo_regret[i]);
        s.realized.push_back(run.cum_realized_regret[i]);
        s.comp.push_back(run.cum_compensation[i]);
    }
    return s;
}

void for_each_trial(int trials, int threads, const std::function<void(int)>& body) {
    if (threads <= 1 || trials <= 1) {
        for (int i = 0; i < trials; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        try {
            for (int i = next.fetch_add(1); i < trials; i = next.fetch_add(1)) body(i);
        } catch (...) {
            const std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    };
    std::vector<std::thread> pool;
    const int n = std::min(threads, trials);
    pool.reserve(n);
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

std::vector<SummaryRow> reduce_rows(const std::vector<TrialSample>& samples,
                                    const std::vector<std::uint64_t>& checkpoints,
                                    const std::function<double(std::uint64_t)>& bound) {
    std::vector<SummaryRow> rows(checkpoints.size());
    std::vector<double> buf(samples.size());
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        SummaryRow& row = rows[c];
        row.t = checkpoints[c];
        for (std::size_t i = 0; i < samples.size(); ++i) buf[i] = samples[i].pseudo[c];
        CiStats st = mean_ci(buf);
        row.mean_pseudo_regret = st.mean;
        row.ci_pseudo_regret = st.ci;
        for (std::size_t i = 0; i < samples.size(); ++i) buf[i] = samples[i].realized[c];
        st = mean_ci(buf);
        row.mean_realized_regret = st.mean;
        row.ci_realized_regret = st.ci;
        for (std::size_t i = 0; i < samples.size(); ++i) buf[i] = samples[i].comp[c];
        st = mean_ci(buf);
        row.mean_compensation = st.mean;
        row.ci_compensation = st.ci;
        row.bound_value = bound ? bound(checkpoints[c]) : 0.0;
    }
    return rows;
}

// Slope of the mean curve over checkpoints in [T/10, T]; 0 when the fit is
// undefined (too few points or non-positive values).
double fit_slope(const std::vector<SummaryRow>& rows, std::uint64_t T,
                 double SummaryRow::* field) {
    std::vector<std::pair<double, double>> pts;
    const double lo = static_cast<double>(T) / 10.0;
    for (const auto& row : rows) {
        if (static_cast<double>(row.t) + 1e-12 < lo) continue;
        const double v = row.*field;
        if (v <= 0.0) return 0.0;
        pts.emplace_back(static_cast<double>(row.t), v);
    }
    if (pts.size() < 3) return 0.0;
    return sublinearity_slope(pts);
}

struct EpisodeOutcome {
    TrialSample sample;
    double final_pseudo = 0.0, final_realized = 0.0, final_comp = 0.0;
};

ExperimentSummary aggregate(const ExperimentConfig& config,
                            const std::vector<EpisodeOutcome>& outcomes,
                            const std::vector<std::uint64_t>& checkpoints, bool with_bound) {
    ExperimentSummary summary;
    std::vector<TrialSample> samples;
    samples.reserve(outcomes.size());
    for (const auto& o : outcomes) samples.push_back(o.sample);

    const int d = config.total_dim();
    std::function<double(std::uint64_t)> bound;
    if (with_bound) {
        bound = [&config, d](std::uint64_t t) {
            return t >= 2 ? theoretical_bound(t, d, config.lipschitz, config.bound_c) : 0.0;
        };
    }
    summary.rows = reduce_rows(samples, checkpoints, bound);

    std::vector<double> fp, fr, fc;
    for (const auto& o : outcomes) {
        fp.push_back(o.final_pseudo);
        fr.push_back(o.final_realized);
        fc.push_back(o.final_comp);
    }
    summary.mean_final_pseudo = mean_ci(fp).mean;
    summary.mean_final_realized = mean_ci(fr).mean;
    summary.mean_final_compensation = mean_ci(fc).mean;
    summary.slope_pseudo = fit_slope(summary.rows, config.horizon,
                                     &SummaryRow::mean_pseudo_regret);
    summary.slope_compensation = fit_slope(summary.rows, config.horizon,
                                           &SummaryRow::mean_compensation);
    return summary;
}

EpisodeOutcome outcome_of(const RunResult& run, const std::vector<std::uint64_t>& checkpoints) {
    EpisodeOutcome o;
    o.sample = sample_at(run, checkpoints);
    o.final_pseudo = run.cum_pseudo_regret.back();
    o.final_realized = run.cum_realized_regret.back();
    o.final_comp = run.cum_compensation.back();
    return o;
}

enum class Policy { Incentivized, Greedy, UcbClean };

ExperimentSummary run_trials(const ExperimentConfig& config, Policy policy) {
    config.validate();
    const double psi = config.effective_psi();
    const auto checkpoints = checkpoint_grid(config.horizon);

    ExperimentSummary summary;
    std::vector<EpisodeOutcome> outcomes(config.trials);

    if (config.mode == ExperimentConfig::Mode::Stochastic) {
        MeanRewardModel reward{RewardKind::LinearStochastic, config.lipschitz, config.d_a, 0};
        const GridCover cover = build_cover(config.d_a, psi, config.arm_budget);
        const ArmSet arms = make_grid_arm_set(cover, reward, config.noise);
        summary.n_arms = cover.size();

        for_each_trial(config.trials, config.threads, [&](int trial) {
            EpisodeRngs rngs = EpisodeRngs::from_seed(trial_seed(config.master_seed, trial));
            RunResult run;
            switch (policy) {
            case Policy::Incentivized:
                run = run_arm_episode(arms, config.drift, config.horizon, config.log_mode, rngs);
                break;
            case Policy::Greedy:
                run = run_baseline_episode(arms, BaselineKind::GreedyOnly, config.horizon,
                                           config.log_mode, rngs);
                break;
            case Policy::UcbClean:
                run = run_baseline_episode(arms, BaselineKind::UcbNoIncentive, config.horizon,
                                           config.log_mode, rngs);
                break;
            }
            outcomes[trial] = outcome_of(run, checkpoints);
        });

        ExperimentSummary agg = aggregate(config, outcomes, checkpoints,
                                          policy == Policy::Incentivized);
        agg.n_arms = summary.n_arms;
        agg.psi = psi;
        return agg;
    }

    MeanRewardModel reward{RewardKind::LinearContextual, config.lipschitz, config.d_a,
                           config.d_x};
    const GridCover arm_cover = build_cover(config.d_a, psi, config.arm_budget);
    const GridCover ctx_cover = build_cover(config.d_x, psi, config.arm_budget);
    summary.n_arms = arm_cover.size();
    summary.n_contexts = ctx_cover.size();

    for_each_trial(config.trials, config.threads, [&](int trial) {
        EpisodeRngs rngs = EpisodeRngs::from_seed(trial_seed(config.master_seed, trial));
        ContextualRunResult run;
        switch (policy) {
        case Policy::Incentivized:
            run = run_contextual_episode(arm_cover, ctx_cover, reward, config.noise,
                                         config.drift, config.horizon, config.log_mode,
                                         ContextSource::UniformIid, nullptr, rngs);
            break;
        case Policy::Greedy:
        case Policy::UcbClean:
            run = run_contextual_baseline_episode(
                arm_cover, ctx_cover, reward, config.noise,
                policy == Policy::Greedy ? BaselineKind::GreedyOnly
                                         : BaselineKind::UcbNoIncentive,
                config.horizon, config.log_mode, ContextSource::UniformIid, nullptr, rngs);
            break;
        }
        outcomes[trial] = outcome_of(run.run, checkpoints);
    });

    ExperimentSummary agg = aggregate(config, outcomes, checkpoints,
                                      policy == Policy::Incentivized);
    agg.n_arms = summary.n_arms;
    agg.n_contexts = summary.n_contexts;
    agg.psi = psi;
    return agg;
}

} // namespace

double ExperimentConfig::effective_psi() const {
    if (psi_auto) {
        // the closed form needs log T > 0; a one-round horizon gets the T=2 mesh
        return optimal_psi(std::max<std::uint64_t>(horizon, 2), lipschitz, total_dim(),
                           psi_c);
    }
    return psi_value;
}

void ExperimentConfig::validate() const {
    if (horizon < 1) throw ConfigError("config: horizon must be >= 1");
    if (trials < 1) throw ConfigError("config: trials must be >= 1");
    if (d_a < 1 || d_a > kMaxDimension) throw ConfigError("config: d_a must be in [1, 16]");
    if (d_x < 0 || d_x > kMaxDimension) throw ConfigError("config: d_x must be in [0, 16]");
    if (mode == Mode::Contextual && d_x < 1) {
        throw ConfigError("config: contextual mode needs d_x >= 1");
    }
    if (!(lipschitz > 0.0)) throw ConfigError("config: lipschitz must be > 0");
    if (!psi_auto && !(psi_value > 0.0)) throw ConfigError("config: psi must be > 0");
    if (!(psi_c > 0.0)) throw ConfigError("config: psi_c must be > 0");
    if (noise.scale_param < 0.0) throw ConfigError("config: noise_scale must be >= 0");
    if (drift.ell_low < 0.0 || drift.ell_high < drift.ell_low) {
        throw ConfigError("config: need 0 <= ell_low <= ell_high");
    }
    if (threads < 1) throw ConfigError("config: threads must be >= 1");
    if (bound_c < 0.0) throw ConfigError("config: bound_c must be >= 0");
}

std::vector<std::uint64_t> checkpoint_grid(std::uint64_t T, int n_points) {
    std::vector<std::uint64_t> grid;
    if (T <= 1) return {T};
    const double log_T = std::log(static_cast<double>(T));
    for (int i = 0; i < n_points; ++i) {
        const double f = static_cast<double>(i) / (n_points - 1);
        auto t = static_cast<std::uint64_t>(std::llround(std::exp(f * log_T)));
        grid.push_back(std::clamp<std::uint64_t>(t, 1, T));
    }
    grid.push_back(T);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

CiStats mean_ci(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n == 0) throw InvalidParameterError("mean_ci: empty sample");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    if (n == 1) return {mean, 0.0};
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    return {mean, 1.96 * sd / std::sqrt(static_cast<double>(n))};
}

ExperimentSummary run_experiment(const ExperimentConfig& config) {
    ExperimentSummary summary = run_trials(config, Policy::Incentivized);
    for (BaselineKind kind : config.baselines) {
        ExperimentSummary base = run_trials(
            config, kind == BaselineKind::GreedyOnly ? Policy::Greedy : Policy::UcbClean);
        BaselineSummary bs;
        bs.kind = kind;
        bs.rows = std::move(base.rows);
        summary.baselines.push_back(std::move(bs));
    }
    return summary;
}

ExperimentSummary run_baseline(const ExperimentConfig& config, BaselineKind kind) {
    return run_trials(config,
                      kind == BaselineKind::GreedyOnly ? Policy::Greedy : Policy::UcbClean);
}

double theoretical_bound(std::uint64_t T, int d, double L, double c_bound) {
    if (T < 2) throw InvalidParameterError("theoretical_bound: T must be >= 2");
    if (d < 1) throw InvalidParameterError("theoretical_bound: d must be >= 1");
    const double Td = static_cast<double>(T);
    const double e = static_cast<double>(d) / (d + 2.0);
    return c_bound * std::pow(L, e) * std::pow(Td, (d + 1.0) / (d + 2.0))
           * std::pow(std::log(Td), 1.0 / (d + 2.0));
}

double sublinearity_slope(const std::vector<std::pair<double, double>>& checkpoints) {
    if (checkpoints.size() < 3) {
        throw DiagnosticUndefinedError("sublinearity_slope: need >= 3 checkpoints");
    }
    std::vector<double> xs, ys;
    xs.reserve(checkpoints.size());
    ys.reserve(checkpoints.size());
    for (const auto& [t, v] : checkpoints) {
        if (!(t > 0.0) || !(v > 0.0)) {
            throw DiagnosticUndefinedError(
                "sublinearity_slope: checkpoints must be positive");
        }
        xs.push_back(std::log(t));
        ys.push_back(std::log(v));
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(ys.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    if (sxx == 0.0) {
        throw DiagnosticUndefinedError("sublinearity_slope: checkpoints must be distinct");
    }
    return sxy / sxx;
}

ArmSet make_bernoulli_arm_set(const std::vector<double>& p) {
    ArmSet arms;
    arms.means = p;
    arms.mu_star = *std::max_element(p.begin(), p.end());
    arms.sample = [p](std::size_t i, std::mt19937_64& rng) {
        std::bernoulli_distribution coin(p[i]);
        return coin(rng) ? 1.0 : 0.0;
    };
    return arms;
}

OracleResult brute_force_expectation(const OracleInstance& instance) {
    const std::size_t n = instance.p.size();
    if (n == 0 || n > 3) {
        throw BudgetExceededError("brute_force_expectation: need 1..3 arms");
    }
    if (instance.horizon < 1 || instance.horizon > 8) {
        throw BudgetExceededError("brute_force_expectation: horizon must be in [1, 8]");
    }
    for (double p : instance.p) {
        if (p < 0.0 || p > 1.0) {
            throw InvalidParameterError("brute_force_expectation: p must be in [0, 1]");
        }
    }

    const double mu_star = *std::max_element(instance.p.begin(), instance.p.end());
    OracleResult acc;

    // The decision rule is replayed inline so the enumeration stays
    // independent of the episode-loop implementation it validates.
    struct Frame {
        std::vector<std::uint64_t> pulls;
        std::vector<double> sums;
    };

    auto recurse = [&](auto&& self, std::uint64_t t, const Frame& frame, double prob,
                       double regret, double comp) -> void {
        if (t > instance.horizon) {
            acc.expected_pseudo_regret += prob * regret;
            acc.expected_compensation += prob * comp;
            return;
        }
        std::size_t a = 0;
        double best_idx = -std::numeric_limits<double>::infinity();
        double best_mean = -std::numeric_limits<double>::infinity();  // = mean of g_t
        const double logv = std::log(static_cast<double>(
            instance.log_mode == LogMode::LogRound ? t : instance.horizon));
        for (std::size_t i = 0; i < n; ++i) {
            const double mean =
                frame.pulls[i] == 0 ? 0.0 : frame.sums[i] / static_cast<double>(frame.pulls[i]);
            const double idx =
                frame.pulls[i] == 0
                    ? std::numeric_limits<double>::infinity()
                    : mean + std::sqrt(2.0 * logv / static_cast<double>(frame.pulls[i]));
            if (idx > best_idx) {
                best_idx = idx;
                a = i;
            }
            best_mean = std::max(best_mean, mean);
        }
        const double mean_a =
            frame.pulls[a] == 0 ? 0.0 : frame.sums[a] / static_cast<double>(frame.pulls[a]);
        const double kappa = best_mean - mean_a;
        const double gamma = instance.ell * kappa;
        const double regret2 = regret + (mu_star - instance.p[a]);
        const double comp2 = comp + kappa;

        const double outcomes[2] = {1.0, 0.0};
        const double probs[2] = {instance.p[a], 1.0 - instance.p[a]};
        for (int b = 0; b < 2; ++b) {
            if (probs[b] == 0.0) continue;
            Frame next = frame;
            next.pulls[a] += 1;
            next.sums[a] += outcomes[b] + gamma;
            self(self, t + 1, next, prob * probs[b], regret2, comp2);
        }
    };

    Frame root{std::vector<std::uint64_t>(n, 0), std::vector<double>(n, 0.0)};
    recurse(recurse, 1, root, 1.0, 0.0, 0.0);
    return acc;
}

// ------------------------------------------------------------------ checks

namespace {

void check_common(const RunResult& result, const DriftModel& drift_model, LogMode mode,
                  std::uint64_t T, std::size_t n_arms, TraceCheckReport& report) {
    const double eps = 1e-9;
    if (result.records.size() != T) {
        report.violations.push_back("trace length != T");
        return;
    }
    std::vector<std::uint64_t> pulls(n_arms, 0);
    std::vector<double> gamma_sum(n_arms, 0.0);
    double cum_pr = 0.0, cum_rr = 0.0, cum_comp = 0.0;

    for (std::size_t i = 0; i < result.records.size(); ++i) {
        const StepRecord& rec = result.records[i];
        ++report.steps;
        std::ostringstream at;
        at << " at t=" << rec.t;

        if (rec.principal_arm >= n_arms || rec.greedy_arm >= n_arms) {
            report.violations.push_back("arm index out of range" + at.str());
            continue;
        }
        if (rec.kappa < 0.0) {
            report.violations.push_back("kappa < 0" + at.str());
        }
        if (rec.principal_arm == rec.greedy_arm && rec.kappa != 0.0) {
            report.violations.push_back("kappa != 0 with a_t = g_t" + at.str());
        }
        if (rec.observed != rec.rho + rec.gamma) {
            report.violations.push_back("observed != rho + gamma" + at.str());
        }
        if (rec.gamma < drift_model.ell_low * rec.kappa - eps
            || rec.gamma > drift_model.ell_high * rec.kappa + eps) {
            report.violations.push_back("gamma outside [ell_low*kappa, ell_high*kappa]"
                                        + at.str());
        }
        const std::uint64_t n_before = pulls[rec.principal_arm];
        if (n_before >= 1) {
            const double logv = std::log(static_cast<double>(
                mode == LogMode::LogRound ? rec.t : T));
            const double limit = std::sqrt(2.0 * logv / static_cast<double>(n_before));
            if (rec.kappa > limit + eps) {
                report.violations.push_back("kappa above the selection bound" + at.str());
            }
        }

        cum_pr += rec.pseudo_regret_inc;
        cum_rr += rec.realized_regret_inc;
        cum_comp += rec.kappa;
        if (std::abs(result.cum_pseudo_regret[i] - cum_pr) > eps
            || std::abs(result.cum_realized_regret[i] - cum_rr) > eps
            || std::abs(result.cum_compensation[i] - cum_comp) > eps) {
            report.violations.push_back("cumulative trajectories are not prefix sums"
                                        + at.str());
        }
        if (i > 0 && result.cum_pseudo_regret[i] + eps < result.cum_pseudo_regret[i - 1]) {
            report.violations.push_back("cum_pseudo_regret decreased" + at.str());
        }
        if (i > 0 && result.cum_compensation[i] + eps < result.cum_compensation[i - 1]) {
            report.violations.push_back("cum_compensation decreased" + at.str());
        }

        pulls[rec.principal_arm] += 1;
        gamma_sum[rec.principal_arm] += rec.gamma;
    }

    std::uint64_t total = 0;
    for (std::size_t a = 0; a < n_arms; ++a) {
        total += pulls[a];
        if (pulls[a] != result.pull_counts[a]) {
            report.violations.push_back("pull_counts do not match the trace");
            break;
        }
    }
    if (total != T) {
        report.violations.push_back("pull counts do not sum to T");
    }

    if (mode == LogMode::LogHorizon && T >= 2) {
        const double logT = std::log(static_cast<double>(T));
        for (std::size_t a = 0; a < n_arms; ++a) {
            if (pulls[a] == 0) continue;
            const double limit = 2.0 * drift_model.ell_max()
                                 * std::sqrt(2.0 * static_cast<double>(pulls[a]) * logT);
            if (gamma_sum[a] > limit + eps) {
                std::ostringstream msg;
                msg << "cumulative drift bound violated on arm " << a;
                report.violations.push_back(msg.str());
            }
        }
    }
}

} // namespace

TraceCheckReport check_run_invariants(const RunResult& result, const DriftModel& drift_model,
                                      LogMode mode, std::uint64_t T, std::size_t n_arms) {
    TraceCheckReport report;
    check_common(result, drift_model, mode, T, n_arms, report);
    return report;
}

TraceCheckReport check_contextual_invariants(const ContextualRunResult& result,
                                             const DriftModel& drift_model, LogMode mode,
                                             std::uint64_t T, double psi) {
    TraceCheckReport report;

    // Row-wise kappa bound: replay per-cell pull counts.
    const std::size_t n_arms = result.table.arm_cover.size();
    const std::size_t n_ctx = result.table.ctx_cover.size();
    if (result.run.records.size() != T || result.ctx_indices.size() != T
        || result.contexts.size() != T) {
        report.violations.push_back("contextual trace length != T");
        return report;
    }
    const double eps = 1e-9;
    std::vector<std::vector<std::uint64_t>> pulls(n_ctx, std::vector<std::uint64_t>(n_arms, 0));

    for (std::size_t i = 0; i < T; ++i) {
        const StepRecord& rec = result.run.records[i];
        ++report.steps;
        const std::size_t xi = result.ctx_indices[i];
        std::ostringstream at;
        at << " at t=" << rec.t;

        if (xi >= n_ctx || rec.principal_arm >= n_arms) {
            report.violations.push_back("cell index out of range" + at.str());
            continue;
        }
        // snapping distance
        const Point& x = result.contexts[i];
        const Point& x0 = result.table.ctx_cover.points[xi];
        double dist = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            dist = std::max(dist, std::abs(x[j] - x0[j]));
        }
        if (dist > psi / 2.0 + 1e-12) {
            report.violations.push_back("snapping distance above psi/2" + at.str());
        }
        if (rec.kappa < 0.0) {
            report.violations.push_back("kappa < 0" + at.str());
        }
        if (rec.observed != rec.rho + rec.gamma) {
            report.violations.push_back("observed != rho + gamma" + at.str());
        }
        if (rec.gamma < drift_model.ell_low * rec.kappa - eps
            || rec.gamma > drift_model.ell_high * rec.kappa + eps) {
            report.violations.push_back("gamma outside [ell_low*kappa, ell_high*kappa]"
                                        + at.str());
        }
        const std::uint64_t n_before = pulls[xi][rec.principal_arm];
        if (n_before >= 1) {
            const double logv = std::log(static_cast<double>(
                mode == LogMode::LogRound ? rec.t : T));
            const double limit = std::sqrt(2.0 * logv / static_cast<double>(n_before));
            if (rec.kappa > limit + eps) {
                report.violations.push_back("kappa above the row selection bound" + at.str());
            }
        }
        pulls[xi][rec.principal_arm] += 1;
    }

    // Row isolation: the final table must match the replayed counts exactly.
    std::uint64_t total = 0;
    for (std::size_t xi = 0; xi < n_ctx; ++xi) {
        for (std::size_t a = 0; a < n_arms; ++a) {
            total += result.table.rows[xi][a].pulls;
            if (result.table.rows[xi][a].pulls != pulls[xi][a]) {
                report.violations.push_back("row statistics changed outside their context");
            }
        }
    }
    if (total != T) {
        report.violations.push_back("table pull counts do not sum to T");
    }
    return report;
}

} // namespace driftband
