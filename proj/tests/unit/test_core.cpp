#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "driftband/core.hpp"
#include "driftband/csv.hpp"
#include "driftband/errors.hpp"
#include "driftband/harness.hpp"

using namespace driftband;

namespace {

ArmSet noise_free_arms(std::vector<double> means, double mu_star) {
    ArmSet arms;
    arms.means = std::move(means);
    arms.mu_star = mu_star;
    arms.sample = [m = arms.means](std::size_t i, std::mt19937_64&) { return m[i]; };
    return arms;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("ucb_index examples") {
    ArmStats unpulled;
    CHECK(ucb_index(unpulled, 5, LogMode::LogRound, 100)
          == std::numeric_limits<double>::infinity());

    ArmStats one{1, 0.3};
    CHECK(ucb_index(one, 1, LogMode::LogRound, 100) == 0.3);  // ln 1 = 0

    ArmStats two{2, 1.0};  // mean 0.5
    const double t = std::exp(2.0);
    CHECK(ucb_index(two, static_cast<std::uint64_t>(t) + 1, LogMode::LogRound, 100)
          > 0.5);  // sanity on the shape
    // closed form at log base exactly 2: 0.5 + sqrt(2)
    ArmStats fixed{2, 1.0};
    const double idx = fixed.empirical_mean()
                       + std::sqrt(2.0 * 2.0 / static_cast<double>(fixed.pulls));
    CHECK(idx == doctest::Approx(1.9142135623730951).epsilon(1e-15));
}

TEST_CASE("log-T mode pins the bonus to the horizon") {
    ArmStats s{4, 2.0};
    const double at_t = ucb_index(s, 3, LogMode::LogRound, 1000);
    const double at_T = ucb_index(s, 3, LogMode::LogHorizon, 1000);
    CHECK(at_T == doctest::Approx(0.5 + std::sqrt(2.0 * std::log(1000.0) / 4.0)));
    CHECK(at_T > at_t);
}

TEST_CASE("select_principal examples") {
    std::vector<ArmStats> fresh(4);
    CHECK(select_principal(fresh, 1, LogMode::LogRound, 10) == 0);

    // t = 1 makes the bonus zero, so indices are the empirical means
    std::vector<ArmStats> two{{1, 0.9}, {1, 1.1}};
    CHECK(select_principal(two, 1, LogMode::LogRound, 10) == 1);

    std::vector<ArmStats> tied{{2, 1.0}, {2, 1.0}, {2, 1.0}};
    CHECK(select_principal(tied, 7, LogMode::LogRound, 10) == 0);

    CHECK_THROWS_AS(select_principal({}, 1, LogMode::LogRound, 10), InvalidStateError);
}

TEST_CASE("select_greedy examples") {
    std::vector<ArmStats> fresh(3);
    CHECK(select_greedy(fresh) == 0);

    std::vector<ArmStats> stats{{1, 0.2}, {1, 0.7}, {1, 0.7}};
    CHECK(select_greedy(stats) == 1);

    std::vector<ArmStats> single(1);
    CHECK(select_greedy(single) == 0);

    CHECK_THROWS_AS(select_greedy({}), InvalidStateError);
}

TEST_CASE("compensation examples") {
    std::vector<ArmStats> stats{{1, 0.7}, {1, 0.55}, {0, 0.0}};
    CHECK(compensation(stats, 0, 0) == 0.0);
    CHECK(compensation(stats, 0, 1) == doctest::Approx(0.15).epsilon(1e-12));
    CHECK(compensation(stats, 0, 2) == 0.7);  // unpulled arm counts as 0
    CHECK_THROWS_AS(compensation(stats, 0, 5), InvalidParameterError);
}

TEST_CASE("round one is forced: kappa = gamma = 0, arm 0 pulled") {
    const ArmSet arms = noise_free_arms({0.4, 0.6}, 0.6);
    DriftModel drift_model;
    EpisodeRngs rngs = EpisodeRngs::from_seed(99);
    const RunResult run = run_arm_episode(arms, drift_model, 1, LogMode::LogRound, rngs);
    REQUIRE(run.records.size() == 1);
    CHECK(run.records[0].principal_arm == 0);
    CHECK(run.records[0].kappa == 0.0);
    CHECK(run.records[0].gamma == 0.0);
    CHECK(run.records[0].rho == 0.4);
    CHECK(run.pull_counts[0] == 1);
    CHECK(run.discretization_gap == doctest::Approx(0.0));
}

TEST_CASE("six-round deterministic trace matches the hand-derived fixture") {
    const ArmSet arms = noise_free_arms({0.9, 0.1}, 0.9);
    const DriftModel fixed{0.5, 0.5};
    EpisodeRngs rngs = EpisodeRngs::from_seed(0);
    const RunResult run = run_arm_episode(arms, fixed, 6, LogMode::LogRound, rngs);

    // arm sequence and the drift chain, recomputed step by step
    const std::vector<std::size_t> expect_arms{0, 1, 0, 1, 0, 0};
    REQUIRE(run.records.size() == 6);
    for (int i = 0; i < 6; ++i) {
        CHECK(run.records[i].principal_arm == expect_arms[i]);
        CHECK(run.records[i].greedy_arm == 0);
    }
    CHECK(run.records[1].kappa == 0.9);
    CHECK(run.records[1].gamma == 0.5 * 0.9);
    CHECK(run.records[1].observed == 0.1 + 0.5 * 0.9);
    const double mean1_after_t2 = (0.1 + 0.5 * 0.9) / 1.0;
    CHECK(run.records[3].kappa == 0.9 - mean1_after_t2);

    const auto tmp = std::filesystem::temp_directory_path() / "driftband_golden_core.csv";
    write_trace_csv(run, tmp.string());
    CHECK(slurp(tmp.string())
          == slurp(std::string(DRIFTBAND_FIXTURE_DIR) + "/golden_core_trace.csv"));
    std::filesystem::remove(tmp);
}

TEST_CASE("same seed, same trace") {
    MeanRewardModel reward{RewardKind::LinearStochastic, 1.0, 1, 0};
    const GridCover cover = build_cover(1, 0.35);
    NoiseModel noise;
    DriftModel drift_model;

    EpisodeRngs a = EpisodeRngs::from_seed(31337);
    EpisodeRngs b = EpisodeRngs::from_seed(31337);
    const RunResult ra = run_episode(cover, reward, noise, drift_model, 500,
                                     LogMode::LogRound, a);
    const RunResult rb = run_episode(cover, reward, noise, drift_model, 500,
                                     LogMode::LogRound, b);
    REQUIRE(ra.records.size() == rb.records.size());
    for (std::size_t i = 0; i < ra.records.size(); ++i) {
        CHECK(ra.records[i].principal_arm == rb.records[i].principal_arm);
        CHECK(ra.records[i].rho == rb.records[i].rho);
        CHECK(ra.records[i].gamma == rb.records[i].gamma);
        CHECK(ra.records[i].observed == rb.records[i].observed);
    }
    CHECK(ra.cum_pseudo_regret.back() == rb.cum_pseudo_regret.back());
}

TEST_CASE("forcing ell_t = 0 reduces to the clean UCB baseline") {
    const GridCover cover = build_cover(1, 0.2);
    MeanRewardModel reward{RewardKind::LinearStochastic, 1.0, 1, 0};
    NoiseModel noise;
    const ArmSet arms = make_grid_arm_set(cover, reward, noise);

    EpisodeRngs a = EpisodeRngs::from_seed(7);
    const RunResult drifted = run_arm_episode(arms, DriftModel{0.0, 0.0}, 2000,
                                              LogMode::LogRound, a);
    EpisodeRngs b = EpisodeRngs::from_seed(7);
    const RunResult clean = run_baseline_episode(arms, BaselineKind::UcbNoIncentive, 2000,
                                                 LogMode::LogRound, b);
    REQUIRE(drifted.records.size() == clean.records.size());
    for (std::size_t i = 0; i < drifted.records.size(); ++i) {
        CHECK(drifted.records[i].principal_arm == clean.records[i].principal_arm);
        CHECK(drifted.records[i].rho == clean.records[i].rho);
        CHECK(drifted.records[i].gamma == 0.0);
    }
}

TEST_CASE("recorded selections replay through the plain selection scans") {
    // The episode loop uses an incremental argmax; replaying the trace with
    // the plain scans must reproduce every decision bit for bit.
    const GridCover cover = build_cover(1, 0.08);  // 13 arms
    MeanRewardModel reward{RewardKind::LinearStochastic, 1.0, 1, 0};
    NoiseModel noise;
    DriftModel drift_model;
    const ArmSet arms = make_grid_arm_set(cover, reward, noise);

    EpisodeRngs rngs = EpisodeRngs::from_seed(12345);
    const RunResult run = run_arm_episode(arms, drift_model, 1500, LogMode::LogRound, rngs);

    std::vector<ArmStats> stats(cover.size());
    for (const auto& rec : run.records) {
        CHECK(select_principal(stats, rec.t, LogMode::LogRound, 1500) == rec.principal_arm);
        CHECK(select_greedy(stats) == rec.greedy_arm);
        CHECK(compensation(stats, rec.greedy_arm, rec.principal_arm) == rec.kappa);
        stats[rec.principal_arm].pulls += 1;
        stats[rec.principal_arm].reward_sum += rec.observed;
        CHECK(stats[rec.principal_arm].empirical_mean()
              == doctest::Approx(stats[rec.principal_arm].reward_sum
                                 / static_cast<double>(stats[rec.principal_arm].pulls))
                     .epsilon(1e-12));
    }
}

TEST_CASE("trace invariants hold under both log modes") {
    const GridCover cover = build_cover(2, 0.3);
    MeanRewardModel reward{RewardKind::LinearStochastic, 1.0, 2, 0};
    NoiseModel noise;
    DriftModel drift_model;
    const ArmSet arms = make_grid_arm_set(cover, reward, noise);

    for (LogMode mode : {LogMode::LogRound, LogMode::LogHorizon}) {
        EpisodeRngs rngs = EpisodeRngs::from_seed(4242);
        const RunResult run = run_arm_episode(arms, drift_model, 5000, mode, rngs);
        const TraceCheckReport report =
            check_run_invariants(run, drift_model, mode, 5000, cover.size());
        for (const auto& v : report.violations) {
            MESSAGE(v);
        }
        CHECK(report.ok());
        CHECK(report.steps == 5000);
    }
}

TEST_CASE("drift only contaminates upward") {
    const GridCover cover = build_cover(1, 0.15);
    MeanRewardModel reward{RewardKind::LinearStochastic, 1.0, 1, 0};
    NoiseModel noise;
    DriftModel drift_model;
    const ArmSet arms = make_grid_arm_set(cover, reward, noise);

    EpisodeRngs rngs = EpisodeRngs::from_seed(2718);
    const RunResult run = run_arm_episode(arms, drift_model, 3000, LogMode::LogRound, rngs);

    std::vector<double> rho_sum(cover.size(), 0.0), obs_sum(cover.size(), 0.0);
    std::vector<std::uint64_t> n(cover.size(), 0);
    for (const auto& rec : run.records) {
        rho_sum[rec.principal_arm] += rec.rho;
        obs_sum[rec.principal_arm] += rec.observed;
        n[rec.principal_arm] += 1;
    }
    for (std::size_t a = 0; a < cover.size(); ++a) {
        if (n[a] == 0) continue;
        CHECK(obs_sum[a] / n[a] >= rho_sum[a] / n[a] - 1e-12);
    }
}

TEST_CASE("randomized episode sweep keeps every invariant") {
    std::mt19937_64 meta(20240811);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        const int d = 1 + static_cast<int>(meta() % 3);
        const double psi = 0.08 + 1.2 * unit(meta);  // covers the 1-arm degenerate case
        const std::uint64_t T = 1 + meta() % 300;
        NoiseModel noise;
        noise.scale_param = (meta() % 3 == 0) ? 0.0 : 0.05;
        DriftModel drift_model;
        if (meta() % 4 == 0) {
            drift_model = DriftModel{0.0, 0.0};
        } else if (meta() % 2 == 0) {
            drift_model = DriftModel{0.5, 0.5};
        }
        const LogMode mode = meta() % 2 == 0 ? LogMode::LogRound : LogMode::LogHorizon;

        const GridCover cover = build_cover(d, psi);
        MeanRewardModel reward{RewardKind::LinearStochastic, 0.5 + unit(meta), d, 0};
        const ArmSet arms = make_grid_arm_set(cover, reward, noise);
        EpisodeRngs rngs = EpisodeRngs::from_seed(meta());
        const RunResult run = run_arm_episode(arms, drift_model, T, mode, rngs);

        const TraceCheckReport report =
            check_run_invariants(run, drift_model, mode, T, cover.size());
        for (const auto& v : report.violations) {
            MESSAGE("d=" << d << " psi=" << psi << " T=" << T << ": " << v);
        }
        CHECK(report.ok());

        // every decision must replay bit-for-bit through the plain scans
        std::vector<ArmStats> stats(cover.size());
        for (const auto& rec : run.records) {
            CHECK(select_principal(stats, rec.t, mode, T) == rec.principal_arm);
            CHECK(select_greedy(stats) == rec.greedy_arm);
            CHECK(compensation(stats, rec.greedy_arm, rec.principal_arm) == rec.kappa);
            stats[rec.principal_arm].pulls += 1;
            stats[rec.principal_arm].reward_sum += rec.observed;
        }
    }
}

TEST_CASE("greedy-only baseline locks in after one bad first pull") {
    const ArmSet arms = noise_free_arms({0.2, 0.8}, 0.8);
    EpisodeRngs rngs = EpisodeRngs::from_seed(1);
    const RunResult run = run_baseline_episode(arms, BaselineKind::GreedyOnly, 64,
                                               LogMode::LogRound, rngs);
    for (const auto& rec : run.records) {
        CHECK(rec.principal_arm == 0);
        CHECK(rec.kappa == 0.0);
    }
    CHECK(run.cum_pseudo_regret.back() == doctest::Approx(0.6 * 64).epsilon(1e-12));
    CHECK(run.cum_compensation.back() == 0.0);
}
