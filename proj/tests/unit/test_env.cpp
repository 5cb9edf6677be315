#include <doctest.h>

#include <cmath>
#include <random>

#include "driftband/env.hpp"
#include "driftband/errors.hpp"
#include "driftband/space.hpp"

using namespace driftband;

TEST_CASE("mean_reward linear values") {
    MeanRewardModel stoch{RewardKind::LinearStochastic, 3.0, 2, 0};
    CHECK(mean_reward(stoch, {0.0, 0.0}) == 0.0);

    MeanRewardModel unit{RewardKind::LinearStochastic, 1.0, 2, 0};
    CHECK(mean_reward(unit, {1.0, 1.0}) == 2.0);
    CHECK(unit.mu_star() == 2.0);

    MeanRewardModel ctx{RewardKind::LinearContextual, 0.5, 1, 1};
    Point x{0.5};
    CHECK(mean_reward(ctx, {0.5}, &x) == 0.5);
    CHECK(ctx.nu_star(x) == 0.5 * (1.0 + 0.5));

    CHECK_THROWS_AS(mean_reward(ctx, {0.5}, nullptr), InvalidParameterError);
    CHECK_THROWS_AS(mean_reward(unit, {0.5}), InvalidParameterError);  // wrong d_a
}

TEST_CASE("sample_reward with zero noise is the exact mean") {
    MeanRewardModel model{RewardKind::LinearStochastic, 1.0, 1, 0};
    NoiseModel noise;
    noise.scale_param = 0.0;
    std::mt19937_64 rng(1);
    CHECK(sample_reward(model, noise, {0.73}, nullptr, rng) == 0.73);
    // no randomness consumed
    std::mt19937_64 fresh(1);
    CHECK(rng() == fresh());
}

TEST_CASE("sample_reward Monte-Carlo mean matches the configured distribution") {
    MeanRewardModel model{RewardKind::LinearStochastic, 1.0, 1, 0};
    NoiseModel noise;  // variance 0.05
    std::mt19937_64 rng(42);
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        sum += sample_reward(model, noise, {1.0}, nullptr, rng);
    }
    const double mean = sum / n;
    const double se = std::sqrt(0.05 / n);
    CHECK(std::abs(mean - 1.0) <= 3.0 * se);
}

TEST_CASE("stddev interpretation changes the spread") {
    MeanRewardModel model{RewardKind::LinearStochastic, 1.0, 1, 0};
    NoiseModel var_noise;   // N(mean, 0.05) -> sd ~ 0.2236
    NoiseModel sd_noise;
    sd_noise.interpretation = NoiseInterpretation::StdDev;  // sd = 0.05
    CHECK(var_noise.stddev() == doctest::Approx(std::sqrt(0.05)));
    CHECK(sd_noise.stddev() == 0.05);

    std::mt19937_64 rng(3);
    double ss = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double v = sample_reward(model, sd_noise, {0.5}, nullptr, rng) - 0.5;
        ss += v * v;
    }
    CHECK(std::sqrt(ss / n) == doctest::Approx(0.05).epsilon(0.05));
}

TEST_CASE("clip_to_unit clamps after sampling") {
    MeanRewardModel model{RewardKind::LinearStochastic, 1.0, 1, 0};
    NoiseModel noise;
    noise.clip_to_unit = true;
    std::mt19937_64 rng(9);
    for (int i = 0; i < 1000; ++i) {
        const double v = sample_reward(model, noise, {1.0}, nullptr, rng);
        CHECK(v <= 1.0);
        CHECK(v >= 0.0);
    }
}

TEST_CASE("drift basics") {
    DriftModel model;  // [0.45, 0.55]
    std::mt19937_64 rng(5);

    const DriftDraw zero = drift(model, 0.0, rng);
    CHECK(zero.gamma == 0.0);

    DriftModel fixed{0.5, 0.5};
    std::mt19937_64 quiet(11);
    const DriftDraw half = drift(fixed, 0.2, quiet);
    CHECK(half.gamma == 0.1);
    CHECK(half.ell_t == 0.5);
    // degenerate interval consumes no randomness
    std::mt19937_64 fresh(11);
    CHECK(quiet() == fresh());

    CHECK_THROWS_AS(drift(model, -0.1, rng), InvalidParameterError);
}

TEST_CASE("drift rejects malformed slope intervals") {
    std::mt19937_64 rng(1);
    CHECK_THROWS_AS(drift(DriftModel{-0.1, 0.5}, 0.2, rng), InvalidParameterError);
    CHECK_THROWS_AS(drift(DriftModel{0.6, 0.4}, 0.2, rng), InvalidParameterError);
    CHECK_THROWS_AS(NoiseModel{-0.05}.stddev(), InvalidParameterError);
}

TEST_CASE("drift Monte-Carlo mean") {
    DriftModel model;
    std::mt19937_64 rng(77);
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const DriftDraw d = drift(model, 0.2, rng);
        CHECK(d.ell_t >= 0.45);
        CHECK(d.ell_t <= 0.55);
        sum += d.gamma;
    }
    const double mean = sum / n;
    const double se = 0.2 * (0.1 / std::sqrt(12.0)) / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(mean - 0.1) <= 3.0 * se);
}

TEST_CASE("verify_lipschitz on the linear models") {
    std::mt19937_64 rng(123);

    MeanRewardModel d1{RewardKind::LinearStochastic, 0.7, 1, 0};
    // in one dimension every pair realizes the ratio exactly L
    CHECK(verify_lipschitz(d1, 500, rng) == doctest::Approx(0.7).epsilon(1e-12));

    MeanRewardModel d3{RewardKind::LinearStochastic, 1.3, 3, 0};
    CHECK(verify_lipschitz(d3, 2000, rng) <= 1.3 * 3 + 1e-9);

    MeanRewardModel ctx{RewardKind::LinearContextual, 1.0, 2, 1};
    CHECK(verify_lipschitz(ctx, 2000, rng) <= 1.0 * 3 + 1e-9);

    // L-independent constant extension
    std::mt19937_64 rng2(5);
    CHECK(verify_lipschitz_fn([](const Point&, const Point&) { return 0.5; }, 2, 0, 200, rng2)
          == 0.0);
}

TEST_CASE("best grid arm sits exactly L*d/(2k) below the continuous optimum") {
    for (int d = 1; d <= 3; ++d) {
        const double L = 1.25;
        MeanRewardModel model{RewardKind::LinearStochastic, L, d, 0};
        const GridCover cover = build_cover(d, 0.3);
        double best = -1e300;
        for (const auto& p : cover.points) best = std::max(best, mean_reward(model, p));
        const double gap = model.mu_star() - best;
        CHECK(gap == doctest::Approx(L * d / (2.0 * cover.k)).epsilon(1e-12));
        CHECK(gap <= L * 0.3 * d / 2.0 + 1e-12);
    }
}
