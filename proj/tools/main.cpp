#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "driftband/cli_config.hpp"
#include "driftband/contextual.hpp"
#include "driftband/csv.hpp"
#include "driftband/errors.hpp"
#include "driftband/harness.hpp"
#include "driftband/plot.hpp"

namespace db = driftband;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInvariant = 3;
constexpr int kExitIo = 4;

// Flags mirror config keys; only flags the user actually passed override the
// config file.
struct ConfigFlags {
    std::vector<std::pair<CLI::Option*, std::pair<std::string, std::string*>>> bindings;
    std::vector<std::unique_ptr<std::string>> storage;

    void bind(CLI::App* cmd, const std::string& flag, const std::string& key,
              const std::string& help) {
        storage.push_back(std::make_unique<std::string>());
        std::string* slot = storage.back().get();
        CLI::Option* opt = cmd->add_option(flag, *slot, help);
        bindings.push_back({opt, {key, slot}});
    }

    void apply(db::ExperimentConfig& config) const {
        for (const auto& [opt, kv] : bindings) {
            if (opt->count() > 0) {
                db::apply_config_key(config, kv.first, *kv.second);
            }
        }
    }
};

struct GlobalArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
};

db::ExperimentConfig assemble_config(const GlobalArgs& g, const ConfigFlags& flags,
                                     db::ExperimentConfig::Mode mode) {
    db::ExperimentConfig config;
    if (!g.config_path.empty()) {
        config = db::load_config_file(g.config_path);
    }
    config.mode = mode;
    flags.apply(config);
    if (g.seed) config.master_seed = *g.seed;
    if (g.threads) config.threads = *g.threads;
    config.validate();
    return config;
}

std::filesystem::path prepare_out_dir(const std::string& out_dir) {
    std::filesystem::path dir(out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw db::IoError("cannot create output directory: " + out_dir);
    }
    return dir;
}

int cmd_cover(int d, double psi, double L, std::uint64_t budget) {
    const db::GridCover cover = db::build_cover(d, psi, budget);
    db::MeanRewardModel reward{db::RewardKind::LinearStochastic, L, d, 0};
    double best = -1e300;
    for (const auto& p : cover.points) {
        best = std::max(best, db::mean_reward(reward, p));
    }
    std::cout << "d = " << cover.d << "\n";
    std::cout << "psi = " << db::format_double(psi) << "\n";
    std::cout << "k = " << cover.k << "\n";
    std::cout << "arms = " << cover.size() << "\n";
    std::cout << "cover_radius = " << db::format_double(cover.cell_radius()) << "\n";
    std::cout << "discretization_gap = " << db::format_double(reward.mu_star() - best) << "\n";
    return kExitOk;
}

std::string trace_path(const std::filesystem::path& dir, int trial, int trials) {
    if (trials == 1) return (dir / "trace.csv").string();
    char buf[32];
    std::snprintf(buf, sizeof(buf), "trace_%03d.csv", trial);
    return (dir / buf).string();
}

int cmd_run(const db::ExperimentConfig& config, const std::filesystem::path& out) {
    const double psi = config.effective_psi();
    db::MeanRewardModel reward{db::RewardKind::LinearStochastic, config.lipschitz, config.d_a,
                               0};
    const db::GridCover cover = db::build_cover(config.d_a, psi, config.arm_budget);
    const db::ArmSet arms = db::make_grid_arm_set(cover, reward, config.noise);
    const auto preamble = db::config_preamble(config);

    for (int trial = 0; trial < config.trials; ++trial) {
        db::EpisodeRngs rngs =
            db::EpisodeRngs::from_seed(db::trial_seed(config.master_seed, trial));
        const db::RunResult run = db::run_arm_episode(arms, config.drift, config.horizon,
                                                      config.log_mode, rngs);
        const db::TraceCheckReport report = db::check_run_invariants(
            run, config.drift, config.log_mode, config.horizon, cover.size());
        if (!report.ok()) {
            std::cerr << "invariant violation: " << report.violations.front() << "\n";
            return kExitInvariant;
        }
        const std::string path = trace_path(out, trial, config.trials);
        db::write_trace_csv(run, path, preamble);
        std::cout << "trial " << trial << ": arms = " << cover.size()
                  << ", pseudo_regret = " << db::format_double(run.cum_pseudo_regret.back())
                  << ", compensation = " << db::format_double(run.cum_compensation.back())
                  << " -> " << path << "\n";
    }
    return kExitOk;
}

int cmd_contextual(const db::ExperimentConfig& config, const std::filesystem::path& out) {
    const double psi = config.effective_psi();
    db::MeanRewardModel reward{db::RewardKind::LinearContextual, config.lipschitz, config.d_a,
                               config.d_x};
    const db::GridCover arm_cover = db::build_cover(config.d_a, psi, config.arm_budget);
    const db::GridCover ctx_cover = db::build_cover(config.d_x, psi, config.arm_budget);
    const auto preamble = db::config_preamble(config);

    for (int trial = 0; trial < config.trials; ++trial) {
        db::EpisodeRngs rngs =
            db::EpisodeRngs::from_seed(db::trial_seed(config.master_seed, trial));
        const db::ContextualRunResult run = db::run_contextual_episode(
            arm_cover, ctx_cover, reward, config.noise, config.drift, config.horizon,
            config.log_mode, db::ContextSource::UniformIid, nullptr, rngs);
        const db::TraceCheckReport report = db::check_contextual_invariants(
            run, config.drift, config.log_mode, config.horizon, psi);
        if (!report.ok()) {
            std::cerr << "invariant violation: " << report.violations.front() << "\n";
            return kExitInvariant;
        }
        const std::string path = trace_path(out, trial, config.trials);
        db::write_trace_csv(run.run, path, preamble);
        std::cout << "trial " << trial << ": arms = " << arm_cover.size()
                  << ", contexts = " << ctx_cover.size() << ", pseudo_regret = "
                  << db::format_double(run.run.cum_pseudo_regret.back())
                  << ", compensation = "
                  << db::format_double(run.run.cum_compensation.back()) << " -> " << path
                  << "\n";
    }
    return kExitOk;
}

int cmd_experiment(const db::ExperimentConfig& config, const std::filesystem::path& out,
                   bool table) {
    const auto preamble = db::config_preamble(config);
    if (table) {
        // The 3x3 sensitivity grid: optimal, undershot and overshot psi per
        // dimension; one summary CSV per cell plus the table itself.
        struct Cell {
            int d;
            double psi;
            const char* label;
        };
        const Cell cells[] = {{1, 0.061, "opt"},  {1, 0.00001, "small"}, {1, 0.35, "large"},
                              {2, 0.123, "opt"},  {2, 0.005, "small"},   {2, 0.35, "large"},
                              {3, 0.187, "opt"},  {3, 0.02, "small"},    {3, 0.35, "large"}};
        std::vector<db::TableRow> rows;
        for (const auto& cell : cells) {
            db::ExperimentConfig cell_config = config;
            cell_config.mode = db::ExperimentConfig::Mode::Stochastic;
            cell_config.d_a = cell.d;
            cell_config.d_x = 0;
            cell_config.psi_auto = false;
            cell_config.psi_value = cell.psi;
            const db::ExperimentSummary summary = db::run_experiment(cell_config);
            db::TableRow row;
            row.d = cell.d;
            row.psi = cell.psi;
            row.n_arms = summary.n_arms;
            row.mean_regret = summary.mean_final_pseudo;
            row.mean_compensation = summary.mean_final_compensation;
            rows.push_back(row);

            std::ostringstream name;
            name << "summary_d" << cell.d << "_" << cell.label << ".csv";
            db::write_summary_csv(summary, (out / name.str()).string(),
                                  db::config_preamble(cell_config));
            std::cout << "d = " << row.d << ", psi = " << db::format_double(row.psi)
                      << ", arms = " << row.n_arms
                      << ", regret = " << db::format_double(row.mean_regret)
                      << ", compensation = " << db::format_double(row.mean_compensation)
                      << ", slopes = (" << db::format_double(summary.slope_pseudo) << ", "
                      << db::format_double(summary.slope_compensation) << ")\n";
        }
        const std::string path = (out / "table.csv").string();
        db::write_table_csv(rows, path, preamble);
        std::cout << "wrote " << path << "\n";
        return kExitOk;
    }

    const db::ExperimentSummary summary = db::run_experiment(config);
    const std::string path = (out / "summary.csv").string();
    db::write_summary_csv(summary, path, preamble);
    const db::SummaryRow& last = summary.rows.back();
    std::cout << "arms = " << summary.n_arms;
    if (summary.n_contexts > 0) std::cout << ", contexts = " << summary.n_contexts;
    std::cout << ", psi = " << db::format_double(summary.psi) << "\n";
    std::cout << "slope_pseudo_regret = " << db::format_double(summary.slope_pseudo)
              << ", slope_compensation = " << db::format_double(summary.slope_compensation)
              << "\n";
    std::cout << "final mean_pseudo_regret = " << db::format_double(last.mean_pseudo_regret)
              << " (bound " << db::format_double(last.bound_value) << ", "
              << (last.mean_pseudo_regret <= last.bound_value ? "inside" : "outside")
              << " the envelope)\n";
    std::cout << "final mean_compensation = " << db::format_double(last.mean_compensation)
              << "\n";
    std::cout << "wrote " << path << "\n";
    return kExitOk;
}

int cmd_oracle(const std::vector<double>& p, double ell, std::uint64_t horizon,
               std::uint64_t mc_episodes, std::uint64_t seed) {
    db::OracleInstance instance;
    instance.p = p;
    instance.ell = ell;
    instance.horizon = horizon;
    const db::OracleResult exact = db::brute_force_expectation(instance);
    std::cout << "expected_pseudo_regret = " << db::format_double(exact.expected_pseudo_regret)
              << "\n";
    std::cout << "expected_compensation = " << db::format_double(exact.expected_compensation)
              << "\n";
    if (mc_episodes == 0) return kExitOk;

    const db::ArmSet arms = db::make_bernoulli_arm_set(p);
    const db::DriftModel drift{ell, ell};
    double sum_r = 0.0, ss_r = 0.0, sum_c = 0.0, ss_c = 0.0;
    for (std::uint64_t i = 0; i < mc_episodes; ++i) {
        db::EpisodeRngs rngs = db::EpisodeRngs::from_seed(db::trial_seed(seed, i));
        const db::RunResult run =
            db::run_arm_episode(arms, drift, horizon, db::LogMode::LogRound, rngs);
        const double r = run.cum_pseudo_regret.back();
        const double c = run.cum_compensation.back();
        sum_r += r;
        ss_r += r * r;
        sum_c += c;
        ss_c += c * c;
    }
    const double n = static_cast<double>(mc_episodes);
    const double mean_r = sum_r / n;
    const double mean_c = sum_c / n;
    const double se_r = std::sqrt((ss_r / n - mean_r * mean_r) / n);
    const double se_c = std::sqrt((ss_c / n - mean_c * mean_c) / n);
    std::cout << "mc_pseudo_regret = " << db::format_double(mean_r) << " (se "
              << db::format_double(se_r) << ")\n";
    std::cout << "mc_compensation = " << db::format_double(mean_c) << " (se "
              << db::format_double(se_c) << ")\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"incentivized exploration on discretized metric bandits"};
    app.require_subcommand(1);

    GlobalArgs global;
    std::uint64_t seed_value = 0;
    int threads_value = 0;
    app.add_option("--config", global.config_path, "config file (key = value lines)");
    app.add_option("--out", global.out_dir, "output directory");
    CLI::Option* seed_opt = app.add_option("--seed", seed_value, "master seed");
    CLI::Option* threads_opt = app.add_option("--threads", threads_value, "worker threads");

    // cover
    auto* cover = app.add_subcommand("cover", "report the psi-cover of [0,1]^d");
    cover->fallthrough();
    int cover_d = 1;
    double cover_psi = 0.0, cover_L = 1.0;
    std::uint64_t cover_budget = db::kDefaultArmBudget;
    cover->add_option("--d", cover_d, "dimension")->required();
    cover->add_option("--psi", cover_psi, "mesh width")->required();
    cover->add_option("--lipschitz", cover_L, "Lipschitz constant for the gap report");
    cover->add_option("--budget", cover_budget, "arm budget");

    // run / contextual / experiment share the config flags
    auto* run = app.add_subcommand("run", "single-config stochastic episodes, trace CSV out");
    run->fallthrough();
    auto* contextual =
        app.add_subcommand("contextual", "single-config contextual episodes, trace CSV out");
    contextual->fallthrough();
    auto* experiment =
        app.add_subcommand("experiment", "multi-trial experiment, summary/table CSV out");
    experiment->fallthrough();
    bool experiment_table = false;
    experiment->add_flag("--table", experiment_table,
                         "run the 3x3 psi-sensitivity grid instead of one config");

    ConfigFlags run_flags, ctx_flags, exp_flags;
    auto bind_common = [](CLI::App* cmd, ConfigFlags& flags) {
        flags.bind(cmd, "--horizon", "horizon", "rounds per episode");
        flags.bind(cmd, "--d", "d", "total dimension");
        flags.bind(cmd, "--d-a", "d_a", "arm-space dimension");
        flags.bind(cmd, "--d-x", "d_x", "context-space dimension");
        flags.bind(cmd, "--lipschitz", "lipschitz", "Lipschitz constant");
        flags.bind(cmd, "--psi", "psi", "mesh width or 'auto'");
        flags.bind(cmd, "--psi-c", "psi_c", "auto-psi multiplier");
        flags.bind(cmd, "--noise-scale", "noise_scale", "Gaussian noise scale");
        flags.bind(cmd, "--noise-interpretation", "noise_interpretation",
                   "'variance' or 'stddev'");
        flags.bind(cmd, "--clip-to-unit", "clip_to_unit", "clamp rewards to [0,1]");
        flags.bind(cmd, "--ell-low", "ell_low", "drift slope lower bound");
        flags.bind(cmd, "--ell-high", "ell_high", "drift slope upper bound");
        flags.bind(cmd, "--trials", "trials", "independent trials");
        flags.bind(cmd, "--log-mode", "log_mode", "'log-t' or 'log-T'");
        flags.bind(cmd, "--baselines", "baselines", "comma list of baselines");
        flags.bind(cmd, "--bound-c", "bound_c", "bound curve multiplier");
        flags.bind(cmd, "--arm-budget", "arm_budget", "max cover size");
    };
    bind_common(run, run_flags);
    bind_common(contextual, ctx_flags);
    bind_common(experiment, exp_flags);

    // oracle
    auto* oracle = app.add_subcommand("oracle", "exact expectation on a tiny Bernoulli instance");
    oracle->fallthrough();
    double p0 = 0.9, p1 = 0.1, ell = 0.5;
    std::optional<double> p2;
    std::uint64_t oracle_T = 6, oracle_mc = 0;
    oracle->add_option("--p0", p0, "arm 0 success probability");
    oracle->add_option("--p1", p1, "arm 1 success probability");
    oracle->add_option("--p2", p2, "arm 2 success probability");
    oracle->add_option("--ell", ell, "deterministic drift slope");
    oracle->add_option("--horizon", oracle_T, "rounds (<= 8)");
    oracle->add_option("--mc", oracle_mc, "Monte-Carlo episodes to compare against");

    // plot
    auto* plot = app.add_subcommand("plot", "render summary CSV as SVG plots");
    plot->fallthrough();
    std::string plot_input;
    plot->add_option("--input", plot_input, "summary CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }
    if (seed_opt->count() > 0) global.seed = seed_value;
    if (threads_opt->count() > 0) global.threads = threads_value;

    try {
        if (cover->parsed()) {
            return cmd_cover(cover_d, cover_psi, cover_L, cover_budget);
        }
        const auto out = prepare_out_dir(global.out_dir);
        if (run->parsed()) {
            return cmd_run(assemble_config(global, run_flags,
                                           db::ExperimentConfig::Mode::Stochastic),
                           out);
        }
        if (contextual->parsed()) {
            return cmd_contextual(assemble_config(global, ctx_flags,
                                                  db::ExperimentConfig::Mode::Contextual),
                                  out);
        }
        if (experiment->parsed()) {
            db::ExperimentConfig config;
            if (!global.config_path.empty()) {
                config = db::load_config_file(global.config_path);
            }
            exp_flags.apply(config);
            if (global.seed) config.master_seed = *global.seed;
            if (global.threads) config.threads = *global.threads;
            config.validate();
            return cmd_experiment(config, out, experiment_table);
        }
        if (oracle->parsed()) {
            std::vector<double> p{p0, p1};
            if (p2) p.push_back(*p2);
            return cmd_oracle(p, ell, oracle_T, oracle_mc, global.seed.value_or(1));
        }
        if (plot->parsed()) {
            const auto rows = db::read_summary_csv(plot_input);
            std::vector<std::string> preamble;
            std::ifstream in(plot_input);
            std::string line;
            while (std::getline(in, line) && !line.empty() && line[0] == '#') {
                preamble.push_back(line);
            }
            db::write_plots(rows, out.string(), preamble);
            std::cout << "wrote " << (out / "pseudo_regret.svg").string() << ", "
                      << (out / "realized_regret.svg").string() << ", "
                      << (out / "compensation.svg").string() << "\n";
            return kExitOk;
        }
    } catch (const db::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const db::InvalidParameterError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const db::BudgetExceededError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const db::InvariantViolationError& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return kExitInvariant;
    } catch (const db::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
