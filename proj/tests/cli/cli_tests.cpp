// End-to-end checks of the command-line tool: exit codes, file outputs,
// flag/config precedence, and the golden trace command.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace fs = std::filesystem;

namespace {

int g_failures = 0;

#define CHECK_MSG(cond, msg)                                                      \
    do {                                                                          \
        if (!(cond)) {                                                            \
            std::cerr << "[FAIL] " << __FILE__ << ":" << __LINE__ << " " << msg   \
                      << "\n";                                                    \
            ++g_failures;                                                         \
        }                                                                         \
    } while (0)

std::string g_cli;
fs::path g_dir;

struct CmdResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CmdResult run_cmd(const std::string& args) {
    const fs::path out_file = g_dir / "stdout.txt";
    const fs::path err_file = g_dir / "stderr.txt";
    const std::string cmd = g_cli + " " + args + " > " + out_file.string() + " 2> "
                            + err_file.string();
    const int status = std::system(cmd.c_str());
    CmdResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = slurp(out_file);
    result.err = slurp(err_file);
    return result;
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

std::size_t count_data_rows(const std::string& csv) {
    std::stringstream ss(csv);
    std::string line;
    std::size_t rows = 0;
    bool header_seen = false;
    while (std::getline(ss, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        ++rows;
    }
    return rows;
}

void test_cover() {
    CmdResult r = run_cmd("cover --d 3 --psi 0.187");
    CHECK_MSG(r.exit_code == 0, "cover d=3 exit code " << r.exit_code);
    CHECK_MSG(contains(r.out, "arms = 216"), "cover d=3 output:\n" << r.out);

    r = run_cmd("cover --d 1 --psi 1.5");
    CHECK_MSG(r.exit_code == 0, "degenerate cover exit code");
    CHECK_MSG(contains(r.out, "arms = 1"), "degenerate cover output:\n" << r.out);

    r = run_cmd("cover --d 2 --psi 0.005");
    CHECK_MSG(contains(r.out, "arms = 40000"), "cover d=2 output:\n" << r.out);

    r = run_cmd("cover --d 3 --psi 0.005");
    CHECK_MSG(r.exit_code == 2, "budget overrun should exit 2, got " << r.exit_code);
    CHECK_MSG(contains(r.err, "8000000"), "budget error names k^d:\n" << r.err);
}

void test_run_single_round() {
    const fs::path out = g_dir / "run1";
    CmdResult r = run_cmd("run --d 1 --horizon 1 --trials 1 --seed 7 --out " + out.string());
    CHECK_MSG(r.exit_code == 0, "run T=1 exit code " << r.exit_code << "\n" << r.err);
    const std::string trace = slurp(out / "trace.csv");
    CHECK_MSG(count_data_rows(trace) == 1, "run T=1 trace rows");
    CHECK_MSG(contains(trace, "\n1,0,0,0,"), "run T=1 row starts with kappa 0:\n" << trace);
    CHECK_MSG(contains(trace, "# master_seed = 7"), "trace echoes the seed");
}

void test_golden_cli_trace(const std::string& fixture_dir) {
    const fs::path out = g_dir / "golden";
    CmdResult r = run_cmd("run --d 1 --psi 0.6 --horizon 6 --trials 1 --noise-scale 0 "
                          "--ell-low 0.5 --ell-high 0.5 --seed 42 --out "
                          + out.string());
    CHECK_MSG(r.exit_code == 0, "golden run exit code " << r.exit_code << "\n" << r.err);
    const std::string got = slurp(out / "trace.csv");
    const std::string want = slurp(fs::path(fixture_dir) / "golden_cli_trace.csv");
    CHECK_MSG(!want.empty(), "golden_cli_trace.csv fixture present");
    CHECK_MSG(got == want, "golden CLI trace bytes differ from the fixture");

    // identical command, identical bytes
    const fs::path out2 = g_dir / "golden2";
    run_cmd("run --d 1 --psi 0.6 --horizon 6 --trials 1 --noise-scale 0 "
            "--ell-low 0.5 --ell-high 0.5 --seed 42 --out "
            + out2.string());
    CHECK_MSG(slurp(out2 / "trace.csv") == got, "golden rerun not byte-identical");
}

void test_config_precedence() {
    const fs::path cfg = g_dir / "exp.cfg";
    {
        std::ofstream f(cfg);
        f << "# sample config\n"
          << "horizon = 5\n"
          << "d = 1\n"
          << "psi = 0.35\n"
          << "trials = 1\n";
    }
    const fs::path out = g_dir / "cfg_run";
    CmdResult r = run_cmd("run --config " + cfg.string() + " --horizon 3 --seed 1 --out "
                          + out.string());
    CHECK_MSG(r.exit_code == 0, "config run exit code " << r.exit_code << "\n" << r.err);
    const std::string trace = slurp(out / "trace.csv");
    CHECK_MSG(count_data_rows(trace) == 3, "flag --horizon overrides the config file");
    CHECK_MSG(contains(trace, "# horizon = 3"), "effective config echoed into the trace");

    const fs::path bad = g_dir / "bad.cfg";
    {
        std::ofstream f(bad);
        f << "horizon = 5\nnot_a_key = 1\n";
    }
    r = run_cmd("run --config " + bad.string());
    CHECK_MSG(r.exit_code == 2, "unknown config key should exit 2, got " << r.exit_code);

    r = run_cmd("run --config " + (g_dir / "missing.cfg").string());
    CHECK_MSG(r.exit_code == 4, "missing config file should exit 4, got " << r.exit_code);

    r = run_cmd("run --d 1 --no-such-flag 3");
    CHECK_MSG(r.exit_code == 2, "unknown flag should exit 2, got " << r.exit_code);
}

void test_invariant_replay() {
    const fs::path out = g_dir / "invariant_run";
    CmdResult r = run_cmd("run --d 1 --psi 0.061 --horizon 20000 --trials 1 --seed 1 --out "
                          + out.string());
    CHECK_MSG(r.exit_code == 0, "17-arm episode exit code " << r.exit_code << "\n" << r.err);
    CHECK_MSG(count_data_rows(slurp(out / "trace.csv")) == 20000, "17-arm trace length");
}

void test_contextual() {
    const fs::path out = g_dir / "ctx_run";
    CmdResult r = run_cmd("contextual --d 2 --horizon 50 --trials 1 --seed 3 --out "
                          + out.string());
    CHECK_MSG(r.exit_code == 0, "contextual exit code " << r.exit_code << "\n" << r.err);
    CHECK_MSG(count_data_rows(slurp(out / "trace.csv")) == 50, "contextual trace length");
}

void test_multi_trial_traces() {
    const fs::path out = g_dir / "multi";
    CmdResult r = run_cmd("run --d 1 --psi 0.35 --horizon 10 --trials 2 --seed 4 --out "
                          + out.string());
    CHECK_MSG(r.exit_code == 0, "multi-trial run exit code " << r.exit_code << "\n" << r.err);
    CHECK_MSG(fs::exists(out / "trace_000.csv") && fs::exists(out / "trace_001.csv"),
              "per-trial trace files");
    CHECK_MSG(slurp(out / "trace_000.csv") != slurp(out / "trace_001.csv"),
              "trials use independent seeds");
}

void test_experiment_and_plot() {
    const fs::path out = g_dir / "exp";
    CmdResult r = run_cmd("experiment --d 1 --psi 0.35 --horizon 64 --trials 2 --seed 5 --out "
                          + out.string());
    CHECK_MSG(r.exit_code == 0, "experiment exit code " << r.exit_code << "\n" << r.err);
    const std::string summary = slurp(out / "summary.csv");
    CHECK_MSG(contains(summary, "checkpoint_t,mean_pseudo_regret"), "summary header");
    CHECK_MSG(contains(summary, "# driftband"), "summary version comment");
    CHECK_MSG(contains(r.out, "slope_pseudo_regret"), "experiment prints slopes");

    r = run_cmd("plot --input " + (out / "summary.csv").string() + " --out " + out.string());
    CHECK_MSG(r.exit_code == 0, "plot exit code " << r.exit_code << "\n" << r.err);
    for (const char* name : {"pseudo_regret.svg", "realized_regret.svg", "compensation.svg"}) {
        const std::string svg = slurp(out / name);
        CHECK_MSG(contains(svg, "</svg>"), std::string("well-formed ") + name);
    }

    const fs::path bad_csv = g_dir / "bad.csv";
    {
        std::ofstream f(bad_csv);
        f << "not,a,summary\n";
    }
    r = run_cmd("plot --input " + bad_csv.string() + " --out " + out.string());
    CHECK_MSG(r.exit_code == 2, "malformed summary should exit 2, got " << r.exit_code);
}

void test_oracle() {
    CmdResult r = run_cmd("oracle --p0 1.0 --p1 0.0 --ell 0.5 --horizon 4");
    CHECK_MSG(r.exit_code == 0, "oracle exit code");
    CHECK_MSG(contains(r.out, "expected_pseudo_regret = 1"), "oracle regret:\n" << r.out);
    CHECK_MSG(contains(r.out, "expected_compensation = 1"), "oracle compensation:\n" << r.out);

    r = run_cmd("oracle --p0 0.9 --p1 0.1 --horizon 9");
    CHECK_MSG(r.exit_code == 2, "oversized oracle should exit 2, got " << r.exit_code);
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: cli_tests <path-to-driftband>\n";
        return 2;
    }
    g_cli = argv[1];
    g_dir = fs::temp_directory_path() / "driftband_cli_tests";
    fs::remove_all(g_dir);
    fs::create_directories(g_dir);

    test_cover();
    test_run_single_round();
    test_golden_cli_trace(DRIFTBAND_FIXTURE_DIR);
    test_config_precedence();
    test_invariant_replay();
    test_contextual();
    test_multi_trial_traces();
    test_experiment_and_plot();
    test_oracle();

    fs::remove_all(g_dir);
    if (g_failures == 0) {
        std::cout << "[PASS] all cli checks\n";
        return 0;
    }
    std::cerr << g_failures << " cli check(s) failed\n";
    return 1;
}
