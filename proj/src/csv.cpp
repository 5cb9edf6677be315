#include "driftband/csv.hpp"

#include <cstdio>
#include <fstream>
#include <locale>
#include <sstream>

#include "driftband/errors.hpp"

namespace driftband {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open for writing: " + path);
    }
    out.imbue(std::locale::classic());
    return out;
}

void write_preamble(std::ofstream& out, const std::vector<std::string>& preamble) {
    for (const auto& line : preamble) {
        out << line << "\n";
    }
}

} // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string baseline_tag(BaselineKind kind) {
    return kind == BaselineKind::GreedyOnly ? "greedy_only" : "ucb_no_incentive";
}

void write_trace_csv(const RunResult& result, const std::string& path,
                     const std::vector<std::string>& preamble) {
    auto out = open_out(path);
    write_preamble(out, preamble);
    out << "t,principal_arm,greedy_arm,kappa,rho,gamma,observed,ell_t,"
           "pseudo_regret_inc,realized_regret_inc\n";
    for (const auto& rec : result.records) {
        out << rec.t << ',' << rec.principal_arm << ',' << rec.greedy_arm << ','
            << format_double(rec.kappa) << ',' << format_double(rec.rho) << ','
            << format_double(rec.gamma) << ',' << format_double(rec.observed) << ','
            << format_double(rec.ell_t) << ',' << format_double(rec.pseudo_regret_inc) << ','
            << format_double(rec.realized_regret_inc) << '\n';
    }
    if (!out) {
        throw IoError("write failed: " + path);
    }
}

void write_summary_csv(const ExperimentSummary& summary, const std::string& path,
                       const std::vector<std::string>& preamble) {
    auto out = open_out(path);
    write_preamble(out, preamble);
    out << "checkpoint_t,mean_pseudo_regret,ci_pseudo_regret,mean_realized_regret,"
           "ci_realized_regret,mean_compensation,ci_compensation,bound_value";
    for (const auto& base : summary.baselines) {
        const std::string tag = baseline_tag(base.kind);
        out << ',' << tag << "_mean_pseudo_regret," << tag << "_ci_pseudo_regret," << tag
            << "_mean_realized_regret," << tag << "_ci_realized_regret," << tag
            << "_mean_compensation," << tag << "_ci_compensation";
    }
    out << '\n';
    for (std::size_t i = 0; i < summary.rows.size(); ++i) {
        const SummaryRow& row = summary.rows[i];
        out << row.t << ',' << format_double(row.mean_pseudo_regret) << ','
            << format_double(row.ci_pseudo_regret) << ','
            << format_double(row.mean_realized_regret) << ','
            << format_double(row.ci_realized_regret) << ','
            << format_double(row.mean_compensation) << ','
            << format_double(row.ci_compensation) << ',' << format_double(row.bound_value);
        for (const auto& base : summary.baselines) {
            const SummaryRow& b = base.rows[i];
            out << ',' << format_double(b.mean_pseudo_regret) << ','
                << format_double(b.ci_pseudo_regret) << ','
                << format_double(b.mean_realized_regret) << ','
                << format_double(b.ci_realized_regret) << ','
                << format_double(b.mean_compensation) << ','
                << format_double(b.ci_compensation);
        }
        out << '\n';
    }
    if (!out) {
        throw IoError("write failed: " + path);
    }
}

void write_table_csv(const std::vector<TableRow>& rows, const std::string& path,
                     const std::vector<std::string>& preamble) {
    auto out = open_out(path);
    write_preamble(out, preamble);
    out << "d,psi,n_arms,mean_regret,mean_compensation\n";
    for (const auto& row : rows) {
        out << row.d << ',' << format_double(row.psi) << ',' << row.n_arms << ','
            << format_double(row.mean_regret) << ',' << format_double(row.mean_compensation)
            << '\n';
    }
    if (!out) {
        throw IoError("write failed: " + path);
    }
}

} // namespace driftband
