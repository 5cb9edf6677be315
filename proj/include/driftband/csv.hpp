#pragma once

#include <string>
#include <vector>

#include "driftband/harness.hpp"

namespace driftband {

// Shortest-exact decimal: printf "%.17g", '.' separator regardless of locale.
std::string format_double(double v);

// All writers emit LF line endings and the fixed column orders below.
// Preamble lines are written verbatim before the header.
//
//   trace:   t,principal_arm,greedy_arm,kappa,rho,gamma,observed,ell_t,
//            pseudo_regret_inc,realized_regret_inc
//   summary: checkpoint_t,mean_pseudo_regret,ci_pseudo_regret,
//            mean_realized_regret,ci_realized_regret,mean_compensation,
//            ci_compensation,bound_value   (+6 columns per baseline)
//   table:   d,psi,n_arms,mean_regret,mean_compensation

void write_trace_csv(const RunResult& result, const std::string& path,
                     const std::vector<std::string>& preamble = {});

void write_summary_csv(const ExperimentSummary& summary, const std::string& path,
                       const std::vector<std::string>& preamble = {});

struct TableRow {
    int d = 1;
    double psi = 0.0;
    std::size_t n_arms = 0;
    double mean_regret = 0.0;
    double mean_compensation = 0.0;
};

void write_table_csv(const std::vector<TableRow>& rows, const std::string& path,
                     const std::vector<std::string>& preamble = {});

std::string baseline_tag(BaselineKind kind);

} // namespace driftband
