#pragma once

#include <string>
#include <vector>

#include "driftband/harness.hpp"

namespace driftband {

// Summary rows read back from a summary CSV (comment lines skipped).
// Throws ConfigError naming the line number on malformed input.
std::vector<SummaryRow> read_summary_csv(const std::string& path);

// One SVG per metric under out_dir: pseudo_regret.svg, realized_regret.svg,
// compensation.svg. Each shows the mean curve, a shaded CI band and the
// dotted theoretical bound; output bytes depend only on the input rows and
// preamble. Preamble lines are embedded as an XML comment so plots carry the
// same provenance header as the CSV they came from.
void write_plots(const std::vector<SummaryRow>& rows, const std::string& out_dir,
                 const std::vector<std::string>& preamble = {});

} // namespace driftband
