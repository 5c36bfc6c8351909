#pragma once

#include "config.hpp"
#include "table.hpp"

#include <string>
#include <vector>

namespace semiclass::cli {

struct Report {
    Table table;
    std::vector<std::string> notes; ///< one-line summaries for stderr
};

Report cmd_levels(const RunConfig& c);
Report cmd_count(const RunConfig& c);
Report cmd_wavefunction(const RunConfig& c);
Report cmd_observable(const RunConfig& c);
Report cmd_scaling(const RunConfig& c);

Report run(const RunConfig& c);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace semiclass::cli
