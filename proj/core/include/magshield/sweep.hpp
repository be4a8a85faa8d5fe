#pragma once

#include <string>
#include <vector>

#include "magshield/scenario.hpp"

namespace magshield {

struct SweepSpec {
    ScenarioConfig base;
    std::vector<double> mu_values;
    std::vector<double> tau_values;
    int repeats = 1;
};

struct SweepRunRow {
    double mu = 0.0, tau = 0.0;
    int repeat = 0;
    std::uint64_t seed = 0;
    std::string run_id;
    std::string status;  // run outcome, or "error: ..." for config failures
    double min_x1 = 0.0;
    double runtime_seconds = 0.0;
};

struct SweepCell {
    double mu = 0.0, tau = 0.0;
    bool shield_condition = false;
    double confined_fraction = 0.0;
    double min_x1_median = 0.0;
    double runtime_seconds = 0.0;
};

struct SweepSummary {
    std::string sweep_id;
    std::string directory;
    std::vector<SweepRunRow> rows;  // exactly cells x repeats entries
    std::vector<SweepCell> cells;
};

/// Run every (mu, tau) cell `repeats` times (seed = base seed + repeat).
/// Cells run in a worker pool sized by MAGSHIELD_THREADS (default 1);
/// individual failures are recorded in their row and the sweep continues.
SweepSummary run_sweep(const SweepSpec& spec);

/// Write plot-ready text files next to the referenced artifact.
/// kind: timeseries | tail | ladder (from a run id) | frontier (sweep id).
/// Returns the path written. Throws UnknownRunId when nothing matches.
std::string emit_plot_data(const std::string& output_root, const std::string& id,
                           const std::string& kind);

}  // namespace magshield
