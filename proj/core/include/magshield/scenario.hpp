#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "magshield/diagnostics.hpp"
#include "magshield/errors.hpp"
#include "magshield/fields.hpp"
#include "magshield/integrator.hpp"
#include "magshield/sampling.hpp"
#include "magshield/self_field.hpp"

namespace magshield {

/// One runnable experiment: every knob in one flat, sectioned config.
struct ScenarioConfig {
    int schema_version = 1;
    ExternalFieldConfig field;
    InitialDatum datum;
    SolverConfig solver;
    StepperConfig stepper;
    int particle_count = 512;
    std::uint64_t seed = 1;
    bool deterministic = true;
    int record_cadence = 10;
    int tracked_particles = 32;
    std::string output_dir = "runs";
    double c3 = 1.0;  // floor of the running max speed
    LadderSchedule ladder;
    std::array<int, 3> density_cells{32, 32, 32};

    void validate() const;

    // Canonical serialization; equal configs give equal text, hence equal
    // run ids.
    std::string canonical_text() const;
    std::string run_id() const;  // 16 hex chars, FNV-1a of canonical_text
};

ScenarioConfig parse_scenario_text(const std::string& text, const std::string& name);
ScenarioConfig parse_scenario_file(const std::string& path);

struct RunManifest {
    std::string run_id;
    std::uint64_t seed = 0;
    std::string artifact_version;
    std::string status = "pending";  // then completed | wall_crossing | timestep_collapse
    std::string start_time, end_time;
    bool shield_condition = false;  // ledger verdict, recorded not enforced
    double min_x1_overall = 0.0;
    double max_speed_overall = 0.0;
    double energy_drift = 0.0;
    double shield_residual_max = 0.0;
    int steps = 0;
    double wall_seconds = 0.0;
};

/// In-memory result, used directly by tests; run_scenario adds persistence.
struct RunResult {
    ScenarioConfig config;
    std::vector<DiagRecord> history;
    SimState state;
    TrackedSeries tracked;
    std::string status;
    int steps = 0;
};

RunResult run_simulation(const ScenarioConfig& config);

/// Full pipeline: parse, simulate, persist manifest + diagnostics +
/// snapshots under <output root>/<run id>. The MAGSHIELD_OUTPUT_ROOT
/// environment variable overrides config.output_dir.
RunManifest run_scenario(const std::string& config_path);
RunManifest run_scenario(const ScenarioConfig& config);

std::string output_root_for(const ScenarioConfig& config);

}  // namespace magshield
