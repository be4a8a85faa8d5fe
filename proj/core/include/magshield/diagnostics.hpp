#pragma once

#include <map>
#include <string>
#include <vector>

#include "magshield/integrator.hpp"

namespace magshield {

/// Geometric hierarchy of averaging windows: Delta_l = delta1 * g^(l-1).
struct LadderSchedule {
    double delta1 = 0.0;  // <= 0 disables the ladder diagnostics
    int g_factor = 2;
    int levels = 4;

    double window_at(int level) const;  // level is 1-based
};

struct DiagRecord {
    double time = 0.0;
    double kinetic = 0.0;
    double potential_self = 0.0;
    double potential_external = 0.0;
    double total_energy = 0.0;
    double min_x1 = 0.0;
    double max_speed = 0.0;
    double running_max_speed = 0.0;  // V(t), floored at C3
    double displacement_R = 1.0;     // R(t) = 1 + integral of V
    double charge = 0.0;
    double shield_residual_max = 0.0;
    double l53_norm = 0.0;
    std::map<int, double> avg_field_by_level;
};

/// Stateful assembler for DiagRecords: carries the running maximal speed,
/// the trapezoid displacement integral and the grid/ladder settings.
class DiagnosticsEngine {
  public:
    DiagnosticsEngine(double c3, LadderSchedule ladder, std::array<int, 3> density_cells);

    DiagRecord record(const SimState& state, const SolverConfig& solver,
                      const ExternalFields& fields, const TrackedSeries* tracked);

  private:
    double c3_;
    LadderSchedule ladder_;
    std::array<int, 3> density_cells_;
    bool first_ = true;
    double prev_time_ = 0.0;
    double running_max_ = 0.0;
    double displacement_ = 1.0;
};

/// Max-over-windows averages of |E| along tracked characteristics, one
/// entry per ladder level with at least one complete aligned window.
/// Series are piecewise constant; window integrals are exact.
std::map<int, double> field_time_average(const TrackedSeries& tracked,
                                         const LadderSchedule& schedule);

struct ConfinementFit {
    bool reached_wall = false;
    double c_hat = 0.0;                // max of min_x1^-(tau-1) / V(t)
    double slope = 0.0;                // OLS slope of the ratio, final third
    double slope_stderr = 0.0;
    bool passed = false;
    std::vector<double> ratio_series;
};

/// Empirical check of the wall-distance bound min_x1^-(tau-1) <= C * V(t).
ConfinementFit confinement_bound_check(const std::vector<DiagRecord>& history, double tau);

struct TailReport {
    double lambda1 = 0.0;
    double log_amplitude = 0.0;
    int tail_bins = 0;
    bool passed = false;
    std::vector<double> bin_speed;
    std::vector<double> bin_count;
    std::vector<double> bin_envelope;
};

/// Histogram check that speeds stay below a Gaussian envelope: fits
/// log(count / v^2) = const - lambda1 v^2 beyond the modal bin, passes
/// when no tail bin (>= 20 samples) exceeds twice the fitted envelope.
/// Throws InsufficientSample with fewer than 10 usable tail bins.
TailReport gaussian_tail_check(const std::vector<Particle>& particles);

std::string diag_record_to_json(const DiagRecord& r);

}  // namespace magshield
