#pragma once

#include <functional>
#include <vector>

#include "magshield/errors.hpp"
#include "magshield/fields.hpp"
#include "magshield/sampling.hpp"
#include "magshield/self_field.hpp"
#include "magshield/vec3.hpp"

namespace magshield {

struct StepperConfig {
    double dt_base = 1e-3;
    double gyro_safety = 0.2;   // max allowed dt * |B|
    double wall_safety = 0.1;   // max allowed dt * |v1| / x1
    double dt_min = 1e-9;
    double t_end = 1.0;

    void validate() const;
};

struct SimState {
    double time = 0.0;
    int step_index = 0;
    std::vector<Particle> particles;
    std::vector<Vec3> fields_cache;  // self-field E at the last evaluation
};

/// Exact rotation of v about the axis of b by angle |b| * dt
/// (solves dv/dt = v x b with frozen b; preserves |v| to machine precision).
Vec3 rotate_in_magnetic_field(const Vec3& v, const Vec3& b, double dt);

/// Half-kick, exact magnetic rotation, half-kick.
Vec3 boris_velocity_update(const Vec3& v, const Vec3& e_total, const Vec3& b, double dt);

/// Kick-rotate-kick then drift by the new velocity; e_total must already
/// include -grad U (and the point-charge force when enabled).
Particle boris_step(const Particle& p, const Vec3& e_total, const Vec3& b, double dt);

/// Global timestep: min over dt_base, the gyro constraint and the
/// wall-approach constraint. Throws TimestepCollapse below dt_min.
double compute_dt(const SimState& state, const ExternalFields& fields,
                  const StepperConfig& cfg);

/// Per-particle accumulators along tracked characteristics: the transverse
/// kick quadrature for the shield identity and the |E_self| time series
/// for the window-averaged field ladder.
struct TrackedSeries {
    std::vector<int> indices;
    std::vector<double> v2_initial;
    std::vector<double> h_initial;       // H(X1(0))
    std::vector<double> e2_integral;     // sum of (e_total)_2 * dt, midpoint values
    std::vector<double> boundary_times;  // step boundaries, starts at t0
    std::vector<std::vector<double>> e_mag_cumulative;  // per particle, cumulative
                                                        // integral of |E_self| at boundaries

    void initialize(const SimState& state, const ExternalFields& fields,
                    std::vector<int> tracked_indices);
};

/// One synchronized step: drift dt/2, evaluate fields at the midpoint
/// positions, Boris velocity update, drift dt/2. Throws WallCrossing if
/// any particle reaches x1 <= 0.
void advance_with_dt(SimState& state, double dt, const SolverConfig& solver,
                     const ExternalFields& fields, TrackedSeries* tracked = nullptr);

/// advance_with_dt at the adaptive timestep.
void advance(SimState& state, const SolverConfig& solver, const ExternalFields& fields,
             const StepperConfig& cfg, TrackedSeries* tracked = nullptr);

/// Shield identity residual for tracked particle k at the current state:
/// [V2 - V2(0)] + H(X1) - H(X1(0)) - integral of the transverse kicks.
double shield_residual(const SimState& state, const ExternalFields& fields,
                       const TrackedSeries& tracked, int k);
double max_shield_residual(const SimState& state, const ExternalFields& fields,
                           const TrackedSeries& tracked);

}  // namespace magshield
