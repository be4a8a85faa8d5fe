#include "magshield/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace magshield {

void StepperConfig::validate() const {
    if (!(dt_base > 0.0)) throw std::invalid_argument("stepper.dt_base must be > 0");
    if (!(gyro_safety > 0.0 && gyro_safety <= 1.0))
        throw std::invalid_argument("stepper.gyro_safety must be in (0, 1]");
    if (!(wall_safety > 0.0 && wall_safety <= 1.0))
        throw std::invalid_argument("stepper.wall_safety must be in (0, 1]");
    if (!(dt_min > 0.0 && dt_min <= dt_base))
        throw std::invalid_argument("stepper.dt_min must be in (0, dt_base]");
    if (t_end < 0.0) throw std::invalid_argument("stepper.t_end must be >= 0");
}

Vec3 rotate_in_magnetic_field(const Vec3& v, const Vec3& b, double dt) {
    const double bmag = norm(b);
    if (bmag == 0.0) return v;
    const Vec3 axis = (1.0 / bmag) * b;
    const double theta = bmag * dt;
    const double c = std::cos(theta), s = std::sin(theta);
    // dv/dt = v x b: rotation about the b axis.
    return c * v + s * cross(v, axis) + (1.0 - c) * dot(axis, v) * axis;
}

Vec3 boris_velocity_update(const Vec3& v, const Vec3& e_total, const Vec3& b, double dt) {
    const Vec3 v_minus = v + 0.5 * dt * e_total;
    const Vec3 v_plus = rotate_in_magnetic_field(v_minus, b, dt);
    return v_plus + 0.5 * dt * e_total;
}

Particle boris_step(const Particle& p, const Vec3& e_total, const Vec3& b, double dt) {
    Particle out = p;
    out.velocity = boris_velocity_update(p.velocity, e_total, b, dt);
    out.position = p.position + dt * out.velocity;
    return out;
}

double compute_dt(const SimState& state, const ExternalFields& fields,
                  const StepperConfig& cfg) {
    double dt = cfg.dt_base;
    double max_b = 0.0;
    double min_wall_time = std::numeric_limits<double>::infinity();
    for (const auto& p : state.particles) {
        max_b = std::max(max_b, std::abs(fields.h_profile(p.position.x)));
        const double v1 = std::max(std::abs(p.velocity.x), 1e-12);
        min_wall_time = std::min(min_wall_time, p.position.x / v1);
    }
    if (max_b > 0.0) dt = std::min(dt, cfg.gyro_safety / max_b);
    if (!state.particles.empty()) dt = std::min(dt, cfg.wall_safety * min_wall_time);
    if (dt < cfg.dt_min) throw TimestepCollapse(dt, state.time);
    return dt;
}

void TrackedSeries::initialize(const SimState& state, const ExternalFields& fields,
                               std::vector<int> tracked_indices) {
    indices = std::move(tracked_indices);
    const std::size_t n = indices.size();
    v2_initial.resize(n);
    h_initial.resize(n);
    e2_integral.assign(n, 0.0);
    e_mag_cumulative.assign(n, {0.0});
    boundary_times.assign(1, state.time);
    for (std::size_t k = 0; k < n; ++k) {
        const auto& p = state.particles[indices[k]];
        v2_initial[k] = p.velocity.y;
        h_initial[k] = fields.magnetic_primitive(p.position.x);
    }
}

namespace {

void check_wall(const SimState& state) {
    for (int i = 0; i < static_cast<int>(state.particles.size()); ++i) {
        const double x1 = state.particles[i].position.x;
        if (!(x1 > 0.0)) throw WallCrossing(i, state.time, x1);
    }
}

}  // namespace

void advance_with_dt(SimState& state, double dt, const SolverConfig& solver,
                     const ExternalFields& fields, TrackedSeries* tracked) {
    const double half = 0.5 * dt;
    for (auto& p : state.particles) p.position += half * p.velocity;
    check_wall(state);

    const std::vector<Vec3> e_self = all_fields(state.particles, solver);
    const int n = static_cast<int>(state.particles.size());
    for (int i = 0; i < n; ++i) {
        auto& p = state.particles[i];
        const Vec3 e_total = e_self[i] + fields.external_acceleration(p.position);
        const Vec3 b = fields.magnetic(p.position);
        p.velocity = boris_velocity_update(p.velocity, e_total, b, dt);
    }
    if (tracked) {
        for (std::size_t k = 0; k < tracked->indices.size(); ++k) {
            const int i = tracked->indices[k];
            const auto& p = state.particles[i];
            const Vec3 e_total = e_self[i] + fields.external_acceleration(p.position);
            tracked->e2_integral[k] += e_total.y * dt;
            auto& cum = tracked->e_mag_cumulative[k];
            cum.push_back(cum.back() + norm(e_self[i]) * dt);
        }
        tracked->boundary_times.push_back(state.time + dt);
    }
    for (auto& p : state.particles) p.position += half * p.velocity;
    state.time += dt;
    state.step_index += 1;
    state.fields_cache = e_self;
    check_wall(state);
}

void advance(SimState& state, const SolverConfig& solver, const ExternalFields& fields,
             const StepperConfig& cfg, TrackedSeries* tracked) {
    advance_with_dt(state, compute_dt(state, fields, cfg), solver, fields, tracked);
}

double shield_residual(const SimState& state, const ExternalFields& fields,
                       const TrackedSeries& tracked, int k) {
    const auto& p = state.particles[tracked.indices[k]];
    return (p.velocity.y - tracked.v2_initial[k]) +
           fields.magnetic_primitive(p.position.x) - tracked.h_initial[k] -
           tracked.e2_integral[k];
}

double max_shield_residual(const SimState& state, const ExternalFields& fields,
                           const TrackedSeries& tracked) {
    double m = 0.0;
    for (std::size_t k = 0; k < tracked.indices.size(); ++k)
        m = std::max(m, std::abs(shield_residual(state, fields, tracked, static_cast<int>(k))));
    return m;
}

}  // namespace magshield
