#pragma once

#include <stdexcept>
#include <string>

namespace magshield {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A particle reached x1 <= 0. Terminal, never clamped or reflected.
struct WallCrossing : std::runtime_error {
    WallCrossing(int particle, double time, double x1)
        : std::runtime_error("wall crossing: particle " + std::to_string(particle) +
                             " at t=" + std::to_string(time) + ", x1=" + std::to_string(x1)),
          particle_index(particle), time(time), x1(x1) {}
    int particle_index;
    double time;
    double x1;
};

/// Adaptive dt fell below dt_min: a particle is effectively hitting the wall.
struct TimestepCollapse : std::runtime_error {
    TimestepCollapse(double dt, double time)
        : std::runtime_error("timestep collapse: dt=" + std::to_string(dt) +
                             " at t=" + std::to_string(time)),
          dt(dt), time(time) {}
    double dt;
    double time;
};

struct InsufficientSample : std::runtime_error {
    explicit InsufficientSample(const std::string& msg) : std::runtime_error(msg) {}
};

struct WindowTooShort : std::runtime_error {
    explicit WindowTooShort(const std::string& msg) : std::runtime_error(msg) {}
};

struct DegenerateLadder : std::runtime_error {
    explicit DegenerateLadder(const std::string& msg) : std::runtime_error(msg) {}
};

struct InfeasibleInput : std::runtime_error {
    explicit InfeasibleInput(const std::string& msg) : std::runtime_error(msg) {}
};

struct UnknownRunId : std::runtime_error {
    explicit UnknownRunId(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace magshield
