#pragma once

#include <vector>

#include "magshield/sampling.hpp"
#include "magshield/vec3.hpp"

namespace magshield {

enum class SolverMode { direct, tree };

/// Plummer-softened Coulomb kernel settings for the self-consistent field.
struct SolverConfig {
    double softening = 0.0;       // epsilon, length units
    double opening_angle = 0.3;   // Barnes-Hut acceptance theta
    SolverMode mode = SolverMode::direct;
    bool use_quadrupole = false;

    void validate() const;
};

/// Field at x from all particles except the one at index skip_index
/// (pass -1 to include everybody). Fixed summation order (particle index),
/// hence bit-deterministic.
Vec3 direct_field_at(const std::vector<Particle>& particles, const Vec3& x,
                     const SolverConfig& cfg, int skip_index = -1);

/// Barnes-Hut octree over a particle snapshot. Build once per step, then
/// read-only.
class Octree {
  public:
    Octree(const std::vector<Particle>& particles, const SolverConfig& cfg);

    Vec3 field_at(const Vec3& x, int skip_index = -1) const;

  private:
    struct Node {
        Vec3 center;        // geometric center of the cube
        double half = 0.0;  // half side length
        double charge = 0.0;
        Vec3 charge_center;
        double bmax = 0.0;  // farthest cell corner from charge_center
        // Traceless quadrupole moments (optional).
        double qxx = 0, qyy = 0, qzz = 0, qxy = 0, qxz = 0, qyz = 0;
        int children[8] = {-1, -1, -1, -1, -1, -1, -1, -1};
        std::vector<int> bucket;  // particle indices, leaves only
        bool leaf = true;
    };

    void insert(int node, int particle_index, int depth);
    void finalize_moments(int node);
    void accumulate(int node, const Vec3& x, int skip_index, Vec3& acc) const;

    const std::vector<Particle>& particles_;
    SolverConfig cfg_;
    std::vector<Node> nodes_;
};

/// Field at every particle (self-interaction excluded), in particle order.
std::vector<Vec3> all_fields(const std::vector<Particle>& particles, const SolverConfig& cfg);

/// (1/2) sum_{i != j} w_i w_j / sqrt(|x_i - x_j|^2 + eps^2).
double potential_energy(const std::vector<Particle>& particles, const SolverConfig& cfg);

}  // namespace magshield
