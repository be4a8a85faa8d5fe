#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

#include "magshield/vec3.hpp"

namespace magshield {

/// One macroparticle: a cell of phase-space density carrying a charge weight.
struct Particle {
    Vec3 position;
    Vec3 velocity;
    double weight = 0.0;
};

struct Box {
    Vec3 min;
    Vec3 max;
    double volume() const {
        return (max.x - min.x) * (max.y - min.y) * (max.z - min.z);
    }
};

/// Initial datum: uniform in a box with min-corner x1 = A > 0, centered
/// Gaussian velocities with per-component variance 1/(2 lambda), optionally
/// truncated at |v| < cutoff_n.
struct InitialDatum {
    double lambda = 1.0;
    Box support_box{{0.5, 0.0, 0.0}, {1.5, 1.0, 1.0}};
    double total_charge = 0.1;
    double cutoff_n = std::numeric_limits<double>::infinity();

    void validate() const;

    // Amplitude C1 of the phase-space density implied by the datum
    // (uniform-in-x, Maxwellian-in-v); derived, reported in manifests.
    double c1() const;

    // Probability that a 3-d Gaussian speed falls below cutoff_n.
    double cutoff_acceptance() const;
};

/// Deterministic sampling stream: fixed seed gives a bit-identical sequence.
/// Kept as an object so a pair of runs can share a stream continuation.
class SampleStream {
  public:
    explicit SampleStream(std::uint64_t seed);

    double uniform01();
    double gaussian();  // unit variance, Box-Muller (portable across stdlibs)

    // Velocity with per-component variance 1/(2 lambda), rejected until
    // |v| < vmax.
    Vec3 truncated_velocity(double lambda, double vmax);
    // Same, conditioned on vmin <= |v| < vmax (the N..N+1 shell).
    Vec3 shell_velocity(double lambda, double vmin, double vmax);

    Vec3 uniform_in_box(const Box& box);

  private:
    std::uint64_t s_[4];  // xoshiro256++ state
    std::uint64_t next_u64();
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Draw `count` macroparticles from the datum. Equal weights summing
/// exactly to total_charge. Throws std::invalid_argument when cutoff_n is
/// so small that the acceptance probability is below 1e-6.
std::vector<Particle> sample(const InitialDatum& datum, int count, std::uint64_t seed);

/// Regular grid for cloud-in-cell density deposition.
struct GridSpec {
    Box extent;
    std::array<int, 3> cells{32, 32, 32};
};

struct DensityField {
    GridSpec grid;
    std::vector<double> rho;      // cell-centered density, x-major order
    double overflow_charge = 0.0; // weight deposited outside the grid

    double cell_volume() const;
    double total_deposited_charge() const;
};

/// Cloud-in-cell deposition of particle weights divided by cell volume.
DensityField estimate_density(const std::vector<Particle>& particles, const GridSpec& grid);

/// Sum over cells of rho^(5/3) * cell volume.
double density_l53_norm(const DensityField& rho);

}  // namespace magshield
