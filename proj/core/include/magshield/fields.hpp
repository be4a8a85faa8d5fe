#pragma once

#include <vector>

#include "magshield/vec3.hpp"

namespace magshield {

/// Configuration of the external fields: the attractive potential
/// U(x) = -x1^(-mu) and the wall magnetic field B = (0, 0, x1^(-tau)),
/// both tapered smoothly to zero between blend_lo and blend_hi.
struct ExternalFieldConfig {
    double mu = 1.0;
    double tau = 6.0;
    double blend_lo = 1.0;
    double blend_hi = 2.0;
    bool magnetic_enabled = true;
    bool point_charge_mode = false;      // replace U by a -1/|x| attractor at the origin
    double point_charge_strength = 0.0;

    void validate() const;  // throws std::invalid_argument
};

/// Quintic smoothstep taper: 1 at s<=0, 0 at s>=1, C^2 at both ends.
double taper_chi(double s);

/// External singular fields, with the primitive of h precomputed on the
/// taper segment. Immutable after construction; safe to share.
class ExternalFields {
  public:
    explicit ExternalFields(ExternalFieldConfig cfg);

    const ExternalFieldConfig& config() const { return cfg_; }

    // U(x); depends on x through x1 only. Throws std::domain_error if x1 <= 0.
    double potential(const Vec3& x) const;

    // -grad U(x); only the first component is nonzero.
    Vec3 force(const Vec3& x) const;

    // (0, 0, h(x1)).
    Vec3 magnetic(const Vec3& x) const;
    double h_profile(double x1) const;

    // Primitive of the magnetic profile, normalized so H(blend_hi) = 0.
    double magnetic_primitive(double x1) const;

    // Attraction toward the fixed origin charge: -s x / |x|^3.
    Vec3 point_charge_force(const Vec3& x) const;

    // Total non-magnetic external acceleration at x (force of U, or the
    // point charge when point_charge_mode replaces it).
    Vec3 external_acceleration(const Vec3& x) const;

    // Potential energy of the active external field at x.
    double external_potential_energy(const Vec3& x) const;

  private:
    double taper_at(double x1) const;
    double h_raw(double x1) const;

    ExternalFieldConfig cfg_;
    // Dense table of H on [blend_lo, blend_hi]; Hermite interpolation
    // using the exact derivative h.
    std::vector<double> h_table_;
    double table_dx_ = 0.0;
    double primitive_const_ = 0.0;  // K making the closed form continuous at blend_lo
};

}  // namespace magshield
