#include "magshield/fields.hpp"

#include <cmath>
#include <stdexcept>

namespace magshield {

namespace {

// 5-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr double kGx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                           0.5384693101056831, 0.9061798459386640};
constexpr double kGw[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                           0.4786286704993665, 0.2369268850561891};

constexpr int kTableIntervals = 2048;

}  // namespace

void ExternalFieldConfig::validate() const {
    if (!(mu > 0.0)) throw std::invalid_argument("field.mu must be > 0");
    if (!(tau > 1.0)) throw std::invalid_argument("field.tau must be > 1");
    if (!(blend_lo > 0.0)) throw std::invalid_argument("field.blend_lo must be > 0");
    if (!(blend_lo < blend_hi)) throw std::invalid_argument("field.blend_lo must be < blend_hi");
    if (point_charge_strength < 0.0)
        throw std::invalid_argument("field.point_charge_strength must be >= 0");
}

double taper_chi(double s) {
    if (s <= 0.0) return 1.0;
    if (s >= 1.0) return 0.0;
    return 1.0 - s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

ExternalFields::ExternalFields(ExternalFieldConfig cfg) : cfg_(cfg) {
    cfg_.validate();
    const double lo = cfg_.blend_lo;
    const double hi = cfg_.blend_hi;
    table_dx_ = (hi - lo) / kTableIntervals;

    auto hraw = [this](double x1) { return h_raw(x1); };

    // Integrate h over each table interval (Gauss-Legendre), then accumulate
    // so that H(blend_hi) = 0.
    std::vector<double> seg(kTableIntervals);
    for (int i = 0; i < kTableIntervals; ++i) {
        const double a = lo + i * table_dx_;
        const double half = 0.5 * table_dx_;
        const double mid = a + half;
        double s = 0.0;
        for (int g = 0; g < 5; ++g) s += kGw[g] * hraw(mid + half * kGx[g]);
        seg[i] = s * half;
    }
    h_table_.assign(kTableIntervals + 1, 0.0);
    for (int i = kTableIntervals - 1; i >= 0; --i)
        h_table_[i] = h_table_[i + 1] - seg[i];

    const double pow_lo = std::pow(lo, 1.0 - cfg_.tau) / (1.0 - cfg_.tau);
    primitive_const_ = h_table_[0] - pow_lo;
}

double ExternalFields::taper_at(double x1) const {
    return taper_chi((x1 - cfg_.blend_lo) / (cfg_.blend_hi - cfg_.blend_lo));
}

double ExternalFields::h_raw(double x1) const {
    if (x1 >= cfg_.blend_hi) return 0.0;
    return std::pow(x1, -cfg_.tau) * taper_at(x1);
}

double ExternalFields::potential(const Vec3& x) const {
    if (!(x.x > 0.0)) throw std::domain_error("potential undefined for x1 <= 0");
    if (x.x >= cfg_.blend_hi) return 0.0;
    return -std::pow(x.x, -cfg_.mu) * taper_at(x.x);
}

Vec3 ExternalFields::force(const Vec3& x) const {
    if (!(x.x > 0.0)) throw std::domain_error("force undefined for x1 <= 0");
    const double x1 = x.x;
    if (x1 >= cfg_.blend_hi) return {};
    double f1 = -cfg_.mu * std::pow(x1, -cfg_.mu - 1.0);
    if (x1 > cfg_.blend_lo) {
        const double w = cfg_.blend_hi - cfg_.blend_lo;
        const double s = (x1 - cfg_.blend_lo) / w;
        const double dchi = -30.0 * s * s * (s - 1.0) * (s - 1.0) / w;
        f1 = f1 * taper_chi(s) + std::pow(x1, -cfg_.mu) * dchi;
    }
    return {f1, 0.0, 0.0};
}

double ExternalFields::h_profile(double x1) const {
    if (!(x1 > 0.0)) throw std::domain_error("magnetic field undefined for x1 <= 0");
    if (!cfg_.magnetic_enabled) return 0.0;
    if (x1 >= cfg_.blend_hi) return 0.0;
    return std::pow(x1, -cfg_.tau) * taper_at(x1);
}

Vec3 ExternalFields::magnetic(const Vec3& x) const {
    return {0.0, 0.0, h_profile(x.x)};
}

double ExternalFields::magnetic_primitive(double x1) const {
    if (!(x1 > 0.0)) throw std::domain_error("magnetic primitive undefined for x1 <= 0");
    if (!cfg_.magnetic_enabled) return 0.0;
    if (x1 >= cfg_.blend_hi) return 0.0;
    if (x1 <= cfg_.blend_lo)
        return std::pow(x1, 1.0 - cfg_.tau) / (1.0 - cfg_.tau) + primitive_const_;

    // Hermite interpolation on the precomputed taper-segment table.
    const double u = (x1 - cfg_.blend_lo) / table_dx_;
    int i = static_cast<int>(u);
    if (i >= kTableIntervals) i = kTableIntervals - 1;
    const double t = u - i;
    const double xa = cfg_.blend_lo + i * table_dx_;
    const double xb = xa + table_dx_;
    const double ya = h_table_[i], yb = h_table_[i + 1];
    const double da = h_raw(xa) * table_dx_;
    const double db = h_raw(xb) * table_dx_;
    const double t2 = t * t, t3 = t2 * t;
    return (2.0 * t3 - 3.0 * t2 + 1.0) * ya + (t3 - 2.0 * t2 + t) * da +
           (-2.0 * t3 + 3.0 * t2) * yb + (t3 - t2) * db;
}

Vec3 ExternalFields::point_charge_force(const Vec3& x) const {
    const double s = cfg_.point_charge_strength;
    if (s == 0.0) return {};
    const double r2 = norm2(x);
    if (r2 == 0.0) throw std::domain_error("point charge force undefined at the origin");
    const double inv_r3 = 1.0 / (r2 * std::sqrt(r2));
    return -s * inv_r3 * x;
}

Vec3 ExternalFields::external_acceleration(const Vec3& x) const {
    if (cfg_.point_charge_mode) return point_charge_force(x);
    return force(x);
}

double ExternalFields::external_potential_energy(const Vec3& x) const {
    if (cfg_.point_charge_mode) {
        const double r = norm(x);
        if (r == 0.0) throw std::domain_error("point charge potential undefined at the origin");
        return -cfg_.point_charge_strength / r;
    }
    return potential(x);
}

}  // namespace magshield
