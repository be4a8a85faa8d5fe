#include "magshield/sampling.hpp"

#include <cmath>
#include <stdexcept>

namespace magshield {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

void InitialDatum::validate() const {
    if (!(lambda > 0.0)) throw std::invalid_argument("datum.lambda must be > 0");
    if (!(total_charge >= 0.0))
        throw std::invalid_argument("datum.total_charge must be >= 0");
    if (!(support_box.min.x > 0.0))
        throw std::invalid_argument("datum.support_box must lie in x1 > 0 (A > 0)");
    if (!(support_box.min.x < support_box.max.x && support_box.min.y < support_box.max.y &&
          support_box.min.z < support_box.max.z))
        throw std::invalid_argument("datum.support_box is empty");
    if (!(cutoff_n > 0.0)) throw std::invalid_argument("datum.cutoff_n must be > 0");
}

double InitialDatum::cutoff_acceptance() const {
    if (std::isinf(cutoff_n)) return 1.0;
    // Maxwell speed CDF at z = cutoff_n / sigma, sigma^2 = 1/(2 lambda).
    const double z = cutoff_n * std::sqrt(2.0 * lambda);
    return std::erf(z / std::sqrt(2.0)) -
           std::sqrt(2.0 / M_PI) * z * std::exp(-0.5 * z * z);
}

double InitialDatum::c1() const {
    const double n0 = total_charge / support_box.volume();
    return n0 * std::pow(lambda / M_PI, 1.5) / cutoff_acceptance();
}

SampleStream::SampleStream(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& s : s_) s = splitmix64(x);
}

std::uint64_t SampleStream::next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double SampleStream::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SampleStream::gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform01() - 1.0;
        v = 2.0 * uniform01() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
}

Vec3 SampleStream::truncated_velocity(double lambda, double vmax) {
    const double sigma = std::sqrt(0.5 / lambda);
    for (;;) {
        Vec3 v{sigma * gaussian(), sigma * gaussian(), sigma * gaussian()};
        if (norm(v) < vmax) return v;
    }
}

Vec3 SampleStream::shell_velocity(double lambda, double vmin, double vmax) {
    const double sigma = std::sqrt(0.5 / lambda);
    for (;;) {
        Vec3 v{sigma * gaussian(), sigma * gaussian(), sigma * gaussian()};
        const double s = norm(v);
        if (s >= vmin && s < vmax) return v;
    }
}

Vec3 SampleStream::uniform_in_box(const Box& box) {
    return {box.min.x + (box.max.x - box.min.x) * uniform01(),
            box.min.y + (box.max.y - box.min.y) * uniform01(),
            box.min.z + (box.max.z - box.min.z) * uniform01()};
}

std::vector<Particle> sample(const InitialDatum& datum, int count, std::uint64_t seed) {
    datum.validate();
    if (count < 1) throw std::invalid_argument("sample count must be >= 1");
    if (datum.cutoff_acceptance() < 1e-6)
        throw std::invalid_argument("cutoff_n too small: velocity acceptance below 1e-6");

    SampleStream stream(seed);
    std::vector<Particle> out;
    out.reserve(count);
    const double w = datum.total_charge / count;
    for (int i = 0; i < count; ++i) {
        Particle p;
        p.position = stream.uniform_in_box(datum.support_box);
        p.velocity = stream.truncated_velocity(datum.lambda, datum.cutoff_n);
        p.weight = w;
        out.push_back(p);
    }
    return out;
}

double DensityField::cell_volume() const {
    const auto& e = grid.extent;
    return (e.max.x - e.min.x) / grid.cells[0] * (e.max.y - e.min.y) / grid.cells[1] *
           (e.max.z - e.min.z) / grid.cells[2];
}

double DensityField::total_deposited_charge() const {
    double q = 0.0;
    for (double r : rho) q += r;
    return q * cell_volume();
}

DensityField estimate_density(const std::vector<Particle>& particles, const GridSpec& grid) {
    DensityField field;
    field.grid = grid;
    const int nx = grid.cells[0], ny = grid.cells[1], nz = grid.cells[2];
    field.rho.assign(static_cast<std::size_t>(nx) * ny * nz, 0.0);

    const Vec3 lo = grid.extent.min;
    const double hx = (grid.extent.max.x - lo.x) / nx;
    const double hy = (grid.extent.max.y - lo.y) / ny;
    const double hz = (grid.extent.max.z - lo.z) / nz;
    const double inv_vc = 1.0 / field.cell_volume();

    for (const auto& p : particles) {
        // Cell-center normalized coordinates.
        const double ux = (p.position.x - lo.x) / hx - 0.5;
        const double uy = (p.position.y - lo.y) / hy - 0.5;
        const double uz = (p.position.z - lo.z) / hz - 0.5;
        const int ix = static_cast<int>(std::floor(ux));
        const int iy = static_cast<int>(std::floor(uy));
        const int iz = static_cast<int>(std::floor(uz));
        const double fx = ux - ix, fy = uy - iy, fz = uz - iz;
        const double wx[2] = {1.0 - fx, fx};
        const double wy[2] = {1.0 - fy, fy};
        const double wz[2] = {1.0 - fz, fz};
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int c = 0; c < 2; ++c) {
                    const double frac = wx[a] * wy[b] * wz[c];
                    if (frac == 0.0) continue;
                    const int cx = ix + a, cy = iy + b, cz = iz + c;
                    if (cx < 0 || cx >= nx || cy < 0 || cy >= ny || cz < 0 || cz >= nz) {
                        field.overflow_charge += p.weight * frac;
                    } else {
                        field.rho[(static_cast<std::size_t>(cx) * ny + cy) * nz + cz] +=
                            p.weight * frac * inv_vc;
                    }
                }
    }
    return field;
}

double density_l53_norm(const DensityField& field) {
    double s = 0.0;
    for (double r : field.rho) s += std::pow(r, 5.0 / 3.0);
    return s * field.cell_volume();
}

}  // namespace magshield
