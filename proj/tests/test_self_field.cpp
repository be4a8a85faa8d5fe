#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "magshield/self_field.hpp"

using namespace magshield;

namespace {

std::vector<Particle> random_cloud(int n, unsigned seed, double weight = 1.0) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Particle> out(n);
    for (auto& p : out) {
        p.position = {u(rng), u(rng), u(rng)};
        p.weight = weight;
    }
    return out;
}

// Independent double-loop oracle, written against the kernel definition
// only.
Vec3 oracle_field(const std::vector<Particle>& particles, const Vec3& x, double eps,
                  int skip) {
    Vec3 acc{0, 0, 0};
    for (int j = 0; j < static_cast<int>(particles.size()); ++j) {
        if (j == skip) continue;
        const Vec3 d = x - particles[j].position;
        const double r2 = dot(d, d) + eps * eps;
        const double inv = 1.0 / (r2 * std::sqrt(r2));
        acc = acc + d * (particles[j].weight * inv);
    }
    return acc;
}

double oracle_energy(const std::vector<Particle>& particles, double eps) {
    double e = 0.0;
    const int n = static_cast<int>(particles.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const Vec3 d = particles[i].position - particles[j].position;
            e += 0.5 * particles[i].weight * particles[j].weight /
                 std::sqrt(dot(d, d) + eps * eps);
        }
    return e;
}

}  // namespace

TEST_CASE("unit coulomb field") {
    std::vector<Particle> one(1);
    one[0].weight = 1.0;
    SolverConfig cfg;
    const Vec3 e = direct_field_at(one, {1.0, 0.0, 0.0}, cfg);
    CHECK(e.x == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(e.y == 0.0);
}

TEST_CASE("symmetric pair cancels at the midpoint") {
    std::vector<Particle> two(2);
    two[0].position = {1.0, 0.0, 0.0};
    two[1].position = {-1.0, 0.0, 0.0};
    two[0].weight = two[1].weight = 1.0;
    SolverConfig cfg;
    const Vec3 e = direct_field_at(two, {0.0, 0.0, 0.0}, cfg);
    CHECK(norm(e) == 0.0);
}

TEST_CASE("coincident non-self particle with zero softening raises") {
    std::vector<Particle> one(1);
    one[0].position = {0.5, 0.5, 0.5};
    one[0].weight = 1.0;
    SolverConfig cfg;
    CHECK_THROWS_AS(direct_field_at(one, {0.5, 0.5, 0.5}, cfg), std::domain_error);
    // But skipped as self it is fine.
    CHECK(norm(direct_field_at(one, {0.5, 0.5, 0.5}, cfg, 0)) == 0.0);
}

TEST_CASE("direct field matches the double-loop oracle to 1e-14") {
    const auto particles = random_cloud(10, 42);
    SolverConfig cfg;
    cfg.softening = 0.05;
    for (int i = 0; i < 10; ++i) {
        const Vec3 mine = direct_field_at(particles, particles[i].position, cfg, i);
        const Vec3 ref = oracle_field(particles, particles[i].position, 0.05, i);
        CHECK(norm(mine - ref) <= 1e-14 * norm(ref));
    }
    const auto batched = all_fields(particles, cfg);
    for (int i = 0; i < 10; ++i) {
        const Vec3 ref = oracle_field(particles, particles[i].position, 0.05, i);
        CHECK(norm(batched[i] - ref) <= 1e-13 * norm(ref));
    }
}

TEST_CASE("pair antisymmetry") {
    std::vector<Particle> two(2);
    two[0].position = {0.3, -0.2, 0.7};
    two[1].position = {-0.5, 0.4, 0.1};
    two[0].weight = 2.0;
    two[1].weight = 3.0;
    SolverConfig cfg;
    const auto fields = all_fields(two, cfg);
    // Momentum rate: w_i * E_i; the pair contributions cancel.
    const Vec3 total = fields[0] * two[0].weight + fields[1] * two[1].weight;
    CHECK(norm(total) < 1e-14 * norm(fields[0]) * two[0].weight);
}

TEST_CASE("tree at vanishing opening angle degenerates to direct") {
    const auto particles = random_cloud(300, 5);
    SolverConfig direct;
    direct.softening = 0.01;
    SolverConfig tree = direct;
    tree.mode = SolverMode::tree;
    tree.opening_angle = 1e-8;
    const auto a = all_fields(particles, direct);
    const auto b = all_fields(particles, tree);
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(norm(a[i] - b[i]) <= 1e-12 * std::max(1.0, norm(a[i])));
}

TEST_CASE("tree monopole at theta=0.3 within 1e-2 of direct on 1000 particles") {
    const auto particles = random_cloud(1000, 77, 0.001);
    SolverConfig direct;
    direct.softening = 0.01;
    SolverConfig tree = direct;
    tree.mode = SolverMode::tree;
    tree.opening_angle = 0.3;
    const auto a = all_fields(particles, direct);
    const auto b = all_fields(particles, tree);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, norm(a[i] - b[i]) / norm(a[i]));
    CHECK(worst < 1e-2);
}

TEST_CASE("tree error is monotone in the opening angle") {
    const auto particles = random_cloud(600, 13, 0.01);
    SolverConfig direct;
    direct.softening = 0.01;
    const auto exact = all_fields(particles, direct);
    double prev = std::numeric_limits<double>::infinity();
    for (double theta : {0.8, 0.5, 0.3, 0.1}) {
        SolverConfig tree = direct;
        tree.mode = SolverMode::tree;
        tree.opening_angle = theta;
        const auto approx = all_fields(particles, tree);
        double worst = 0.0;
        for (std::size_t i = 0; i < exact.size(); ++i)
            worst = std::max(worst, norm(approx[i] - exact[i]) / norm(exact[i]));
        CHECK(worst <= prev);
        prev = worst;
    }
}

TEST_CASE("quadrupole tightens the monopole error") {
    const auto particles = random_cloud(600, 29, 0.01);
    SolverConfig direct;
    direct.softening = 0.01;
    const auto exact = all_fields(particles, direct);
    double err[2];
    for (int q = 0; q < 2; ++q) {
        SolverConfig tree = direct;
        tree.mode = SolverMode::tree;
        tree.opening_angle = 0.5;
        tree.use_quadrupole = (q == 1);
        const auto approx = all_fields(particles, tree);
        double worst = 0.0;
        for (std::size_t i = 0; i < exact.size(); ++i)
            worst = std::max(worst, norm(approx[i] - exact[i]) / norm(exact[i]));
        err[q] = worst;
    }
    CHECK(err[1] < err[0]);
}

TEST_CASE("shell theorem: exterior field of a spherical shell") {
    // Fibonacci-sphere shell of radius 0.5, total weight 2.
    const int n = 4000;
    std::vector<Particle> shell(n);
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i) {
        const double z = 1.0 - 2.0 * (i + 0.5) / n;
        const double r = std::sqrt(1.0 - z * z);
        const double phi = golden * i;
        shell[i].position = {0.5 * r * std::cos(phi), 0.5 * r * std::sin(phi), 0.5 * z};
        shell[i].weight = 2.0 / n;
    }
    SolverConfig cfg;
    for (double dist : {1.0, 2.0, 5.0}) {
        const Vec3 e = direct_field_at(shell, {dist, 0.0, 0.0}, cfg);
        CHECK(e.x == doctest::Approx(2.0 / (dist * dist)).epsilon(0.01));
        CHECK(std::abs(e.y) < 0.01 * e.x);
    }
}

TEST_CASE("potential energy examples and oracle") {
    std::vector<Particle> two(2);
    two[0].position = {0.0, 0.0, 0.0};
    two[1].position = {2.0, 0.0, 0.0};
    two[0].weight = two[1].weight = 1.0;
    SolverConfig cfg;
    CHECK(potential_energy(two, cfg) == doctest::Approx(0.5).epsilon(1e-15));
    two.resize(1);
    CHECK(potential_energy(two, cfg) == 0.0);

    const auto cloud = random_cloud(10, 99, 0.7);
    cfg.softening = 0.02;
    CHECK(potential_energy(cloud, cfg) ==
          doctest::Approx(oracle_energy(cloud, 0.02)).epsilon(1e-14));
}

TEST_CASE("repeated evaluations are bit-identical") {
    const auto particles = random_cloud(500, 3);
    for (auto mode : {SolverMode::direct, SolverMode::tree}) {
        SolverConfig cfg;
        cfg.softening = 0.01;
        cfg.mode = mode;
        const auto a = all_fields(particles, cfg);
        const auto b = all_fields(particles, cfg);
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].x == b[i].x);
            CHECK(a[i].y == b[i].y);
            CHECK(a[i].z == b[i].z);
        }
    }
}

TEST_CASE("solver config validation") {
    SolverConfig cfg;
    cfg.softening = -1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.opening_angle = 1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
