#include "magshield/self_field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace magshield {

namespace {
constexpr int kMaxDepth = 48;
constexpr int kLeafCapacity = 16;

inline Vec3 softened_kernel(const Vec3& d, double eps2) {
    const double r2 = norm2(d) + eps2;
    if (r2 == 0.0)
        throw std::domain_error("coincident particles with zero softening");
    const double inv = 1.0 / (r2 * std::sqrt(r2));
    return inv * d;
}
}  // namespace

void SolverConfig::validate() const {
    if (softening < 0.0) throw std::invalid_argument("solver.softening must be >= 0");
    if (!(opening_angle > 0.0 && opening_angle < 1.0))
        throw std::invalid_argument("solver.opening_angle must be in (0, 1)");
}

Vec3 direct_field_at(const std::vector<Particle>& particles, const Vec3& x,
                     const SolverConfig& cfg, int skip_index) {
    const double eps2 = cfg.softening * cfg.softening;
    Vec3 acc;
    for (int j = 0; j < static_cast<int>(particles.size()); ++j) {
        if (j == skip_index) continue;
        acc += particles[j].weight * softened_kernel(x - particles[j].position, eps2);
    }
    return acc;
}

Octree::Octree(const std::vector<Particle>& particles, const SolverConfig& cfg)
    : particles_(particles), cfg_(cfg) {
    Vec3 lo{0, 0, 0}, hi{0, 0, 0};
    if (!particles.empty()) {
        lo = hi = particles[0].position;
        for (const auto& p : particles) {
            lo.x = std::min(lo.x, p.position.x);
            lo.y = std::min(lo.y, p.position.y);
            lo.z = std::min(lo.z, p.position.z);
            hi.x = std::max(hi.x, p.position.x);
            hi.y = std::max(hi.y, p.position.y);
            hi.z = std::max(hi.z, p.position.z);
        }
    }
    Node root;
    root.center = 0.5 * (lo + hi);
    root.half = 0.5 * std::max({hi.x - lo.x, hi.y - lo.y, hi.z - lo.z, 1e-300});
    nodes_.push_back(root);
    for (int i = 0; i < static_cast<int>(particles.size()); ++i) insert(0, i, 0);
    finalize_moments(0);
}

void Octree::insert(int node, int pi, int depth) {
    if (nodes_[node].leaf) {
        if (static_cast<int>(nodes_[node].bucket.size()) < kLeafCapacity ||
            depth >= kMaxDepth) {
            nodes_[node].bucket.push_back(pi);
            return;
        }
        // Split: push existing occupants down.
        std::vector<int> occupants;
        occupants.swap(nodes_[node].bucket);
        nodes_[node].leaf = false;
        for (int o : occupants) insert(node, o, depth);
    }
    const Vec3& p = particles_[pi].position;
    const Vec3 c = nodes_[node].center;
    const int oct = (p.x >= c.x ? 1 : 0) | (p.y >= c.y ? 2 : 0) | (p.z >= c.z ? 4 : 0);
    int child = nodes_[node].children[oct];
    if (child < 0) {
        Node n;
        n.half = 0.5 * nodes_[node].half;
        n.center = {c.x + (oct & 1 ? n.half : -n.half),
                    c.y + (oct & 2 ? n.half : -n.half),
                    c.z + (oct & 4 ? n.half : -n.half)};
        child = static_cast<int>(nodes_.size());
        nodes_.push_back(n);
        nodes_[node].children[oct] = child;
    }
    insert(child, pi, depth + 1);
}

namespace {
// Distance from the cell's charge center to its farthest corner; the
// acceptance test against this radius bounds the worst-case multipole
// error for targets anywhere outside the opening sphere.
double corner_radius(const Vec3& center, double half, const Vec3& charge_center) {
    double b2 = 0.0;
    for (int k = 0; k < 8; ++k) {
        const Vec3 corner{center.x + (k & 1 ? half : -half),
                          center.y + (k & 2 ? half : -half),
                          center.z + (k & 4 ? half : -half)};
        b2 = std::max(b2, norm2(corner - charge_center));
    }
    return std::sqrt(b2);
}
}  // namespace

void Octree::finalize_moments(int node) {
    Node& n = nodes_[node];
    if (n.leaf) {
        Vec3 wsum;
        for (int i : n.bucket) {
            n.charge += particles_[i].weight;
            wsum += particles_[i].weight * particles_[i].position;
        }
        n.charge_center = n.charge > 0.0 ? (1.0 / n.charge) * wsum : n.center;
        n.bmax = corner_radius(n.center, n.half, n.charge_center);
        if (cfg_.use_quadrupole) {
            for (int i : n.bucket) {
                const Vec3 r = particles_[i].position - n.charge_center;
                const double w = particles_[i].weight, r2 = norm2(r);
                n.qxx += w * (3 * r.x * r.x - r2);
                n.qyy += w * (3 * r.y * r.y - r2);
                n.qzz += w * (3 * r.z * r.z - r2);
                n.qxy += w * 3 * r.x * r.y;
                n.qxz += w * 3 * r.x * r.z;
                n.qyz += w * 3 * r.y * r.z;
            }
        }
        return;
    }
    Vec3 wsum;
    for (int c : n.children)
        if (c >= 0) {
            finalize_moments(c);
            n.charge += nodes_[c].charge;
            wsum += nodes_[c].charge * nodes_[c].charge_center;
        }
    n.charge_center = n.charge > 0.0 ? (1.0 / n.charge) * wsum : n.center;
    n.bmax = corner_radius(n.center, n.half, n.charge_center);
    if (cfg_.use_quadrupole) {
        for (int c : n.children)
            if (c >= 0) {
                const Node& ch = nodes_[c];
                const Vec3 d = ch.charge_center - n.charge_center;
                const double w = ch.charge, d2 = norm2(d);
                n.qxx += ch.qxx + w * (3 * d.x * d.x - d2);
                n.qyy += ch.qyy + w * (3 * d.y * d.y - d2);
                n.qzz += ch.qzz + w * (3 * d.z * d.z - d2);
                n.qxy += ch.qxy + w * 3 * d.x * d.y;
                n.qxz += ch.qxz + w * 3 * d.x * d.z;
                n.qyz += ch.qyz + w * 3 * d.y * d.z;
            }
    }
}

void Octree::accumulate(int node, const Vec3& x, int skip_index, Vec3& acc) const {
    const Node& n = nodes_[node];
    if (n.charge == 0.0 && n.leaf && n.bucket.empty()) return;
    const double eps2 = cfg_.softening * cfg_.softening;
    if (n.leaf) {
        for (int i : n.bucket) {
            if (i == skip_index) continue;
            acc += particles_[i].weight * softened_kernel(x - particles_[i].position, eps2);
        }
        return;
    }
    const Vec3 d = x - n.charge_center;
    const double dist = norm(d);
    if (dist > 0.0 && (2.0 * n.bmax) / dist < cfg_.opening_angle) {
        const double r2 = dist * dist + eps2;
        const double inv_r = 1.0 / std::sqrt(r2);
        const double inv_r3 = inv_r / r2;
        acc += n.charge * inv_r3 * d;
        if (cfg_.use_quadrupole) {
            const Vec3 qd{n.qxx * d.x + n.qxy * d.y + n.qxz * d.z,
                          n.qxy * d.x + n.qyy * d.y + n.qyz * d.z,
                          n.qxz * d.x + n.qyz * d.y + n.qzz * d.z};
            const double dqd = dot(d, qd);
            const double inv_r5 = inv_r3 / r2;
            const double inv_r7 = inv_r5 / r2;
            acc += (2.5 * dqd * inv_r7) * d - inv_r5 * qd;
        }
        return;
    }
    for (int c : n.children)
        if (c >= 0) accumulate(c, x, skip_index, acc);
}

Vec3 Octree::field_at(const Vec3& x, int skip_index) const {
    Vec3 acc;
    accumulate(0, x, skip_index, acc);
    return acc;
}

std::vector<Vec3> all_fields(const std::vector<Particle>& particles, const SolverConfig& cfg) {
    cfg.validate();
    const int n = static_cast<int>(particles.size());
    std::vector<Vec3> out(n);
    if (cfg.mode == SolverMode::tree) {
        Octree tree(particles, cfg);
        for (int i = 0; i < n; ++i) out[i] = tree.field_at(particles[i].position, i);
        return out;
    }
    // Direct: pairwise antisymmetric kernel, each pair visited once.
    const double eps2 = cfg.softening * cfg.softening;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const Vec3 k = softened_kernel(particles[i].position - particles[j].position, eps2);
            out[i] += particles[j].weight * k;
            out[j] -= particles[i].weight * k;
        }
    return out;
}

double potential_energy(const std::vector<Particle>& particles, const SolverConfig& cfg) {
    const double eps2 = cfg.softening * cfg.softening;
    const int n = static_cast<int>(particles.size());
    double u = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double r2 = norm2(particles[i].position - particles[j].position) + eps2;
            if (r2 == 0.0)
                throw std::domain_error("coincident particles with zero softening");
            u += particles[i].weight * particles[j].weight / std::sqrt(r2);
        }
    return u;
}

}  // namespace magshield
