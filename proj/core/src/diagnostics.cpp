#include "magshield/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace magshield {

double LadderSchedule::window_at(int level) const {
    double w = delta1;
    for (int i = 1; i < level; ++i) w *= g_factor;
    return w;
}

DiagnosticsEngine::DiagnosticsEngine(double c3, LadderSchedule ladder,
                                     std::array<int, 3> density_cells)
    : c3_(c3), ladder_(ladder), density_cells_(density_cells), running_max_(c3) {}

DiagRecord DiagnosticsEngine::record(const SimState& state, const SolverConfig& solver,
                                     const ExternalFields& fields,
                                     const TrackedSeries* tracked) {
    DiagRecord r;
    r.time = state.time;
    double max_speed = 0.0, min_x1 = std::numeric_limits<double>::infinity();
    for (const auto& p : state.particles) {
        r.kinetic += 0.5 * p.weight * norm2(p.velocity);
        r.potential_external += p.weight * fields.external_potential_energy(p.position);
        r.charge += p.weight;
        max_speed = std::max(max_speed, norm(p.velocity));
        min_x1 = std::min(min_x1, p.position.x);
    }
    r.potential_self = potential_energy(state.particles, solver);
    r.total_energy = r.kinetic + r.potential_self + r.potential_external;
    r.max_speed = max_speed;
    r.min_x1 = min_x1;

    const double prev_running = running_max_;
    running_max_ = std::max({c3_, running_max_, max_speed});
    if (first_) {
        first_ = false;
    } else {
        displacement_ += 0.5 * (prev_running + running_max_) * (state.time - prev_time_);
    }
    prev_time_ = state.time;
    r.running_max_speed = running_max_;
    r.displacement_R = displacement_;

    if (!state.particles.empty()) {
        Vec3 lo = state.particles[0].position, hi = lo;
        for (const auto& p : state.particles) {
            lo.x = std::min(lo.x, p.position.x);
            lo.y = std::min(lo.y, p.position.y);
            lo.z = std::min(lo.z, p.position.z);
            hi.x = std::max(hi.x, p.position.x);
            hi.y = std::max(hi.y, p.position.y);
            hi.z = std::max(hi.z, p.position.z);
        }
        const Vec3 pad{1e-9 + 1e-9 * (hi.x - lo.x), 1e-9 + 1e-9 * (hi.y - lo.y),
                       1e-9 + 1e-9 * (hi.z - lo.z)};
        GridSpec grid{{lo - pad, hi + pad}, density_cells_};
        r.l53_norm = density_l53_norm(estimate_density(state.particles, grid));
    }

    if (tracked && !tracked->indices.empty()) {
        r.shield_residual_max = max_shield_residual(state, fields, *tracked);
        if (ladder_.delta1 > 0.0) {
            try {
                r.avg_field_by_level = field_time_average(*tracked, ladder_);
            } catch (const WindowTooShort&) {
                // record() never throws; the ladder entry stays empty
            }
        }
    }
    return r;
}

namespace {

// Cumulative integral of a piecewise-constant series, interpolated at t.
double interp_cumulative(const std::vector<double>& times, const std::vector<double>& cum,
                         double t) {
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.begin()) return cum.front();
    if (it == times.end()) return cum.back();
    const std::size_t i = static_cast<std::size_t>(it - times.begin());
    const double t0 = times[i - 1], t1 = times[i];
    const double f = (t - t0) / (t1 - t0);
    return cum[i - 1] + f * (cum[i] - cum[i - 1]);
}

}  // namespace

std::map<int, double> field_time_average(const TrackedSeries& tracked,
                                         const LadderSchedule& schedule) {
    std::map<int, double> out;
    const auto& times = tracked.boundary_times;
    if (times.size() < 2 || schedule.delta1 <= 0.0) return out;
    const double t0 = times.front(), t_end = times.back();
    const double mean_dt = (t_end - t0) / static_cast<double>(times.size() - 1);
    if (schedule.delta1 < 2.0 * mean_dt)
        throw WindowTooShort("ladder delta1 shorter than two sampling intervals");

    const int m1 = static_cast<int>(std::floor((t_end - t0) / schedule.delta1));
    if (m1 < 1) return out;

    for (const auto& cum : tracked.e_mag_cumulative) {
        // Level-1 window averages, then recursive means over groups of g.
        std::vector<double> avg(m1);
        for (int m = 0; m < m1; ++m) {
            const double a = t0 + m * schedule.delta1;
            const double b = a + schedule.delta1;
            avg[m] = (interp_cumulative(times, cum, b) - interp_cumulative(times, cum, a)) /
                     schedule.delta1;
        }
        for (int level = 1; level <= schedule.levels && !avg.empty(); ++level) {
            double best = avg[0];
            for (double a : avg) best = std::max(best, a);
            auto it = out.find(level);
            if (it == out.end())
                out[level] = best;
            else
                it->second = std::max(it->second, best);

            // Aggregate to the next level.
            const int count = static_cast<int>(avg.size()) / schedule.g_factor;
            std::vector<double> up(count);
            for (int k = 0; k < count; ++k) {
                double s = 0.0, sub_max = 0.0;
                for (int j = 0; j < schedule.g_factor; ++j) {
                    const double v = avg[k * schedule.g_factor + j];
                    s += v;
                    sub_max = std::max(sub_max, v);
                }
                // The true mean never exceeds the sub-max; clamp FP rounding.
                up[k] = std::min(s / schedule.g_factor, sub_max);
            }
            avg.swap(up);
        }
    }
    return out;
}

ConfinementFit confinement_bound_check(const std::vector<DiagRecord>& history, double tau) {
    ConfinementFit fit;
    if (history.empty()) return fit;
    for (const auto& r : history) {
        if (r.min_x1 <= 0.0) {
            fit.reached_wall = true;
            fit.ratio_series.push_back(std::numeric_limits<double>::infinity());
            continue;
        }
        const double ratio = std::pow(r.min_x1, -(tau - 1.0)) / r.running_max_speed;
        fit.ratio_series.push_back(ratio);
        fit.c_hat = std::max(fit.c_hat, ratio);
    }
    if (fit.reached_wall) return fit;  // reported as failure, not thrown

    const std::size_t n = history.size();
    const std::size_t start = n - n / 3;
    const std::size_t m = n - start;
    if (m < 3) {
        fit.passed = std::isfinite(fit.c_hat);
        return fit;
    }
    double st = 0, sy = 0;
    for (std::size_t i = start; i < n; ++i) {
        st += history[i].time;
        sy += fit.ratio_series[i];
    }
    const double tbar = st / m, ybar = sy / m;
    double sxx = 0, sxy = 0;
    for (std::size_t i = start; i < n; ++i) {
        const double dx = history[i].time - tbar;
        sxx += dx * dx;
        sxy += dx * (fit.ratio_series[i] - ybar);
    }
    fit.slope = sxx > 0 ? sxy / sxx : 0.0;
    double ssr = 0;
    for (std::size_t i = start; i < n; ++i) {
        const double resid =
            fit.ratio_series[i] - ybar - fit.slope * (history[i].time - tbar);
        ssr += resid * resid;
    }
    fit.slope_stderr = sxx > 0 ? std::sqrt(ssr / (m - 2) / sxx) : 0.0;
    fit.passed = std::isfinite(fit.c_hat) && fit.slope <= fit.slope_stderr;
    return fit;
}

TailReport gaussian_tail_check(const std::vector<Particle>& particles) {
    TailReport rep;
    std::vector<double> speeds;
    speeds.reserve(particles.size());
    double vmax = 0.0;
    for (const auto& p : particles) {
        speeds.push_back(norm(p.velocity));
        vmax = std::max(vmax, speeds.back());
    }
    if (vmax <= 0.0) throw InsufficientSample("all speeds are zero");

    const int nbins = 40;
    const double width = vmax * (1.0 + 1e-9) / nbins;
    std::vector<double> count(nbins, 0.0);
    for (double s : speeds) {
        int b = static_cast<int>(s / width);
        if (b >= nbins) b = nbins - 1;
        count[b] += 1.0;
    }
    int mode = 0;
    for (int b = 1; b < nbins; ++b)
        if (count[b] > count[mode]) mode = b;

    std::vector<double> xs, ys, vc, cn;
    for (int b = mode + 1; b < nbins; ++b) {
        if (count[b] < 20.0) continue;
        const double v = (b + 0.5) * width;
        xs.push_back(v * v);
        ys.push_back(std::log(count[b]) - 2.0 * std::log(v));
        vc.push_back(v);
        cn.push_back(count[b]);
    }
    rep.tail_bins = static_cast<int>(xs.size());
    if (rep.tail_bins < 10)
        throw InsufficientSample("fewer than 10 usable tail bins (" +
                                 std::to_string(rep.tail_bins) + ")");

    const std::size_t m = xs.size();
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const double xbar = sx / m, ybar = sy / m;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (xs[i] - xbar) * (xs[i] - xbar);
        sxy += (xs[i] - xbar) * (ys[i] - ybar);
    }
    const double slope = sxy / sxx;
    rep.lambda1 = -slope;
    rep.log_amplitude = ybar - slope * xbar;

    rep.passed = rep.lambda1 > 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double envelope =
            vc[i] * vc[i] * std::exp(rep.log_amplitude - rep.lambda1 * vc[i] * vc[i]);
        rep.bin_speed.push_back(vc[i]);
        rep.bin_count.push_back(cn[i]);
        rep.bin_envelope.push_back(envelope);
        if (cn[i] > 2.0 * envelope) rep.passed = false;
    }
    return rep;
}

std::string diag_record_to_json(const DiagRecord& r) {
    char buf[1024];
    std::snprintf(buf, sizeof(buf),
                  "{\"time\":%.17g,\"kinetic\":%.17g,\"potential_self\":%.17g,"
                  "\"potential_external\":%.17g,\"total_energy\":%.17g,\"min_x1\":%.17g,"
                  "\"max_speed\":%.17g,\"running_max_speed\":%.17g,\"displacement_R\":%.17g,"
                  "\"charge\":%.17g,\"shield_residual_max\":%.17g,\"l53_norm\":%.17g",
                  r.time, r.kinetic, r.potential_self, r.potential_external, r.total_energy,
                  r.min_x1, r.max_speed, r.running_max_speed, r.displacement_R, r.charge,
                  r.shield_residual_max, r.l53_norm);
    std::string s(buf);
    s += ",\"avg_field_by_level\":{";
    bool first = true;
    for (const auto& [level, value] : r.avg_field_by_level) {
        std::snprintf(buf, sizeof(buf), "%s\"%d\":%.17g", first ? "" : ",", level, value);
        s += buf;
        first = false;
    }
    s += "}}";
    return s;
}

}  // namespace magshield
