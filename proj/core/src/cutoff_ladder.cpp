#include "magshield/cutoff_ladder.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace magshield {

namespace {

void record_gap(ConvergencePair& pair, const SimState& a, const SimState& b, int common) {
    double delta = 0.0, eta = 0.0;
    for (int i = 0; i < common; ++i) {
        delta = std::max(delta, norm(a.particles[i].position - b.particles[i].position));
        eta = std::max(eta, norm(a.particles[i].velocity - b.particles[i].velocity));
    }
    pair.times.push_back(a.time);
    pair.delta_series.push_back(delta);
    pair.eta_series.push_back(eta);
    pair.sigma_series.push_back(delta + eta);
    pair.sup_sigma = std::max(pair.sup_sigma, delta + eta);
}

}  // namespace

ConvergencePair run_pair(const PairSetup& setup, double cutoff_n, std::uint64_t seed) {
    InitialDatum base = setup.datum;
    base.cutoff_n = cutoff_n;
    base.validate();
    setup.field.validate();
    setup.solver.validate();
    setup.stepper.validate();
    if (setup.particle_count < 1)
        throw std::invalid_argument("pair particle_count must be >= 1");

    const ExternalFields fields(setup.field);
    ConvergencePair pair;
    pair.cutoff_n = cutoff_n;

    SimState low;
    low.particles = sample(base, setup.particle_count, seed);

    // Continue the same stream for the N..N+1 shell, reproducing the
    // drawing order of sample().
    SampleStream stream(seed);
    for (int i = 0; i < setup.particle_count; ++i) {
        stream.uniform_in_box(base.support_box);
        stream.truncated_velocity(base.lambda, base.cutoff_n);
    }
    InitialDatum high = base;
    high.cutoff_n = cutoff_n + 1.0;
    const double p_low = base.cutoff_acceptance();
    const double p_shell = high.cutoff_acceptance() - p_low;
    const int shell =
        static_cast<int>(std::lround(setup.particle_count * p_shell / p_low));
    pair.shell_count = shell;

    SimState high_state;
    high_state.particles = low.particles;
    const double w = base.total_charge / setup.particle_count;
    for (int i = 0; i < shell; ++i) {
        Particle p;
        p.position = stream.uniform_in_box(base.support_box);
        p.velocity = stream.shell_velocity(base.lambda, cutoff_n, cutoff_n + 1.0);
        p.weight = w;
        high_state.particles.push_back(p);
    }

    record_gap(pair, low, high_state, setup.particle_count);
    int since_record = 0;
    while (low.time < setup.stepper.t_end) {
        double dt = std::min(compute_dt(low, fields, setup.stepper),
                             compute_dt(high_state, fields, setup.stepper));
        dt = std::min(dt, setup.stepper.t_end - low.time);
        advance_with_dt(low, dt, setup.solver, fields);
        advance_with_dt(high_state, dt, setup.solver, fields);
        high_state.time = low.time;  // shared clock, immune to FP drift
        if (++since_record == setup.record_cadence || low.time >= setup.stepper.t_end) {
            record_gap(pair, low, high_state, setup.particle_count);
            since_record = 0;
        }
    }
    return pair;
}

ConvergenceTable convergence_report(const std::vector<ConvergencePair>& pairs) {
    ConvergenceTable table;
    if (pairs.size() < 2) {
        table.message = "convergence_report needs at least 2 pairs, got " +
                        std::to_string(pairs.size());
        return table;
    }
    table.valid = true;
    table.monotone = true;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        ConvergenceRow row;
        row.cutoff_n = pairs[i].cutoff_n;
        row.sup_sigma = pairs[i].sup_sigma;
        if (i > 0) {
            const double prev = pairs[i - 1].sup_sigma;
            row.ratio_to_previous = prev > 0.0 ? row.sup_sigma / prev : 0.0;
            if (row.sup_sigma >= prev && prev > 0.0) table.monotone = false;
            if (prev == 0.0 && row.sup_sigma > 0.0) table.monotone = false;
        }
        table.rows.push_back(row);
    }
    return table;
}

std::string ConvergenceTable::format() const {
    std::string out;
    if (!valid) return "invalid: " + message + "\n";
    out += "   cutoff_n      sup_sigma          ratio\n";
    char buf[128];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%11.4g %14.6e %14.6e\n", r.cutoff_n, r.sup_sigma,
                      r.ratio_to_previous);
        out += buf;
    }
    out += monotone ? "monotone: yes\n" : "monotone: NO\n";
    return out;
}

}  // namespace magshield
