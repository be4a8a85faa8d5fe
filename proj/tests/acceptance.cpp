// Acceptance gate: one line per criterion, nonzero exit if any fails.
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "magshield/cutoff_ladder.hpp"
#include "magshield/diagnostics.hpp"
#include "magshield/param_ledger.hpp"
#include "magshield/scenario.hpp"
#include "magshield/sweep.hpp"

using namespace magshield;

namespace {

int failures = 0;

void report(const char* id, const char* what, bool ok, const std::string& detail = "") {
    std::printf("%s %s: %s%s%s\n", id, what, ok ? "PASS" : "FAIL",
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

ScenarioConfig ac1_config(std::uint64_t seed) {
    ScenarioConfig cfg;
    cfg.field.mu = 1.0;
    cfg.field.tau = 6.0;
    cfg.datum.lambda = 1.0;
    cfg.datum.support_box = {{0.5, 0.0, 0.0}, {1.5, 1.0, 1.0}};  // A = 0.5
    cfg.datum.total_charge = 0.1;
    cfg.particle_count = 512;
    cfg.seed = seed;
    cfg.solver.softening = -1.0;  // default
    cfg.stepper.dt_base = 2e-3;
    cfg.stepper.t_end = 5.0;
    cfg.record_cadence = 20;
    cfg.tracked_particles = 32;
    cfg.ladder.delta1 = 0.05;
    cfg.ladder.g_factor = 2;
    cfg.ladder.levels = 4;
    return cfg;
}

std::string fmtd(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

// AC-1 runs are reused by AC-10; AC-11 reuses the scaled-up variant.
std::vector<RunResult> ac1_results;

void ac1() {
    bool ok = true;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const RunResult r = run_simulation(ac1_config(seed));
        double min_x1 = std::numeric_limits<double>::infinity();
        for (const auto& rec : r.history) min_x1 = std::min(min_x1, rec.min_x1);
        if (r.status != "completed" || !(min_x1 > 0.0)) ok = false;
        detail += "seed " + std::to_string(seed) + ": " + r.status +
                  ", min_x1=" + fmtd(min_x1) + "; ";
        ac1_results.push_back(std::move(r));
    }
    report("AC-1", "confinement under the shield condition", ok, detail);
}

void ac2() {
    bool ok = true;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        ScenarioConfig cfg = ac1_config(seed);
        cfg.field.magnetic_enabled = false;
        const RunResult r = run_simulation(cfg);
        double min_x1 = std::numeric_limits<double>::infinity();
        for (const auto& rec : r.history) min_x1 = std::min(min_x1, rec.min_x1);
        const bool terminated =
            r.status == "wall_crossing" || r.status == "timestep_collapse";
        if (!terminated || !(min_x1 < 0.05) || !(r.state.time < 5.0)) ok = false;
        detail += r.status + "@t=" + fmtd(r.state.time) + ", min_x1=" + fmtd(min_x1) + "; ";
    }
    report("AC-2", "shield-off counterfactual reaches the wall", ok, detail);
}

void ac3() {
    Particle p;
    p.position = {5.0, 0.0, 0.0};
    p.velocity = {0.6, -0.2, 0.3};
    const double v0 = norm(p.velocity);
    const Vec3 b{0.0, 0.0, 2.0};
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        p = boris_step(p, {0, 0, 0}, b, 1e-3);
        worst = std::max(worst, std::abs(norm(p.velocity) / v0 - 1.0));
    }
    report("AC-3", "magnetic norm preservation over 1e4 steps", worst < 1e-12,
           "max | |v|/|v0| - 1 | = " + fmtd(worst));
}

void ac4() {
    const ScenarioConfig base = ac1_config(1);
    const ExternalFields fields(base.field);
    SolverConfig solver = base.solver;
    solver.softening = 0.1 * std::cbrt(1.0 / base.particle_count);
    const auto initial = sample(base.datum, base.particle_count, base.seed);
    double res[2];
    int k = 0;
    for (double dt : {2e-3, 1e-3}) {
        SimState s;
        s.particles = initial;
        TrackedSeries tracked;
        std::vector<int> idx;
        for (int i = 0; i < base.tracked_particles; ++i) idx.push_back(i);
        tracked.initialize(s, fields, idx);
        const int n = static_cast<int>(std::round(1.0 / dt));
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            advance_with_dt(s, dt, solver, fields, &tracked);
            worst = std::max(worst, max_shield_residual(s, fields, tracked));
        }
        res[k++] = worst;
    }
    const double ratio = res[0] / res[1];
    report("AC-4", "shield identity residual is second order", ratio >= 3.0 && ratio <= 5.0,
           "max|r| " + fmtd(res[0]) + " -> " + fmtd(res[1]) + ", ratio " + fmtd(ratio));
}

void ac5() {
    ExternalFieldConfig off;
    off.magnetic_enabled = false;
    const ExternalFields fields(off);
    SolverConfig solver;  // epsilon = 0
    double drift[2];
    int k = 0;
    for (double dt : {1e-3, 5e-4}) {
        SimState s;
        s.particles.resize(2);
        s.particles[0].position = {3.0, 0.0, 0.0};
        s.particles[1].position = {5.0, 0.0, 0.0};
        s.particles[0].weight = s.particles[1].weight = 1.0;
        auto energy = [&] {
            double e = potential_energy(s.particles, solver);
            for (const auto& p : s.particles) e += 0.5 * p.weight * norm2(p.velocity);
            return e;
        };
        const double e0 = energy();
        double worst = 0.0;
        const int n = static_cast<int>(std::round(1.0 / dt));
        for (int i = 0; i < n; ++i) {
            advance_with_dt(s, dt, solver, fields);
            worst = std::max(worst, std::abs(energy() / e0 - 1.0));
        }
        drift[k++] = worst;
    }
    const double ratio = drift[0] / drift[1];
    report("AC-5", "two-body energy conservation",
           drift[0] < 1e-6 && ratio >= 3.0 && ratio <= 5.0,
           "drift " + fmtd(drift[0]) + ", halving ratio " + fmtd(ratio));
}

void ac6() {
    std::mt19937 rng(2718);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Particle> particles(1000);
    for (auto& p : particles) {
        p.position = {u(rng), u(rng), u(rng)};
        p.weight = 0.001;
    }
    SolverConfig direct;
    direct.softening = 0.01;
    SolverConfig tree = direct;
    tree.mode = SolverMode::tree;
    tree.opening_angle = 0.3;
    const auto d = all_fields(particles, direct);
    const auto t = all_fields(particles, tree);
    double tree_err = 0.0, oracle_err = 0.0;
    for (int i = 0; i < 1000; ++i) {
        tree_err = std::max(tree_err, norm(t[i] - d[i]) / norm(d[i]));
        Vec3 ref{0, 0, 0};
        for (int j = 0; j < 1000; ++j) {
            if (j == i) continue;
            const Vec3 dx = particles[i].position - particles[j].position;
            const double r2 = dot(dx, dx) + 0.01 * 0.01;
            ref = ref + dx * (particles[j].weight / (r2 * std::sqrt(r2)));
        }
        oracle_err = std::max(oracle_err, norm(d[i] - ref) / norm(ref));
    }
    report("AC-6", "field solver oracle equivalence",
           tree_err < 1e-2 && oracle_err < 1e-14,
           "tree vs direct " + fmtd(tree_err) + ", direct vs oracle " + fmtd(oracle_err));
}

void ac7() {
    const ScenarioConfig base = ac1_config(1);
    PairSetup setup;
    setup.datum = base.datum;
    setup.particle_count = base.particle_count;
    setup.field = base.field;
    setup.solver = base.solver;
    setup.solver.softening = 0.1 * std::cbrt(1.0 / base.particle_count);
    setup.stepper = base.stepper;
    setup.record_cadence = base.record_cadence;

    const double sigma = std::sqrt(0.5 / base.datum.lambda);
    const double cutoffs[3] = {3.0 * sigma, 4.0 * sigma, 5.0 * sigma};
    double mean[3], var[3];
    std::string detail;
    for (int c = 0; c < 3; ++c) {
        double s = 0.0, s2 = 0.0;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const double sup = run_pair(setup, cutoffs[c], seed).sup_sigma;
            s += sup;
            s2 += sup * sup;
        }
        mean[c] = s / 5.0;
        var[c] = std::max(0.0, s2 / 5.0 - mean[c] * mean[c]);
        detail += "N=" + fmtd(cutoffs[c]) + ": " + fmtd(mean[c]) + "+-" +
                  fmtd(std::sqrt(var[c])) + "; ";
    }
    bool ok = true;
    for (int c = 1; c < 3; ++c) {
        // Strict decrease beyond the seed-to-seed noise band (stderr of
        // the mean difference over 5 seeds).
        const double band = std::sqrt((var[c - 1] + var[c]) / 5.0);
        if (!(mean[c - 1] - mean[c] > band)) ok = false;
    }
    report("AC-7", "cutoff ladder sup_sigma strictly decreasing", ok, detail);
}

void ac8() {
    bool ok = true;
    std::string detail;
    try {
        LedgerInput input;
        input.mu = 1;
        input.tau = 6;
        input.gamma = parse_rational("0.6");
        const LedgerReport rep = compute_intervals(input);
        if (!(rep.eta_range.lo == rational(1, 10) && rep.eta_range.hi == rational(7, 15)))
            ok = false;
        if (!(rep.nu_range.lo == rational(19, 10) && rep.nu_range.hi == rational(2)))
            ok = false;
        if (!rep.feasible) ok = false;
        if (check_shield_condition(1, parse_rational("5.5"))) ok = false;
        if (check_shield_condition(2, parse_rational("7.75"))) ok = false;
        std::mt19937 rng(99);
        std::uniform_int_distribution<int> num(1, 40), den(1, 20);
        for (int i = 0; i < 100; ++i) {
            LedgerInput in;
            in.mu = rational(num(rng), den(rng));
            in.tau = rational(9, 4) * in.mu + rational(13, 4) + rational(num(rng), den(rng));
            in.gamma = rational(2, 3) * rational(num(rng), num(rng) + 41);
            const LedgerReport r = compute_intervals(in);
            if (!r.feasible || !r.empty_intervals.empty()) {
                ok = false;
                detail += "empty interval at mu=" + fmtd(to_double(in.mu)) + "; ";
            }
        }
    } catch (const std::exception& e) {
        ok = false;
        detail += e.what();
    }
    report("AC-8", "parameter ledger boundary exactness", ok, detail);
}

void ac9() {
    SweepSpec spec;
    spec.base = ac1_config(1);
    spec.base.particle_count = 256;
    spec.base.stepper.t_end = 3.0;
    spec.base.tracked_particles = 0;
    spec.base.ladder = {};
    spec.mu_values = {1.0};
    spec.tau_values = {4.0, 5.0, 5.5, 6.0, 7.0};
    spec.repeats = 3;
    const SweepSummary summary = run_sweep(spec);
    bool ok = summary.rows.size() == 15;
    std::string detail;
    for (const auto& c : summary.cells) {
        detail += "tau=" + fmtd(c.tau) + (c.shield_condition ? "*" : "") + ": " +
                  fmtd(c.confined_fraction) + "; ";
        if (c.shield_condition && c.confined_fraction != 1.0) ok = false;
    }
    report("AC-9", "frontier sweep confines every shielded cell", ok, detail);
}

void ac10() {
    bool ok = !ac1_results.empty();
    std::string detail;
    int checked = 0;
    for (const auto& run : ac1_results)
        for (const auto& rec : run.history) {
            const auto& levels = rec.avg_field_by_level;
            for (auto it = levels.begin(); it != levels.end(); ++it) {
                const auto next = std::next(it);
                if (next == levels.end()) break;
                ++checked;
                if (next->second > it->second) {
                    ok = false;
                    detail += "level " + std::to_string(next->first) + " rises at t=" +
                              fmtd(rec.time) + "; ";
                }
            }
        }
    report("AC-10", "window-average ladder is non-increasing in level", ok,
           "comparisons checked: " + std::to_string(checked) + "; " + detail);
}

void ac11() {
    // End states of the five AC-1 seeds pooled into one ensemble so the
    // histogram has enough occupied tail bins.
    std::vector<Particle> pool;
    for (const auto& run : ac1_results)
        pool.insert(pool.end(), run.state.particles.begin(), run.state.particles.end());
    bool ok = !pool.empty();
    std::string detail = "pooled " + std::to_string(pool.size()) + " particles";
    try {
        const TailReport rep = gaussian_tail_check(pool);
        ok = ok && rep.passed && rep.lambda1 > 0.0;
        detail += ", lambda1 " + fmtd(rep.lambda1) + ", tail bins " +
                  std::to_string(rep.tail_bins) + (rep.passed ? "" : ", envelope exceeded");
    } catch (const std::exception& e) {
        ok = false;
        detail += std::string(", ") + e.what();
    }
    report("AC-11", "gaussian tail persists at the end state", ok, detail);
}

void ac12() {
    bool ok = true;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        ScenarioConfig cfg = ac1_config(seed);
        cfg.field.point_charge_mode = true;
        cfg.field.point_charge_strength = 1.0;
        // Support box away from the origin so |x| stays positive.
        cfg.datum.support_box = {{0.5, 1.0, 1.0}, {1.5, 2.0, 2.0}};
        const RunResult r = run_simulation(cfg);
        double min_x1 = std::numeric_limits<double>::infinity();
        for (const auto& rec : r.history) min_x1 = std::min(min_x1, rec.min_x1);
        if (r.status != "completed" || !(min_x1 > 0.0)) ok = false;
        detail += r.status + ", min_x1=" + fmtd(min_x1) + "; ";
    }
    report("AC-12", "point-charge variant stays confined", ok, detail);
}

}  // namespace

int main() {
    ac1();
    ac2();
    ac3();
    ac4();
    ac5();
    ac6();
    ac7();
    ac8();
    ac9();
    ac10();
    ac11();
    ac12();
    std::printf("%d of 12 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
