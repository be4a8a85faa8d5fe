#include "magshield/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "magshield/diagnostics.hpp"
#include "magshield/param_ledger.hpp"

namespace fs = std::filesystem;

namespace magshield {

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

int worker_count() {
    const char* env = std::getenv("MAGSHIELD_THREADS");
    if (!env || !*env) return 1;
    const int n = std::atoi(env);
    return n >= 1 ? n : 1;
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::string sweep_digest(const SweepSpec& spec) {
    std::ostringstream os;
    os << spec.base.canonical_text() << "repeats=" << spec.repeats << "\nmu=";
    for (double m : spec.mu_values) os << fmt(m) << ",";
    os << "\ntau=";
    for (double t : spec.tau_values) os << fmt(t) << ",";
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : os.str()) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace

SweepSummary run_sweep(const SweepSpec& spec) {
    if (spec.mu_values.empty() || spec.tau_values.empty() || spec.repeats < 1)
        throw ConfigError("sweep needs nonempty mu/tau lists and repeats >= 1");

    SweepSummary summary;
    summary.sweep_id = sweep_digest(spec);
    const fs::path dir =
        fs::path(output_root_for(spec.base)) / ("sweep-" + summary.sweep_id);
    fs::create_directories(dir);
    summary.directory = dir.string();

    struct Job {
        double mu, tau;
        int repeat;
    };
    std::vector<Job> jobs;
    for (double mu : spec.mu_values)
        for (double tau : spec.tau_values)
            for (int r = 0; r < spec.repeats; ++r) jobs.push_back({mu, tau, r});

    summary.rows.resize(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            const Job& job = jobs[i];
            SweepRunRow& row = summary.rows[i];
            row.mu = job.mu;
            row.tau = job.tau;
            row.repeat = job.repeat;
            ScenarioConfig cfg = spec.base;
            cfg.field.mu = job.mu;
            cfg.field.tau = job.tau;
            cfg.seed = spec.base.seed + static_cast<std::uint64_t>(job.repeat);
            cfg.output_dir = dir.string();
            row.seed = cfg.seed;
            const auto t0 = std::chrono::steady_clock::now();
            try {
                const RunResult result = run_simulation(cfg);
                row.run_id = cfg.run_id();
                row.status = result.status;
                row.min_x1 = std::numeric_limits<double>::infinity();
                for (const auto& rec : result.history)
                    row.min_x1 = std::min(row.min_x1, rec.min_x1);
            } catch (const std::exception& e) {
                row.status = std::string("error: ") + e.what();
                row.min_x1 = std::nan("");
            }
            row.runtime_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                    .count();
        }
    };
    const int threads = std::min<int>(worker_count(), static_cast<int>(jobs.size()));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    for (double mu : spec.mu_values)
        for (double tau : spec.tau_values) {
            SweepCell cell;
            cell.mu = mu;
            cell.tau = tau;
            cell.shield_condition = check_shield_condition(rational(mu), rational(tau));
            std::vector<double> mins;
            int confined = 0, total = 0;
            for (const auto& row : summary.rows) {
                if (row.mu != mu || row.tau != tau) continue;
                ++total;
                cell.runtime_seconds += row.runtime_seconds;
                if (row.status == "completed") ++confined;
                if (std::isfinite(row.min_x1)) mins.push_back(row.min_x1);
            }
            cell.confined_fraction = total ? static_cast<double>(confined) / total : 0.0;
            cell.min_x1_median = median(mins);
            summary.cells.push_back(cell);
        }

    {
        std::ofstream out(dir / "runs.csv");
        out << "mu,tau,repeat,seed,run_id,status,min_x1,runtime_seconds\n";
        for (const auto& r : summary.rows)
            out << fmt(r.mu) << ',' << fmt(r.tau) << ',' << r.repeat << ',' << r.seed
                << ',' << r.run_id << ',' << r.status << ',' << fmt(r.min_x1) << ','
                << fmt(r.runtime_seconds) << '\n';
    }
    {
        std::ofstream out(dir / "summary.csv");
        out << "mu,tau,shield_condition,confined_fraction,min_x1_median,runtime\n";
        for (const auto& c : summary.cells)
            out << fmt(c.mu) << ',' << fmt(c.tau) << ','
                << (c.shield_condition ? "true" : "false") << ','
                << fmt(c.confined_fraction) << ',' << fmt(c.min_x1_median) << ','
                << fmt(c.runtime_seconds) << '\n';
    }
    return summary;
}

namespace {

fs::path locate_artifact(const std::string& root, const std::string& id) {
    const fs::path direct = fs::path(root) / id;
    if (fs::exists(direct)) return direct;
    const fs::path sweep = fs::path(root) / ("sweep-" + id);
    if (fs::exists(sweep)) return sweep;
    // Cell runs live one level down inside sweep directories.
    if (fs::exists(root))
        for (const auto& entry : fs::directory_iterator(root)) {
            if (!entry.is_directory()) continue;
            const fs::path nested = entry.path() / id;
            if (fs::exists(nested)) return nested;
        }
    throw UnknownRunId("no run or sweep '" + id + "' under " + root);
}

std::string emit_timeseries(const fs::path& dir) {
    std::ifstream in(dir / "diag.jsonl");
    if (!in) throw UnknownRunId((dir / "diag.jsonl").string() + " missing");
    const fs::path out_path = dir / "plot_timeseries.txt";
    std::ofstream out(out_path);
    out << "# t min_x1 max_speed total_energy\n";
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        out << fmt(j["time"]) << ' ' << fmt(j["min_x1"]) << ' ' << fmt(j["max_speed"])
            << ' ' << fmt(j["total_energy"]) << '\n';
    }
    return out_path.string();
}

std::string emit_tail(const fs::path& dir) {
    std::ifstream in(dir / "snapshot_final.csv");
    if (!in) throw UnknownRunId((dir / "snapshot_final.csv").string() + " missing");
    std::vector<Particle> particles;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        Particle p;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf,%lf", &p.position.x,
                        &p.position.y, &p.position.z, &p.velocity.x, &p.velocity.y,
                        &p.velocity.z, &p.weight) == 7)
            particles.push_back(p);
    }
    const fs::path out_path = dir / "plot_tail.txt";
    std::ofstream out(out_path);
    out << "# v log_count envelope\n";
    try {
        const TailReport rep = gaussian_tail_check(particles);
        for (std::size_t i = 0; i < rep.bin_speed.size(); ++i)
            out << fmt(rep.bin_speed[i]) << ' ' << fmt(std::log(rep.bin_count[i])) << ' '
                << fmt(std::log(rep.bin_envelope[i])) << '\n';
    } catch (const InsufficientSample&) {
        // Too few particles for a fit: emit the raw histogram, no envelope.
        double vmax = 0.0;
        for (const auto& p : particles) vmax = std::max(vmax, norm(p.velocity));
        const int nbins = 20;
        std::vector<int> count(nbins, 0);
        if (vmax > 0.0)
            for (const auto& p : particles) {
                int b = static_cast<int>(norm(p.velocity) / vmax * nbins);
                count[std::min(b, nbins - 1)]++;
            }
        for (int b = 0; b < nbins; ++b)
            if (count[b] > 0)
                out << fmt((b + 0.5) * vmax / nbins) << ' ' << fmt(std::log(count[b]))
                    << " 0\n";
    }
    return out_path.string();
}

std::string emit_ladder(const fs::path& dir) {
    std::ifstream in(dir / "diag.jsonl");
    if (!in) throw UnknownRunId((dir / "diag.jsonl").string() + " missing");
    std::string line, last;
    while (std::getline(in, line))
        if (!line.empty()) last = line;
    const auto j = nlohmann::json::parse(last);
    const fs::path out_path = dir / "plot_ladder.txt";
    std::ofstream out(out_path);
    out << "# level avg_field\n";
    for (const auto& [level, value] : j["avg_field_by_level"].items())
        out << level << ' ' << fmt(value) << '\n';
    return out_path.string();
}

std::string emit_frontier(const fs::path& dir) {
    std::ifstream in(dir / "summary.csv");
    if (!in) throw UnknownRunId((dir / "summary.csv").string() + " missing");
    const fs::path out_path = dir / "plot_frontier.txt";
    std::ofstream out(out_path);
    out << "# mu tau confined_fraction\n";
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        double mu, tau, frac;
        char cond[16];
        if (std::sscanf(line.c_str(), "%lf,%lf,%15[^,],%lf", &mu, &tau, cond, &frac) == 4)
            out << fmt(mu) << ' ' << fmt(tau) << ' ' << fmt(frac) << '\n';
    }
    return out_path.string();
}

}  // namespace

std::string emit_plot_data(const std::string& output_root, const std::string& id,
                           const std::string& kind) {
    const fs::path dir = locate_artifact(output_root, id);
    if (kind == "timeseries") return emit_timeseries(dir);
    if (kind == "tail") return emit_tail(dir);
    if (kind == "ladder") return emit_ladder(dir);
    if (kind == "frontier") return emit_frontier(dir);
    throw ConfigError("unknown plot kind '" + kind +
                      "' (expected timeseries|tail|ladder|frontier)");
}

}  // namespace magshield
