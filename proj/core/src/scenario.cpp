#include "magshield/scenario.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "magshield/param_ledger.hpp"

namespace fs = std::filesystem;

namespace magshield {

namespace {

constexpr const char* kArtifactVersion = "0.1.0";

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& v, const std::string& where) {
    if (v == "inf" || v == "infinity") return std::numeric_limits<double>::infinity();
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        throw ConfigError(where + ": expected a number, got '" + v + "'");
    return d;
}

long long parse_int(const std::string& v, const std::string& where) {
    char* end = nullptr;
    const long long i = std::strtoll(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0')
        throw ConfigError(where + ": expected an integer, got '" + v + "'");
    return i;
}

bool parse_bool(const std::string& v, const std::string& where) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(where + ": expected a boolean, got '" + v + "'");
}

Vec3 parse_vec3(const std::string& v, const std::string& where) {
    std::istringstream is(v);
    Vec3 out;
    if (!(is >> out.x >> out.y >> out.z))
        throw ConfigError(where + ": expected three numbers, got '" + v + "'");
    std::string rest;
    if (is >> rest) throw ConfigError(where + ": trailing content '" + rest + "'");
    return out;
}

std::array<int, 3> parse_cells(const std::string& v, const std::string& where) {
    std::istringstream is(v);
    std::array<int, 3> out;
    if (!(is >> out[0] >> out[1] >> out[2]))
        throw ConfigError(where + ": expected three integers, got '" + v + "'");
    return out;
}

std::string iso_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_snapshot(const fs::path& path, const std::vector<Particle>& particles) {
    std::ofstream out(path);
    out << "x1,x2,x3,v1,v2,v3,w\n";
    for (const auto& p : particles)
        out << fmt(p.position.x) << ',' << fmt(p.position.y) << ',' << fmt(p.position.z)
            << ',' << fmt(p.velocity.x) << ',' << fmt(p.velocity.y) << ','
            << fmt(p.velocity.z) << ',' << fmt(p.weight) << '\n';
}

std::string manifest_json(const RunManifest& m) {
    std::ostringstream os;
    os << "{\n"
       << "  \"run_id\": \"" << m.run_id << "\",\n"
       << "  \"seed\": " << m.seed << ",\n"
       << "  \"artifact_version\": \"" << m.artifact_version << "\",\n"
       << "  \"status\": \"" << m.status << "\",\n"
       << "  \"start_time\": \"" << m.start_time << "\",\n"
       << "  \"end_time\": \"" << m.end_time << "\",\n"
       << "  \"shield_condition\": " << (m.shield_condition ? "true" : "false") << ",\n"
       << "  \"min_x1_overall\": " << fmt(m.min_x1_overall) << ",\n"
       << "  \"max_speed_overall\": " << fmt(m.max_speed_overall) << ",\n"
       << "  \"energy_drift\": " << fmt(m.energy_drift) << ",\n"
       << "  \"shield_residual_max\": " << fmt(m.shield_residual_max) << ",\n"
       << "  \"steps\": " << m.steps << ",\n"
       << "  \"wall_seconds\": " << fmt(m.wall_seconds) << "\n"
       << "}\n";
    return os.str();
}

void write_manifest(const fs::path& dir, const RunManifest& m) {
    const fs::path tmp = dir / "manifest.json.tmp";
    {
        std::ofstream out(tmp);
        out << manifest_json(m);
    }
    fs::rename(tmp, dir / "manifest.json");
}

}  // namespace

void ScenarioConfig::validate() const {
    if (schema_version != 1)
        throw ConfigError("run.schema_version: unsupported version " +
                          std::to_string(schema_version));
    try {
        field.validate();
        datum.validate();
        if (solver.softening >= 0.0) {
            solver.validate();
        } else {
            // Negative softening is the "auto" sentinel, resolved from the
            // particle spacing at run time; validate the rest.
            SolverConfig resolved = solver;
            resolved.softening = 0.0;
            resolved.validate();
        }
        stepper.validate();
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    if (particle_count < 1) throw ConfigError("run.particle_count must be >= 1");
    if (record_cadence < 1) throw ConfigError("run.record_cadence must be >= 1");
    if (tracked_particles < 0) throw ConfigError("run.tracked_particles must be >= 0");
    if (!(c3 > 0.0)) throw ConfigError("run.c3 must be > 0");
    if (ladder.delta1 > 0.0 && (ladder.g_factor < 2 || ladder.levels < 1))
        throw ConfigError("ladder.g_factor must be >= 2 and ladder.levels >= 1");
}

std::string ScenarioConfig::canonical_text() const {
    std::ostringstream os;
    os << "schema_version=" << schema_version << "\n"
       << "field.mu=" << fmt(field.mu) << "\n"
       << "field.tau=" << fmt(field.tau) << "\n"
       << "field.blend_lo=" << fmt(field.blend_lo) << "\n"
       << "field.blend_hi=" << fmt(field.blend_hi) << "\n"
       << "field.magnetic_enabled=" << field.magnetic_enabled << "\n"
       << "field.point_charge_mode=" << field.point_charge_mode << "\n"
       << "field.point_charge_strength=" << fmt(field.point_charge_strength) << "\n"
       << "datum.lambda=" << fmt(datum.lambda) << "\n"
       << "datum.box_min=" << fmt(datum.support_box.min.x) << ","
       << fmt(datum.support_box.min.y) << "," << fmt(datum.support_box.min.z) << "\n"
       << "datum.box_max=" << fmt(datum.support_box.max.x) << ","
       << fmt(datum.support_box.max.y) << "," << fmt(datum.support_box.max.z) << "\n"
       << "datum.total_charge=" << fmt(datum.total_charge) << "\n"
       << "datum.cutoff_n=" << fmt(datum.cutoff_n) << "\n"
       << "solver.softening=" << fmt(solver.softening) << "\n"
       << "solver.opening_angle=" << fmt(solver.opening_angle) << "\n"
       << "solver.mode=" << (solver.mode == SolverMode::tree ? "tree" : "direct") << "\n"
       << "solver.use_quadrupole=" << solver.use_quadrupole << "\n"
       << "stepper.dt_base=" << fmt(stepper.dt_base) << "\n"
       << "stepper.gyro_safety=" << fmt(stepper.gyro_safety) << "\n"
       << "stepper.wall_safety=" << fmt(stepper.wall_safety) << "\n"
       << "stepper.dt_min=" << fmt(stepper.dt_min) << "\n"
       << "stepper.t_end=" << fmt(stepper.t_end) << "\n"
       << "run.particle_count=" << particle_count << "\n"
       << "run.seed=" << seed << "\n"
       << "run.deterministic=" << deterministic << "\n"
       << "run.record_cadence=" << record_cadence << "\n"
       << "run.tracked_particles=" << tracked_particles << "\n"
       << "run.c3=" << fmt(c3) << "\n"
       << "run.density_cells=" << density_cells[0] << "," << density_cells[1] << ","
       << density_cells[2] << "\n"
       << "ladder.delta1=" << fmt(ladder.delta1) << "\n"
       << "ladder.g_factor=" << ladder.g_factor << "\n"
       << "ladder.levels=" << ladder.levels << "\n";
    return os.str();
}

std::string ScenarioConfig::run_id() const {
    const std::string text = canonical_text();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ScenarioConfig parse_scenario_text(const std::string& text, const std::string& name) {
    ScenarioConfig cfg;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = name + ":" + std::to_string(lineno);
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + ": unterminated section");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string qual = (section.empty() ? key : section + "." + key);
        const std::string ctx = where + " (" + qual + ")";

        if (qual == "schema_version" || qual == "run.schema_version")
            cfg.schema_version = static_cast<int>(parse_int(value, ctx));
        else if (qual == "field.mu") cfg.field.mu = parse_double(value, ctx);
        else if (qual == "field.tau") cfg.field.tau = parse_double(value, ctx);
        else if (qual == "field.blend_lo") cfg.field.blend_lo = parse_double(value, ctx);
        else if (qual == "field.blend_hi") cfg.field.blend_hi = parse_double(value, ctx);
        else if (qual == "field.magnetic_enabled")
            cfg.field.magnetic_enabled = parse_bool(value, ctx);
        else if (qual == "field.point_charge_mode")
            cfg.field.point_charge_mode = parse_bool(value, ctx);
        else if (qual == "field.point_charge_strength")
            cfg.field.point_charge_strength = parse_double(value, ctx);
        else if (qual == "datum.lambda") cfg.datum.lambda = parse_double(value, ctx);
        else if (qual == "datum.box_min") cfg.datum.support_box.min = parse_vec3(value, ctx);
        else if (qual == "datum.box_max") cfg.datum.support_box.max = parse_vec3(value, ctx);
        else if (qual == "datum.total_charge")
            cfg.datum.total_charge = parse_double(value, ctx);
        else if (qual == "datum.cutoff_n") cfg.datum.cutoff_n = parse_double(value, ctx);
        else if (qual == "solver.softening") {
            cfg.solver.softening = (value == "auto") ? -1.0 : parse_double(value, ctx);
        } else if (qual == "solver.opening_angle")
            cfg.solver.opening_angle = parse_double(value, ctx);
        else if (qual == "solver.mode") {
            if (value == "direct") cfg.solver.mode = SolverMode::direct;
            else if (value == "tree") cfg.solver.mode = SolverMode::tree;
            else throw ConfigError(ctx + ": mode must be direct or tree");
        } else if (qual == "solver.use_quadrupole")
            cfg.solver.use_quadrupole = parse_bool(value, ctx);
        else if (qual == "stepper.dt_base") cfg.stepper.dt_base = parse_double(value, ctx);
        else if (qual == "stepper.gyro_safety")
            cfg.stepper.gyro_safety = parse_double(value, ctx);
        else if (qual == "stepper.wall_safety")
            cfg.stepper.wall_safety = parse_double(value, ctx);
        else if (qual == "stepper.dt_min") cfg.stepper.dt_min = parse_double(value, ctx);
        else if (qual == "stepper.t_end") cfg.stepper.t_end = parse_double(value, ctx);
        else if (qual == "run.particle_count")
            cfg.particle_count = static_cast<int>(parse_int(value, ctx));
        else if (qual == "run.seed")
            cfg.seed = static_cast<std::uint64_t>(parse_int(value, ctx));
        else if (qual == "run.deterministic") cfg.deterministic = parse_bool(value, ctx);
        else if (qual == "run.record_cadence")
            cfg.record_cadence = static_cast<int>(parse_int(value, ctx));
        else if (qual == "run.tracked_particles")
            cfg.tracked_particles = static_cast<int>(parse_int(value, ctx));
        else if (qual == "run.output_dir") cfg.output_dir = value;
        else if (qual == "run.c3") cfg.c3 = parse_double(value, ctx);
        else if (qual == "run.density_cells") cfg.density_cells = parse_cells(value, ctx);
        else if (qual == "ladder.delta1") cfg.ladder.delta1 = parse_double(value, ctx);
        else if (qual == "ladder.g_factor")
            cfg.ladder.g_factor = static_cast<int>(parse_int(value, ctx));
        else if (qual == "ladder.levels")
            cfg.ladder.levels = static_cast<int>(parse_int(value, ctx));
        else
            throw ConfigError(ctx + ": unknown key");
    }
    cfg.validate();
    return cfg;
}

ScenarioConfig parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str(), path);
}

namespace {

SolverConfig resolved_solver(const ScenarioConfig& cfg) {
    SolverConfig s = cfg.solver;
    if (s.softening < 0.0) {
        const double spacing =
            std::cbrt(cfg.datum.support_box.volume() / cfg.particle_count);
        s.softening = 0.1 * spacing;
    }
    return s;
}

}  // namespace

RunResult run_simulation(const ScenarioConfig& config) {
    config.validate();
    const ExternalFields fields(config.field);
    const SolverConfig solver = resolved_solver(config);

    RunResult result;
    result.config = config;
    result.state.particles = sample(config.datum, config.particle_count, config.seed);

    std::vector<int> tracked_indices;
    const int n_tracked = std::min(config.tracked_particles, config.particle_count);
    for (int i = 0; i < n_tracked; ++i) tracked_indices.push_back(i);
    result.tracked.initialize(result.state, fields, tracked_indices);

    DiagnosticsEngine diag(config.c3, config.ladder, config.density_cells);
    const TrackedSeries* tracked_ptr = n_tracked > 0 ? &result.tracked : nullptr;
    result.history.push_back(diag.record(result.state, solver, fields, tracked_ptr));

    result.status = "completed";
    int since_record = 0;
    try {
        while (result.state.time < config.stepper.t_end) {
            double dt = compute_dt(result.state, fields, config.stepper);
            dt = std::min(dt, config.stepper.t_end - result.state.time);
            advance_with_dt(result.state, dt, solver, fields,
                            n_tracked > 0 ? &result.tracked : nullptr);
            ++result.steps;
            if (++since_record == config.record_cadence ||
                result.state.time >= config.stepper.t_end) {
                result.history.push_back(
                    diag.record(result.state, solver, fields, tracked_ptr));
                since_record = 0;
            }
        }
    } catch (const WallCrossing&) {
        result.status = "wall_crossing";
        result.history.push_back(diag.record(result.state, solver, fields, tracked_ptr));
    } catch (const TimestepCollapse&) {
        result.status = "timestep_collapse";
        result.history.push_back(diag.record(result.state, solver, fields, tracked_ptr));
    }
    return result;
}

std::string output_root_for(const ScenarioConfig& config) {
    const char* env = std::getenv("MAGSHIELD_OUTPUT_ROOT");
    return env && *env ? std::string(env) : config.output_dir;
}

RunManifest run_scenario(const ScenarioConfig& config) {
    config.validate();
    RunManifest manifest;
    manifest.run_id = config.run_id();
    manifest.seed = config.seed;
    manifest.artifact_version = kArtifactVersion;
    manifest.start_time = iso_now();
    manifest.shield_condition =
        check_shield_condition(rational(config.field.mu), rational(config.field.tau));

    const fs::path dir = fs::path(output_root_for(config)) / manifest.run_id;
    fs::create_directories(dir);
    {
        std::ofstream out(dir / "scenario.canonical");
        out << config.canonical_text();
    }
    write_manifest(dir, manifest);

    const auto t0 = std::chrono::steady_clock::now();
    const RunResult result = run_simulation(config);
    const auto t1 = std::chrono::steady_clock::now();

    {
        std::ofstream out(dir / "diag.jsonl");
        for (const auto& r : result.history) out << diag_record_to_json(r) << '\n';
    }
    write_snapshot(dir / "snapshot_initial.csv",
                   sample(config.datum, config.particle_count, config.seed));
    write_snapshot(dir / "snapshot_final.csv", result.state.particles);

    manifest.status = result.status;
    manifest.steps = result.steps;
    manifest.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
    manifest.min_x1_overall = std::numeric_limits<double>::infinity();
    const double e0 = result.history.front().total_energy;
    for (const auto& r : result.history) {
        manifest.min_x1_overall = std::min(manifest.min_x1_overall, r.min_x1);
        manifest.max_speed_overall = std::max(manifest.max_speed_overall, r.max_speed);
        manifest.energy_drift = std::max(
            manifest.energy_drift, std::abs(r.total_energy - e0) / std::max(std::abs(e0), 1.0));
        manifest.shield_residual_max =
            std::max(manifest.shield_residual_max, r.shield_residual_max);
    }
    manifest.end_time = iso_now();
    write_manifest(dir, manifest);
    return manifest;
}

RunManifest run_scenario(const std::string& config_path) {
    return run_scenario(parse_scenario_file(config_path));
}

}  // namespace magshield
