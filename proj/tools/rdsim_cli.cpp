// rdsim: command-line front end over the rdsim C API.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rdsim/rdsim.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

int exit_code_for(rdsim_status s) {
    switch (s) {
        case RDSIM_OK: return kExitOk;
        case RDSIM_ERR_USAGE: return kExitUsage;
        case RDSIM_ERR_NUMERIC: return kExitNumeric;
        default: return kExitData;
    }
}

int report(rdsim_status s, const char* what) {
    if (s == RDSIM_OK) return kExitOk;
    std::fprintf(stderr, "rdsim: %s: %s: %s\n", what, rdsim_status_string(s), rdsim_last_error());
    return exit_code_for(s);
}

struct SceneSetDeleter {
    void operator()(rdsim_scene_set* p) const { rdsim_scenes_free(p); }
};
struct SweepDeleter {
    void operator()(rdsim_sweep* p) const { rdsim_sweep_free(p); }
};
struct RateTableDeleter {
    void operator()(rdsim_rate_table* p) const { rdsim_rate_table_free(p); }
};
using SceneSet = std::unique_ptr<rdsim_scene_set, SceneSetDeleter>;
using Sweep = std::unique_ptr<rdsim_sweep, SweepDeleter>;
using RateTable = std::unique_ptr<rdsim_rate_table, RateTableDeleter>;

struct UsageError {
    std::string message;
};

std::vector<double> parse_numbers(std::string_view text, const char* option) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        std::string_view item = text.substr(pos, comma - pos);
        while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
        double v = 0.0;
        const char* first = item.data();
        if (!item.empty() && item.front() == '+') ++first;
        auto [ptr, ec] = std::from_chars(first, item.data() + item.size(), v);
        if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
            throw UsageError{std::string(option) + ": '" + std::string(item) + "' is not a number"};
        }
        out.push_back(v);
        pos = comma + 1;
    }
    return out;
}

std::pair<double, double> parse_range(std::string_view text, const char* option) {
    const auto v = parse_numbers(text, option);
    if (v.size() != 2) throw UsageError{std::string(option) + ": expected 'min,max'"};
    return {v[0], v[1]};
}

std::vector<rdsim_model> parse_models(std::string_view text) {
    std::vector<rdsim_model> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        const std::string_view item = text.substr(pos, comma - pos);
        if (item == "sbm" || item == "SBM") {
            out.push_back(RDSIM_MODEL_SBM);
        } else if (item == "idm" || item == "IDM") {
            out.push_back(RDSIM_MODEL_IDM);
        } else {
            throw UsageError{"--models: unknown model '" + std::string(item) + "' (expected sbm or idm)"};
        }
        pos = comma + 1;
    }
    return out;
}

// ---------------------------------------------------------------------------

struct ExtractArgs {
    std::string tracks, meta, column_map, out;
    rdsim_filter_options filter{};
};

int run_extract(const ExtractArgs& a) {
    rdsim_scene_set* raw = nullptr;
    rdsim_extract_stats stats{};
    const char* column_map = a.column_map.empty() ? nullptr : a.column_map.c_str();
    if (int rc = report(rdsim_scenes_extract(a.tracks.c_str(), a.meta.c_str(), column_map, &a.filter, &raw, &stats),
                        "extract")) {
        return rc;
    }
    SceneSet scenes(raw);
    if (int rc = report(rdsim_scenes_save(scenes.get(), a.out.c_str()), "write scenes")) return rc;
    std::fprintf(stderr,
                 "frames %llu, candidates %llu, geometry %llu, vru %llu, closest %llu, emitted %llu, "
                 "degenerate %llu, scenes %zu\n",
                 static_cast<unsigned long long>(stats.frames), static_cast<unsigned long long>(stats.candidates),
                 static_cast<unsigned long long>(stats.after_geometry),
                 static_cast<unsigned long long>(stats.after_vru),
                 static_cast<unsigned long long>(stats.after_closest),
                 static_cast<unsigned long long>(stats.emitted), static_cast<unsigned long long>(stats.degenerate),
                 rdsim_scenes_count(scenes.get()));
    return kExitOk;
}

struct SimulateArgs {
    std::vector<std::string> scenes;
    std::string reaction_times = "0,0.5,1.0,1.5,2.0,2.5";
    std::string lead_decels = "-3.41,-1.71";
    std::string models = "sbm,idm";
    double follower_decel = -3.41;
    double dt = 0.04;
    double max_duration = 60.0;
    std::string integrator = "exact";
    std::string per_scenario;
    std::string out;
    std::string format = "csv";
    unsigned workers = 0;
    double severity_kmh = 10.0;
};

int run_simulate(const SimulateArgs& a) {
    const auto taus = parse_numbers(a.reaction_times, "--reaction-times");
    const auto leads = parse_numbers(a.lead_decels, "--lead-decels");
    const auto models = parse_models(a.models);
    rdsim_format format;
    if (a.format == "csv") {
        format = RDSIM_FORMAT_CSV;
    } else if (a.format == "markdown" || a.format == "md") {
        format = RDSIM_FORMAT_MARKDOWN;
    } else {
        throw UsageError{"--format must be csv or markdown"};
    }
    rdsim_integrator integrator;
    if (a.integrator == "exact") {
        integrator = RDSIM_INTEGRATOR_EXACT;
    } else if (a.integrator == "semi-implicit") {
        integrator = RDSIM_INTEGRATOR_SEMI_IMPLICIT;
    } else {
        throw UsageError{"--integrator must be exact or semi-implicit"};
    }

    rdsim_sweep* sweep_raw = nullptr;
    if (int rc = report(rdsim_sweep_create(&sweep_raw), "sweep")) return rc;
    Sweep sweep(sweep_raw);
    const std::pair<rdsim_status, const char*> settings[] = {
        {rdsim_sweep_set_reaction_times(sweep.get(), taus.data(), taus.size()), "--reaction-times"},
        {rdsim_sweep_set_lead_decels(sweep.get(), leads.data(), leads.size()), "--lead-decels"},
        {rdsim_sweep_set_models(sweep.get(), models.data(), models.size()), "--models"},
        {rdsim_sweep_set_follower_decel(sweep.get(), a.follower_decel), "--follower-decel"},
        {rdsim_sweep_set_dt(sweep.get(), a.dt), "--dt"},
        {rdsim_sweep_set_max_duration(sweep.get(), a.max_duration), "--max-duration"},
        {rdsim_sweep_set_integrator(sweep.get(), integrator), "--integrator"},
        {rdsim_sweep_set_workers(sweep.get(), a.workers), "--workers"},
        {rdsim_sweep_set_severity_threshold(sweep.get(), a.severity_kmh), "--severity-threshold"},
        {rdsim_sweep_set_record_per_scenario(sweep.get(), a.per_scenario.empty() ? 0 : 1), "--per-scenario"},
    };
    for (const auto& [status, what] : settings) {
        if (int rc = report(status, what)) return rc;
    }

    SceneSet scenes;
    for (const std::string& path : a.scenes) {
        rdsim_scene_set* raw = nullptr;
        if (int rc = report(rdsim_scenes_load(path.c_str(), &raw), path.c_str())) return rc;
        SceneSet loaded(raw);
        if (!scenes) {
            scenes = std::move(loaded);
        } else if (int rc = report(rdsim_scenes_append(scenes.get(), loaded.get()), path.c_str())) {
            return rc;
        }
    }
    if (rdsim_scenes_count(scenes.get()) == 0) {
        std::fprintf(stderr, "rdsim: simulate: scene files contain no scenes\n");
        return kExitData;
    }

    rdsim_rate_table* table_raw = nullptr;
    if (int rc = report(rdsim_sweep_run(sweep.get(), scenes.get(), &table_raw), "simulate")) return rc;
    RateTable table(table_raw);
    if (int rc = report(rdsim_rate_table_write(table.get(), format, a.out.c_str()), "write rates")) return rc;
    if (!a.per_scenario.empty()) {
        if (int rc = report(rdsim_rate_table_write_per_scenario(table.get(), a.per_scenario.c_str()),
                            "write per-scenario records")) {
            return rc;
        }
    }
    return kExitOk;
}

struct SynthArgs {
    unsigned long long n = 10000;
    unsigned long long seed = 42;
    std::string gap_range = "2,60";
    std::string speed_range = "0,13.89";
    std::string out;
};

int run_synth(const SynthArgs& a) {
    const auto [gap_lo, gap_hi] = parse_range(a.gap_range, "--gap-range");
    const auto [speed_lo, speed_hi] = parse_range(a.speed_range, "--speed-range");
    rdsim_scene_set* raw = nullptr;
    if (int rc = report(rdsim_scenes_synthesize(a.n, a.seed, gap_lo, gap_hi, speed_lo, speed_hi, &raw), "synth")) {
        return rc;
    }
    SceneSet scenes(raw);
    return report(rdsim_scenes_save(scenes.get(), a.out.c_str()), "write scenes");
}

struct OracleArgs {
    unsigned long long n = 10000;
    unsigned long long seed = 7;
};

int run_oracle(const OracleArgs& a) {
    rdsim_oracle_report r{};
    if (int rc = report(rdsim_oracle_check(a.n, a.seed, &r), "oracle-check")) return rc;
    std::printf(
        "cases %llu, compared %llu, ambiguous %llu, collisions %llu\n"
        "occurrence mismatches %llu, time mismatches %llu, speed mismatches %llu\n"
        "max time error %.4f s, max impact speed error %.4f m/s, elapsed %.2f s\n%s\n",
        static_cast<unsigned long long>(r.cases), static_cast<unsigned long long>(r.compared),
        static_cast<unsigned long long>(r.ambiguous), static_cast<unsigned long long>(r.collisions),
        static_cast<unsigned long long>(r.occurrence_mismatches), static_cast<unsigned long long>(r.time_mismatches),
        static_cast<unsigned long long>(r.speed_mismatches), r.max_time_error_s, r.max_speed_error_mps, r.elapsed_s,
        r.passed ? "PASS" : "FAIL");
    return r.passed ? kExitOk : kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rear-end collision rates for a lead vehicle braking after connection loss"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(rdsim_version()));

    ExtractArgs ex;
    rdsim_filter_options_default(&ex.filter);
    auto* extract = app.add_subcommand("extract", "Extract following-pair start scenes from a drone recording");
    extract->add_option("--tracks", ex.tracks, "Per-frame tracks CSV")->required();
    extract->add_option("--meta", ex.meta, "Per-track metadata CSV")->required();
    extract->add_option("--column-map", ex.column_map, "Column map (key = value)")->required();
    extract->add_option("--out", ex.out, "Output scenes CSV")->required();
    extract->add_option("--heading-max", ex.filter.heading_max_deg, "Max heading difference [deg]")->capture_default_str();
    extract->add_option("--bearing-max", ex.filter.bearing_max_deg, "Max bearing to lead [deg]")->capture_default_str();
    extract->add_option("--lateral-max", ex.filter.lateral_offset_max_m, "Max lateral offset [m]")->capture_default_str();
    extract->add_option("--min-follow", ex.filter.min_follow_duration_s, "Min following duration [s]")->capture_default_str();
    extract->add_option("--vru-margin", ex.filter.vru_corridor_margin_m, "VRU corridor margin [m]")->capture_default_str();

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Run the collision-rate sweep over a scene file");
    simulate->add_option("--scenes", sim.scenes, "Scenes CSV (repeatable)")->required();
    simulate->add_option("--reaction-times", sim.reaction_times, "Comma-separated reaction times [s]")->capture_default_str();
    simulate->add_option("--lead-decels", sim.lead_decels, "Comma-separated lead decelerations [m/s^2]")->capture_default_str();
    simulate->add_option("--models", sim.models, "Comma-separated follower models (sbm,idm)")->capture_default_str();
    simulate->add_option("--follower-decel", sim.follower_decel, "Follower deceleration [m/s^2]")->capture_default_str();
    simulate->add_option("--dt", sim.dt, "Time step [s]")->capture_default_str();
    simulate->add_option("--max-duration", sim.max_duration, "Maximum simulated time [s]")->capture_default_str();
    simulate->add_option("--integrator", sim.integrator, "exact | semi-implicit")->capture_default_str();
    simulate->add_option("--per-scenario", sim.per_scenario, "Optional per-scenario records CSV");
    simulate->add_option("--out", sim.out, "Rate table output")->required();
    simulate->add_option("--format", sim.format, "csv | markdown")->capture_default_str();
    simulate->add_option("--workers", sim.workers, "Worker threads (0 = all cores)")->capture_default_str();
    simulate->add_option("--severity-threshold", sim.severity_kmh, "S1 impact speed threshold [km/h]")->capture_default_str();

    SynthArgs sy;
    auto* synth = app.add_subcommand("synth", "Generate seeded synthetic start scenes");
    synth->add_option("--n", sy.n, "Number of scenes")->capture_default_str();
    synth->add_option("--seed", sy.seed, "RNG seed")->capture_default_str();
    synth->add_option("--gap-range", sy.gap_range, "min,max bumper gap [m]")->capture_default_str();
    synth->add_option("--speed-range", sy.speed_range, "min,max speed [m/s]")->capture_default_str();
    synth->add_option("--out", sy.out, "Output scenes CSV")->required();

    OracleArgs oc;
    auto* oracle = app.add_subcommand("oracle-check", "Compare the engine against the closed-form SBM solution");
    oracle->add_option("--n", oc.n, "Number of random cases")->capture_default_str();
    oracle->add_option("--seed", oc.seed, "RNG seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*extract) return run_extract(ex);
        if (*simulate) return run_simulate(sim);
        if (*synth) return run_synth(sy);
        if (*oracle) return run_oracle(oc);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "rdsim: %s\n", e.message.c_str());
        return kExitUsage;
    }
    return kExitUsage;
}
