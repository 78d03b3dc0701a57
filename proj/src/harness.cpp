#include "rdsim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "csv.hpp"
#include "rdsim/error.hpp"

namespace rdsim {

const char* to_string(Severity s) noexcept { return s == Severity::S0 ? "S0" : "S1+"; }

Severity classify_severity(double impact_rel_speed_mps, double threshold_kmh) {
    return impact_rel_speed_mps > threshold_kmh / 3.6 ? Severity::AtLeastS1 : Severity::S0;
}

SweepSpec SweepSpec::emergency_6_5() {
    SweepSpec spec;
    spec.reaction_times_s = {1.0};
    spec.lead_decels_mps2 = {-6.5};
    spec.follower_models = {FollowerModel::Idm};
    spec.follower_decel_mps2 = -6.5;
    return spec;
}

SweepSpec SweepSpec::moderate_follower() {
    SweepSpec spec;
    spec.follower_models = {FollowerModel::Sbm};
    spec.follower_decel_mps2 = -3.41 / 2.0;
    return spec;
}

void validate(const SweepSpec& spec) {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw Error(ErrorCode::InvalidArgument, what);
    };
    require(!spec.reaction_times_s.empty(), "reaction time list must be non-empty");
    require(!spec.lead_decels_mps2.empty(), "lead deceleration list must be non-empty");
    require(!spec.follower_models.empty(), "follower model list must be non-empty");
    for (double t : spec.reaction_times_s) require(t >= 0.0 && std::isfinite(t), "reaction times must be >= 0");
    for (double d : spec.lead_decels_mps2) require(d <= 0.0 && std::isfinite(d), "lead decelerations must be <= 0");
    require(spec.follower_decel_mps2 < 0.0, "follower deceleration must be < 0");
    require(spec.severity_threshold_kmh >= 0.0, "severity threshold must be >= 0");
}

SimConfig cell_config(const SweepSpec& spec, const CellKey& key) {
    SimConfig cfg = spec.engine;
    cfg.capture_trajectory = false;
    cfg.follower_model = key.model;
    cfg.reaction_time_s = key.reaction_time_s;
    cfg.lead_decel_mps2 = key.lead_decel_mps2;
    cfg.follower_idm = spec.idm_params;
    cfg.follower_idm.decel_floor_mps2 = key.follower_decel_mps2;
    cfg.follower_sbm.decel_mps2 = key.follower_decel_mps2;
    return cfg;
}

const RateRow* RateTable::find(FollowerModel model, double reaction_time_s, double lead_decel_mps2) const {
    for (const auto& r : rows) {
        if (r.key.model == model && std::abs(r.key.reaction_time_s - reaction_time_s) < 1e-9 &&
            std::abs(r.key.lead_decel_mps2 - lead_decel_mps2) < 1e-9) {
            return &r;
        }
    }
    return nullptr;
}

RateTable run_sweep(std::span<const StartScene> scenes, const SweepSpec& spec) {
    validate(spec);
    if (scenes.empty()) throw Error(ErrorCode::InvalidArgument, "scene list is empty");
    for (const auto& s : scenes) validate(s);

    std::vector<CellKey> cells;
    for (FollowerModel m : spec.follower_models) {
        for (double lead : spec.lead_decels_mps2) {
            for (double tau : spec.reaction_times_s) {
                cells.push_back({m, tau, lead, spec.follower_decel_mps2});
            }
        }
    }
    std::vector<SimConfig> configs;
    for (const auto& c : cells) {
        configs.push_back(cell_config(spec, c));
        validate(configs.back());
    }

    const std::size_t n_scenes = scenes.size();
    const std::size_t n_jobs = cells.size() * n_scenes;

    struct JobResult {
        Termination terminated_by;
        bool collision;
        double impact;
        double t_end;
        double min_gap;
    };
    std::vector<JobResult> results(n_jobs);

    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> first_error{std::numeric_limits<std::size_t>::max()};
    std::mutex error_mutex;
    std::string error_message;
    ErrorCode error_code = ErrorCode::NumericalFailure;

    constexpr std::size_t kChunk = 256;
    auto worker = [&] {
        for (;;) {
            const std::size_t begin = next.fetch_add(kChunk);
            if (begin >= n_jobs) return;
            const std::size_t end = std::min(n_jobs, begin + kChunk);
            for (std::size_t job = begin; job < end; ++job) {
                if (job > first_error.load()) return;
                const std::size_t cell = job / n_scenes;
                const std::size_t scene = job % n_scenes;
                try {
                    const SimOutcome o = run_scenario(scenes[scene], configs[cell]);
                    results[job] = {o.terminated_by, o.collision, o.impact_rel_speed_mps.value_or(0.0), o.t_end_s,
                                    o.min_gap_m};
                } catch (const Error& e) {
                    std::lock_guard lock(error_mutex);
                    if (job < first_error.load()) {
                        first_error.store(job);
                        error_message = e.what();
                        error_code = e.code();
                    }
                    return;
                }
            }
        }
    };

    unsigned workers = spec.workers ? spec.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(1, n_jobs / kChunk + 1)));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
    }
    if (first_error.load() != std::numeric_limits<std::size_t>::max()) {
        throw Error(error_code, error_message);
    }

    RateTable table;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        RateRow row;
        row.key = cells[c];
        row.n_scenarios = n_scenes;
        for (std::size_t s = 0; s < n_scenes; ++s) {
            const JobResult& r = results[c * n_scenes + s];
            if (r.collision) {
                ++row.n_collisions;
                if (classify_severity(r.impact, spec.severity_threshold_kmh) == Severity::AtLeastS1) ++row.n_at_least_s1;
            }
            if (spec.record_per_scenario) {
                ScenarioRecord rec;
                rec.cell = c;
                rec.scene_id = scenes[s].scene_id;
                rec.terminated_by = r.terminated_by;
                rec.collision = r.collision;
                if (r.collision) {
                    rec.impact_rel_speed_mps = r.impact;
                    rec.severity = classify_severity(r.impact, spec.severity_threshold_kmh);
                }
                rec.t_end_s = r.t_end;
                rec.min_gap_m = r.min_gap;
                table.records.push_back(std::move(rec));
            }
        }
        row.collision_rate_pct = 100.0 * static_cast<double>(row.n_collisions) / static_cast<double>(n_scenes);
        table.rows.push_back(row);
    }
    return table;
}

std::vector<SceneRecord> generate_synthetic_scenes(std::size_t n, std::uint64_t seed, const SceneRanges& r) {
    if (n == 0) throw Error(ErrorCode::InvalidCount, "scene count must be > 0");
    if (!(r.gap_min_m > 0.0) || !(r.gap_max_m >= r.gap_min_m) || !(r.speed_min_mps >= 0.0) ||
        !(r.speed_max_mps >= r.speed_min_mps)) {
        throw Error(ErrorCode::InvalidArgument, "invalid synthetic scene ranges");
    }
    constexpr double kLength = 5.0;
    std::mt19937_64 rng(seed);
    // Hand-rolled uniform mapping keeps the stream identical across standard libraries.
    auto uniform = [&rng](double lo, double hi) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    };
    std::vector<SceneRecord> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        SceneRecord rec;
        const double g = uniform(r.gap_min_m, r.gap_max_m);
        rec.scene.follower = {0.0, uniform(r.speed_min_mps, r.speed_max_mps), kLength};
        rec.scene.lead = {g + kLength, uniform(r.speed_min_mps, r.speed_max_mps), kLength};
        rec.scene.scene_id = "synth-" + std::to_string(seed) + "-" + std::to_string(i);
        out.push_back(std::move(rec));
    }
    return out;
}

std::optional<ReportFormat> parse_report_format(std::string_view text) {
    if (text == "csv") return ReportFormat::Csv;
    if (text == "markdown" || text == "md") return ReportFormat::Markdown;
    return std::nullopt;
}

namespace {

/// Shortest exact form, with ".0" on integral values so columns read as decimals.
std::string format_param(double v) {
    std::string s = csv::format_double(v);
    if (s.find_first_of(".eE") == std::string::npos && s.find("inf") == std::string::npos &&
        s.find("nan") == std::string::npos) {
        s += ".0";
    }
    return s;
}

}  // namespace

std::string render_report(const RateTable& table, ReportFormat format) {
    if (table.rows.empty()) throw Error(ErrorCode::EmptyTable, "rate table has no rows");
    std::ostringstream out;
    if (format == ReportFormat::Csv) {
        out << "model,reaction_time_s,lead_decel_mps2,follower_decel_mps2,n_scenarios,n_collisions,collision_rate_pct\n";
        for (const RateRow& r : table.rows) {
            out << to_string(r.key.model) << ',' << format_param(r.key.reaction_time_s) << ','
                << format_param(r.key.lead_decel_mps2) << ',' << format_param(r.key.follower_decel_mps2) << ','
                << r.n_scenarios << ',' << r.n_collisions << ',' << csv::format_fixed(r.collision_rate_pct, 2)
                << '\n';
        }
        return out.str();
    }

    // Markdown: one table per (lead, follower) deceleration, rows by reaction time, one column per model.
    std::vector<std::pair<double, double>> groups;
    std::vector<double> taus;
    std::vector<FollowerModel> models;
    for (const RateRow& r : table.rows) {
        const std::pair<double, double> g{r.key.lead_decel_mps2, r.key.follower_decel_mps2};
        if (std::find(groups.begin(), groups.end(), g) == groups.end()) groups.push_back(g);
        if (std::find(taus.begin(), taus.end(), r.key.reaction_time_s) == taus.end()) taus.push_back(r.key.reaction_time_s);
        if (std::find(models.begin(), models.end(), r.key.model) == models.end()) models.push_back(r.key.model);
    }
    std::sort(taus.begin(), taus.end());

    bool first = true;
    for (const auto& [lead, follower] : groups) {
        if (!first) out << '\n';
        first = false;
        out << "### Collision rate, lead deceleration " << format_param(lead) << " m/s^2, follower deceleration "
            << format_param(follower) << " m/s^2\n\n";
        out << "| Reaction time [s] |";
        for (FollowerModel m : models) out << ' ' << (m == FollowerModel::Sbm ? "Sudden Braking Model" : "Intelligent Driver Model") << " [%] |";
        out << "\n|---:|";
        for (std::size_t i = 0; i < models.size(); ++i) out << "---:|";
        out << '\n';
        for (double tau : taus) {
            out << "| " << format_param(tau) << " |";
            for (FollowerModel m : models) {
                const RateRow* row = nullptr;
                for (const RateRow& r : table.rows) {
                    if (r.key.model == m && r.key.reaction_time_s == tau && r.key.lead_decel_mps2 == lead &&
                        r.key.follower_decel_mps2 == follower) {
                        row = &r;
                    }
                }
                out << ' ' << (row ? csv::format_fixed(row->collision_rate_pct, 2) : std::string("-")) << " |";
            }
            out << '\n';
        }
        out << "\nScenarios per cell: " << table.rows.front().n_scenarios << '\n';
    }
    return out.str();
}

void emit_report(const RateTable& table, ReportFormat format, const std::string& out_path) {
    const std::string text = render_report(table, format);
    auto out = csv::open_output(out_path);
    out << text;
    csv::close_output(out, out_path);
}

std::string render_per_scenario(const RateTable& table) {
    std::ostringstream out;
    out << "scene_id,model,reaction_time_s,lead_decel_mps2,follower_decel_mps2,terminated_by,collision,"
           "impact_rel_speed_mps,severity,t_end_s,min_gap_m\n";
    for (const ScenarioRecord& r : table.records) {
        const CellKey& k = table.rows.at(r.cell).key;
        out << csv::quote_if_needed(r.scene_id) << ',' << to_string(k.model) << ',' << format_param(k.reaction_time_s)
            << ',' << format_param(k.lead_decel_mps2) << ',' << format_param(k.follower_decel_mps2) << ','
            << to_string(r.terminated_by) << ',' << (r.collision ? 1 : 0) << ','
            << (r.impact_rel_speed_mps ? csv::format_double(*r.impact_rel_speed_mps) : std::string()) << ','
            << (r.severity ? to_string(*r.severity) : "") << ',' << csv::format_double(r.t_end_s) << ','
            << csv::format_double(r.min_gap_m) << '\n';
    }
    return out.str();
}

void write_per_scenario_csv(const RateTable& table, const std::string& out_path) {
    const std::string text = render_per_scenario(table);
    auto out = csv::open_output(out_path);
    out << text;
    csv::close_output(out, out_path);
}

}  // namespace rdsim
