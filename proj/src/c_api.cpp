#include "rdsim/rdsim.h"

#include <exception>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "rdsim/dataset.hpp"
#include "rdsim/error.hpp"
#include "rdsim/harness.hpp"
#include "rdsim/pair_extraction.hpp"
#include "rdsim/sbm_oracle.hpp"
#include "rdsim/scenes_io.hpp"
#include "rdsim/sim_engine.hpp"

struct rdsim_scene_set {
    std::vector<rdsim::SceneRecord> records;
};

struct rdsim_sweep {
    rdsim::SweepSpec spec;
};

struct rdsim_rate_table {
    rdsim::RateTable table;
};

namespace {

thread_local std::string g_last_error;

rdsim_status status_for(rdsim::ErrorCategory c) {
    switch (c) {
        case rdsim::ErrorCategory::Usage: return RDSIM_ERR_USAGE;
        case rdsim::ErrorCategory::Data: return RDSIM_ERR_DATA;
        case rdsim::ErrorCategory::Numerical: return RDSIM_ERR_NUMERIC;
        case rdsim::ErrorCategory::Io: return RDSIM_ERR_IO;
    }
    return RDSIM_ERR_INTERNAL;
}

rdsim_status fail(rdsim_status status, std::string message) {
    g_last_error = std::move(message);
    return status;
}

template <typename F>
rdsim_status guarded(F&& body) {
    try {
        body();
        return RDSIM_OK;
    } catch (const rdsim::Error& e) {
        return fail(status_for(e.category()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(RDSIM_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(RDSIM_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(RDSIM_ERR_INTERNAL, "unknown exception");
    }
}

rdsim_status null_argument(const char* name) {
    return fail(RDSIM_ERR_USAGE, std::string("argument '") + name + "' is NULL");
}

rdsim::FollowerModel to_model(rdsim_model m) {
    if (m == RDSIM_MODEL_SBM) return rdsim::FollowerModel::Sbm;
    if (m == RDSIM_MODEL_IDM) return rdsim::FollowerModel::Idm;
    throw rdsim::Error(rdsim::ErrorCode::InvalidArgument, "unknown follower model");
}

rdsim::Integrator to_integrator(rdsim_integrator i) {
    if (i == RDSIM_INTEGRATOR_EXACT) return rdsim::Integrator::ExactConstantAccel;
    if (i == RDSIM_INTEGRATOR_SEMI_IMPLICIT) return rdsim::Integrator::SemiImplicitEuler;
    throw rdsim::Error(rdsim::ErrorCode::InvalidArgument, "unknown integrator");
}

rdsim_termination to_c(rdsim::Termination t) {
    switch (t) {
        case rdsim::Termination::Collision: return RDSIM_TERM_COLLISION;
        case rdsim::Termination::AllStandstill: return RDSIM_TERM_STANDSTILL;
        case rdsim::Termination::MaxDuration: return RDSIM_TERM_MAX_DURATION;
    }
    return RDSIM_TERM_MAX_DURATION;
}

rdsim::StartScene to_cpp(const rdsim_scene& s, std::string id) {
    rdsim::StartScene scene;
    scene.lead = {s.lead_position_m, s.lead_speed_mps, s.lead_length_m};
    scene.follower = {s.follower_position_m, s.follower_speed_mps, s.follower_length_m};
    scene.scene_id = std::move(id);
    return scene;
}

std::vector<double> copy_values(const double* values, size_t n) {
    if (n == 0) throw rdsim::Error(rdsim::ErrorCode::InvalidArgument, "list must be non-empty");
    if (!values) throw rdsim::Error(rdsim::ErrorCode::InvalidArgument, "list is NULL");
    return std::vector<double>(values, values + n);
}

}  // namespace

extern "C" {

const char* rdsim_version(void) { return "1.0.0"; }

const char* rdsim_last_error(void) { return g_last_error.c_str(); }

const char* rdsim_status_string(rdsim_status status) {
    switch (status) {
        case RDSIM_OK: return "ok";
        case RDSIM_ERR_USAGE: return "usage error";
        case RDSIM_ERR_DATA: return "data error";
        case RDSIM_ERR_NUMERIC: return "numerical failure";
        case RDSIM_ERR_IO: return "i/o error";
        case RDSIM_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

rdsim_status rdsim_scenes_load(const char* path, rdsim_scene_set** out) {
    if (!path) return null_argument("path");
    if (!out) return null_argument("out");
    *out = nullptr;
    return guarded([&] { *out = new rdsim_scene_set{rdsim::read_scenes_csv(path)}; });
}

rdsim_status rdsim_scenes_from_array(const rdsim_scene* scenes, const char* const* ids, size_t n,
                                     rdsim_scene_set** out) {
    if (!out) return null_argument("out");
    *out = nullptr;
    if (n > 0 && !scenes) return null_argument("scenes");
    return guarded([&] {
        auto set = std::make_unique<rdsim_scene_set>();
        for (size_t i = 0; i < n; ++i) {
            std::string id = (ids && ids[i]) ? std::string(ids[i]) : "scene-" + std::to_string(i);
            rdsim::SceneRecord rec;
            rec.scene = to_cpp(scenes[i], std::move(id));
            rdsim::validate(rec.scene);
            set->records.push_back(std::move(rec));
        }
        *out = set.release();
    });
}

rdsim_status rdsim_scenes_synthesize(uint64_t n, uint64_t seed, double gap_min_m, double gap_max_m,
                                     double speed_min_mps, double speed_max_mps, rdsim_scene_set** out) {
    if (!out) return null_argument("out");
    *out = nullptr;
    return guarded([&] {
        const rdsim::SceneRanges ranges{gap_min_m, gap_max_m, speed_min_mps, speed_max_mps};
        *out = new rdsim_scene_set{rdsim::generate_synthetic_scenes(static_cast<std::size_t>(n), seed, ranges)};
    });
}

void rdsim_filter_options_default(rdsim_filter_options* options) {
    if (!options) return;
    const rdsim::FilterConfig cfg;
    options->heading_max_deg = cfg.heading_max_deg;
    options->bearing_max_deg = cfg.bearing_max_deg;
    options->lateral_offset_max_m = cfg.lateral_offset_max_m;
    options->vru_corridor_margin_m = cfg.vru_corridor_margin_m;
    options->min_follow_duration_s = cfg.min_follow_duration_s;
    options->early_follower_type_filter = cfg.early_follower_type_filter ? 1 : 0;
}

rdsim_status rdsim_scenes_extract(const char* tracks_path, const char* meta_path, const char* column_map_path,
                                  const rdsim_filter_options* options, rdsim_scene_set** out,
                                  rdsim_extract_stats* stats) {
    if (!tracks_path) return null_argument("tracks_path");
    if (!meta_path) return null_argument("meta_path");
    if (!out) return null_argument("out");
    *out = nullptr;
    return guarded([&] {
        rdsim::FilterConfig cfg;
        if (options) {
            cfg.heading_max_deg = options->heading_max_deg;
            cfg.bearing_max_deg = options->bearing_max_deg;
            cfg.lateral_offset_max_m = options->lateral_offset_max_m;
            cfg.vru_corridor_margin_m = options->vru_corridor_margin_m;
            cfg.min_follow_duration_s = options->min_follow_duration_s;
            cfg.early_follower_type_filter = options->early_follower_type_filter != 0;
        }
        rdsim::validate(cfg);
        const rdsim::ColumnMap columns =
            column_map_path ? rdsim::ColumnMap::load(column_map_path) : rdsim::ColumnMap::drone_default();
        const rdsim::Recording rec = rdsim::load_recording(tracks_path, meta_path, columns);
        rdsim::ExtractionStats s;
        auto records = rdsim::extract_scenes(rec, cfg, &s);
        if (stats) {
            *stats = {s.frames, s.candidates, s.after_geometry, s.after_vru, s.after_closest, s.emitted, s.degenerate};
        }
        *out = new rdsim_scene_set{std::move(records)};
    });
}

rdsim_status rdsim_scenes_append(rdsim_scene_set* dst, const rdsim_scene_set* src) {
    if (!dst) return null_argument("dst");
    if (!src) return null_argument("src");
    return guarded([&] {
        std::vector<rdsim::SceneRecord> copy = src->records;
        dst->records.insert(dst->records.end(), std::make_move_iterator(copy.begin()),
                            std::make_move_iterator(copy.end()));
    });
}

rdsim_status rdsim_scenes_save(const rdsim_scene_set* set, const char* path) {
    if (!set) return null_argument("set");
    if (!path) return null_argument("path");
    return guarded([&] { rdsim::write_scenes_csv(path, set->records); });
}

size_t rdsim_scenes_count(const rdsim_scene_set* set) { return set ? set->records.size() : 0; }

rdsim_status rdsim_scenes_get(const rdsim_scene_set* set, size_t index, rdsim_scene* out) {
    if (!set) return null_argument("set");
    if (!out) return null_argument("out");
    if (index >= set->records.size()) return fail(RDSIM_ERR_USAGE, "scene index out of range");
    const rdsim::StartScene& s = set->records[index].scene;
    *out = {s.lead.position_m,     s.lead.speed_mps,     s.lead.length_m,
            s.follower.position_m, s.follower.speed_mps, s.follower.length_m};
    return RDSIM_OK;
}

const char* rdsim_scenes_id(const rdsim_scene_set* set, size_t index) {
    if (!set || index >= set->records.size()) return nullptr;
    return set->records[index].scene.scene_id.c_str();
}

void rdsim_scenes_free(rdsim_scene_set* set) { delete set; }

void rdsim_sim_options_default(rdsim_sim_options* options) {
    if (!options) return;
    const rdsim::SimConfig cfg;
    options->dt_s = cfg.dt_s;
    options->max_duration_s = cfg.max_duration_s;
    options->standstill_eps_mps = cfg.standstill_eps_mps;
    options->lead_decel_mps2 = cfg.lead_decel_mps2;
    options->follower_model = RDSIM_MODEL_SBM;
    options->follower_decel_mps2 = cfg.follower_sbm.decel_mps2;
    options->reaction_time_s = cfg.reaction_time_s;
    options->integrator = RDSIM_INTEGRATOR_EXACT;
}

rdsim_status rdsim_run_scenario(const rdsim_scene* scene, const rdsim_sim_options* options, rdsim_outcome* out) {
    if (!scene) return null_argument("scene");
    if (!options) return null_argument("options");
    if (!out) return null_argument("out");
    return guarded([&] {
        rdsim::SimConfig cfg;
        cfg.dt_s = options->dt_s;
        cfg.max_duration_s = options->max_duration_s;
        cfg.standstill_eps_mps = options->standstill_eps_mps;
        cfg.lead_decel_mps2 = options->lead_decel_mps2;
        cfg.follower_model = to_model(options->follower_model);
        cfg.follower_sbm.decel_mps2 = options->follower_decel_mps2;
        cfg.follower_idm.decel_floor_mps2 = options->follower_decel_mps2;
        cfg.reaction_time_s = options->reaction_time_s;
        cfg.integrator = to_integrator(options->integrator);
        const rdsim::SimOutcome o = rdsim::run_scenario(to_cpp(*scene, "c-api"), cfg);
        *out = {to_c(o.terminated_by), o.collision ? 1 : 0, o.impact_rel_speed_mps.value_or(0.0), o.t_end_s,
                o.min_gap_m};
    });
}

rdsim_severity rdsim_classify_severity(double impact_rel_speed_mps, double threshold_kmh) {
    return rdsim::classify_severity(impact_rel_speed_mps, threshold_kmh) == rdsim::Severity::AtLeastS1
               ? RDSIM_SEVERITY_AT_LEAST_S1
               : RDSIM_SEVERITY_S0;
}

rdsim_status rdsim_sweep_create(rdsim_sweep** out) {
    if (!out) return null_argument("out");
    *out = nullptr;
    return guarded([&] { *out = new rdsim_sweep{}; });
}

void rdsim_sweep_free(rdsim_sweep* sweep) { delete sweep; }

#define RDSIM_REQUIRE_SWEEP() \
    if (!sweep) return null_argument("sweep")

rdsim_status rdsim_sweep_set_reaction_times(rdsim_sweep* sweep, const double* values, size_t n) {
    RDSIM_REQUIRE_SWEEP();
    return guarded([&] {
        auto v = copy_values(values, n);
        for (double t : v) {
            if (!(t >= 0.0)) throw rdsim::Error(rdsim::ErrorCode::InvalidArgument, "reaction times must be >= 0");
        }
        sweep->spec.reaction_times_s = std::move(v);
    });
}

rdsim_status rdsim_sweep_set_lead_decels(rdsim_sweep* sweep, const double* values, size_t n) {
    RDSIM_REQUIRE_SWEEP();
    return guarded([&] {
        auto v = copy_values(values, n);
        for (double d : v) {
            if (!(d <= 0.0)) throw rdsim::Error(rdsim::ErrorCode::InvalidArgument, "lead decelerations must be <= 0");
        }
        sweep->spec.lead_decels_mps2 = std::move(v);
    });
}

rdsim_status rdsim_sweep_set_models(rdsim_sweep* sweep, const rdsim_model* models, size_t n) {
    RDSIM_REQUIRE_SWEEP();
    return guarded([&] {
        if (n == 0 || !models) throw rdsim::Error(rdsim::ErrorCode::InvalidArgument, "model list must be non-empty");
        std::vector<rdsim::FollowerModel> v;
        for (size_t i = 0; i < n; ++i) v.push_back(to_model(models[i]));
        sweep->spec.follower_models = std::move(v);
    });
}

rdsim_status rdsim_sweep_set_follower_decel(rdsim_sweep* sweep, double decel_mps2) {
    RDSIM_REQUIRE_SWEEP();
    if (!(decel_mps2 < 0.0)) return fail(RDSIM_ERR_USAGE, "follower deceleration must be < 0");
    sweep->spec.follower_decel_mps2 = decel_mps2;
    return RDSIM_OK;
}

rdsim_status rdsim_sweep_set_dt(rdsim_sweep* sweep, double dt_s) {
    RDSIM_REQUIRE_SWEEP();
    if (!(dt_s > 0.0)) return fail(RDSIM_ERR_USAGE, "dt must be > 0");
    sweep->spec.engine.dt_s = dt_s;
    return RDSIM_OK;
}

rdsim_status rdsim_sweep_set_max_duration(rdsim_sweep* sweep, double seconds) {
    RDSIM_REQUIRE_SWEEP();
    if (!(seconds > 0.0)) return fail(RDSIM_ERR_USAGE, "max duration must be > 0");
    sweep->spec.engine.max_duration_s = seconds;
    return RDSIM_OK;
}

rdsim_status rdsim_sweep_set_integrator(rdsim_sweep* sweep, rdsim_integrator integrator) {
    RDSIM_REQUIRE_SWEEP();
    return guarded([&] { sweep->spec.engine.integrator = to_integrator(integrator); });
}

rdsim_status rdsim_sweep_set_workers(rdsim_sweep* sweep, unsigned workers) {
    RDSIM_REQUIRE_SWEEP();
    sweep->spec.workers = workers;
    return RDSIM_OK;
}

rdsim_status rdsim_sweep_set_severity_threshold(rdsim_sweep* sweep, double threshold_kmh) {
    RDSIM_REQUIRE_SWEEP();
    if (!(threshold_kmh >= 0.0)) return fail(RDSIM_ERR_USAGE, "severity threshold must be >= 0");
    sweep->spec.severity_threshold_kmh = threshold_kmh;
    return RDSIM_OK;
}

rdsim_status rdsim_sweep_set_record_per_scenario(rdsim_sweep* sweep, int enabled) {
    RDSIM_REQUIRE_SWEEP();
    sweep->spec.record_per_scenario = enabled != 0;
    return RDSIM_OK;
}

#undef RDSIM_REQUIRE_SWEEP

rdsim_status rdsim_sweep_run(const rdsim_sweep* sweep, const rdsim_scene_set* scenes, rdsim_rate_table** out) {
    if (!sweep) return null_argument("sweep");
    if (!scenes) return null_argument("scenes");
    if (!out) return null_argument("out");
    *out = nullptr;
    return guarded([&] {
        const auto list = rdsim::scenes_only(scenes->records);
        *out = new rdsim_rate_table{rdsim::run_sweep(list, sweep->spec)};
    });
}

size_t rdsim_rate_table_rows(const rdsim_rate_table* table) { return table ? table->table.rows.size() : 0; }

rdsim_status rdsim_rate_table_row(const rdsim_rate_table* table, size_t index, rdsim_rate_row* out) {
    if (!table) return null_argument("table");
    if (!out) return null_argument("out");
    if (index >= table->table.rows.size()) return fail(RDSIM_ERR_USAGE, "row index out of range");
    const rdsim::RateRow& r = table->table.rows[index];
    *out = {r.key.model == rdsim::FollowerModel::Sbm ? RDSIM_MODEL_SBM : RDSIM_MODEL_IDM,
            r.key.reaction_time_s,
            r.key.lead_decel_mps2,
            r.key.follower_decel_mps2,
            r.n_scenarios,
            r.n_collisions,
            r.n_at_least_s1,
            r.collision_rate_pct};
    return RDSIM_OK;
}

rdsim_status rdsim_rate_table_write(const rdsim_rate_table* table, rdsim_format format, const char* path) {
    if (!table) return null_argument("table");
    if (!path) return null_argument("path");
    if (format != RDSIM_FORMAT_CSV && format != RDSIM_FORMAT_MARKDOWN) return fail(RDSIM_ERR_USAGE, "unknown format");
    return guarded([&] {
        rdsim::emit_report(table->table,
                           format == RDSIM_FORMAT_CSV ? rdsim::ReportFormat::Csv : rdsim::ReportFormat::Markdown, path);
    });
}

rdsim_status rdsim_rate_table_write_per_scenario(const rdsim_rate_table* table, const char* path) {
    if (!table) return null_argument("table");
    if (!path) return null_argument("path");
    return guarded([&] { rdsim::write_per_scenario_csv(table->table, path); });
}

void rdsim_rate_table_free(rdsim_rate_table* table) { delete table; }

rdsim_status rdsim_oracle_check(uint64_t n, uint64_t seed, rdsim_oracle_report* out) {
    if (!out) return null_argument("out");
    if (n == 0) return fail(RDSIM_ERR_USAGE, "case count must be > 0");
    return guarded([&] {
        rdsim::OracleCheckOptions opt;
        opt.n = n;
        opt.seed = seed;
        const rdsim::OracleCheckReport r = rdsim::run_oracle_check(opt);
        *out = {r.cases,
                r.compared,
                r.ambiguous,
                r.collisions,
                r.occurrence_mismatches,
                r.time_mismatches,
                r.speed_mismatches,
                r.max_time_error_s,
                r.max_speed_error_mps,
                r.elapsed_s,
                r.passed() ? 1 : 0};
    });
}

}  // extern "C"
