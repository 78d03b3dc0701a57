/*
 * rdsim C API
 *
 * Longitudinal rear-end collision simulator for a lead vehicle that brakes to
 * standstill at t = 0 and a follower driven by a Sudden Braking Model or an
 * Intelligent Driver Model with a fixed reaction delay.
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every fallible call returns an rdsim_status; on
 * failure rdsim_last_error() describes the problem (per thread, valid until
 * the next failing call on that thread).
 */

#ifndef RDSIM_RDSIM_H
#define RDSIM_RDSIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(RDSIM_BUILDING_LIBRARY)
#    define RDSIM_API __declspec(dllexport)
#  else
#    define RDSIM_API __declspec(dllimport)
#  endif
#else
#  define RDSIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rdsim_status {
    RDSIM_OK = 0,
    RDSIM_ERR_USAGE = 1,   /* invalid argument or null handle */
    RDSIM_ERR_DATA = 2,    /* malformed or inconsistent input data */
    RDSIM_ERR_NUMERIC = 3, /* simulation produced non-finite values */
    RDSIM_ERR_IO = 4,      /* file could not be read or written */
    RDSIM_ERR_INTERNAL = 5
} rdsim_status;

typedef enum rdsim_model { RDSIM_MODEL_SBM = 0, RDSIM_MODEL_IDM = 1 } rdsim_model;

typedef enum rdsim_format { RDSIM_FORMAT_CSV = 0, RDSIM_FORMAT_MARKDOWN = 1 } rdsim_format;

typedef enum rdsim_integrator {
    RDSIM_INTEGRATOR_EXACT = 0,        /* exact update for piecewise-constant acceleration */
    RDSIM_INTEGRATOR_SEMI_IMPLICIT = 1 /* v' = max(v + a dt, 0), x' = x + v' dt */
} rdsim_integrator;

typedef enum rdsim_termination {
    RDSIM_TERM_COLLISION = 0,
    RDSIM_TERM_STANDSTILL = 1,
    RDSIM_TERM_MAX_DURATION = 2
} rdsim_termination;

typedef enum rdsim_severity { RDSIM_SEVERITY_S0 = 0, RDSIM_SEVERITY_AT_LEAST_S1 = 1 } rdsim_severity;

typedef struct rdsim_scene_set rdsim_scene_set;
typedef struct rdsim_sweep rdsim_sweep;
typedef struct rdsim_rate_table rdsim_rate_table;

/* Positions are vehicle centers on a common 1-D axis. */
typedef struct rdsim_scene {
    double lead_position_m;
    double lead_speed_mps;
    double lead_length_m;
    double follower_position_m;
    double follower_speed_mps;
    double follower_length_m;
} rdsim_scene;

typedef struct rdsim_sim_options {
    double dt_s;
    double max_duration_s;
    double standstill_eps_mps;
    double lead_decel_mps2;
    rdsim_model follower_model;
    double follower_decel_mps2; /* SBM deceleration / IDM clamp floor */
    double reaction_time_s;
    rdsim_integrator integrator;
} rdsim_sim_options;

typedef struct rdsim_outcome {
    rdsim_termination terminated_by;
    int collision;
    double impact_rel_speed_mps; /* 0 when no collision */
    double t_end_s;
    double min_gap_m;
} rdsim_outcome;

typedef struct rdsim_filter_options {
    double heading_max_deg;
    double bearing_max_deg;
    double lateral_offset_max_m;
    double vru_corridor_margin_m;
    double min_follow_duration_s;
    int early_follower_type_filter;
} rdsim_filter_options;

typedef struct rdsim_extract_stats {
    uint64_t frames;
    uint64_t candidates;
    uint64_t after_geometry;
    uint64_t after_vru;
    uint64_t after_closest;
    uint64_t emitted;
    uint64_t degenerate;
} rdsim_extract_stats;

typedef struct rdsim_rate_row {
    rdsim_model model;
    double reaction_time_s;
    double lead_decel_mps2;
    double follower_decel_mps2;
    uint64_t n_scenarios;
    uint64_t n_collisions;
    uint64_t n_at_least_s1;
    double collision_rate_pct;
} rdsim_rate_row;

typedef struct rdsim_oracle_report {
    uint64_t cases;
    uint64_t compared;
    uint64_t ambiguous;
    uint64_t collisions;
    uint64_t occurrence_mismatches;
    uint64_t time_mismatches;
    uint64_t speed_mismatches;
    double max_time_error_s;
    double max_speed_error_mps;
    double elapsed_s;
    int passed;
} rdsim_oracle_report;

RDSIM_API const char* rdsim_version(void);
RDSIM_API const char* rdsim_last_error(void);
RDSIM_API const char* rdsim_status_string(rdsim_status status);

/* ---- Scene sets ---------------------------------------------------------- */

RDSIM_API rdsim_status rdsim_scenes_load(const char* path, rdsim_scene_set** out);
/* ids may be NULL; scenes are then named "scene-<index>". */
RDSIM_API rdsim_status rdsim_scenes_from_array(const rdsim_scene* scenes, const char* const* ids, size_t n,
                                               rdsim_scene_set** out);
RDSIM_API rdsim_status rdsim_scenes_synthesize(uint64_t n, uint64_t seed, double gap_min_m, double gap_max_m,
                                               double speed_min_mps, double speed_max_mps, rdsim_scene_set** out);
RDSIM_API void rdsim_filter_options_default(rdsim_filter_options* options);
/* column_map_path may be NULL for the default drone-dataset mapping; stats may be NULL. */
RDSIM_API rdsim_status rdsim_scenes_extract(const char* tracks_path, const char* meta_path,
                                            const char* column_map_path, const rdsim_filter_options* options,
                                            rdsim_scene_set** out, rdsim_extract_stats* stats);
/* Appends copies of all scenes in src to dst. */
RDSIM_API rdsim_status rdsim_scenes_append(rdsim_scene_set* dst, const rdsim_scene_set* src);
RDSIM_API rdsim_status rdsim_scenes_save(const rdsim_scene_set* set, const char* path);
RDSIM_API size_t rdsim_scenes_count(const rdsim_scene_set* set);
RDSIM_API rdsim_status rdsim_scenes_get(const rdsim_scene_set* set, size_t index, rdsim_scene* out);
/* Borrowed pointer, valid while the set lives. NULL when out of range. */
RDSIM_API const char* rdsim_scenes_id(const rdsim_scene_set* set, size_t index);
RDSIM_API void rdsim_scenes_free(rdsim_scene_set* set);

/* ---- Single scenario ----------------------------------------------------- */

RDSIM_API void rdsim_sim_options_default(rdsim_sim_options* options);
RDSIM_API rdsim_status rdsim_run_scenario(const rdsim_scene* scene, const rdsim_sim_options* options,
                                          rdsim_outcome* out);
RDSIM_API rdsim_severity rdsim_classify_severity(double impact_rel_speed_mps, double threshold_kmh);

/* ---- Sweeps -------------------------------------------------------------- */

/* Defaults: reaction times 0..2.5 s in 0.5 s steps, lead -3.41 and -1.71 m/s^2,
 * models SBM and IDM, follower -3.41 m/s^2, dt 0.04 s, 60 s, 0.001 m/s. */
RDSIM_API rdsim_status rdsim_sweep_create(rdsim_sweep** out);
RDSIM_API void rdsim_sweep_free(rdsim_sweep* sweep);
RDSIM_API rdsim_status rdsim_sweep_set_reaction_times(rdsim_sweep* sweep, const double* values, size_t n);
RDSIM_API rdsim_status rdsim_sweep_set_lead_decels(rdsim_sweep* sweep, const double* values, size_t n);
RDSIM_API rdsim_status rdsim_sweep_set_models(rdsim_sweep* sweep, const rdsim_model* models, size_t n);
RDSIM_API rdsim_status rdsim_sweep_set_follower_decel(rdsim_sweep* sweep, double decel_mps2);
RDSIM_API rdsim_status rdsim_sweep_set_dt(rdsim_sweep* sweep, double dt_s);
RDSIM_API rdsim_status rdsim_sweep_set_max_duration(rdsim_sweep* sweep, double seconds);
RDSIM_API rdsim_status rdsim_sweep_set_integrator(rdsim_sweep* sweep, rdsim_integrator integrator);
RDSIM_API rdsim_status rdsim_sweep_set_workers(rdsim_sweep* sweep, unsigned workers);
RDSIM_API rdsim_status rdsim_sweep_set_severity_threshold(rdsim_sweep* sweep, double threshold_kmh);
RDSIM_API rdsim_status rdsim_sweep_set_record_per_scenario(rdsim_sweep* sweep, int enabled);

RDSIM_API rdsim_status rdsim_sweep_run(const rdsim_sweep* sweep, const rdsim_scene_set* scenes,
                                       rdsim_rate_table** out);
RDSIM_API size_t rdsim_rate_table_rows(const rdsim_rate_table* table);
RDSIM_API rdsim_status rdsim_rate_table_row(const rdsim_rate_table* table, size_t index, rdsim_rate_row* out);
RDSIM_API rdsim_status rdsim_rate_table_write(const rdsim_rate_table* table, rdsim_format format, const char* path);
RDSIM_API rdsim_status rdsim_rate_table_write_per_scenario(const rdsim_rate_table* table, const char* path);
RDSIM_API void rdsim_rate_table_free(rdsim_rate_table* table);

/* ---- Verification -------------------------------------------------------- */

/* Compares the engine against the closed-form SBM solution on n seeded random cases. */
RDSIM_API rdsim_status rdsim_oracle_check(uint64_t n, uint64_t seed, rdsim_oracle_report* out);

#ifdef __cplusplus
}
#endif

#endif /* RDSIM_RDSIM_H */
