#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rdsim/scenes_io.hpp"
#include "rdsim/sim_engine.hpp"

namespace rdsim {

enum class Severity { S0, AtLeastS1 };

const char* to_string(Severity s) noexcept;

constexpr double kDefaultSeverityThresholdKmh = 10.0;

/// AtLeastS1 iff the impact speed is strictly larger than the threshold.
Severity classify_severity(double impact_rel_speed_mps, double threshold_kmh = kDefaultSeverityThresholdKmh);

struct SweepSpec {
    std::vector<double> reaction_times_s{0.0, 0.5, 1.0, 1.5, 2.0, 2.5};
    std::vector<double> lead_decels_mps2{-3.41, -1.71};
    std::vector<FollowerModel> follower_models{FollowerModel::Sbm, FollowerModel::Idm};
    /// SBM deceleration and IDM clamp floor of the follower.
    double follower_decel_mps2 = -3.41;
    IdmParams idm_params{};
    /// dt, max duration, standstill epsilon and integrator; per-cell fields are overwritten.
    SimConfig engine{};
    double severity_threshold_kmh = kDefaultSeverityThresholdKmh;
    bool record_per_scenario = false;
    /// 0 selects std::thread::hardware_concurrency().
    unsigned workers = 0;

    /// Both vehicles at -6.5 m/s^2, IDM follower, 1 s reaction.
    static SweepSpec emergency_6_5();
    /// Follower SBM at half the naturalistic deceleration (-1.705), lead values unchanged.
    static SweepSpec moderate_follower();
};

void validate(const SweepSpec& spec);

struct CellKey {
    FollowerModel model = FollowerModel::Sbm;
    double reaction_time_s = 0.0;
    double lead_decel_mps2 = 0.0;
    double follower_decel_mps2 = 0.0;
};

/// Engine configuration for one cell of the sweep.
SimConfig cell_config(const SweepSpec& spec, const CellKey& key);

struct RateRow {
    CellKey key;
    std::uint64_t n_scenarios = 0;
    std::uint64_t n_collisions = 0;
    std::uint64_t n_at_least_s1 = 0;
    double collision_rate_pct = 0.0;
};

struct ScenarioRecord {
    std::size_t cell = 0;
    std::string scene_id;
    Termination terminated_by = Termination::MaxDuration;
    bool collision = false;
    std::optional<double> impact_rel_speed_mps;
    std::optional<Severity> severity;
    double t_end_s = 0.0;
    double min_gap_m = 0.0;
};

struct RateTable {
    /// Ordered by model, then lead deceleration, then reaction time, as given in the SweepSpec lists.
    std::vector<RateRow> rows;
    /// Cell-major, scene order within a cell. Empty unless record_per_scenario.
    std::vector<ScenarioRecord> records;

    const RateRow* find(FollowerModel model, double reaction_time_s, double lead_decel_mps2) const;
};

/// Runs every scene through every cell. Aggregation is independent of scene order
/// and worker count. Throws NumericalFailure naming the first offending scene.
RateTable run_sweep(std::span<const StartScene> scenes, const SweepSpec& spec);

struct SceneRanges {
    double gap_min_m = 2.0;
    double gap_max_m = 60.0;
    double speed_min_mps = 0.0;
    double speed_max_mps = 50.0 / 3.6;
};

/// Uniform over the ranges, lengths fixed at 5 m; deterministic for a given seed.
/// Throws InvalidCount for n == 0 and InvalidArgument for bad ranges.
std::vector<SceneRecord> generate_synthetic_scenes(std::size_t n, std::uint64_t seed, const SceneRanges& ranges);

enum class ReportFormat { Csv, Markdown };

std::optional<ReportFormat> parse_report_format(std::string_view text);

/// CSV header: model,reaction_time_s,lead_decel_mps2,follower_decel_mps2,n_scenarios,n_collisions,collision_rate_pct
std::string render_report(const RateTable& table, ReportFormat format);
void emit_report(const RateTable& table, ReportFormat format, const std::string& out_path);

std::string render_per_scenario(const RateTable& table);
void write_per_scenario_csv(const RateTable& table, const std::string& out_path);

}  // namespace rdsim
