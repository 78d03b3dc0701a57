#pragma once

#include <cstdint>
#include <optional>

namespace rdsim {

/// Continuous-time description of a sudden-braking pair: lead brakes from t = 0,
/// follower coasts for reaction_s and then brakes. Both stop at zero speed.
struct SbmPairCase {
    double gap_m;
    double lead_speed_mps;
    double follower_speed_mps;
    double lead_decel_mps2;      // <= 0
    double follower_decel_mps2;  // <= 0
    double reaction_s;
    double horizon_s = 60.0;
};

struct SbmPairSolution {
    bool collision = false;
    double collision_time_s = 0.0;
    double impact_rel_speed_mps = 0.0;
    /// Minimum of the bumper gap over [0, horizon], continuing through any overlap.
    double min_gap_m = 0.0;
};

/// Exact piecewise-quadratic solution of the gap trajectory. Does not touch the
/// time-stepping engine.
SbmPairSolution solve_sbm_pair(const SbmPairCase& c);

struct OracleCheckReport {
    std::uint64_t cases = 0;
    std::uint64_t compared = 0;        // cases outside the ambiguity band
    std::uint64_t ambiguous = 0;       // oracle min gap within +-(v_max*dt) of zero
    std::uint64_t collisions = 0;      // colliding cases among the compared
    std::uint64_t occurrence_mismatches = 0;
    std::uint64_t time_mismatches = 0;
    std::uint64_t speed_mismatches = 0;
    double max_time_error_s = 0.0;
    double max_speed_error_mps = 0.0;
    double elapsed_s = 0.0;

    bool passed() const noexcept {
        return occurrence_mismatches == 0 && time_mismatches == 0 && speed_mismatches == 0;
    }
};

struct OracleCheckOptions {
    std::uint64_t n = 10000;
    std::uint64_t seed = 7;
    double dt_s = 0.04;
    double time_tolerance_s = 0.04;
    double speed_tolerance_mps = 0.15;
};

/// Runs seeded random SBM-vs-SBM scenarios through the engine and the closed form
/// and tallies disagreements.
OracleCheckReport run_oracle_check(const OracleCheckOptions& options);

}  // namespace rdsim
