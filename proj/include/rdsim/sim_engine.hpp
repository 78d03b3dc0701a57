#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rdsim/driver_models.hpp"

namespace rdsim {

/// Initial condition of one scenario on a common 1-D axis.
struct StartScene {
    VehicleState lead;
    VehicleState follower;
    std::string scene_id;
};

enum class FollowerModel { Sbm, Idm };

const char* to_string(FollowerModel model) noexcept;
/// Accepts "sbm"/"idm" in any case.
std::optional<FollowerModel> parse_follower_model(std::string_view text);

enum class Integrator {
    /// Exact update for an acceleration held constant over the step; stops at zero speed
    /// mid-step instead of overshooting.
    ExactConstantAccel,
    /// v' = max(v + a*dt, 0); x' = x + v'*dt.
    SemiImplicitEuler,
};

const char* to_string(Integrator scheme) noexcept;
std::optional<Integrator> parse_integrator(std::string_view text);

struct SimConfig {
    double dt_s = 0.04;
    double max_duration_s = 60.0;
    double standstill_eps_mps = 0.001;
    double lead_decel_mps2 = -3.41;
    FollowerModel follower_model = FollowerModel::Sbm;
    IdmParams follower_idm{};
    SbmParams follower_sbm{};
    double reaction_time_s = 0.0;
    Integrator integrator = Integrator::ExactConstantAccel;
    bool capture_trajectory = false;
};

void validate(const SimConfig& config);

enum class Termination { Collision, AllStandstill, MaxDuration };

const char* to_string(Termination reason) noexcept;

struct TrajectorySample {
    double t_s;
    VehicleState lead;
    VehicleState follower;
    double follower_command_mps2;
};

struct SimOutcome {
    Termination terminated_by = Termination::MaxDuration;
    bool collision = false;
    std::optional<double> impact_rel_speed_mps;
    double t_end_s = 0.0;
    double min_gap_m = 0.0;
    /// Filled only when SimConfig::capture_trajectory is set; includes t = 0.
    std::vector<TrajectorySample> trajectory;
};

/// Bumper-to-bumper spacing between the follower's front and the lead's rear.
inline double gap(const VehicleState& lead, const VehicleState& follower) noexcept {
    return (lead.position_m - follower.position_m) - 0.5 * (lead.length_m + follower.length_m);
}

/// Touching (gap == 0) counts as a collision.
inline bool detect_collision(const VehicleState& lead, const VehicleState& follower) noexcept {
    return gap(lead, follower) <= 0.0;
}

inline VehicleState integrate_semi_implicit(const VehicleState& state, double accel_mps2, double dt_s) noexcept {
    VehicleState next = state;
    next.speed_mps = state.speed_mps + accel_mps2 * dt_s;
    if (next.speed_mps < 0.0) next.speed_mps = 0.0;
    next.position_m = state.position_m + next.speed_mps * dt_s;
    return next;
}

inline VehicleState integrate_exact(const VehicleState& state, double accel_mps2, double dt_s) noexcept {
    VehicleState next = state;
    const double v = state.speed_mps;
    const double v_end = v + accel_mps2 * dt_s;
    if (v_end >= 0.0) {
        next.speed_mps = v_end;
        next.position_m = state.position_m + 0.5 * (v + v_end) * dt_s;
    } else {
        // Reaches standstill at t = v / |a| < dt and stays there.
        next.speed_mps = 0.0;
        next.position_m = state.position_m + 0.5 * v * (v / -accel_mps2);
    }
    return next;
}

inline VehicleState integrate(const VehicleState& state, double accel_mps2, double dt_s,
                              Integrator scheme = Integrator::ExactConstantAccel) noexcept {
    return scheme == Integrator::SemiImplicitEuler ? integrate_semi_implicit(state, accel_mps2, dt_s)
                                                   : integrate_exact(state, accel_mps2, dt_s);
}

/// Throws InvalidScene if the lead is not ahead with a positive gap, or speeds/lengths are invalid.
void validate(const StartScene& scene);

/// Simulates the lead braking from t = 0 and the follower reacting through its model.
/// Throws NumericalFailure on non-finite state.
SimOutcome run_scenario(const StartScene& scene, const SimConfig& config);

}  // namespace rdsim
