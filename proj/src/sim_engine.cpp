#include "rdsim/sim_engine.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "rdsim/error.hpp"

namespace rdsim {

const char* to_string(FollowerModel model) noexcept {
    return model == FollowerModel::Sbm ? "SBM" : "IDM";
}

std::optional<FollowerModel> parse_follower_model(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "sbm") return FollowerModel::Sbm;
    if (lower == "idm") return FollowerModel::Idm;
    return std::nullopt;
}

const char* to_string(Integrator scheme) noexcept {
    return scheme == Integrator::SemiImplicitEuler ? "semi-implicit" : "exact";
}

std::optional<Integrator> parse_integrator(std::string_view text) {
    if (text == "exact") return Integrator::ExactConstantAccel;
    if (text == "semi-implicit") return Integrator::SemiImplicitEuler;
    return std::nullopt;
}

const char* to_string(Termination reason) noexcept {
    switch (reason) {
        case Termination::Collision: return "collision";
        case Termination::AllStandstill: return "standstill";
        case Termination::MaxDuration: return "max_duration";
    }
    return "unknown";
}

void validate(const SimConfig& c) {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw Error(ErrorCode::InvalidArgument, what);
    };
    require(c.dt_s > 0.0 && std::isfinite(c.dt_s), "dt must be > 0");
    require(c.max_duration_s > 0.0 && std::isfinite(c.max_duration_s), "max duration must be > 0");
    require(c.standstill_eps_mps >= 0.0, "standstill epsilon must be >= 0");
    require(c.lead_decel_mps2 <= 0.0, "lead deceleration must be <= 0");
    require(c.reaction_time_s >= 0.0 && std::isfinite(c.reaction_time_s), "reaction time must be >= 0");
    if (c.follower_model == FollowerModel::Idm) {
        validate(c.follower_idm);
    } else {
        validate(c.follower_sbm);
    }
}

void validate(const StartScene& s) {
    auto require = [&](bool ok, const char* what) {
        if (!ok) throw Error(ErrorCode::InvalidScene, std::string(what) + " (scene " + s.scene_id + ")");
    };
    require(s.lead.length_m > 0.0 && s.follower.length_m > 0.0, "vehicle lengths must be > 0");
    require(s.lead.speed_mps >= 0.0 && s.follower.speed_mps >= 0.0, "speeds must be >= 0");
    require(s.lead.position_m > s.follower.position_m, "lead must be ahead of follower");
    require(gap(s.lead, s.follower) > 0.0, "initial gap must be > 0");
}

namespace {

bool finite(const VehicleState& v) {
    return std::isfinite(v.position_m) && std::isfinite(v.speed_mps);
}

}  // namespace

SimOutcome run_scenario(const StartScene& scene, const SimConfig& config) {
    validate(config);
    validate(scene);

    const bool idm = config.follower_model == FollowerModel::Idm;
    const double floor = idm ? config.follower_idm.decel_floor_mps2 : config.follower_sbm.decel_mps2;
    const double dt = config.dt_s;
    const long long max_steps = std::max<long long>(1, std::llround(std::ceil(config.max_duration_s / dt - 1e-9)));

    DelayLine reaction(config.reaction_time_s, dt);
    VehicleState lead = scene.lead;
    VehicleState follower = scene.follower;

    SimOutcome out;
    out.min_gap_m = gap(lead, follower);
    if (config.capture_trajectory) {
        out.trajectory.push_back({0.0, lead, follower, 0.0});
    }

    for (long long step = 1;; ++step) {
        double raw;
        if (idm) {
            raw = idm_command(follower.speed_mps, LeadInfo{gap(lead, follower), lead.speed_mps},
                              config.follower_idm);
        } else {
            raw = sbm_command(config.follower_sbm);
        }
        const double follower_accel = clamp_acceleration(reaction.step(raw), floor);

        lead = integrate(lead, config.lead_decel_mps2, dt, config.integrator);
        follower = integrate(follower, follower_accel, dt, config.integrator);
        const double t = static_cast<double>(step) * dt;

        if (!finite(lead) || !finite(follower) || !std::isfinite(follower_accel)) {
            throw Error(ErrorCode::NumericalFailure,
                        "non-finite state at t=" + std::to_string(t) + " in scene " + scene.scene_id);
        }

        const double g = gap(lead, follower);
        out.min_gap_m = std::min(out.min_gap_m, g);
        if (config.capture_trajectory) {
            out.trajectory.push_back({t, lead, follower, follower_accel});
        }

        out.t_end_s = t;
        if (g <= 0.0) {
            out.terminated_by = Termination::Collision;
            out.collision = true;
            out.impact_rel_speed_mps = std::max(0.0, follower.speed_mps - lead.speed_mps);
            return out;
        }
        if (lead.speed_mps <= config.standstill_eps_mps && follower.speed_mps <= config.standstill_eps_mps) {
            out.terminated_by = Termination::AllStandstill;
            return out;
        }
        if (step >= max_steps) {
            out.terminated_by = Termination::MaxDuration;
            return out;
        }
    }
}

}  // namespace rdsim
