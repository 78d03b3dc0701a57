#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace rdsim {

/// 1-D kinematic state of one vehicle. position_m is the geometric center on the travel axis.
struct VehicleState {
    double position_m = 0.0;
    double speed_mps = 0.0;
    double length_m = 5.0;
};

/// Intelligent Driver Model parameters. Defaults are the typical urban parametrization
/// (desired speed 50 km/h). b_comfort_mps2 is stored as a positive magnitude.
struct IdmParams {
    double a_max_mps2 = 0.73;
    double b_comfort_mps2 = 1.67;
    double v_desired_mps = 50.0 / 3.6;
    double headway_s = 1.6;
    double min_spacing_m = 2.0;
    double accel_exponent = 4.0;
    double s1_m = 0.0;
    double decel_floor_mps2 = -3.41;
};

/// Sudden Braking Model: a constant commanded acceleration (<= 0) once the reaction delay expires.
struct SbmParams {
    double decel_mps2 = -3.41;
};

/// Bumper gap to the lead and the lead's speed, as seen by an IDM follower.
struct LeadInfo {
    double gap_m = 0.0;
    double lead_speed_mps = 0.0;
};

/// Throws InvalidArgument if any field is outside its documented range.
void validate(const IdmParams& params);
void validate(const SbmParams& params);

/// Desired dynamic gap s*: s0 + v*T + v*dv / (2*sqrt(a*b)), with dv = v - v_lead.
double idm_desired_gap(double self_speed_mps, double approach_rate_mps, const IdmParams& params);

/// Raw IDM acceleration, unclamped. Without a lead only the free-road term acts.
/// A non-positive gap is a contract violation and throws InvalidArgument.
double idm_command(double self_speed_mps, const std::optional<LeadInfo>& lead, const IdmParams& params);

inline double sbm_command(const SbmParams& params) noexcept { return params.decel_mps2; }

/// max(raw, floor): keeps decelerations from diverging.
inline double clamp_acceleration(double raw_mps2, double floor_mps2) noexcept {
    return raw_mps2 < floor_mps2 ? floor_mps2 : raw_mps2;
}

/// Fixed-length FIFO on the commanded acceleration. Holds round(delay/dt) slots,
/// pre-filled with 0.0 so the follower coasts during the reaction time.
class DelayLine {
public:
    DelayLine(double delay_s, double dt_s, double prefill_mps2 = 0.0);

    /// Pushes new_command and returns the command pushed length() steps earlier.
    double step(double new_command_mps2) noexcept;

    std::size_t length() const noexcept { return slots_.size(); }
    double delay_s() const noexcept { return delay_s_; }
    /// Effective delay after quantization to whole steps.
    double quantized_delay_s() const noexcept { return static_cast<double>(slots_.size()) * dt_s_; }

private:
    double delay_s_;
    double dt_s_;
    std::vector<double> slots_;
    std::size_t head_ = 0;
};

}  // namespace rdsim
