#include "rdsim/driver_models.hpp"

#include <cmath>
#include <string>

#include "rdsim/error.hpp"

namespace rdsim {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

}  // namespace

void validate(const IdmParams& p) {
    require(p.a_max_mps2 > 0.0, "IDM a_max must be > 0");
    require(p.b_comfort_mps2 > 0.0, "IDM b must be a positive magnitude");
    require(p.v_desired_mps > 0.0, "IDM desired speed must be > 0");
    require(p.headway_s >= 0.0, "IDM headway must be >= 0");
    require(p.min_spacing_m >= 0.0, "IDM minimum spacing must be >= 0");
    require(p.accel_exponent > 0.0, "IDM acceleration exponent must be > 0");
    require(p.s1_m == 0.0, "IDM s1 must be 0");
    require(p.decel_floor_mps2 < 0.0, "IDM deceleration floor must be < 0");
}

void validate(const SbmParams& p) {
    require(p.decel_mps2 <= 0.0, "SBM deceleration must be <= 0");
}

double idm_desired_gap(double v, double dv, const IdmParams& p) {
    return p.min_spacing_m + v * p.headway_s + v * dv / (2.0 * std::sqrt(p.a_max_mps2 * p.b_comfort_mps2));
}

double idm_command(double v, const std::optional<LeadInfo>& lead, const IdmParams& p) {
    const double free_term = std::pow(v / p.v_desired_mps, p.accel_exponent);
    double interaction_term = 0.0;
    if (lead) {
        if (!(lead->gap_m > 0.0)) {
            throw Error(ErrorCode::InvalidArgument,
                        "IDM gap must be > 0, got " + std::to_string(lead->gap_m));
        }
        const double ratio = idm_desired_gap(v, v - lead->lead_speed_mps, p) / lead->gap_m;
        interaction_term = ratio * ratio;
    }
    return p.a_max_mps2 * (1.0 - free_term - interaction_term);
}

DelayLine::DelayLine(double delay_s, double dt_s, double prefill_mps2) : delay_s_(delay_s), dt_s_(dt_s) {
    require(dt_s > 0.0 && std::isfinite(dt_s), "delay line dt must be > 0");
    require(delay_s >= 0.0 && std::isfinite(delay_s), "reaction time must be finite and >= 0");
    const auto n = static_cast<std::size_t>(std::llround(delay_s / dt_s));
    slots_.assign(n, prefill_mps2);
}

double DelayLine::step(double new_command) noexcept {
    if (slots_.empty()) return new_command;
    const double oldest = slots_[head_];
    slots_[head_] = new_command;
    head_ = (head_ + 1 == slots_.size()) ? 0 : head_ + 1;
    return oldest;
}

}  // namespace rdsim
