#include "rdsim/sbm_oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "rdsim/sim_engine.hpp"

namespace rdsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Coast until brake_start_s, then constant deceleration down to standstill.
struct BrakingProfile {
    double v0;
    double decel;  // <= 0
    double brake_start_s;

    double stop_time() const { return decel < 0.0 ? brake_start_s + v0 / -decel : kInf; }

    double speed(double t) const {
        if (t <= brake_start_s) return v0;
        return std::max(0.0, v0 + decel * (t - brake_start_s));
    }

    double position(double t) const {
        if (t <= brake_start_s) return v0 * t;
        double s = t - brake_start_s;
        if (decel < 0.0) s = std::min(s, v0 / -decel);
        return v0 * brake_start_s + v0 * s + 0.5 * decel * s * s;
    }

    double accel(double t) const {
        return (t > brake_start_s && t < stop_time()) ? decel : 0.0;
    }
};

/// Smallest s in [0, len] with c + b*s + a*s^2 = 0 and c > 0, if any.
std::optional<double> first_root(double a, double b, double c, double len) {
    if (std::abs(a) < 1e-15) {
        if (b >= 0.0) return std::nullopt;
        const double s = -c / b;
        return s <= len ? std::optional<double>(s) : std::nullopt;
    }
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return std::nullopt;
    const double sq = std::sqrt(disc);
    // Numerically stable pair of roots.
    const double q = -0.5 * (b + std::copysign(sq, b));
    double r1 = q / a;
    double r2 = (q != 0.0) ? c / q : r1;
    if (r1 > r2) std::swap(r1, r2);
    for (double r : {r1, r2}) {
        if (r >= 0.0 && r <= len) return r;
    }
    return std::nullopt;
}

}  // namespace

SbmPairSolution solve_sbm_pair(const SbmPairCase& c) {
    const BrakingProfile lead{c.lead_speed_mps, c.lead_decel_mps2, 0.0};
    const BrakingProfile follower{c.follower_speed_mps, c.follower_decel_mps2, c.reaction_s};
    auto gap_at = [&](double t) { return c.gap_m + lead.position(t) - follower.position(t); };

    std::vector<double> knots{0.0, c.horizon_s, c.reaction_s, lead.stop_time(), follower.stop_time()};
    knots.erase(std::remove_if(knots.begin(), knots.end(),
                               [&](double t) { return !(t >= 0.0 && t <= c.horizon_s); }),
                knots.end());
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

    SbmPairSolution out;
    out.min_gap_m = c.gap_m;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const double t0 = knots[i];
        const double len = knots[i + 1] - t0;
        const double mid = t0 + 0.5 * len;
        const double g0 = gap_at(t0);
        const double rate = lead.speed(t0) - follower.speed(t0);
        const double half_rel_accel = 0.5 * (lead.accel(mid) - follower.accel(mid));

        out.min_gap_m = std::min({out.min_gap_m, g0, gap_at(knots[i + 1])});
        if (half_rel_accel > 0.0) {
            const double vertex = -rate / (2.0 * half_rel_accel);
            if (vertex > 0.0 && vertex < len) {
                out.min_gap_m = std::min(out.min_gap_m, g0 + rate * vertex + half_rel_accel * vertex * vertex);
            }
        }
        if (!out.collision && g0 > 0.0) {
            if (auto s = first_root(half_rel_accel, rate, g0, len)) {
                out.collision = true;
                out.collision_time_s = t0 + *s;
                out.impact_rel_speed_mps = follower.speed(out.collision_time_s) - lead.speed(out.collision_time_s);
            }
        } else if (!out.collision && g0 <= 0.0) {
            out.collision = true;
            out.collision_time_s = t0;
            out.impact_rel_speed_mps = follower.speed(t0) - lead.speed(t0);
        }
    }
    return out;
}

OracleCheckReport run_oracle_check(const OracleCheckOptions& opt) {
    const auto started = std::chrono::steady_clock::now();
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> gap_dist(0.5, 60.0);
    std::uniform_real_distribution<double> speed_dist(0.0, 50.0 / 3.6);
    std::uniform_real_distribution<double> decel_dist(-3.41, -1.705);
    const int max_delay_steps = static_cast<int>(std::floor(2.5 / opt.dt_s + 1e-9));
    std::uniform_int_distribution<int> delay_steps_dist(0, max_delay_steps);

    OracleCheckReport report;
    for (std::uint64_t i = 0; i < opt.n; ++i) {
        SbmPairCase c{};
        c.gap_m = gap_dist(rng);
        c.lead_speed_mps = speed_dist(rng);
        c.follower_speed_mps = speed_dist(rng);
        c.lead_decel_mps2 = decel_dist(rng);
        c.follower_decel_mps2 = decel_dist(rng);
        c.reaction_s = delay_steps_dist(rng) * opt.dt_s;
        c.horizon_s = 60.0;
        ++report.cases;

        const SbmPairSolution exact = solve_sbm_pair(c);
        const double band = std::max(c.lead_speed_mps, c.follower_speed_mps) * opt.dt_s;
        if (std::abs(exact.min_gap_m) <= band) {
            ++report.ambiguous;
            continue;
        }
        ++report.compared;

        StartScene scene;
        scene.follower = {0.0, c.follower_speed_mps, 5.0};
        scene.lead = {c.gap_m + 5.0, c.lead_speed_mps, 5.0};
        scene.scene_id = "oracle:" + std::to_string(i);
        SimConfig cfg;
        cfg.dt_s = opt.dt_s;
        cfg.follower_model = FollowerModel::Sbm;
        cfg.follower_sbm.decel_mps2 = c.follower_decel_mps2;
        cfg.lead_decel_mps2 = c.lead_decel_mps2;
        cfg.reaction_time_s = c.reaction_s;
        const SimOutcome sim = run_scenario(scene, cfg);

        if (sim.collision != exact.collision) {
            ++report.occurrence_mismatches;
            continue;
        }
        if (!exact.collision) continue;
        ++report.collisions;
        const double time_err = std::abs(sim.t_end_s - exact.collision_time_s);
        const double speed_err = std::abs(*sim.impact_rel_speed_mps - exact.impact_rel_speed_mps);
        report.max_time_error_s = std::max(report.max_time_error_s, time_err);
        report.max_speed_error_mps = std::max(report.max_speed_error_mps, speed_err);
        if (time_err > opt.time_tolerance_s + 1e-9) ++report.time_mismatches;
        if (speed_err > opt.speed_tolerance_mps + 1e-9) ++report.speed_mismatches;
    }
    report.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

}  // namespace rdsim
