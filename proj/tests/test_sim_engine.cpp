#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <vector>

#include "rdsim/error.hpp"
#include "rdsim/sbm_oracle.hpp"
#include "rdsim/sim_engine.hpp"

using namespace rdsim;

namespace {

StartScene make_scene(double gap_m, double lead_speed, double follower_speed, double length = 5.0) {
    StartScene s;
    s.follower = {0.0, follower_speed, length};
    s.lead = {gap_m + length, lead_speed, length};
    s.scene_id = "test";
    return s;
}

SimConfig sbm_config(double reaction_s, double lead_decel = -3.41, double follower_decel = -3.41) {
    SimConfig c;
    c.follower_model = FollowerModel::Sbm;
    c.follower_sbm.decel_mps2 = follower_decel;
    c.lead_decel_mps2 = lead_decel;
    c.reaction_time_s = reaction_s;
    return c;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST(Gap, BumperToBumper) {
    const VehicleState lead{20.0, 0.0, 5.0};
    const VehicleState follower{0.0, 0.0, 4.0};
    EXPECT_DOUBLE_EQ(gap(lead, follower), 15.5);
    EXPECT_FALSE(detect_collision(lead, follower));
}

TEST(Gap, TouchingCountsAsCollision) {
    const VehicleState lead{5.0, 0.0, 5.0};
    const VehicleState follower{0.0, 0.0, 5.0};
    EXPECT_EQ(gap(lead, follower), 0.0);
    EXPECT_TRUE(detect_collision(lead, follower));
    EXPECT_TRUE(detect_collision({4.0, 0.0, 5.0}, follower));
    EXPECT_FALSE(detect_collision({5.0 + 1e-9, 0.0, 5.0}, follower));
}

TEST(Integrate, SemiImplicitStep) {
    const VehicleState s = integrate_semi_implicit({0.0, 1.0, 5.0}, -3.41, 0.04);
    EXPECT_NEAR(s.speed_mps, 0.8636, 1e-12);
    EXPECT_NEAR(s.position_m, 0.034544, 1e-12);
}

TEST(Integrate, SemiImplicitClampsAtZeroSpeed) {
    const VehicleState s = integrate_semi_implicit({2.0, 0.05, 5.0}, -3.41, 0.04);
    EXPECT_EQ(s.speed_mps, 0.0);
    EXPECT_EQ(s.position_m, 2.0);
    const VehicleState still = integrate_semi_implicit({2.0, 0.0, 5.0}, -3.41, 0.04);
    EXPECT_EQ(still.speed_mps, 0.0);
    EXPECT_EQ(still.position_m, 2.0);
}

TEST(Integrate, ExactStep) {
    const VehicleState s = integrate_exact({0.0, 1.0, 5.0}, -3.41, 0.04);
    EXPECT_NEAR(s.speed_mps, 0.8636, 1e-12);
    EXPECT_NEAR(s.position_m, 0.5 * (1.0 + 0.8636) * 0.04, 1e-12);
    const VehicleState up = integrate_exact({1.0, 2.0, 5.0}, 0.5, 0.1);
    EXPECT_NEAR(up.speed_mps, 2.05, 1e-12);
    EXPECT_NEAR(up.position_m, 1.0 + 2.0 * 0.1 + 0.5 * 0.5 * 0.01, 1e-12);
}

TEST(Integrate, ExactStopsMidStep) {
    const VehicleState s = integrate_exact({2.0, 0.05, 5.0}, -3.41, 0.04);
    EXPECT_EQ(s.speed_mps, 0.0);
    EXPECT_NEAR(s.position_m, 2.0 + 0.05 * 0.05 / (2.0 * 3.41), 1e-15);
    const VehicleState still = integrate_exact({2.0, 0.0, 5.0}, -3.41, 0.04);
    EXPECT_EQ(still.speed_mps, 0.0);
    EXPECT_EQ(still.position_m, 2.0);
}

TEST(Integrate, DispatchesOnScheme) {
    const VehicleState in{0.0, 1.0, 5.0};
    EXPECT_EQ(integrate(in, -3.41, 0.04).position_m, integrate_exact(in, -3.41, 0.04).position_m);
    EXPECT_EQ(integrate(in, -3.41, 0.04, Integrator::SemiImplicitEuler).position_m,
              integrate_semi_implicit(in, -3.41, 0.04).position_m);
}

TEST(RunScenario, BothStoppedEndsAfterOneStep) {
    const SimOutcome o = run_scenario(make_scene(10.0, 0.0, 0.0), sbm_config(1.0));
    EXPECT_EQ(o.terminated_by, Termination::AllStandstill);
    EXPECT_FALSE(o.collision);
    EXPECT_FALSE(o.impact_rel_speed_mps.has_value());
    EXPECT_NEAR(o.t_end_s, 0.04, 1e-12);
    EXPECT_EQ(o.min_gap_m, 10.0);
}

TEST(RunScenario, ShortGapCollidesAtClosedFormTime) {
    const double v = 50.0 / 3.6;
    // One second of coasting closes 1.705 m and opens a 3.41 m/s closing speed that
    // persists while both brake, until the lead stops at v / 3.41 s.
    const double t_expected = 1.0 + (10.0 - 0.5 * 3.41 * 1.0) / 3.41;
    const SimOutcome o = run_scenario(make_scene(10.0, v, v), sbm_config(1.0));
    ASSERT_TRUE(o.collision);
    EXPECT_EQ(o.terminated_by, Termination::Collision);
    EXPECT_NEAR(o.t_end_s, t_expected, 0.04);
    EXPECT_GE(o.t_end_s, t_expected - 1e-9);
    ASSERT_TRUE(o.impact_rel_speed_mps.has_value());
    EXPECT_NEAR(*o.impact_rel_speed_mps, 3.41, 3.41 * 0.04);
    EXPECT_LE(o.min_gap_m, 0.0);

    const SbmPairSolution ref = solve_sbm_pair({10.0, v, v, -3.41, -3.41, 1.0});
    ASSERT_TRUE(ref.collision);
    EXPECT_NEAR(ref.collision_time_s, t_expected, 1e-9);
    EXPECT_NEAR(ref.impact_rel_speed_mps, 3.41, 1e-9);
}

TEST(RunScenario, LongGapNeverCollides) {
    const double v = 50.0 / 3.6;
    const SimOutcome o = run_scenario(make_scene(40.0, v, v), sbm_config(1.0));
    EXPECT_FALSE(o.collision);
    EXPECT_EQ(o.terminated_by, Termination::AllStandstill);
    // The follower travels v * 1 s further than the lead.
    EXPECT_NEAR(o.min_gap_m, 40.0 - v * 1.0, 0.01);
    EXPECT_NEAR(o.t_end_s, 1.0 + v / 3.41, 0.041);
}

TEST(RunScenario, MaxDurationTerminates) {
    SimConfig c = sbm_config(0.0, 0.0, 0.0);
    c.max_duration_s = 1.0;
    const SimOutcome o = run_scenario(make_scene(10.0, 5.0, 5.0), c);
    EXPECT_EQ(o.terminated_by, Termination::MaxDuration);
    EXPECT_NEAR(o.t_end_s, 1.0, 1e-9);
    EXPECT_NEAR(o.min_gap_m, 10.0, 1e-9);
}

TEST(RunScenario, CollisionWinsOverStandstill) {
    // Follower stops on the lead's bumper in the very step both come to rest.
    StartScene s = make_scene(0.001, 0.0, 0.02);
    SimConfig c = sbm_config(0.0);
    const SimOutcome o = run_scenario(s, c);
    EXPECT_EQ(o.terminated_by, Termination::AllStandstill);
    s = make_scene(1e-6, 0.0, 0.12);
    const SimOutcome hit = run_scenario(s, c);
    EXPECT_EQ(hit.terminated_by, Termination::Collision);
    ASSERT_TRUE(hit.impact_rel_speed_mps.has_value());
    // Both are at rest after the step, so the impact speed is zero.
    EXPECT_EQ(*hit.impact_rel_speed_mps, 0.0);
}

TEST(RunScenario, DeterministicBitForBit) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> g(2.0, 60.0), v(0.0, 13.89);
    for (int i = 0; i < 200; ++i) {
        const StartScene s = make_scene(g(rng), v(rng), v(rng));
        for (FollowerModel m : {FollowerModel::Sbm, FollowerModel::Idm}) {
            SimConfig c = sbm_config(1.5);
            c.follower_model = m;
            const SimOutcome a = run_scenario(s, c);
            const SimOutcome b = run_scenario(s, c);
            ASSERT_EQ(a.terminated_by, b.terminated_by);
            ASSERT_EQ(a.collision, b.collision);
            ASSERT_TRUE(same_bits(a.t_end_s, b.t_end_s));
            ASSERT_TRUE(same_bits(a.min_gap_m, b.min_gap_m));
            ASSERT_EQ(a.impact_rel_speed_mps.has_value(), b.impact_rel_speed_mps.has_value());
            if (a.impact_rel_speed_mps) ASSERT_TRUE(same_bits(*a.impact_rel_speed_mps, *b.impact_rel_speed_mps));
        }
    }
}

TEST(RunScenario, SbmCollisionsMonotoneInReactionAndLeadBraking) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> g(2.0, 60.0), v(0.0, 13.89);
    const double taus[] = {0.0, 0.5, 1.0, 1.5, 2.0, 2.5};
    for (int i = 0; i < 500; ++i) {
        const StartScene s = make_scene(g(rng), v(rng), v(rng));
        bool prev = false;
        for (double tau : taus) {
            const bool hit = run_scenario(s, sbm_config(tau)).collision;
            ASSERT_TRUE(hit || !prev) << "scene " << i << " tau " << tau;
            prev = hit;
        }
        for (double tau : taus) {
            const bool hard = run_scenario(s, sbm_config(tau, -3.41)).collision;
            const bool soft = run_scenario(s, sbm_config(tau, -1.71)).collision;
            ASSERT_TRUE(hard || !soft) << "scene " << i << " tau " << tau;
        }
    }
}

TEST(RunScenario, TrajectorySanity) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> g(0.5, 60.0), v(0.0, 13.89);
    for (int i = 0; i < 300; ++i) {
        const StartScene s = make_scene(g(rng), v(rng), v(rng));
        for (FollowerModel m : {FollowerModel::Sbm, FollowerModel::Idm}) {
            SimConfig c = sbm_config(i % 6 * 0.5);
            c.follower_model = m;
            c.capture_trajectory = true;
            const SimOutcome o = run_scenario(s, c);
            ASSERT_LE(o.min_gap_m, gap(s.lead, s.follower));
            ASSERT_GE(o.trajectory.size(), 2u);
            EXPECT_EQ(o.trajectory.front().t_s, 0.0);
            EXPECT_NEAR(o.trajectory.back().t_s, o.t_end_s, 1e-12);
            for (std::size_t k = 1; k < o.trajectory.size(); ++k) {
                const auto& p = o.trajectory[k - 1];
                const auto& q = o.trajectory[k];
                ASSERT_GE(q.lead.position_m, p.lead.position_m);
                ASSERT_GE(q.follower.position_m, p.follower.position_m);
                ASSERT_GE(q.lead.speed_mps, 0.0);
                ASSERT_GE(q.follower.speed_mps, 0.0);
                ASSERT_GE(q.follower_command_mps2, -3.41);
            }
        }
    }
}

TEST(RunScenario, ReactionDelayHoldsFollowerSpeed) {
    SimConfig c = sbm_config(0.5);
    c.capture_trajectory = true;
    const SimOutcome o = run_scenario(make_scene(30.0, 10.0, 10.0), c);
    // 13 delay slots: the first 13 steps coast.
    for (std::size_t k = 1; k <= 13; ++k) EXPECT_EQ(o.trajectory[k].follower.speed_mps, 10.0) << k;
    EXPECT_LT(o.trajectory[14].follower.speed_mps, 10.0);
    EXPECT_LT(o.trajectory[1].lead.speed_mps, 10.0);
}

TEST(RunScenario, IdmFollowerWithoutDelayKeepsClearOfBrakingLead) {
    // Lead and follower start at the same speed with at least the IDM equilibrium gap.
    const IdmParams p;
    int runs = 0;
    for (double v = 1.0; v <= 13.89 + 1e-9; v += 0.25) {
        for (double extra : {0.0, 0.5, 2.0, 10.0}) {
            const double g0 = p.min_spacing_m + v * p.headway_s + extra;
            SimConfig c = sbm_config(0.0);
            c.follower_model = FollowerModel::Idm;
            const SimOutcome o = run_scenario(make_scene(g0, v, v), c);
            EXPECT_FALSE(o.collision) << "v=" << v << " gap=" << g0;
            EXPECT_GT(o.min_gap_m, 0.0);
            ++runs;
        }
    }
    EXPECT_GT(runs, 200);
}

TEST(RunScenario, NonFiniteStateIsNumericalFailure) {
    StartScene s = make_scene(10.0, 5.0, std::numeric_limits<double>::infinity());
    try {
        (void)run_scenario(s, sbm_config(0.0));
        FAIL() << "expected NumericalFailure";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NumericalFailure);
        EXPECT_EQ(e.category(), ErrorCategory::Numerical);
    }
}

TEST(RunScenario, RejectsInvalidScenesAndConfigs) {
    auto code_of = [](const StartScene& s, const SimConfig& c) {
        try {
            (void)run_scenario(s, c);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::IoFailure;
    };
    EXPECT_EQ(code_of(make_scene(0.0, 1.0, 1.0), sbm_config(0.0)), ErrorCode::InvalidScene);
    EXPECT_EQ(code_of(make_scene(-2.0, 1.0, 1.0), sbm_config(0.0)), ErrorCode::InvalidScene);
    EXPECT_EQ(code_of(make_scene(5.0, -1.0, 1.0), sbm_config(0.0)), ErrorCode::InvalidScene);
    SimConfig bad = sbm_config(0.0);
    bad.dt_s = 0.0;
    EXPECT_EQ(code_of(make_scene(5.0, 1.0, 1.0), bad), ErrorCode::InvalidArgument);
    bad = sbm_config(-0.5);
    EXPECT_EQ(code_of(make_scene(5.0, 1.0, 1.0), bad), ErrorCode::InvalidArgument);
    bad = sbm_config(0.0, 1.0);
    EXPECT_EQ(code_of(make_scene(5.0, 1.0, 1.0), bad), ErrorCode::InvalidArgument);
}

TEST(Names, ParseAndPrint) {
    EXPECT_STREQ(to_string(FollowerModel::Sbm), "SBM");
    EXPECT_STREQ(to_string(FollowerModel::Idm), "IDM");
    EXPECT_EQ(parse_follower_model("idm"), FollowerModel::Idm);
    EXPECT_EQ(parse_follower_model("SbM"), FollowerModel::Sbm);
    EXPECT_FALSE(parse_follower_model("gipps").has_value());
    EXPECT_EQ(parse_integrator("exact"), Integrator::ExactConstantAccel);
    EXPECT_EQ(parse_integrator("semi-implicit"), Integrator::SemiImplicitEuler);
    EXPECT_FALSE(parse_integrator("rk4").has_value());
    EXPECT_STREQ(to_string(Termination::Collision), "collision");
    EXPECT_STREQ(to_string(Termination::AllStandstill), "standstill");
    EXPECT_STREQ(to_string(Termination::MaxDuration), "max_duration");
}

TEST(Oracle, ClosedFormCases) {
    // Lead already stopped, follower brakes at once: stops after v^2 / (2|b|).
    SbmPairSolution s = solve_sbm_pair({20.0, 0.0, 10.0, -3.41, -3.41, 0.0});
    EXPECT_FALSE(s.collision);
    EXPECT_NEAR(s.min_gap_m, 20.0 - 100.0 / (2.0 * 3.41), 1e-9);

    // One second of coasting covers the whole 10 m gap.
    s = solve_sbm_pair({10.0, 0.0, 10.0, -3.41, -3.41, 1.0});
    ASSERT_TRUE(s.collision);
    EXPECT_NEAR(s.collision_time_s, 1.0, 1e-9);
    EXPECT_NEAR(s.impact_rel_speed_mps, 10.0, 1e-9);

    // A slower follower never closes in.
    s = solve_sbm_pair({3.0, 10.0, 5.0, -1.71, -3.41, 0.0});
    EXPECT_FALSE(s.collision);
    EXPECT_NEAR(s.min_gap_m, 3.0, 1e-12);
}

TEST(Oracle, EngineAgreesWithClosedForm) {
    OracleCheckOptions opt;
    opt.n = 2000;
    opt.seed = 123;
    const OracleCheckReport r = run_oracle_check(opt);
    EXPECT_EQ(r.cases, 2000u);
    EXPECT_EQ(r.compared + r.ambiguous, r.cases);
    EXPECT_GT(r.collisions, 0u);
    EXPECT_TRUE(r.passed()) << r.occurrence_mismatches << " " << r.time_mismatches << " " << r.speed_mismatches;
}
