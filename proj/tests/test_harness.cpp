#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rdsim/error.hpp"
#include "rdsim/harness.hpp"
#include "rdsim/scenes_io.hpp"

using namespace rdsim;
namespace fs = std::filesystem;

namespace {

std::vector<StartScene> synth(std::size_t n, std::uint64_t seed) {
    return scenes_only(generate_synthetic_scenes(n, seed, SceneRanges{}));
}

std::string temp_file(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("rdsim_harness_" + std::to_string(std::random_device{}()));
    fs::create_directories(dir);
    return (dir / name).string();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

RateRow row(FollowerModel m, double tau, double lead, std::uint64_t n, std::uint64_t hits) {
    RateRow r;
    r.key = {m, tau, lead, -3.41};
    r.n_scenarios = n;
    r.n_collisions = hits;
    r.collision_rate_pct = 100.0 * static_cast<double>(hits) / static_cast<double>(n);
    return r;
}

}  // namespace

TEST(Severity, StrictThresholdBoundaries) {
    const double threshold = 10.0 / 3.6;
    EXPECT_EQ(classify_severity(0.0), Severity::S0);
    EXPECT_EQ(classify_severity(threshold), Severity::S0);
    EXPECT_EQ(classify_severity(std::nextafter(threshold, 100.0)), Severity::AtLeastS1);
    EXPECT_EQ(classify_severity(threshold + 1e-9), Severity::AtLeastS1);
    EXPECT_EQ(classify_severity(threshold - 1e-9), Severity::S0);
    EXPECT_EQ(classify_severity(20.0), Severity::AtLeastS1);
    EXPECT_EQ(classify_severity(5.0 / 3.6, 5.0), Severity::S0);
    EXPECT_EQ(classify_severity(5.1 / 3.6, 5.0), Severity::AtLeastS1);
    EXPECT_EQ(classify_severity(0.0, 0.0), Severity::S0);
    EXPECT_STREQ(to_string(Severity::S0), "S0");
    EXPECT_STREQ(to_string(Severity::AtLeastS1), "S1+");
}

TEST(Synthetic, DeterministicAndWithinRanges) {
    const SceneRanges r{3.0, 7.0, 1.0, 2.0};
    const auto a = generate_synthetic_scenes(500, 9, r);
    const auto b = generate_synthetic_scenes(500, 9, r);
    ASSERT_EQ(a.size(), 500u);
    EXPECT_EQ(scenes_csv(a), scenes_csv(b));
    EXPECT_NE(scenes_csv(a), scenes_csv(generate_synthetic_scenes(500, 10, r)));
    for (const auto& s : a) {
        const double g = gap(s.scene.lead, s.scene.follower);
        EXPECT_GE(g, 3.0 - 1e-12);
        EXPECT_LE(g, 7.0 + 1e-12);
        EXPECT_GE(s.scene.follower.speed_mps, 1.0);
        EXPECT_LE(s.scene.follower.speed_mps, 2.0);
        EXPECT_GE(s.scene.lead.speed_mps, 1.0);
        EXPECT_LE(s.scene.lead.speed_mps, 2.0);
        EXPECT_EQ(s.scene.lead.length_m, 5.0);
        EXPECT_EQ(s.scene.follower.length_m, 5.0);
        EXPECT_EQ(s.follower_id, -1);
    }
    EXPECT_EQ(a[3].scene.scene_id, "synth-9-3");
}

TEST(Synthetic, RejectsZeroCountAndBadRanges) {
    try {
        (void)generate_synthetic_scenes(0, 1, SceneRanges{});
        FAIL() << "expected InvalidCount";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidCount);
        EXPECT_EQ(e.category(), ErrorCategory::Usage);
    }
    EXPECT_THROW((void)generate_synthetic_scenes(5, 1, SceneRanges{0.0, 10.0, 0.0, 1.0}), Error);
    EXPECT_THROW((void)generate_synthetic_scenes(5, 1, SceneRanges{5.0, 4.0, 0.0, 1.0}), Error);
    EXPECT_THROW((void)generate_synthetic_scenes(5, 1, SceneRanges{1.0, 4.0, 2.0, 1.0}), Error);
}

TEST(ScenesIo, RoundTrip) {
    const auto scenes = generate_synthetic_scenes(200, 3, SceneRanges{});
    const std::string path = temp_file("scenes.csv");
    write_scenes_csv(path, scenes);
    const auto back = read_scenes_csv(path);
    ASSERT_EQ(back.size(), scenes.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        EXPECT_EQ(back[i].scene.scene_id, scenes[i].scene.scene_id);
        EXPECT_EQ(back[i].scene.follower.speed_mps, scenes[i].scene.follower.speed_mps);
        EXPECT_EQ(back[i].scene.lead.speed_mps, scenes[i].scene.lead.speed_mps);
        EXPECT_NEAR(gap(back[i].scene.lead, back[i].scene.follower), gap(scenes[i].scene.lead, scenes[i].scene.follower),
                    1e-12);
    }
    // Writing the re-read scenes reproduces the file byte for byte.
    EXPECT_EQ(scenes_csv(back), read_text(path));
    fs::remove_all(fs::path(path).parent_path());
}

TEST(ScenesIo, Errors) {
    const std::string path = temp_file("bad.csv");
    const std::string header =
        "scene_id,follower_id,lead_id,frame,gap_m,follower_speed_mps,lead_speed_mps,lead_length_m,follower_length_m\n";
    auto code_of = [&](const std::string& text) {
        write_text(path, text);
        try {
            (void)read_scenes_csv(path);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::IoFailure;
    };
    EXPECT_EQ(code_of("scene_id,gap_m\nx,1\n"), ErrorCode::MissingColumn);
    EXPECT_EQ(code_of(header + "a,1,2,3,abc,1,1,5,5\n"), ErrorCode::MalformedRow);
    EXPECT_EQ(code_of(header + "a,1,2,3,-1,1,1,5,5\n"), ErrorCode::InvalidScene);
    EXPECT_EQ(code_of(header + "a,1,2,3,4,-1,1,5,5\n"), ErrorCode::InvalidScene);
    write_text(path, header + "a,1,2,3,4,1,1,5,5\nb,1,2,3,0,1,1,5,5\n");
    try {
        (void)read_scenes_csv(path);
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("bad.csv:3"), std::string::npos) << e.what();
    }
    EXPECT_THROW((void)read_scenes_csv(path + ".missing"), Error);
    fs::remove_all(fs::path(path).parent_path());
}

TEST(Report, CsvRowFormat) {
    RateTable t;
    t.rows.push_back(row(FollowerModel::Sbm, 0.0, -3.41, 10000, 3));
    t.rows.push_back(row(FollowerModel::Idm, 2.5, -1.71, 186000, 160127));
    const std::string csv = render_report(t, ReportFormat::Csv);
    EXPECT_EQ(csv,
              "model,reaction_time_s,lead_decel_mps2,follower_decel_mps2,n_scenarios,n_collisions,collision_rate_pct\n"
              "SBM,0.0,-3.41,-3.41,10000,3,0.03\n"
              "IDM,2.5,-1.71,-3.41,186000,160127,86.09\n");
}

TEST(Report, MarkdownLayout) {
    RateTable t;
    for (double lead : {-3.41, -1.71}) {
        for (double tau : {0.0, 0.5}) {
            t.rows.push_back(row(FollowerModel::Sbm, tau, lead, 100, tau > 0 ? 10 : 0));
        }
    }
    for (double lead : {-3.41, -1.71}) {
        for (double tau : {0.0, 0.5}) {
            t.rows.push_back(row(FollowerModel::Idm, tau, lead, 100, tau > 0 ? 25 : 1));
        }
    }
    const std::string md = render_report(t, ReportFormat::Markdown);
    EXPECT_NE(md.find("### Collision rate, lead deceleration -3.41 m/s^2, follower deceleration -3.41 m/s^2"),
              std::string::npos);
    EXPECT_NE(md.find("### Collision rate, lead deceleration -1.71 m/s^2"), std::string::npos);
    EXPECT_NE(md.find("| Reaction time [s] | Sudden Braking Model [%] | Intelligent Driver Model [%] |"),
              std::string::npos);
    EXPECT_NE(md.find("| 0.0 | 0.00 | 1.00 |"), std::string::npos) << md;
    EXPECT_NE(md.find("| 0.5 | 10.00 | 25.00 |"), std::string::npos) << md;
    EXPECT_LT(md.find("-3.41 m/s^2,"), md.find("-1.71 m/s^2,"));
}

TEST(Report, EmptyTableIsAnError) {
    const RateTable t;
    try {
        (void)render_report(t, ReportFormat::Csv);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyTable);
    }
    EXPECT_EQ(parse_report_format("md"), ReportFormat::Markdown);
    EXPECT_EQ(parse_report_format("csv"), ReportFormat::Csv);
    EXPECT_FALSE(parse_report_format("xlsx").has_value());
}

TEST(Sweep, CellOrderAndCounts) {
    const auto scenes = synth(300, 5);
    SweepSpec spec;
    spec.workers = 2;
    const RateTable t = run_sweep(scenes, spec);
    ASSERT_EQ(t.rows.size(), 24u);
    std::size_t i = 0;
    for (FollowerModel m : {FollowerModel::Sbm, FollowerModel::Idm}) {
        for (double lead : {-3.41, -1.71}) {
            for (double tau : {0.0, 0.5, 1.0, 1.5, 2.0, 2.5}) {
                const RateRow& r = t.rows[i++];
                EXPECT_EQ(r.key.model, m);
                EXPECT_EQ(r.key.lead_decel_mps2, lead);
                EXPECT_EQ(r.key.reaction_time_s, tau);
                EXPECT_EQ(r.key.follower_decel_mps2, -3.41);
                EXPECT_EQ(r.n_scenarios, 300u);
                EXPECT_LE(r.n_collisions, r.n_scenarios);
                EXPECT_LE(r.n_at_least_s1, r.n_collisions);
                EXPECT_GE(r.collision_rate_pct, 0.0);
                EXPECT_LE(r.collision_rate_pct, 100.0);
            }
        }
    }
    EXPECT_TRUE(t.records.empty());
    ASSERT_NE(t.find(FollowerModel::Idm, 1.0, -1.71), nullptr);
    EXPECT_EQ(t.find(FollowerModel::Idm, 1.0, -1.71)->key.model, FollowerModel::Idm);
    EXPECT_EQ(t.find(FollowerModel::Idm, 0.7, -1.71), nullptr);
}

TEST(Sweep, SbmRatesNonDecreasingInReactionTime) {
    const RateTable t = run_sweep(synth(1000, 17), SweepSpec{});
    for (double lead : {-3.41, -1.71}) {
        double prev = -1.0;
        for (double tau : {0.0, 0.5, 1.0, 1.5, 2.0, 2.5}) {
            const double rate = t.find(FollowerModel::Sbm, tau, lead)->collision_rate_pct;
            EXPECT_GE(rate, prev);
            prev = rate;
        }
    }
}

TEST(Sweep, InvariantUnderPermutationAndWorkerCount) {
    auto scenes = synth(700, 23);
    SweepSpec spec;
    spec.workers = 1;
    spec.record_per_scenario = true;
    const RateTable base = run_sweep(scenes, spec);
    const std::string base_csv = render_report(base, ReportFormat::Csv);
    const std::string base_records = render_per_scenario(base);

    for (unsigned w : {2u, 3u, 8u, 0u}) {
        spec.workers = w;
        const RateTable t = run_sweep(scenes, spec);
        EXPECT_EQ(render_report(t, ReportFormat::Csv), base_csv) << w;
        EXPECT_EQ(render_per_scenario(t), base_records) << w;
    }

    std::mt19937_64 rng(1);
    std::shuffle(scenes.begin(), scenes.end(), rng);
    spec.workers = 4;
    const RateTable shuffled = run_sweep(scenes, spec);
    EXPECT_EQ(render_report(shuffled, ReportFormat::Csv), base_csv);
    // Same multiset of per-scenario lines, in the new scene order.
    auto lines = [](const std::string& text) {
        std::vector<std::string> v;
        std::istringstream in(text);
        for (std::string l; std::getline(in, l);) v.push_back(l);
        std::sort(v.begin(), v.end());
        return v;
    };
    EXPECT_EQ(lines(render_per_scenario(shuffled)), lines(base_records));
}

TEST(Sweep, WideGapsNeverCollide) {
    std::vector<StartScene> scenes;
    for (int i = 0; i < 100; ++i) {
        StartScene s;
        s.follower = {0.0, 5.0, 5.0};
        s.lead = {105.0, 5.0, 5.0};
        s.scene_id = "wide-" + std::to_string(i);
        scenes.push_back(s);
    }
    const RateTable t = run_sweep(scenes, SweepSpec{});
    for (const auto& r : t.rows) {
        if (r.key.model == FollowerModel::Idm && r.key.reaction_time_s > 2.0) continue;
        EXPECT_EQ(r.n_collisions, 0u) << to_string(r.key.model) << " " << r.key.reaction_time_s;
        EXPECT_EQ(r.collision_rate_pct, 0.0);
    }
    const std::string csv = render_report(t, ReportFormat::Csv);
    EXPECT_NE(csv.find("SBM,2.5,-1.71,-3.41,100,0,0.00\n"), std::string::npos);
}

TEST(Sweep, DelayedIdmOvershootsOntoStoppedLead) {
    // An IDM follower keeps closing on a stopped lead until it is s0 away; with 2.5 s of
    // command delay it brakes too late even from 100 m. Values match an independent
    // re-implementation of the same discrete scheme.
    StartScene s;
    s.follower = {0.0, 5.0, 5.0};
    s.lead = {105.0, 5.0, 5.0};
    s.scene_id = "wide";
    SimConfig c;
    c.follower_model = FollowerModel::Idm;
    c.reaction_time_s = 2.5;
    const SimOutcome o = run_scenario(s, c);
    ASSERT_TRUE(o.collision);
    EXPECT_NEAR(o.t_end_s, 14.56, 1e-9);
    EXPECT_NEAR(*o.impact_rel_speed_mps, 3.072, 1e-3);
    c.reaction_time_s = 2.0;
    const SimOutcome ok = run_scenario(s, c);
    EXPECT_FALSE(ok.collision);
    EXPECT_NEAR(ok.min_gap_m, 3.206, 1e-3);
}

TEST(Sweep, PerScenarioRecords) {
    std::vector<StartScene> scenes(2);
    const double v = 50.0 / 3.6;
    scenes[0].follower = {0.0, v, 5.0};
    scenes[0].lead = {15.0, v, 5.0};
    scenes[0].scene_id = "close";
    scenes[1].follower = {0.0, 5.0, 5.0};
    scenes[1].lead = {105.0, 5.0, 5.0};
    scenes[1].scene_id = "far";
    SweepSpec spec;
    spec.reaction_times_s = {1.0};
    spec.lead_decels_mps2 = {-3.41};
    spec.follower_models = {FollowerModel::Sbm};
    spec.record_per_scenario = true;
    const RateTable t = run_sweep(scenes, spec);
    ASSERT_EQ(t.records.size(), 2u);
    EXPECT_TRUE(t.records[0].collision);
    EXPECT_EQ(t.records[0].severity, Severity::AtLeastS1);  // about 3.41 m/s > 2.78 m/s
    EXPECT_FALSE(t.records[1].collision);
    EXPECT_FALSE(t.records[1].severity.has_value());
    EXPECT_EQ(t.rows[0].n_at_least_s1, 1u);
    const std::string text = render_per_scenario(t);
    EXPECT_EQ(text.substr(0, text.find('\n')),
              "scene_id,model,reaction_time_s,lead_decel_mps2,follower_decel_mps2,terminated_by,collision,"
              "impact_rel_speed_mps,severity,t_end_s,min_gap_m");
    EXPECT_NE(text.find("\nclose,SBM,1.0,-3.41,-3.41,collision,1,"), std::string::npos) << text;
    EXPECT_NE(text.find(",S1+,"), std::string::npos);
    EXPECT_NE(text.find("\nfar,SBM,1.0,-3.41,-3.41,standstill,0,,,"), std::string::npos) << text;
}

TEST(Sweep, FirstNumericalFailureIsReportedDeterministically) {
    auto scenes = synth(2000, 31);
    scenes[1500].follower.speed_mps = std::numeric_limits<double>::infinity();
    scenes[1500].scene_id = "bad-1500";
    scenes[1800].follower.speed_mps = std::numeric_limits<double>::infinity();
    scenes[1800].scene_id = "bad-1800";
    for (unsigned w : {1u, 4u, 16u}) {
        SweepSpec spec;
        spec.workers = w;
        try {
            (void)run_sweep(scenes, spec);
            FAIL() << "expected NumericalFailure";
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::NumericalFailure);
            EXPECT_NE(std::string(e.what()).find("bad-1500"), std::string::npos) << e.what();
        }
    }
}

TEST(Sweep, PresetsAndCellConfig) {
    const SweepSpec e = SweepSpec::emergency_6_5();
    ASSERT_EQ(e.follower_models.size(), 1u);
    EXPECT_EQ(e.follower_models[0], FollowerModel::Idm);
    EXPECT_EQ(e.reaction_times_s, std::vector<double>{1.0});
    EXPECT_EQ(e.lead_decels_mps2, std::vector<double>{-6.5});
    const SimConfig c = cell_config(e, {FollowerModel::Idm, 1.0, -6.5, e.follower_decel_mps2});
    EXPECT_EQ(c.follower_idm.decel_floor_mps2, -6.5);
    EXPECT_EQ(c.lead_decel_mps2, -6.5);
    EXPECT_EQ(c.reaction_time_s, 1.0);

    const SweepSpec m = SweepSpec::moderate_follower();
    EXPECT_EQ(m.follower_decel_mps2, -1.705);
    EXPECT_EQ(m.lead_decels_mps2, (std::vector<double>{-3.41, -1.71}));
    const SimConfig s = cell_config(m, {FollowerModel::Sbm, 0.5, -3.41, m.follower_decel_mps2});
    EXPECT_EQ(s.follower_sbm.decel_mps2, -1.705);
}

TEST(Sweep, RejectsBadSpecs) {
    const auto scenes = synth(10, 1);
    SweepSpec spec;
    spec.reaction_times_s.clear();
    EXPECT_THROW((void)run_sweep(scenes, spec), Error);
    spec = SweepSpec{};
    spec.lead_decels_mps2 = {1.0};
    EXPECT_THROW((void)run_sweep(scenes, spec), Error);
    spec = SweepSpec{};
    spec.follower_decel_mps2 = 0.0;
    EXPECT_THROW((void)run_sweep(scenes, spec), Error);
    EXPECT_THROW((void)run_sweep(std::vector<StartScene>{}, SweepSpec{}), Error);
}
