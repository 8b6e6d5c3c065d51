#include <gtest/gtest.h>

#include "hqsim/error.hpp"
#include "hqsim/pilot.hpp"
#include "support/oracles.hpp"

using namespace hqsim;

namespace {

Course straight_course() {
    Course c = generate_course(1, 3);
    for (auto& w : c.waypoints) w.center_x_m = 0.0;
    c.destination = Aabb::centered({0.0, 6.0, 22.0}, {4, 4, 4});
    return c;
}

}  // namespace

TEST(PilotStep, OnLineFliesStraight) {
    const Course c = straight_course();
    PilotParams p;
    QuadState s = QuadState::at_rest(SimConfig{});
    s.z_m = 2.0;
    const HeadSample h = pilot_step(p, s, c, 0.0);
    EXPECT_EQ(h.roll_deg, 0.0);
    EXPECT_EQ(h.pitch_deg, p.forward_pitch_deg);
}

TEST(PilotStep, ProportionalLateralCommand) {
    const Course c = straight_course();
    PilotParams p;
    p.lateral_gain = 2.0;
    p.lateral_damping = 0.0;
    QuadState s = QuadState::at_rest(SimConfig{});
    s.x_m = -1.0;  // target one meter to the right
    s.z_m = 2.0;
    EXPECT_DOUBLE_EQ(pilot_step(p, s, c, 0.0).roll_deg, 2.0);
}

TEST(PilotStep, EmptyCourseRejected) {
    EXPECT_THROW(pilot_step({}, QuadState{}, Course{}, 0.0), Error);
}

TEST(SyntheticPilot, DelayLine) {
    const Course c = straight_course();
    PilotParams p;
    p.reaction_delay_s = 0.2;
    SyntheticPilot pilot(p, 75.0);
    pilot.begin_flight(c);
    QuadState s = QuadState::at_rest(SimConfig{});
    for (int i = 0; i < 15; ++i) EXPECT_EQ(pilot.step(s, i / 75.0).pitch_deg, 0.0) << i;
    EXPECT_EQ(pilot.step(s, 15 / 75.0).pitch_deg, p.forward_pitch_deg);
}

TEST(SyntheticPilot, SeededNoiseIsReproducible) {
    const Course c = generate_course(3);
    PilotParams p;
    p.noise_deg = 1.0;
    p.seed = 99;
    SyntheticPilot a(p, 75.0), b(p, 75.0);
    a.begin_flight(c);
    b.begin_flight(c);
    QuadState s = QuadState::at_rest(SimConfig{});
    bool varied = false;
    for (int i = 0; i < 300; ++i) {
        s.z_m = i * 0.03;
        const auto ha = a.step(s, i / 75.0);
        EXPECT_EQ(ha, b.step(s, i / 75.0));
        varied |= ha.roll_deg != 0.0;
    }
    EXPECT_TRUE(varied);
}

TEST(SyntheticPilot, CommandNeedsFlight) {
    SyntheticPilot p({}, 75.0);
    EXPECT_THROW(p.command(QuadState{}), Error);
    PilotParams bad;
    bad.noise_deg = -1.0;
    EXPECT_THROW(SyntheticPilot(bad, 75.0), Error);
}

TEST(FlyWithPilot, NoDelayLevelOneClearsCourse) {
    PilotParams p;
    p.reaction_delay_s = 0.0;
    FlightSetup setup;
    setup.course = generate_course(2026);
    setup.cfg = config_for_level(SimConfig{}, 1);
    setup.latency_level = 1;
    const auto out = fly_with_pilot(p, setup);
    ASSERT_EQ(out.end, FlightEnd::completed);
    ASSERT_TRUE(out.metrics);
    EXPECT_GE(out.metrics->N_w, 95);
    EXPECT_EQ(fly_with_pilot(p, setup).log, out.log);
}

TEST(Sweep, TwentyFiveReportsDeterministic) {
    SweepOptions opt;
    opt.n_waypoints = 10;
    const auto a = run_pilot_sweep({}, {1, 2, 3, 4, 5}, 5, 7, opt);
    const auto b = run_pilot_sweep({}, {1, 2, 3, 4, 5}, 5, 7, opt);
    ASSERT_EQ(a.runs.size(), 25u);
    ASSERT_EQ(a.levels.size(), 5u);
    EXPECT_EQ(sweep_runs_csv(a), sweep_runs_csv(b));
    EXPECT_EQ(sweep_summary_csv(a), sweep_summary_csv(b));
    for (int r = 0; r < 5; ++r) EXPECT_EQ(a.runs[r].course_seed, a.runs[20 + r].course_seed);
    EXPECT_THROW(run_pilot_sweep({}, {1}, 0, 7, opt), Error);
}

TEST(Sweep, DirectMappingNoCollisionsConfirmedByOracle) {
    SweepOptions opt;
    opt.direct = true;
    PilotParams p;
    p.reaction_delay_s = 0.0;
    const auto res = run_pilot_sweep(p, {1}, 5, 11, opt);
    for (const auto& run : res.runs) {
        ASSERT_TRUE(run.completed());
        EXPECT_EQ(run.metrics->N_c, 0);
    }
    // Independent check of one flight against the supersampled penetration oracle.
    FlightSetup setup;
    setup.course = generate_course(res.runs[0].course_seed);
    setup.direct = true;
    const auto out = fly_with_pilot(p, setup);
    for (const auto& w : setup.course.waypoints) {
        EXPECT_LE(oracle::max_penetration(out.log, w, QuadExtent{}, 6.0, 20), 0.0) << w.index;
    }
}

TEST(Spearman, Basics) {
    EXPECT_DOUBLE_EQ(spearman({1, 2, 3, 4, 5}, {2, 4, 5, 9, 10}), 1.0);
    EXPECT_DOUBLE_EQ(spearman({1, 2, 3}, {3, 2, 1}), -1.0);
    EXPECT_NEAR(spearman({1, 2, 3, 4}, {1, 3, 2, 4}), 0.8, 1e-12);
    EXPECT_THROW(spearman({1, 1}, {1, 2}), Error);
    EXPECT_THROW(spearman({1}, {1}), Error);
}
