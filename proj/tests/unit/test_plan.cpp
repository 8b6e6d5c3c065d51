#include <algorithm>

#include <gtest/gtest.h>

#include "hqsim/error.hpp"
#include "hqsim/plan.hpp"

using namespace hqsim;

namespace {

std::vector<int> levels_of(const SessionPlan& p) {
    std::vector<int> out;
    for (const auto& s : p.sessions) out.push_back(s.latency_level);
    return out;
}

}  // namespace

TEST(ReplicationPlans, FirstParticipantOrder) {
    const auto plans = replication_plans(1);
    ASSERT_EQ(plans.size(), 9u);
    EXPECT_EQ(plans[0].participant, "P1");
    EXPECT_EQ(levels_of(plans[0]), (std::vector<int>{3, 5, 1, 2, 4}));
    EXPECT_EQ(plans[8].participant, "P9");
    for (const auto& p : plans) EXPECT_NO_THROW(p.validate());
}

TEST(ReplicationPlans, OnlyDayOneTrains) {
    for (const auto& p : replication_plans(3)) {
        for (const auto& s : p.sessions) EXPECT_EQ(s.training, s.day == 1);
    }
}

TEST(BuildPlan, EveryLevelOncePerParticipant) {
    std::vector<std::string> ids;
    for (int i = 1; i <= 30; ++i) ids.push_back("U" + std::to_string(i));
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        for (const auto& p : build_session_plan(ids, seed)) {
            auto lv = levels_of(p);
            std::sort(lv.begin(), lv.end());
            EXPECT_EQ(lv, (std::vector<int>{1, 2, 3, 4, 5}));
            EXPECT_NO_THROW(p.validate());
        }
    }
}

TEST(BuildPlan, DeterministicAndSeedSensitive) {
    const std::vector<std::string> ids{"A", "B", "C", "D", "E", "F"};
    EXPECT_EQ(build_session_plan(ids, 7), build_session_plan(ids, 7));
    EXPECT_NE(build_session_plan(ids, 7), build_session_plan(ids, 8));
}

TEST(BuildPlan, CourseSeeding) {
    const auto fixed = build_session_plan({"A", "B"}, 42, CourseSeeding::fixed);
    for (const auto& p : fixed) {
        for (const auto& s : p.sessions) EXPECT_EQ(s.course_seed, 42u);
    }
    const auto per = build_session_plan({"A", "B"}, 42);
    EXPECT_EQ(per[0].sessions[2].course_seed, session_course_seed(42, "A", 3));
    EXPECT_NE(per[0].sessions[2].course_seed, per[1].sessions[2].course_seed);
    EXPECT_NE(per[0].sessions[0].course_seed, per[0].sessions[1].course_seed);
}

TEST(PlanText, RoundTrip) {
    const auto plans = replication_plans(2026);
    EXPECT_EQ(parse_plans(to_plan_text(plans)), plans);
}

TEST(PlanText, InvalidPlansRejected) {
    EXPECT_THROW(parse_plans("hqsim-plan 1\nparticipant P1\nsession 1 3 training 5\nend\n"), Error);
    std::string text = to_plan_text(replication_plans(1));
    // Two sessions with level 5.
    text.replace(text.find("session 1 3"), 11, "session 1 5");
    EXPECT_THROW(parse_plans(text), Error);
}

TEST(PlanLookup, FindAndDay) {
    const auto plans = replication_plans(1);
    EXPECT_EQ(find_plan(plans, "P4").day(4).latency_level, 1);
    EXPECT_THROW(find_plan(plans, "P10"), Error);
    EXPECT_THROW(plans[0].day(6), Error);
}
