#include <array>
#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "hqsim/course.hpp"
#include "hqsim/error.hpp"
#include "hqsim/rng.hpp"
#include "support/oracles.hpp"

using namespace hqsim;

TEST(Rng, EngineMatchesStandardReferenceValue) {
    // The standard fixes the 10000th output of a default-seeded mt19937_64.
    Rng r;
    r.discard(9999);
    EXPECT_EQ(r(), 9981545732273789042ULL);
}

TEST(Course, HundredWaypointsEveryFiveMeters) {
    const Course c = generate_course(42);
    ASSERT_EQ(c.waypoints.size(), 100u);
    for (int i = 0; i < 100; ++i) {
        EXPECT_EQ(c.waypoints[i].index, i + 1);
        EXPECT_EQ(c.waypoints[i].plane_z_m, 5.0 * (i + 1));
    }
    EXPECT_EQ(c.seed, 42u);
    EXPECT_EQ(c.kind, CourseKind::slalom);
}

TEST(Course, CentersWithinRangeForManySeeds) {
    for (std::uint64_t s = 0; s < 200; ++s) {
        for (const auto& w : generate_course(s).waypoints) {
            ASSERT_LE(std::abs(w.center_x_m), 5.0);
        }
    }
}

TEST(Course, CentersFollowDocumentedDraws) {
    const std::uint64_t seed = 987654321;
    const Course c = generate_course(seed, 50);
    Rng rng(seed);
    for (const auto& w : c.waypoints) {
        const double want = -5.0 + 10.0 * static_cast<double>(rng() >> 11) * std::ldexp(1.0, -53);
        EXPECT_EQ(w.center_x_m, want);
    }
}

TEST(Course, PinnedCenters) {
    const Course c = generate_course(1);
    EXPECT_EQ(c.waypoints[0].center_x_m, -3.6612335598746739);
    EXPECT_EQ(c.waypoints[1].center_x_m, -3.6359296363380276);
    EXPECT_EQ(c.waypoints[2].center_x_m, -0.48785096155461893);
}

TEST(Course, SameSeedSameCourse) {
    EXPECT_EQ(generate_course(9), generate_course(9));
    EXPECT_NE(generate_course(9).waypoints, generate_course(10).waypoints);
}

TEST(Course, PrefixIndependentOfLength) {
    const Course a = generate_course(5, 10);
    const Course b = generate_course(5, 100);
    for (int i = 0; i < 10; ++i) EXPECT_EQ(a.waypoints[i], b.waypoints[i]);
}

TEST(Course, OpeningsCongruentAtAltitude) {
    for (const auto& w : generate_course(3).waypoints) {
        const Aabb o = w.opening();
        EXPECT_DOUBLE_EQ(o.max.x - o.min.x, 2.0);
        EXPECT_DOUBLE_EQ(o.max.y - o.min.y, 2.0);
        EXPECT_NEAR(o.max.z - o.min.z, 0.1, 1e-12);
        EXPECT_EQ(o.min.y, 5.0);
        EXPECT_EQ(o.max.y, 7.0);
        EXPECT_DOUBLE_EQ(o.center().x, w.center_x_m);
    }
}

TEST(Course, DestinationBeyondLastWaypoint) {
    const Course c = generate_course(8);
    const auto& last = c.waypoints.back();
    const Aabb& d = c.destination;
    EXPECT_DOUBLE_EQ(d.max.x - d.min.x, 4.0);
    EXPECT_DOUBLE_EQ(d.max.y - d.min.y, 4.0);
    EXPECT_DOUBLE_EQ(d.max.z - d.min.z, 4.0);
    EXPECT_DOUBLE_EQ(d.center().x, last.center_x_m);
    EXPECT_DOUBLE_EQ(d.center().y, 6.0);
    EXPECT_DOUBLE_EQ(d.center().z, 505.0);
    EXPECT_GT(d.min.z, last.plane_z_m);
}

TEST(Course, ZeroWaypointsRejected) {
    EXPECT_THROW(generate_course(1, 0), Error);
}

TEST(Course, UniformityChiSquare) {
    std::array<int, 10> bins{};
    int n = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        for (const auto& w : generate_course(1000 + s).waypoints) {
            const int b = std::min(9, static_cast<int>((w.center_x_m + 5.0) / 1.0));
            ++bins[b];
            ++n;
        }
    }
    ASSERT_EQ(n, 10000);
    double chi2 = 0.0;
    for (const int count : bins) chi2 += (count - 1000.0) * (count - 1000.0) / 1000.0;
    EXPECT_LT(chi2, 21.666);  // 1% critical value, 9 degrees of freedom
}

TEST(FrameBoxes, LeftBarGeometry) {
    Waypoint w;
    w.center_x_m = 1.5;
    w.plane_z_m = 20.0;
    const auto bars = frame_boxes(w);
    const Aabb& left = bars[2];
    EXPECT_DOUBLE_EQ(left.min.x, 1.5 - 1.25);
    EXPECT_DOUBLE_EQ(left.max.x, 1.5 - 1.0);
    EXPECT_DOUBLE_EQ(left.min.y, 4.75);
    EXPECT_DOUBLE_EQ(left.max.y, 7.25);
    EXPECT_NEAR(left.min.z, 19.95, 1e-12);
    EXPECT_NEAR(left.max.z, 20.05, 1e-12);
}

TEST(FrameBoxes, MatchesIndependentGeometry) {
    for (const auto& w : generate_course(77, 20).waypoints) {
        const auto bars = frame_boxes(w);
        const auto want = oracle::frame(w);
        for (int i = 0; i < 4; ++i) {
            EXPECT_DOUBLE_EQ(bars[i].min.x, want[i].x0);
            EXPECT_DOUBLE_EQ(bars[i].max.x, want[i].x1);
            EXPECT_DOUBLE_EQ(bars[i].min.y, want[i].y0);
            EXPECT_DOUBLE_EQ(bars[i].max.y, want[i].y1);
            EXPECT_DOUBLE_EQ(bars[i].min.z, want[i].z0);
            EXPECT_DOUBLE_EQ(bars[i].max.z, want[i].z1);
        }
    }
}

TEST(FrameBoxes, FrameLeavesOpeningEmptyAndDoesNotOverlap) {
    Waypoint w;
    w.center_x_m = -2.0;
    w.plane_z_m = 5.0;
    const auto bars = frame_boxes(w);
    const Aabb opening = w.opening();
    for (int i = 0; i < 4; ++i) {
        EXPECT_FALSE(bars[i].intersects(opening)) << i;
        EXPECT_FALSE(bars[i].contains(opening.center())) << i;
        for (int j = i + 1; j < 4; ++j) EXPECT_FALSE(bars[i].intersects(bars[j])) << i << j;
    }
    // The four bars tile the 2.5 x 2.5 outer square minus the opening.
    double area = 0.0;
    for (const auto& b : bars) area += (b.max.x - b.min.x) * (b.max.y - b.min.y);
    EXPECT_NEAR(area, 2.5 * 2.5 - 2.0 * 2.0, 1e-12);
}

TEST(TrainingCourse, OneCenteredWaypoint) {
    const Course c = make_training_course();
    ASSERT_EQ(c.waypoints.size(), 1u);
    EXPECT_EQ(c.waypoints[0].center_x_m, 0.0);
    EXPECT_EQ(c.waypoints[0].plane_z_m, 5.0);
    EXPECT_GT(c.destination.min.z, 5.0);
    EXPECT_EQ(c.kind, CourseKind::training);
    EXPECT_EQ(c, make_training_course());
}

TEST(CourseText, RoundTripIsExact) {
    for (const Course& c : {generate_course(7), generate_course(123, 3), make_training_course()}) {
        EXPECT_EQ(parse_course(to_course_text(c)), c);
    }
}

TEST(CourseText, DocumentedLayout) {
    const std::string text = to_course_text(generate_course(7, 2));
    EXPECT_EQ(text,
              "hqsim-course 1\n"
              "kind slalom\n"
              "seed 7\n"
              "destination 2.493012028926442 4 13 6.493012028926442 8 17\n"
              "gate 6 2 2 0.1 0.25\n"
              "waypoints 2\n"
              "1 2.54385304152858 5\n"
              "2 4.493012028926442 10\n");
}

TEST(CourseText, MalformedInputRejected) {
    EXPECT_THROW(parse_course("hqsim-course 2\n"), ParseError);
    EXPECT_THROW(parse_course("hqsim-course 1\nkind slalom\nseed 1\n"), ParseError);
    std::string text = to_course_text(generate_course(7, 2));
    text.replace(text.find("waypoints 2"), 11, "waypoints 3");
    EXPECT_THROW(parse_course(text), ParseError);
}
