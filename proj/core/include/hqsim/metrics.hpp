#pragma once

#include <vector>

#include "hqsim/course.hpp"
#include "hqsim/flight_log.hpp"
#include "hqsim/geometry.hpp"

namespace hqsim {

/// Bounding box of the quad used for pass and collision tests.
struct QuadExtent {
    double width_m = 0.3;
    double height_m = 0.1;
    double depth_m = 0.3;

    Aabb at(const Vec3& center) const {
        return Aabb::centered(center, {width_m, height_m, depth_m});
    }
};

struct WaypointOutcome {
    bool passed = false;
    bool collided = false;

    friend bool operator==(const WaypointOutcome&, const WaypointOutcome&) = default;
};

struct MetricsReport {
    double T_s = 0.0;
    double S_mps = 0.0;
    double D_m = 0.0;
    int N_w = 0;
    int N_c = 0;
    double path_length_m = 0.0;
    std::vector<WaypointOutcome> per_waypoint;

    friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

/// Last minus first sample time. Throws with fewer than two samples.
double completion_time(const FlightLog& log);

/// Sum of horizontal (x, z) distances between consecutive samples.
double path_length(const FlightLog& log);

/// Path length over completion time. A hovering flight gives 0.
/// Throws when the flight has zero duration.
double average_speed(const FlightLog& log);

/// Mean |x - x_opt(z)| over samples whose z lies on the optimal chain, where
/// the chain runs from the start position through every waypoint center.
/// Throws when no sample lies within the chain's z-range.
double path_smoothness(const FlightLog& log, const Course& course, double start_x_m = 0.0,
                       double start_z_m = 0.0);

/// Pass: at the first forward crossing of the waypoint plane (interpolated
/// between the straddling samples) the quad box lies inside the opening in
/// x and y. Collision: at some instant along the piecewise-linear path the
/// quad box overlaps one of the four frame bars; counted once per waypoint.
std::vector<WaypointOutcome> detect_passes_and_collisions(const FlightLog& log, const Course& course,
                                                          const QuadExtent& quad = {});

MetricsReport metrics_report(const FlightLog& log, const Course& course, const QuadExtent& quad = {});

}  // namespace hqsim
