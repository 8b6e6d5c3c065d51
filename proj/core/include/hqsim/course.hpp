#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hqsim/geometry.hpp"

namespace hqsim {

/// Square gate the quad must fly through. The opening is centered on
/// (center_x_m, center_y_m) and sits in the plane z = plane_z_m.
struct Waypoint {
    int index = 0;
    double center_x_m = 0.0;
    double center_y_m = 6.0;
    double plane_z_m = 0.0;
    double inner_w_m = 2.0;
    double inner_h_m = 2.0;
    double depth_m = 0.1;
    double frame_thickness_m = 0.25;

    Aabb opening() const;

    friend bool operator==(const Waypoint&, const Waypoint&) = default;
};

enum class CourseKind { slalom, training };

struct Course {
    CourseKind kind = CourseKind::slalom;
    std::uint64_t seed = 0;
    std::vector<Waypoint> waypoints;
    Aabb destination;

    std::size_t size() const { return waypoints.size(); }

    friend bool operator==(const Course&, const Course&) = default;
};

struct CourseLayout {
    double spacing_m = 5.0;
    double first_plane_z_m = 5.0;
    double lateral_range_m = 5.0;
    double altitude_m = 6.0;
    double destination_offset_m = 5.0;
    double destination_size_m = 4.0;
};

inline constexpr int kDefaultWaypointCount = 100;

/// Waypoint i (1-based) sits at z = 5 i with a lateral center drawn
/// uniformly from [-5, 5] m. Draws come from Rng(seed) in waypoint order,
/// one 64-bit draw each, mapped as -5 + 10 * (draw >> 11) * 2^-53.
Course generate_course(std::uint64_t seed, int n_waypoints = kDefaultWaypointCount,
                       const CourseLayout& layout = {});

/// Single centered waypoint followed by the destination volume.
Course make_training_course(const CourseLayout& layout = {});

/// Frame bars around the opening, ordered top, bottom, left, right. Side bars
/// span the full outer height (corners included); top and bottom bars span
/// only the opening width, so the bars' interiors never overlap.
std::array<Aabb, 4> frame_boxes(const Waypoint& w);

std::string to_course_text(const Course& course);
Course parse_course(const std::string& text, const std::string& source = "<string>");
void save_course(const Course& course, const std::filesystem::path& path);
Course load_course(const std::filesystem::path& path);

}  // namespace hqsim
