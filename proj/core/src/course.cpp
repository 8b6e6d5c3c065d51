#include "hqsim/course.hpp"

#include <fstream>
#include <sstream>

#include "hqsim/error.hpp"
#include "hqsim/rng.hpp"
#include "hqsim/text_io.hpp"

namespace hqsim {

Aabb Waypoint::opening() const {
    return Aabb::centered({center_x_m, center_y_m, plane_z_m}, {inner_w_m, inner_h_m, depth_m});
}

namespace {

Aabb destination_after(const Waypoint& last, const CourseLayout& layout) {
    const double s = layout.destination_size_m;
    return Aabb::centered(
        {last.center_x_m, layout.altitude_m, last.plane_z_m + layout.destination_offset_m},
        {s, s, s});
}

Waypoint make_waypoint(int index, double center_x, const CourseLayout& layout) {
    Waypoint w;
    w.index = index;
    w.center_x_m = center_x;
    w.center_y_m = layout.altitude_m;
    w.plane_z_m = layout.first_plane_z_m + layout.spacing_m * (index - 1);
    return w;
}

}  // namespace

Course generate_course(std::uint64_t seed, int n_waypoints, const CourseLayout& layout) {
    if (n_waypoints < 1) {
        throw Error("generate_course: need at least one waypoint");
    }
    Course course;
    course.kind = CourseKind::slalom;
    course.seed = seed;
    course.waypoints.reserve(static_cast<std::size_t>(n_waypoints));
    Rng rng(seed);
    for (int i = 1; i <= n_waypoints; ++i) {
        const double x = uniform_in(rng, -layout.lateral_range_m, layout.lateral_range_m);
        course.waypoints.push_back(make_waypoint(i, x, layout));
    }
    course.destination = destination_after(course.waypoints.back(), layout);
    return course;
}

Course make_training_course(const CourseLayout& layout) {
    Course course;
    course.kind = CourseKind::training;
    course.waypoints.push_back(make_waypoint(1, 0.0, layout));
    course.destination = destination_after(course.waypoints.back(), layout);
    return course;
}

std::array<Aabb, 4> frame_boxes(const Waypoint& w) {
    const double t = w.frame_thickness_m;
    const double hw = w.inner_w_m / 2;
    const double hh = w.inner_h_m / 2;
    const double cx = w.center_x_m;
    const double cy = w.center_y_m;
    const double z0 = w.plane_z_m - w.depth_m / 2;
    const double z1 = w.plane_z_m + w.depth_m / 2;
    return {{
        {{cx - hw, cy + hh, z0}, {cx + hw, cy + hh + t, z1}},          // top
        {{cx - hw, cy - hh - t, z0}, {cx + hw, cy - hh, z1}},          // bottom
        {{cx - hw - t, cy - hh - t, z0}, {cx - hw, cy + hh + t, z1}},  // left
        {{cx + hw, cy - hh - t, z0}, {cx + hw + t, cy + hh + t, z1}},  // right
    }};
}

std::string to_course_text(const Course& course) {
    using text::format_double;
    std::ostringstream out;
    out << "hqsim-course 1\n";
    out << "kind " << (course.kind == CourseKind::training ? "training" : "slalom") << '\n';
    out << "seed " << course.seed << '\n';
    const auto& d = course.destination;
    out << "destination " << format_double(d.min.x) << ' ' << format_double(d.min.y) << ' '
        << format_double(d.min.z) << ' ' << format_double(d.max.x) << ' '
        << format_double(d.max.y) << ' ' << format_double(d.max.z) << '\n';
    if (!course.waypoints.empty()) {
        const auto& w = course.waypoints.front();
        out << "gate " << format_double(w.center_y_m) << ' ' << format_double(w.inner_w_m) << ' '
            << format_double(w.inner_h_m) << ' ' << format_double(w.depth_m) << ' '
            << format_double(w.frame_thickness_m) << '\n';
    }
    out << "waypoints " << course.waypoints.size() << '\n';
    for (const auto& w : course.waypoints) {
        out << w.index << ' ' << format_double(w.center_x_m) << ' ' << format_double(w.plane_z_m)
            << '\n';
    }
    return out.str();
}

Course parse_course(const std::string& text_in, const std::string& source) {
    std::istringstream in(text_in);
    std::string line;
    int lineno = 0;
    Course course;
    Waypoint gate;
    long long expected = -1;
    bool header = false;
    bool have_destination = false;

    const auto fail = [&](const std::string& msg) { throw ParseError(source, lineno, msg); };

    while (std::getline(in, line)) {
        ++lineno;
        const auto view = text::trim(line);
        if (view.empty() || view.front() == '#') {
            continue;
        }
        std::vector<std::string> f;
        std::istringstream fields{std::string(view)};
        for (std::string tok; fields >> tok;) {
            f.push_back(tok);
        }
        try {
            if (!header) {
                if (f.size() != 2 || f[0] != "hqsim-course" || f[1] != "1") {
                    fail("expected header 'hqsim-course 1'");
                }
                header = true;
            } else if (f[0] == "kind" && f.size() == 2) {
                if (f[1] == "training") {
                    course.kind = CourseKind::training;
                } else if (f[1] == "slalom") {
                    course.kind = CourseKind::slalom;
                } else {
                    fail("unknown course kind '" + f[1] + "'");
                }
            } else if (f[0] == "seed" && f.size() == 2) {
                course.seed = std::stoull(f[1]);
            } else if (f[0] == "destination" && f.size() == 7) {
                auto& d = course.destination;
                d.min = {text::parse_double(f[1]), text::parse_double(f[2]), text::parse_double(f[3])};
                d.max = {text::parse_double(f[4]), text::parse_double(f[5]), text::parse_double(f[6])};
                have_destination = true;
            } else if (f[0] == "gate" && f.size() == 6) {
                gate.center_y_m = text::parse_double(f[1]);
                gate.inner_w_m = text::parse_double(f[2]);
                gate.inner_h_m = text::parse_double(f[3]);
                gate.depth_m = text::parse_double(f[4]);
                gate.frame_thickness_m = text::parse_double(f[5]);
            } else if (f[0] == "waypoints" && f.size() == 2) {
                expected = text::parse_int(f[1]);
            } else if (f.size() == 3 && expected >= 0) {
                Waypoint w = gate;
                w.index = static_cast<int>(text::parse_int(f[0]));
                w.center_x_m = text::parse_double(f[1]);
                w.plane_z_m = text::parse_double(f[2]);
                if (w.index != static_cast<int>(course.waypoints.size()) + 1) {
                    fail("waypoint indices must be consecutive from 1");
                }
                course.waypoints.push_back(w);
            } else {
                fail("unrecognized record '" + std::string(view) + "'");
            }
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception& e) {
            fail(e.what());
        }
    }
    if (!header) fail("empty course file");
    if (!have_destination) fail("missing destination record");
    if (expected < 0 || static_cast<std::size_t>(expected) != course.waypoints.size()) {
        fail("waypoint count does not match 'waypoints' record");
    }
    return course;
}

void save_course(const Course& course, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write course file " + path.string());
    }
    out << to_course_text(course);
}

Course load_course(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open course file " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_course(ss.str(), path.string());
}

}  // namespace hqsim
