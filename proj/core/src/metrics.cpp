#include "hqsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hqsim/error.hpp"

namespace hqsim {

double completion_time(const FlightLog& log) {
    if (log.samples.size() < 2) {
        throw Error("completion_time: need at least two samples");
    }
    return log.samples.back().t_s - log.samples.front().t_s;
}

double path_length(const FlightLog& log) {
    double total = 0.0;
    for (std::size_t i = 1; i < log.samples.size(); ++i) {
        const auto& a = log.samples[i - 1];
        const auto& b = log.samples[i];
        total += std::hypot(b.x_m - a.x_m, b.z_m - a.z_m);
    }
    return total;
}

double average_speed(const FlightLog& log) {
    const double t = completion_time(log);
    if (!(t > 0.0)) {
        throw Error("average_speed: zero flight duration");
    }
    return path_length(log) / t;
}

double path_smoothness(const FlightLog& log, const Course& course, double start_x_m,
                       double start_z_m) {
    if (course.waypoints.empty()) {
        throw Error("path_smoothness: empty course");
    }
    std::vector<double> zs{start_z_m};
    std::vector<double> xs{start_x_m};
    for (const auto& w : course.waypoints) {
        zs.push_back(w.plane_z_m);
        xs.push_back(w.center_x_m);
    }

    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& s : log.samples) {
        if (s.z_m < zs.front() || s.z_m > zs.back()) {
            continue;
        }
        // First chain vertex with z >= sample z.
        const auto hi = static_cast<std::size_t>(
            std::lower_bound(zs.begin(), zs.end(), s.z_m) - zs.begin());
        double x_opt = xs[hi];
        if (hi > 0 && zs[hi] != s.z_m) {
            const std::size_t lo = hi - 1;
            const double u = (s.z_m - zs[lo]) / (zs[hi] - zs[lo]);
            x_opt = xs[lo] + u * (xs[hi] - xs[lo]);
        }
        sum += std::abs(s.x_m - x_opt);
        ++count;
    }
    if (count == 0) {
        throw Error("path_smoothness: no samples within the course's z-range");
    }
    return sum / static_cast<double>(count);
}

namespace {

struct Interval {
    double lo;
    double hi;
};

// Parameter range s where c0 + s (c1 - c0) lies strictly inside (lo, hi).
Interval open_overlap(double c0, double c1, double lo, double hi) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    const double d = c1 - c0;
    if (d == 0.0) {
        return (c0 > lo && c0 < hi) ? Interval{-inf, inf} : Interval{inf, -inf};
    }
    double a = (lo - c0) / d;
    double b = (hi - c0) / d;
    if (a > b) std::swap(a, b);
    return {a, b};
}

// Does the quad box, moving linearly from p0 to p1 (s in [0, 1]), overlap the
// open interior of `box` at some instant?
bool swept_overlap(const Vec3& p0, const Vec3& p1, const QuadExtent& quad, const Aabb& box) {
    const double hx = quad.width_m / 2;
    const double hy = quad.height_m / 2;
    const double hz = quad.depth_m / 2;
    const Interval ix = open_overlap(p0.x, p1.x, box.min.x - hx, box.max.x + hx);
    const Interval iy = open_overlap(p0.y, p1.y, box.min.y - hy, box.max.y + hy);
    const Interval iz = open_overlap(p0.z, p1.z, box.min.z - hz, box.max.z + hz);
    const double lo = std::max({ix.lo, iy.lo, iz.lo, 0.0});
    const double hi = std::min({ix.hi, iy.hi, iz.hi, 1.0});
    return lo < hi || (p0 == p1 && box.intersects(quad.at(p0)));
}

}  // namespace

std::vector<WaypointOutcome> detect_passes_and_collisions(const FlightLog& log, const Course& course,
                                                          const QuadExtent& quad) {
    const auto& wps = course.waypoints;
    std::vector<WaypointOutcome> out(wps.size());
    std::vector<bool> crossed(wps.size(), false);
    const auto& samples = log.samples;
    const double y = log.cfg.altitude_m;
    const auto pos = [&](const FlightSample& s) { return Vec3{s.x_m, y, s.z_m}; };

    // Waypoints ordered by plane so each segment only visits nearby gates.
    std::vector<std::size_t> order(wps.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return wps[a].plane_z_m < wps[b].plane_z_m;
    });
    double reach = 0.0;
    for (const auto& w : wps) reach = std::max(reach, w.depth_m / 2 + quad.depth_m / 2);

    const auto visit = [&](const FlightSample& a, const FlightSample& b, bool segment) {
        const double zmin = std::min(a.z_m, b.z_m);
        const double zmax = std::max(a.z_m, b.z_m);
        auto it = std::lower_bound(order.begin(), order.end(), zmin - reach,
                                   [&](std::size_t i, double z) { return wps[i].plane_z_m < z; });
        for (; it != order.end() && wps[*it].plane_z_m <= zmax + reach; ++it) {
            const std::size_t w = *it;
            const Waypoint& wp = wps[w];

            if (segment && !crossed[w] && a.z_m < wp.plane_z_m && b.z_m >= wp.plane_z_m) {
                crossed[w] = true;
                const Aabb opening = wp.opening();
                const double u = (wp.plane_z_m - a.z_m) / (b.z_m - a.z_m);
                const double x = a.x_m + u * (b.x_m - a.x_m);
                const Aabb box = quad.at({x, y, wp.plane_z_m});
                out[w].passed = box.min.x >= opening.min.x && box.max.x <= opening.max.x &&
                                box.min.y >= opening.min.y && box.max.y <= opening.max.y;
            }
            if (!out[w].collided) {
                for (const auto& frame : frame_boxes(wp)) {
                    if (swept_overlap(pos(a), pos(b), quad, frame)) {
                        out[w].collided = true;
                        break;
                    }
                }
            }
        }
    };

    if (samples.size() == 1) {
        visit(samples[0], samples[0], false);
    }
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
        visit(samples[i], samples[i + 1], true);
    }
    return out;
}

MetricsReport metrics_report(const FlightLog& log, const Course& course, const QuadExtent& quad) {
    MetricsReport r;
    r.T_s = completion_time(log);
    r.path_length_m = path_length(log);
    r.S_mps = average_speed(log);
    r.D_m = path_smoothness(log, course);
    r.per_waypoint = detect_passes_and_collisions(log, course, quad);
    for (const auto& o : r.per_waypoint) {
        r.N_w += o.passed ? 1 : 0;
        r.N_c += o.collided ? 1 : 0;
    }
    return r;
}

}  // namespace hqsim
