#pragma once

namespace hqsim {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend bool operator==(const Vec3&, const Vec3&) = default;
};

/// Axis-aligned box, closed on all faces.
struct Aabb {
    Vec3 min;
    Vec3 max;

    static Aabb centered(const Vec3& center, const Vec3& size) {
        return {{center.x - size.x / 2, center.y - size.y / 2, center.z - size.z / 2},
                {center.x + size.x / 2, center.y + size.y / 2, center.z + size.z / 2}};
    }

    Vec3 center() const {
        return {(min.x + max.x) / 2, (min.y + max.y) / 2, (min.z + max.z) / 2};
    }

    bool contains(const Vec3& p) const {
        return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y && p.z >= min.z &&
               p.z <= max.z;
    }

    /// True when `other` lies entirely inside this box.
    bool encloses(const Aabb& other) const {
        return contains(other.min) && contains(other.max);
    }

    /// Open-interval overlap: boxes that only touch on a face do not intersect.
    bool intersects(const Aabb& o) const {
        return min.x < o.max.x && o.min.x < max.x && min.y < o.max.y && o.min.y < max.y &&
               min.z < o.max.z && o.min.z < max.z;
    }

    friend bool operator==(const Aabb&, const Aabb&) = default;
};

}  // namespace hqsim
