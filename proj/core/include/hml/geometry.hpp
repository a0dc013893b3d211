#pragma once

#include <algorithm>
#include <array>
#include <cmath>

namespace hml {

// Point in ambient dimension 2 or 3. Dimension is a runtime property of the
// owning model; 2-d data keeps z == 0 so the same arithmetic works for both.
struct Vec {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec operator+(const Vec& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec operator-(const Vec& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec operator*(double s) const { return {x * s, y * s, z * s}; }

    double dot(const Vec& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm2() const { return dot(*this); }
    double norm() const { return std::sqrt(norm2()); }
};

inline Vec operator*(double s, const Vec& v) { return v * s; }

inline double dist(const Vec& a, const Vec& b) { return (a - b).norm(); }

// Axis-aligned box, closed.
struct Box {
    Vec lo;
    Vec hi;

    Vec center() const { return {(lo.x + hi.x) * 0.5, (lo.y + hi.y) * 0.5, (lo.z + hi.z) * 0.5}; }
    Vec extent() const { return hi - lo; }
    double diag() const { return extent().norm(); }

    bool contains(const Vec& p) const {
        return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y &&
               p.z >= lo.z && p.z <= hi.z;
    }
};

// Euclidean distance from a point to a box (0 inside).
inline double dist_to_box(const Vec& p, const Box& b) {
    const double dx = std::max({b.lo.x - p.x, 0.0, p.x - b.hi.x});
    const double dy = std::max({b.lo.y - p.y, 0.0, p.y - b.hi.y});
    const double dz = std::max({b.lo.z - p.z, 0.0, p.z - b.hi.z});
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

// Orientation-preserving similarity without rotation: f(v) = ratio * v + offset.
struct SimilarityMap {
    double ratio = 0.0;
    Vec offset;

    Vec operator()(const Vec& v) const { return v * ratio + offset; }
};

// Codimension-one affine subspace (a line in the plane, a plane in space)
// written as { y : normal . (y - anchor) = 0 } with |normal| = 1.
struct LineParam {
    Vec normal;
    Vec anchor;

    double signed_dist(const Vec& p) const { return normal.dot(p - anchor); }
    double dist(const Vec& p) const { return std::abs(signed_dist(p)); }

    // In-line direction for the planar case; normals live in the xy plane there.
    Vec direction() const { return {-normal.y, normal.x, 0.0}; }

    // Angle of the planar direction folded into [0, pi).
    double angle() const {
        double a = std::atan2(direction().y, direction().x);
        if (a < 0) a += std::acos(-1.0);
        const double pi = std::acos(-1.0);
        if (a >= pi) a -= pi;
        return a;
    }
};

} // namespace hml
