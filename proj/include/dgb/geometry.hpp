#pragma once

#include <array>
#include <cmath>

namespace dgb {

/// A point in the plane.
struct Pt {
    double x = 0.0;
    double y = 0.0;
};

inline Pt operator+(Pt a, Pt b) { return {a.x + b.x, a.y + b.y}; }
inline Pt operator-(Pt a, Pt b) { return {a.x - b.x, a.y - b.y}; }
inline Pt operator*(double s, Pt a) { return {s * a.x, s * a.y}; }
inline double dot(Pt a, Pt b) { return a.x * b.x + a.y * b.y; }
inline double norm(Pt a) { return std::sqrt(dot(a, a)); }

/// Axis-aligned rectangle [x0,x1] x [y0,y1].
struct Rect {
    double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    Pt center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
    /// Diameter (diagonal length) of the rectangle.
    double diameter() const { return std::hypot(width(), height()); }
    bool contains(Pt p, double tol = 0.0) const {
        return p.x >= x0 - tol && p.x <= x1 + tol && p.y >= y0 - tol && p.y <= y1 + tol;
    }
};

/// Which side of a rectangular cell an edge lies on.
enum class Side : int { West = 0, East = 1, South = 2, North = 3 };

/// Outward unit normal of a cell side.
inline Pt side_normal(Side s) {
    switch (s) {
    case Side::West: return {-1.0, 0.0};
    case Side::East: return {1.0, 0.0};
    case Side::South: return {0.0, -1.0};
    default: return {0.0, 1.0};
    }
}

inline Side opposite(Side s) {
    switch (s) {
    case Side::West: return Side::East;
    case Side::East: return Side::West;
    case Side::South: return Side::North;
    default: return Side::South;
    }
}

} // namespace dgb
