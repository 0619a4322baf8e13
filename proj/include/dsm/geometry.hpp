#pragma once

// Exact 2-D convex geometry over rationals.

#include "dsm/rational.hpp"

#include <compare>
#include <vector>

namespace dsm {

struct Point {
    Rational x{0};
    Rational y{0};

    friend auto operator<=>(const Point& a, const Point& b) {
        if (auto c = compare(a.x, b.x); c != 0) return c;
        return compare(a.y, b.y);
    }
    friend bool operator==(const Point& a, const Point& b) { return a.x == b.x && a.y == b.y; }
};

/// Twice the signed area of (o, a, b); positive for a left turn.
Rational cross(const Point& o, const Point& a, const Point& b);

/// Monotone chain. Counterclockwise from the lexicographically smallest point,
/// collinear points dropped. A single distinct point gives {p}; an all-collinear
/// set gives its two endpoints.
std::vector<Point> convex_hull(std::vector<Point> points);

/// Keeps the part of the convex polygon `poly` (as returned by convex_hull) with
/// a*x + b*y >= c. The result is again in convex_hull form, possibly empty.
std::vector<Point> clip_half_plane(const std::vector<Point>& poly, const Rational& a, const Rational& b,
                                   const Rational& c);

/// Closed containment test against a convex_hull-form polygon.
bool hull_contains(const std::vector<Point>& hull, const Point& p);

}  // namespace dsm
