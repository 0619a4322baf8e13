#include "dsm/geometry.hpp"

#include <algorithm>

namespace dsm {

Rational cross(const Point& o, const Point& a, const Point& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

std::vector<Point> convex_hull(std::vector<Point> points) {
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    if (points.size() <= 2) return points;

    std::vector<Point> hull(2 * points.size());
    std::size_t k = 0;
    for (const auto& p : points) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = points.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], points[i]) <= 0) --k;
        hull[k++] = points[i];
    }
    hull.resize(k - 1);  // last point repeats the first
    return hull;
}

std::vector<Point> clip_half_plane(const std::vector<Point>& poly, const Rational& a, const Rational& b,
                                   const Rational& c) {
    auto side = [&](const Point& p) { return a * p.x + b * p.y - c; };
    std::vector<Point> out;
    const std::size_t n = poly.size();
    if (n == 1) {
        if (side(poly[0]) >= 0) out.push_back(poly[0]);
        return out;
    }
    // Sutherland-Hodgman against one plane; a segment is treated as a two-edge loop.
    for (std::size_t i = 0; i < n; ++i) {
        const Point& p = poly[i];
        const Point& q = poly[(i + 1) % n];
        Rational sp = side(p);
        Rational sq = side(q);
        if (sp >= 0) out.push_back(p);
        if ((sp > 0 && sq < 0) || (sp < 0 && sq > 0)) {
            Rational t = sp / (sp - sq);
            out.push_back(Point{p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
        }
    }
    return convex_hull(std::move(out));
}

bool hull_contains(const std::vector<Point>& hull, const Point& p) {
    if (hull.empty()) return false;
    if (hull.size() == 1) return hull[0] == p;
    if (hull.size() == 2) {
        const Point& a = hull[0];
        const Point& b = hull[1];
        if (cross(a, b, p) != 0) return false;
        return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
               p.y <= std::max(a.y, b.y);
    }
    for (std::size_t i = 0; i < hull.size(); ++i)
        if (cross(hull[i], hull[(i + 1) % hull.size()], p) < 0) return false;
    return true;
}

}  // namespace dsm
