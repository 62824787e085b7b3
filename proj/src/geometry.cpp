#include "polypuzzle/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace polypuzzle {

namespace {

// Twice the signed area of the triangle (o, a, b); > 0 for a left turn.
double cross(Complex o, Complex a, Complex b) {
    return (a.real() - o.real()) * (b.imag() - o.imag()) -
           (a.imag() - o.imag()) * (b.real() - o.real());
}

// Antipodal-pair sweep over a strictly convex counterclockwise hull.
double hull_diameter_calipers(const std::vector<Complex>& h) {
    const int m = static_cast<int>(h.size());
    double best = 0.0;
    int k = 1;
    for (int i = 0; i < m; ++i) {
        const int j = (i + 1) % m;
        for (;;) {
            const int k1 = (k + 1) % m;
            if (std::abs(cross(h[i], h[j], h[k1])) >
                std::abs(cross(h[i], h[j], h[k]))) {
                k = k1;
            } else {
                break;
            }
        }
        best = std::max({best, std::abs(h[i] - h[k]), std::abs(h[j] - h[k])});
    }
    return best;
}

}  // namespace

std::vector<Complex> convex_hull(std::vector<Complex> points) {
    std::sort(points.begin(), points.end(), [](Complex a, Complex b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    points.erase(std::unique(points.begin(), points.end()), points.end());
    const int n = static_cast<int>(points.size());
    if (n <= 2) return points;

    std::vector<Complex> h(2 * static_cast<std::size_t>(n));
    int k = 0;
    for (int i = 0; i < n; ++i) {
        while (k >= 2 && cross(h[k - 2], h[k - 1], points[i]) <= 0.0) --k;
        h[k++] = points[i];
    }
    for (int i = n - 2, t = k + 1; i >= 0; --i) {
        while (k >= t && cross(h[k - 2], h[k - 1], points[i]) <= 0.0) --k;
        h[k++] = points[i];
    }
    h.resize(static_cast<std::size_t>(k) - 1);
    return h;
}

double max_pairwise_distance(const std::vector<Complex>& points) {
    const std::vector<Complex> h = convex_hull(points);
    const std::size_t m = h.size();
    if (m < 2) return 0.0;
    if (m == 2) return std::abs(h[0] - h[1]);
    if (m > 1000) return hull_diameter_calipers(h);
    double best = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            best = std::max(best, std::abs(h[i] - h[j]));
        }
    }
    return best;
}

double segment_distance(Complex a, Complex b, Complex z) {
    const Complex ab = b - a;
    const double len2 = std::norm(ab);
    if (len2 == 0.0) return std::abs(z - a);
    double t = ((z.real() - a.real()) * ab.real() +
                (z.imag() - a.imag()) * ab.imag()) /
               len2;
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(z - (a + t * ab));
}

double polygon_boundary_distance(const std::vector<Complex>& polygon,
                                 Complex z) {
    const std::size_t n = polygon.size();
    if (n == 0) throw Error("boundary distance needs a non-empty polygon");
    double best = std::abs(z - polygon[0]);
    for (std::size_t i = 0; i < n; ++i) {
        const Complex a = polygon[i];
        const Complex b = polygon[(i + 1) % n];
        best = std::min(best, segment_distance(a, b, z));
    }
    return best;
}

PointLocation locate_in_polygon(const std::vector<Complex>& polygon, Complex z,
                                double tol) {
    const std::size_t n = polygon.size();
    if (n == 0) return PointLocation::Outside;
    if (polygon_boundary_distance(polygon, z) <= tol) {
        return PointLocation::Boundary;
    }
    if (n < 3) return PointLocation::Outside;
    // Crossing number with a half-open vertex rule: an edge counts when its
    // endpoints straddle the horizontal through z, so a ray through a vertex
    // is never double-counted and horizontal edges never count.
    bool inside = false;
    for (std::size_t i = 0; i < n; ++i) {
        const Complex a = polygon[i];
        const Complex b = polygon[(i + 1) % n];
        if ((a.imag() > z.imag()) != (b.imag() > z.imag())) {
            const double x = a.real() + (z.imag() - a.imag()) /
                                            (b.imag() - a.imag()) *
                                            (b.real() - a.real());
            if (x > z.real()) inside = !inside;
        }
    }
    return inside ? PointLocation::Inside : PointLocation::Outside;
}

bool polygon_contains(const std::vector<Complex>& outer,
                      const std::vector<Complex>& inner, double tol) {
    for (const Complex v : inner) {
        if (locate_in_polygon(outer, v, tol) == PointLocation::Outside) {
            return false;
        }
    }
    return true;
}

double shape_about(const std::vector<Complex>& polygon, Complex z) {
    if (polygon.size() < 3) {
        throw Error("shape requires a polygon with at least 3 vertices");
    }
    if (locate_in_polygon(polygon, z, 0.0) != PointLocation::Inside) {
        throw Error("shape point must lie strictly inside the polygon");
    }
    double sup = 0.0;
    for (const Complex v : polygon) sup = std::max(sup, std::abs(v - z));
    const double inf = polygon_boundary_distance(polygon, z);
    return sup / inf;
}

}  // namespace polypuzzle
