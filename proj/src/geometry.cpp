#include "pilotgeom/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pilotgeom {

PointPattern sample_ppp(double density, const Window& window, RngStream& rng) {
    if (density < 0.0) throw std::domain_error("sample_ppp: density < 0");
    PointPattern pattern;
    pattern.window = window;
    pattern.density = density;
    const int n = rng.poisson(density * window.area());
    pattern.points.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double x = rng.uniform(-window.half_width, window.half_width);
        const double y = rng.uniform(-window.half_width, window.half_width);
        pattern.points.push_back({x, y});
    }
    return pattern;
}

double polygon_area(const std::vector<Vec2>& poly) {
    double twice = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i)
        twice += cross(poly[i], poly[(i + 1) % n]);
    return 0.5 * std::fabs(twice);
}

bool point_in_convex_polygon(const std::vector<Vec2>& poly, Vec2 p) {
    const std::size_t n = poly.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = poly[i];
        const Vec2 b = poly[(i + 1) % n];
        if (cross(b - a, p - a) < 0.0) return false;
    }
    return true;
}

namespace detail {

// Sutherland-Hodgman against one half-plane.
std::vector<Vec2> clip_halfplane(const std::vector<Vec2>& poly, Vec2 p0,
                                 Vec2 normal) {
    std::vector<Vec2> out;
    const std::size_t n = poly.size();
    if (n == 0) return out;
    out.reserve(n + 2);
    double prev_side = dot(poly[n - 1] - p0, normal);
    for (std::size_t i = 0; i < n; ++i) {
        const double side = dot(poly[i] - p0, normal);
        const Vec2 prev = poly[(i + n - 1) % n];
        if (prev_side <= 0.0) {
            if (side <= 0.0) {
                out.push_back(poly[i]);
            } else {
                const double t = prev_side / (prev_side - side);
                out.push_back(prev + t * (poly[i] - prev));
            }
        } else if (side <= 0.0) {
            const double t = prev_side / (prev_side - side);
            out.push_back(prev + t * (poly[i] - prev));
            out.push_back(poly[i]);
        }
        prev_side = side;
    }
    return out;
}

}  // namespace detail

namespace {

// Signed area of disc(center=origin, R) intersected with triangle
// (origin, a, b); sign follows the orientation of (a, b).
double disc_triangle_area(Vec2 a, Vec2 b, double R) {
    const double cr = cross(a, b);
    if (cr == 0.0) return 0.0;
    const double R2 = R * R;
    const bool a_in = norm2(a) <= R2;
    const bool b_in = norm2(b) <= R2;
    if (a_in && b_in) return 0.5 * cr;

    auto sector = [&](Vec2 u, Vec2 v) {
        return 0.5 * R2 * std::atan2(cross(u, v), dot(u, v));
    };

    // chord intersections: |a + t (b - a)|^2 = R^2
    const Vec2 d = b - a;
    const double A = norm2(d);
    const double B = 2.0 * dot(a, d);
    const double C = norm2(a) - R2;
    const double disc = B * B - 4.0 * A * C;

    if (a_in != b_in) {
        // one crossing in (0, 1)
        const double sq = std::sqrt(std::max(0.0, disc));
        const double t = a_in ? (-B + sq) / (2.0 * A) : (-B - sq) / (2.0 * A);
        const Vec2 p = a + std::clamp(t, 0.0, 1.0) * d;
        if (a_in) return 0.5 * cross(a, p) + sector(p, b);
        return sector(a, p) + 0.5 * cross(p, b);
    }

    // both endpoints outside
    if (disc <= 0.0) return sector(a, b);
    const double sq = std::sqrt(disc);
    const double t1 = (-B - sq) / (2.0 * A);
    const double t2 = (-B + sq) / (2.0 * A);
    if (t2 <= 0.0 || t1 >= 1.0) return sector(a, b);  // chord misses segment
    const Vec2 p1 = a + std::clamp(t1, 0.0, 1.0) * d;
    const Vec2 p2 = a + std::clamp(t2, 0.0, 1.0) * d;
    return sector(a, p1) + 0.5 * cross(p1, p2) + sector(p2, b);
}

}  // namespace

double disc_polygon_intersection_area(const std::vector<Vec2>& poly,
                                      Vec2 center, double radius) {
    if (radius <= 0.0 || poly.size() < 3) return 0.0;
    double area = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i)
        area += disc_triangle_area(poly[i] - center, poly[(i + 1) % n] - center,
                                   radius);
    return std::fabs(area);
}

namespace detail {

std::vector<Vec2> voronoi_polygon(int bs_index, const PointPattern& pattern,
                                  double neighbor_radius, double start_half) {
    const Vec2 bs = pattern.points[bs_index];
    std::vector<Vec2> poly = {{bs.x - start_half, bs.y - start_half},
                              {bs.x + start_half, bs.y - start_half},
                              {bs.x + start_half, bs.y + start_half},
                              {bs.x - start_half, bs.y + start_half}};

    // nearest neighbors first so the polygon shrinks quickly
    struct Neighbor {
        double dist2;
        int idx;
    };
    std::vector<Neighbor> close;
    const double rad2 = neighbor_radius * neighbor_radius;
    for (int j = 0; j < static_cast<int>(pattern.points.size()); ++j) {
        if (j == bs_index) continue;
        const double d2 = norm2(pattern.points[j] - bs);
        if (d2 <= rad2) close.push_back({d2, j});
    }
    std::sort(close.begin(), close.end(),
              [](const Neighbor& a, const Neighbor& b) {
                  return a.dist2 < b.dist2;
              });

    for (const Neighbor& nb : close) {
        // a bisector farther than the current circumradius cannot cut
        double max_v2 = 0.0;
        for (const Vec2& v : poly) max_v2 = std::max(max_v2, norm2(v - bs));
        if (0.25 * nb.dist2 >= max_v2) break;
        const Vec2 q = pattern.points[nb.idx];
        poly = clip_halfplane(poly, 0.5 * (bs + q), q - bs);
        if (poly.size() < 3) break;
    }
    return poly;
}

CellGeometry finish_cell(int bs_index, Vec2 bs, std::vector<Vec2> polygon,
                         double r_m, double r_c) {
    CellGeometry cell;
    cell.bs_index = bs_index;
    cell.bs = bs;
    cell.polygon = std::move(polygon);
    cell.r_c = r_c;
    cell.r_m = r_m;
    cell.cell_area = polygon_area(cell.polygon);
    cell.r_M = 0.0;
    for (const Vec2& v : cell.polygon)
        cell.r_M = std::max(cell.r_M, norm(v - bs));

    if (r_c <= 0.0) {
        cell.cc_area = 0.0;
        cell.ce_area = cell.cell_area;
        cell.has_ce_region = cell.cell_area > 0.0;
        return cell;
    }
    cell.has_ce_region = cell.r_M > r_c;
    if (!cell.has_ce_region) {
        cell.cc_area = cell.cell_area;
        cell.ce_area = 0.0;
    } else if (cell.r_m >= r_c) {
        // disc fully inscribed: exact atom value
        cell.cc_area = kPi * r_c * r_c;
        cell.ce_area = cell.cell_area - cell.cc_area;
    } else {
        cell.cc_area =
            disc_polygon_intersection_area(cell.polygon, bs, r_c);
        cell.ce_area = std::max(0.0, cell.cell_area - cell.cc_area);
    }
    return cell;
}

}  // namespace detail

CellGeometry build_cell(int bs_index, const PointPattern& pattern, double r_c) {
    if (pattern.points.empty())
        throw std::domain_error("build_cell: empty pattern");
    if (bs_index < 0 || bs_index >= static_cast<int>(pattern.points.size()))
        throw std::out_of_range("build_cell: bad bs_index");
    const Vec2 bs = pattern.points[bs_index];
    if (!pattern.window.in_interior(bs))
        throw BoundaryError("build_cell: BS inside the guard band, cell may be unbounded");

    const double neighbor_radius =
        pattern.density > 0.0 ? 6.0 / std::sqrt(pattern.density)
                              : 2.0 * pattern.window.half_width;
    std::vector<Vec2> poly = detail::voronoi_polygon(
        bs_index, pattern, neighbor_radius, neighbor_radius);

    double nn2 = std::numeric_limits<double>::infinity();
    for (int j = 0; j < static_cast<int>(pattern.points.size()); ++j) {
        if (j == bs_index) continue;
        nn2 = std::min(nn2, norm2(pattern.points[j] - bs));
    }
    const double r_m =
        std::isfinite(nn2) ? 0.5 * std::sqrt(nn2) : 0.0;
    return detail::finish_cell(bs_index, bs, std::move(poly), r_m, r_c);
}

Vec2 sample_in_region(const CellGeometry& cell, RegionKind kind,
                      RngStream& rng) {
    if (kind == RegionKind::cell_edge && !cell.has_ce_region)
        throw EmptyRegionError("sample_in_region: cell has no cell-edge region");
    if (kind == RegionKind::cell_center && cell.cc_area <= 0.0)
        throw EmptyRegionError("sample_in_region: cell-center region is empty");

    const double r_c2 = cell.r_c * cell.r_c;
    if (kind == RegionKind::cell_edge) {
        // polar rejection over the annulus [r_c, r_M]: stays efficient even
        // when the edge region is a thin sliver at a single vertex
        const double r_M2 = cell.r_M * cell.r_M;
        for (long attempt = 0; attempt < 100000000L; ++attempt) {
            const double r = std::sqrt(r_c2 + rng.uniform() * (r_M2 - r_c2));
            const double theta = rng.uniform(0.0, 2.0 * kPi);
            const Vec2 p = cell.bs + Vec2{r * std::cos(theta),
                                          r * std::sin(theta)};
            if (point_in_convex_polygon(cell.polygon, p)) return p;
        }
        throw EmptyRegionError("sample_in_region: rejection sampling failed");
    }

    double lo_x = cell.polygon[0].x, hi_x = lo_x;
    double lo_y = cell.polygon[0].y, hi_y = lo_y;
    for (const Vec2& v : cell.polygon) {
        lo_x = std::min(lo_x, v.x);
        hi_x = std::max(hi_x, v.x);
        lo_y = std::min(lo_y, v.y);
        hi_y = std::max(hi_y, v.y);
    }
    // the cell-center region also fits in the disc's bounding box
    lo_x = std::max(lo_x, cell.bs.x - cell.r_c);
    hi_x = std::min(hi_x, cell.bs.x + cell.r_c);
    lo_y = std::max(lo_y, cell.bs.y - cell.r_c);
    hi_y = std::min(hi_y, cell.bs.y + cell.r_c);
    for (long attempt = 0; attempt < 100000000L; ++attempt) {
        const Vec2 p = {rng.uniform(lo_x, hi_x), rng.uniform(lo_y, hi_y)};
        if (!point_in_convex_polygon(cell.polygon, p)) continue;
        if (norm2(p - cell.bs) <= r_c2) return p;
    }
    throw EmptyRegionError("sample_in_region: rejection sampling failed");
}

double union_two_circles_area(double r1, double r2, double u) {
    if (r1 < 0.0 || r2 < 0.0)
        throw std::domain_error("union_two_circles_area: negative radius");
    if (r1 < r2) std::swap(r1, r2);
    if (r2 == 0.0) return kPi * r1 * r1;
    const double cu = std::cos(u);
    const double d2 = r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * cu;
    const double d = std::sqrt(std::max(0.0, d2));
    if (d < 1e-12 * r1) return kPi * r1 * r1;  // coincident circles
    auto clamped_acos = [](double v) {
        return std::acos(std::clamp(v, -1.0, 1.0));
    };
    const double v = clamped_acos((r1 - r2 * cu) / d);
    const double w = clamped_acos((r2 - r1 * cu) / d);
    return r1 * r1 * (kPi - v + 0.5 * std::sin(2.0 * v)) +
           r2 * r2 * (kPi - w + 0.5 * std::sin(2.0 * w));
}

}  // namespace pilotgeom
