#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "pilotgeom/numerics.hpp"

namespace pilotgeom {

enum class RegionKind { cell_center, cell_edge };

struct Vec2 {
    double x = 0.0, y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm2(Vec2 a) { return a.x * a.x + a.y * a.y; }
inline double norm(Vec2 a) { return std::sqrt(norm2(a)); }

/// Square observation window centered at the origin. Statistics are collected
/// only for points farther than guard_band from the boundary.
struct Window {
    double half_width = 0.0;
    double guard_band = 0.0;

    double area() const { return 4.0 * half_width * half_width; }
    bool contains(Vec2 p) const {
        return std::fabs(p.x) <= half_width && std::fabs(p.y) <= half_width;
    }
    bool in_interior(Vec2 p) const {
        return std::max(std::fabs(p.x), std::fabs(p.y)) <
               half_width - guard_band;
    }
};

struct PointPattern {
    std::vector<Vec2> points;
    Window window;
    double density = 0.0;
};

/// One base station's Voronoi cell together with its cell-center (disc-limited)
/// and cell-edge split. Immutable after construction.
struct CellGeometry {
    int bs_index = -1;
    Vec2 bs;
    std::vector<Vec2> polygon;  // counterclockwise
    double r_c = 0.0;           // cell-center threshold radius
    double cell_area = 0.0;
    double cc_area = 0.0;
    double ce_area = 0.0;
    double r_m = 0.0;  // largest inscribed circle radius (half NN distance)
    double r_M = 0.0;  // smallest circumscribed circle radius
    bool has_ce_region = false;
};

class BoundaryError : public std::domain_error {
    using std::domain_error::domain_error;
};

class EmptyRegionError : public std::domain_error {
    using std::domain_error::domain_error;
};

/// Homogeneous Poisson point process restricted to the window.
PointPattern sample_ppp(double density, const Window& window, RngStream& rng);

/// Voronoi cell of pattern.points[bs_index] clipped by the disc of radius r_c.
/// Throws BoundaryError when the BS lies within the window's guard band.
CellGeometry build_cell(int bs_index, const PointPattern& pattern, double r_c);

/// Uniform sample from the cell-center or cell-edge region (rejection).
Vec2 sample_in_region(const CellGeometry& cell, RegionKind kind,
                      RngStream& rng);

/// Area of the union of two circles with radii r1 and r2 whose centers sit at
/// distances r1 and r2 from the origin with angular separation u (both circles
/// pass through the origin).
double union_two_circles_area(double r1, double r2, double u);

// polygon helpers (convex, counterclockwise)
double polygon_area(const std::vector<Vec2>& poly);
bool point_in_convex_polygon(const std::vector<Vec2>& poly, Vec2 p);
double disc_polygon_intersection_area(const std::vector<Vec2>& poly,
                                      Vec2 center, double radius);

namespace detail {
/// Voronoi cell polygon without the guard-band check; starts from a square of
/// half-size start_half around the BS and clips bisector half-planes of all
/// neighbors within neighbor_radius.
std::vector<Vec2> voronoi_polygon(int bs_index, const PointPattern& pattern,
                                  double neighbor_radius, double start_half);
CellGeometry finish_cell(int bs_index, Vec2 bs, std::vector<Vec2> polygon,
                         double r_m, double r_c);
/// Keep the side with dot(x - p0, normal) <= 0.
std::vector<Vec2> clip_halfplane(const std::vector<Vec2>& poly, Vec2 p0,
                                 Vec2 normal);
}  // namespace detail

}  // namespace pilotgeom
