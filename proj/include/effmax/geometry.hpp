#pragma once

#include <cmath>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace effmax::geometry {

struct Point
{
    double x = 0.0;
    double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double t, Point a) { return {t * a.x, t * a.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }

/// Where a domain came from: a named family with its parameters, or
/// "user-polygon" for raw vertex input.
struct Provenance
{
    std::string family = "user-polygon";
    std::map<std::string, double> params;
    int resolution = 0;
};

/// Half-plane {p : dot(normal, p) <= offset} with a unit outward normal.
struct HalfPlane
{
    Point normal;
    double offset = 0.0;
};

/// Strictly convex closed polygon, stored counter-clockwise.
///
/// The constructor drops consecutive duplicates (closer than 1e-12 D),
/// reorients clockwise input, and rejects anything that is not strictly
/// convex (every turn must exceed 1e-12 D^2).
class ConvexDomain2D
{
  public:
    explicit ConvexDomain2D(std::vector<Point> vertices, Provenance provenance = {});

    const std::vector<Point>& vertices() const { return vertices_; }
    const std::vector<HalfPlane>& half_planes() const { return half_planes_; }
    const Provenance& provenance() const { return provenance_; }
    std::size_t size() const { return vertices_.size(); }

    /// Minimum signed distance to the edge lines; positive strictly inside.
    double signed_distance(Point p) const;
    /// Distance from p (assumed inside) to the boundary along unit direction d.
    double exit_distance(Point p, Point d) const;
    double perimeter() const;

    ConvexDomain2D scaled(double factor) const;
    ConvexDomain2D translated(Point offset) const;
    /// Rotation about the origin by `angle` radians.
    ConvexDomain2D rotated(double angle) const;

  private:
    std::vector<Point> vertices_;
    std::vector<HalfPlane> half_planes_;
    Provenance provenance_;
};

struct GeomInvariants
{
    double inradius = 0.0;
    double diameter = 0.0;
    double area = 0.0;
    double min_width = 0.0;
    /// Angle in [0, pi) of the supporting lines realising the minimal width.
    double width_direction = 0.0;
    Point chebyshev_center;
    /// More than one distinct direction attains the minimal width.
    bool width_direction_ambiguous = false;
};

/// Builds a family member. Known families and parameter names:
///   rectangle{width,height}, ellipse{a,b} (semi-axes),
///   isoceles-triangle{base,height}, rhombus{d1,d2},
///   stadium{core,radius}, circular-sector{radius,angle} (angle < pi),
///   regular-n-gon{n[,radius]}, disk{radius}.
/// Curved families (ellipse, stadium, circular-sector, disk) use
/// `resolution` boundary vertices, which must be at least 64.
ConvexDomain2D make_family(const std::string& name,
                           const std::map<std::string, double>& params,
                           int resolution = 512);

GeomInvariants invariants(const ConvexDomain2D& domain);

double polygon_area(std::span<const Point> vertices);

/// [lo, hi] of the vertical chord at abscissa x; lo > hi when x misses the domain.
std::pair<double, double> column_bounds(const ConvexDomain2D& domain, double x);

/// Chebyshev center and radius of the polygon by linear programming.
struct ChebyshevBall
{
    Point center;
    double radius = 0.0;
    /// Largest constraint violation of the returned point (certificate).
    double max_violation = 0.0;
    /// |primal - dual| objective mismatch at the final basis.
    double duality_gap = 0.0;
};
ChebyshevBall chebyshev_ball(const ConvexDomain2D& domain);

/// Domain rotated so its minimal-width direction is vertical, scaled to unit
/// width, and written as the region between graphs f1 <= f2 over [a, b].
struct NormalizedProfile
{
    ConvexDomain2D domain;
    double a = 0.0;
    double b = 0.0;
    double N = 0.0;
    std::vector<double> x;
    std::vector<double> f1;
    std::vector<double> f2;
    std::vector<double> h;
    /// Effective length and the superlevel interval I = [I_lo, I_hi].
    double L = 0.0;
    double I_lo = 0.0;
    double I_hi = 0.0;
    /// Factor applied to h when the sampled max height missed 1 by > 1e-4.
    double height_correction = 1.0;
    bool width_direction_ambiguous = false;
    /// Set when N < 1 made the fixed point for L undefined (L = N used).
    bool length_too_short = false;

    double spacing() const { return x.size() > 1 ? (b - a) / double(x.size() - 1) : 0.0; }
    /// Linear interpolation of a sampled column at abscissa xq.
    double interpolate(const std::vector<double>& column, double xq) const;
};

NormalizedProfile normalize(const ConvexDomain2D& domain, std::size_t x_samples);

struct EffectiveLength
{
    double L = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

/// Solves g(L) = L where g(L) is the length of {h >= 1 - 1/L^2} on a uniform
/// grid over [x.front(), x.back()]. Requires N = x.back() - x.front() >= 1.
EffectiveLength effective_length(std::span<const double> x, std::span<const double> h);

/// Length of the superlevel interval {h >= level} around argmax h.
EffectiveLength superlevel_interval(std::span<const double> x, std::span<const double> h,
                                    double level);

double effective_length(const NormalizedProfile& profile);

}  // namespace effmax::geometry
