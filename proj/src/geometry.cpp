#include "effmax/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

#include "effmax/errors.hpp"

namespace effmax::geometry {

namespace {

double bbox_diagonal(const std::vector<Point>& v)
{
    double xmin = v[0].x, xmax = v[0].x, ymin = v[0].y, ymax = v[0].y;
    for (const auto& p : v) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    return std::hypot(xmax - xmin, ymax - ymin);
}

double require_param(const std::map<std::string, double>& params, const std::string& family,
                     const std::string& key)
{
    auto it = params.find(key);
    if (it == params.end())
        throw InputError(family + ": missing parameter '" + key + "'");
    if (!(it->second > 0.0) || !std::isfinite(it->second))
        throw InputError(family + ": parameter '" + key + "' must be positive and finite");
    return it->second;
}

void reject_unknown(const std::map<std::string, double>& params, const std::string& family,
                    std::initializer_list<const char*> known)
{
    for (const auto& [key, value] : params) {
        bool found = std::any_of(known.begin(), known.end(),
                                 [&](const char* k) { return key == k; });
        if (!found)
            throw InputError(family + ": unknown parameter '" + key + "'");
    }
}

}  // namespace

ConvexDomain2D::ConvexDomain2D(std::vector<Point> vertices, Provenance provenance)
    : provenance_(std::move(provenance))
{
    for (const auto& p : vertices) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw InputError("polygon vertex is not finite");
    }
    if (vertices.size() < 3)
        throw InputError("polygon needs at least 3 vertices");

    const double scale = bbox_diagonal(vertices);
    if (!(scale > 0.0))
        throw InputError("polygon is degenerate (zero extent)");

    // Drop consecutive duplicates, including the closing vertex if repeated.
    std::vector<Point> v;
    v.reserve(vertices.size());
    for (const auto& p : vertices) {
        if (v.empty() || norm(p - v.back()) > 1e-12 * scale)
            v.push_back(p);
    }
    while (v.size() > 1 && norm(v.front() - v.back()) <= 1e-12 * scale)
        v.pop_back();
    if (v.size() < 3)
        throw InputError("polygon needs at least 3 distinct vertices");

    if (polygon_area(v) < 0.0)
        std::reverse(v.begin(), v.end());

    const std::size_t n = v.size();
    double turning = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        Point e0 = v[(i + 1) % n] - v[i];
        Point e1 = v[(i + 2) % n] - v[(i + 1) % n];
        double c = cross(e0, e1);
        if (c <= 1e-12 * scale * scale)
            throw InputError("polygon is not strictly convex at vertex "
                             + std::to_string((i + 1) % n));
        turning += std::atan2(c, dot(e0, e1));
    }
    if (std::abs(turning - 2.0 * std::numbers::pi) > 1e-6)
        throw InputError("polygon is self-intersecting");

    vertices_ = std::move(v);
    half_planes_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Point e = vertices_[(i + 1) % n] - vertices_[i];
        double len = norm(e);
        Point normal{e.y / len, -e.x / len};
        half_planes_.push_back({normal, dot(normal, vertices_[i])});
    }
}

double ConvexDomain2D::signed_distance(Point p) const
{
    double d = std::numeric_limits<double>::infinity();
    for (const auto& hp : half_planes_)
        d = std::min(d, hp.offset - dot(hp.normal, p));
    return d;
}

double ConvexDomain2D::exit_distance(Point p, Point d) const
{
    double t = std::numeric_limits<double>::infinity();
    for (const auto& hp : half_planes_) {
        double nd = dot(hp.normal, d);
        if (nd > 0.0)
            t = std::min(t, (hp.offset - dot(hp.normal, p)) / nd);
    }
    return t;
}

double ConvexDomain2D::perimeter() const
{
    double total = 0.0;
    for (std::size_t i = 0; i < vertices_.size(); ++i)
        total += norm(vertices_[(i + 1) % vertices_.size()] - vertices_[i]);
    return total;
}

ConvexDomain2D ConvexDomain2D::scaled(double factor) const
{
    if (!(factor > 0.0))
        throw InputError("scale factor must be positive");
    std::vector<Point> v;
    v.reserve(vertices_.size());
    for (const auto& p : vertices_)
        v.push_back(factor * p);
    return ConvexDomain2D(std::move(v), provenance_);
}

ConvexDomain2D ConvexDomain2D::translated(Point offset) const
{
    std::vector<Point> v;
    v.reserve(vertices_.size());
    for (const auto& p : vertices_)
        v.push_back(p + offset);
    return ConvexDomain2D(std::move(v), provenance_);
}

ConvexDomain2D ConvexDomain2D::rotated(double angle) const
{
    const double c = std::cos(angle), s = std::sin(angle);
    std::vector<Point> v;
    v.reserve(vertices_.size());
    for (const auto& p : vertices_)
        v.push_back({c * p.x - s * p.y, s * p.x + c * p.y});
    return ConvexDomain2D(std::move(v), provenance_);
}

double polygon_area(std::span<const Point> vertices)
{
    double twice = 0.0;
    const std::size_t n = vertices.size();
    for (std::size_t i = 0; i < n; ++i)
        twice += cross(vertices[i], vertices[(i + 1) % n]);
    return 0.5 * twice;
}

ConvexDomain2D make_family(const std::string& name,
                           const std::map<std::string, double>& params,
                           int resolution)
{
    using std::numbers::pi;
    Provenance prov{name, params, resolution};
    std::vector<Point> v;

    auto need_resolution = [&] {
        if (resolution < 64)
            throw InputError(name + ": resolution must be at least 64 for curved families");
    };

    if (name == "rectangle") {
        reject_unknown(params, name, {"width", "height"});
        double w = require_param(params, name, "width");
        double h = require_param(params, name, "height");
        v = {{-w / 2, -h / 2}, {w / 2, -h / 2}, {w / 2, h / 2}, {-w / 2, h / 2}};
    }
    else if (name == "ellipse") {
        reject_unknown(params, name, {"a", "b"});
        double a = require_param(params, name, "a");
        double b = require_param(params, name, "b");
        need_resolution();
        for (int k = 0; k < resolution; ++k) {
            double t = 2.0 * pi * k / resolution;
            v.push_back({a * std::cos(t), b * std::sin(t)});
        }
    }
    else if (name == "isoceles-triangle") {
        reject_unknown(params, name, {"base", "height"});
        double b = require_param(params, name, "base");
        double h = require_param(params, name, "height");
        v = {{-b / 2, 0.0}, {b / 2, 0.0}, {0.0, h}};
    }
    else if (name == "rhombus") {
        reject_unknown(params, name, {"d1", "d2"});
        double d1 = require_param(params, name, "d1");
        double d2 = require_param(params, name, "d2");
        v = {{-d1 / 2, 0.0}, {0.0, -d2 / 2}, {d1 / 2, 0.0}, {0.0, d2 / 2}};
    }
    else if (name == "stadium") {
        reject_unknown(params, name, {"core", "radius"});
        double core = require_param(params, name, "core");
        double r = require_param(params, name, "radius");
        need_resolution();
        // Each cap gets half the budget, rounded so the extreme points on the
        // axis are vertices.
        int half = 2 * ((resolution + 3) / 4);
        for (int j = 0; j <= half; ++j) {
            double t = -pi / 2 + pi * j / half;
            v.push_back({core / 2 + r * std::cos(t), r * std::sin(t)});
        }
        for (int j = 0; j <= half; ++j) {
            double t = pi / 2 + pi * j / half;
            v.push_back({-core / 2 + r * std::cos(t), r * std::sin(t)});
        }
    }
    else if (name == "circular-sector") {
        reject_unknown(params, name, {"radius", "angle"});
        double r = require_param(params, name, "radius");
        double angle = require_param(params, name, "angle");
        if (angle >= pi)
            throw InputError(name + ": angle must be less than pi");
        need_resolution();
        v.push_back({0.0, 0.0});
        for (int j = 0; j < resolution; ++j) {
            double t = -angle / 2 + angle * j / (resolution - 1);
            v.push_back({r * std::cos(t), r * std::sin(t)});
        }
    }
    else if (name == "regular-n-gon") {
        reject_unknown(params, name, {"n", "radius"});
        double nd = require_param(params, name, "n");
        int n = static_cast<int>(std::lround(nd));
        if (n < 3 || std::abs(nd - n) > 1e-12)
            throw InputError(name + ": n must be an integer >= 3");
        double r = params.count("radius") ? require_param(params, name, "radius") : 1.0;
        for (int k = 0; k < n; ++k) {
            double t = pi / 2 + 2.0 * pi * k / n;
            v.push_back({r * std::cos(t), r * std::sin(t)});
        }
    }
    else if (name == "disk") {
        reject_unknown(params, name, {"radius"});
        double r = require_param(params, name, "radius");
        need_resolution();
        for (int k = 0; k < resolution; ++k) {
            double t = 2.0 * pi * k / resolution;
            v.push_back({r * std::cos(t), r * std::sin(t)});
        }
    }
    else {
        throw InputError("unknown family '" + name + "'");
    }
    return ConvexDomain2D(std::move(v), std::move(prov));
}

GeomInvariants invariants(const ConvexDomain2D& domain)
{
    using std::numbers::pi;
    const auto& v = domain.vertices();
    const std::size_t n = v.size();
    GeomInvariants out;
    out.area = polygon_area(v);

    // Rotating calipers: for each edge, advance j to the farthest vertex.
    auto height = [&](std::size_t i, std::size_t j) {
        return cross(v[(i + 1) % n] - v[i], v[j] - v[i]);
    };
    std::vector<double> widths(n);
    std::size_t j = 1;
    double diam2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t ni = (i + 1) % n;
        if (j == i)
            j = ni;
        while (height(i, (j + 1) % n) > height(i, j))
            j = (j + 1) % n;
        for (std::size_t k : {j, (j + 1) % n}) {
            Point d0 = v[k] - v[i];
            Point d1 = v[k] - v[ni];
            diam2 = std::max({diam2, dot(d0, d0), dot(d1, d1)});
        }
        widths[i] = height(i, j) / norm(v[ni] - v[i]);
    }
    out.diameter = std::sqrt(diam2);

    const double wmin = *std::min_element(widths.begin(), widths.end());
    out.min_width = wmin;
    double best_angle = pi;
    double first_angle = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (widths[i] > wmin * (1.0 + 1e-9))
            continue;
        Point e = v[(i + 1) % n] - v[i];
        double a = std::atan2(e.y, e.x);
        a = std::fmod(a + 2.0 * pi, pi);
        if (pi - a < 1e-12)
            a = 0.0;
        if (first_angle < 0.0)
            first_angle = a;
        else if (std::abs(a - first_angle) > 1e-9
                 && std::abs(std::abs(a - first_angle) - pi) > 1e-9)
            out.width_direction_ambiguous = true;
        best_angle = std::min(best_angle, a);
    }
    out.width_direction = best_angle;

    ChebyshevBall ball = chebyshev_ball(domain);
    out.inradius = ball.radius;
    out.chebyshev_center = ball.center;
    return out;
}

std::pair<double, double> column_bounds(const ConvexDomain2D& domain, double x)
{
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (const auto& hp : domain.half_planes()) {
        const double r = hp.offset - hp.normal.x * x;
        if (hp.normal.y > 1e-14)
            hi = std::min(hi, r / hp.normal.y);
        else if (hp.normal.y < -1e-14)
            lo = std::max(lo, r / hp.normal.y);
        else if (r < 0.0)
            return {1.0, 0.0};
    }
    return {lo, hi};
}

}  // namespace effmax::geometry
