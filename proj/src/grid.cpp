#include <algorithm>
#include <cmath>
#include <sstream>

#include "effmax/errors.hpp"
#include "effmax/laplace2d.hpp"

namespace effmax::laplace2d {

namespace {

// Chord of a convex polygon along the line {coord(p) = c}, where `axis`
// selects y (0: horizontal line) or x (1: vertical line). Returns false if
// the line misses the interior.
bool chord(const std::vector<Point>& v, int axis, double c, double& lo, double& hi)
{
    lo = std::numeric_limits<double>::infinity();
    hi = -lo;
    const std::size_t n = v.size();
    for (std::size_t k = 0; k < n; ++k) {
        const Point& p = v[k];
        const Point& q = v[(k + 1) % n];
        double pa = axis == 0 ? p.y : p.x, qa = axis == 0 ? q.y : q.x;
        double pb = axis == 0 ? p.x : p.y, qb = axis == 0 ? q.x : q.y;
        if ((pa - c) * (qa - c) > 0.0 || pa == qa)
            continue;
        double t = (c - pa) / (qa - pa);
        double s = pb + t * (qb - pb);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    return hi > lo;
}

}  // namespace

double GridDomain::weighted_area() const
{
    double total = 0.0;
    for (const auto& nd : nodes)
        total += nd.weight;
    return total;
}

GridDomain rasterize(const ConvexDomain2D& domain, double n)
{
    geometry::GeomInvariants inv = geometry::invariants(domain);
    const double needed = 16.0 / inv.min_width;
    if (!(n >= needed * (1.0 - 1e-12))) {
        std::ostringstream msg;
        msg << "grid under-resolved: " << n << " nodes per unit length, need at least "
            << std::ceil(needed);
        throw InputError(msg.str());
    }
    const double h = 1.0 / n;
    const auto& verts = domain.vertices();
    double xmin = verts[0].x, xmax = xmin, ymin = verts[0].y, ymax = ymin;
    for (const auto& p : verts) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }

    GridDomain gd{.domain = domain, .invariants = inv, .origin = {xmin, ymin}, .spacing = h,
                  .nx = static_cast<int>(std::floor((xmax - xmin) / h)) + 1,
                  .ny = static_cast<int>(std::floor((ymax - ymin) / h)) + 1,
                  .index = {}, .nodes = {}};
    const double cells = double(gd.nx) * double(gd.ny);
    if (cells > 2e8)
        throw InputError("grid too large: reduce the resolution");
    gd.index.assign(std::size_t(gd.nx) * gd.ny, -1);

    std::vector<double> col_lo(gd.nx), col_hi(gd.nx);
    std::vector<char> col_ok(gd.nx, 0);
    for (int i = 0; i < gd.nx; ++i) {
        double x = xmin + i * h;
        if (x > xmin && x < xmax)
            col_ok[i] = chord(verts, 1, x, col_lo[i], col_hi[i]);
    }

    const double min_arm = kMinArm * h;
    for (int j = 0; j < gd.ny; ++j) {
        double y = ymin + j * h;
        double row_lo, row_hi;
        if (!(y > ymin && y < ymax) || !chord(verts, 0, y, row_lo, row_hi))
            continue;
        int i0 = std::max(1, static_cast<int>(std::floor((row_lo - xmin) / h)));
        int i1 = std::min(gd.nx - 1, static_cast<int>(std::ceil((row_hi - xmin) / h)));
        for (int i = i0; i <= i1; ++i) {
            if (!col_ok[i])
                continue;
            double x = xmin + i * h;
            std::array<double, 4> d{row_hi - x, x - row_lo, col_hi[i] - y, y - col_lo[i]};
            if (*std::min_element(d.begin(), d.end()) < min_arm)
                continue;
            GridNode nd;
            nd.i = i;
            nd.j = j;
            nd.p = {x, y};
            for (int k = 0; k < 4; ++k)
                nd.arm[k] = std::min(d[k] / h, 1.0);
            gd.index[std::size_t(j) * gd.nx + i] = static_cast<int>(gd.nodes.size());
            gd.nodes.push_back(nd);
        }
    }
    if (gd.nodes.size() < 100) {
        std::ostringstream msg;
        msg << "grid under-resolved: only " << gd.nodes.size()
            << " interior nodes (need 100); increase the resolution";
        throw InputError(msg.str());
    }

    static constexpr int di[4] = {1, -1, 0, 0};
    static constexpr int dj[4] = {0, 0, 1, -1};
    for (auto& nd : gd.nodes) {
        std::array<double, 4> c{};
        for (int k = 0; k < 4; ++k) {
            int nb = nd.arm[k] >= 1.0 ? gd.at(nd.i + di[k], nd.j + dj[k]) : -1;
            nd.neighbor[k] = nb;
            c[k] = nb >= 0 ? 0.5 : nd.arm[k];
        }
        nd.weight = h * h * (c[kEast] + c[kWest]) * (c[kNorth] + c[kSouth]);
    }
    return gd;
}

}  // namespace effmax::laplace2d
