#include <algorithm>
#include <cmath>

#include "effmax/errors.hpp"
#include "effmax/geometry.hpp"

namespace effmax::geometry {

namespace {

// x-monotone polyline evaluated by linear interpolation, clamped at the ends.
class Chain
{
  public:
    explicit Chain(std::vector<Point> pts) : pts_(std::move(pts))
    {
        if (pts_.front().x > pts_.back().x)
            std::reverse(pts_.begin(), pts_.end());
    }

    double operator()(double x) const
    {
        if (x <= pts_.front().x)
            return pts_.front().y;
        if (x >= pts_.back().x)
            return pts_.back().y;
        auto it = std::upper_bound(pts_.begin(), pts_.end(), x,
                                   [](double xv, const Point& p) { return xv < p.x; });
        const Point& p1 = *it;
        const Point& p0 = *(it - 1);
        double dx = p1.x - p0.x;
        if (dx <= 0.0)
            return p0.y;
        return p0.y + (p1.y - p0.y) * (x - p0.x) / dx;
    }

    const std::vector<Point>& points() const { return pts_; }

  private:
    std::vector<Point> pts_;
};

// Splits a CCW convex polygon into lower and upper x-monotone chains.
// Vertices within `tol` of the extreme abscissae count as extreme so that
// nearly vertical end edges are excluded from both chains.
std::pair<Chain, Chain> split_chains(const std::vector<Point>& v, double tol)
{
    const std::size_t n = v.size();
    double xmin = v[0].x, xmax = v[0].x;
    for (const auto& p : v) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
    }
    std::size_t left_low = n, left_high = n, right_low = n, right_high = n;
    for (std::size_t i = 0; i < n; ++i) {
        if (v[i].x - xmin <= tol) {
            if (left_low == n || v[i].y < v[left_low].y)
                left_low = i;
            if (left_high == n || v[i].y > v[left_high].y)
                left_high = i;
        }
        if (xmax - v[i].x <= tol) {
            if (right_low == n || v[i].y < v[right_low].y)
                right_low = i;
            if (right_high == n || v[i].y > v[right_high].y)
                right_high = i;
        }
    }
    auto walk = [&](std::size_t from, std::size_t to) {
        std::vector<Point> pts;
        for (std::size_t i = from;; i = (i + 1) % n) {
            pts.push_back(v[i]);
            if (i == to)
                break;
        }
        return pts;
    };
    std::vector<Point> lower = walk(left_low, right_low);
    std::vector<Point> upper = walk(right_high, left_high);
    lower.front().x = xmin;
    lower.back().x = xmax;
    upper.front().x = xmax;
    upper.back().x = xmin;
    return {Chain(std::move(lower)), Chain(std::move(upper))};
}

}  // namespace

double NormalizedProfile::interpolate(const std::vector<double>& column, double xq) const
{
    const double dx = spacing();
    if (column.empty() || dx <= 0.0)
        return column.empty() ? 0.0 : column.front();
    double t = (xq - a) / dx;
    if (t <= 0.0)
        return column.front();
    std::size_t k = static_cast<std::size_t>(t);
    if (k + 1 >= column.size())
        return column.back();
    double frac = t - double(k);
    return (1.0 - frac) * column[k] + frac * column[k + 1];
}

NormalizedProfile normalize(const ConvexDomain2D& domain, std::size_t x_samples)
{
    if (x_samples < 3)
        throw InputError("normalize needs at least 3 samples");
    GeomInvariants inv = invariants(domain);

    ConvexDomain2D turned = domain.rotated(-inv.width_direction);
    // Snap the supporting edges onto exact horizontals by measuring the
    // y-extent of the rotated polygon rather than trusting min_width.
    double ymin = turned.vertices()[0].y, ymax = ymin, xmin = turned.vertices()[0].x;
    for (const auto& p : turned.vertices()) {
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
        xmin = std::min(xmin, p.x);
    }
    const double scale = 1.0 / (ymax - ymin);
    std::vector<Point> nv;
    nv.reserve(turned.size());
    for (const auto& p : turned.vertices())
        nv.push_back({scale * (p.x - xmin), scale * (p.y - ymin)});
    ConvexDomain2D normalized(std::move(nv), domain.provenance());

    double xmax = 0.0;
    for (const auto& p : normalized.vertices())
        xmax = std::max(xmax, p.x);

    auto [lower, upper] = split_chains(normalized.vertices(), 1e-12 * std::max(1.0, xmax));

    NormalizedProfile out{.domain = normalized, .x = {}, .f1 = {}, .f2 = {}, .h = {}};
    out.a = 0.0;
    out.b = xmax;
    out.N = xmax;
    out.width_direction_ambiguous = inv.width_direction_ambiguous;
    out.x.resize(x_samples);
    out.f1.resize(x_samples);
    out.f2.resize(x_samples);
    out.h.resize(x_samples);
    for (std::size_t i = 0; i < x_samples; ++i) {
        double x = out.a + (out.b - out.a) * double(i) / double(x_samples - 1);
        out.x[i] = x;
        out.f1[i] = std::clamp(lower(x), 0.0, 1.0);
        out.f2[i] = std::clamp(upper(x), 0.0, 1.0);
        out.h[i] = std::max(0.0, out.f2[i] - out.f1[i]);
    }

    // The exact maximal chord is attained at a vertex abscissa.
    double hmax = 0.0;
    for (const auto& p : normalized.vertices())
        hmax = std::max(hmax, upper(p.x) - lower(p.x));
    if (std::abs(hmax - 1.0) > 1e-4) {
        out.height_correction = 1.0 / hmax;
        for (auto& hv : out.h)
            hv *= out.height_correction;
    }

    if (out.N < 1.0) {
        out.length_too_short = true;
        out.L = out.N;
        out.I_lo = out.a;
        out.I_hi = out.b;
    }
    else {
        EffectiveLength el = effective_length(out.x, out.h);
        out.L = el.L;
        out.I_lo = el.lo;
        out.I_hi = el.hi;
    }
    return out;
}

EffectiveLength superlevel_interval(std::span<const double> x, std::span<const double> h,
                                    double level)
{
    const std::size_t n = h.size();
    std::size_t k = static_cast<std::size_t>(std::max_element(h.begin(), h.end()) - h.begin());
    EffectiveLength out;
    if (h[k] < level) {
        out.lo = out.hi = x[k];
        return out;
    }
    std::size_t i = k;
    while (i > 0 && h[i - 1] >= level)
        --i;
    if (i == 0)
        out.lo = x[0];
    else
        out.lo = x[i - 1] + (x[i] - x[i - 1]) * (level - h[i - 1]) / (h[i] - h[i - 1]);
    std::size_t j = k;
    while (j + 1 < n && h[j + 1] >= level)
        ++j;
    if (j + 1 == n)
        out.hi = x[n - 1];
    else
        out.hi = x[j] + (x[j + 1] - x[j]) * (h[j] - level) / (h[j] - h[j + 1]);
    out.L = out.hi - out.lo;
    return out;
}

EffectiveLength effective_length(std::span<const double> x, std::span<const double> h)
{
    if (x.size() != h.size() || x.size() < 2)
        throw InputError("effective_length: mismatched or too few samples");
    const double N = x.back() - x.front();
    if (N < 1.0)
        throw InputError("effective_length: profile shorter than its width (N < 1)");

    auto excess = [&](double L) {
        return superlevel_interval(x, h, 1.0 - 1.0 / (L * L)).L - L;
    };
    double lo = 1.0, hi = N;
    if (excess(hi) >= 0.0)
        lo = hi;
    while (hi - lo > 1e-10 * hi) {
        double mid = 0.5 * (lo + hi);
        if (excess(mid) >= 0.0)
            lo = mid;
        else
            hi = mid;
    }
    double L = 0.5 * (lo + hi);
    EffectiveLength out = superlevel_interval(x, h, 1.0 - 1.0 / (L * L));
    out.L = L;
    return out;
}

double effective_length(const NormalizedProfile& profile)
{
    return effective_length(profile.x, profile.h).L;
}

}  // namespace effmax::geometry
