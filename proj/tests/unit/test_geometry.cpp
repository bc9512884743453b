#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "doctest.h"
#include "effmax/errors.hpp"
#include "effmax/geometry.hpp"

using namespace effmax::geometry;
using std::numbers::pi;

namespace {

std::vector<Point> hull(std::vector<Point> pts)
{
    std::sort(pts.begin(), pts.end(),
              [](Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    std::vector<Point> h(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 1e-9)
            --k;
        h[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
        while (k >= t && cross(h[k - 1] - h[k - 2], pts[i - 1] - h[k - 2]) <= 1e-9)
            --k;
        h[k++] = pts[i - 1];
    }
    h.resize(k - 1);
    return h;
}

ConvexDomain2D random_polygon(std::mt19937_64& rng, int npts)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> stretch(0.2, 3.0);
    double sx = stretch(rng), sy = stretch(rng);
    std::vector<Point> pts;
    for (int i = 0; i < npts; ++i)
        pts.push_back({sx * u(rng), sy * u(rng)});
    return ConvexDomain2D(hull(pts));
}

double brute_diameter(const std::vector<Point>& v)
{
    double d = 0.0;
    for (const auto& p : v)
        for (const auto& q : v)
            d = std::max(d, norm(p - q));
    return d;
}

double brute_width(const ConvexDomain2D& dom)
{
    double w = std::numeric_limits<double>::infinity();
    for (const auto& hp : dom.half_planes()) {
        double extent = 0.0;
        for (const auto& p : dom.vertices())
            extent = std::max(extent, hp.offset - dot(hp.normal, p));
        w = std::min(w, extent);
    }
    return w;
}

double brute_inradius(const ConvexDomain2D& dom)
{
    const auto& hp = dom.half_planes();
    const std::size_t m = hp.size();
    double best = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            for (std::size_t k = j + 1; k < m; ++k) {
                Eigen::Matrix3d A;
                Eigen::Vector3d b;
                std::size_t idx[3] = {i, j, k};
                for (int r = 0; r < 3; ++r) {
                    A(r, 0) = hp[idx[r]].normal.x;
                    A(r, 1) = hp[idx[r]].normal.y;
                    A(r, 2) = 1.0;
                    b(r) = hp[idx[r]].offset;
                }
                auto lu = A.fullPivLu();
                if (!lu.isInvertible())
                    continue;
                Eigen::Vector3d z = lu.solve(b);
                Point c{z(0), z(1)};
                if (dom.signed_distance(c) >= z(2) - 1e-12)
                    best = std::max(best, z(2));
            }
    return best;
}

}  // namespace

TEST_CASE("domain validation")
{
    CHECK_THROWS_AS(ConvexDomain2D({{0, 0}, {1, 0}}), effmax::InputError);
    CHECK_THROWS_AS(ConvexDomain2D({{0, 0}, {1, 0}, {2, 0}}), effmax::InputError);
    // Non-convex dart.
    CHECK_THROWS_AS(ConvexDomain2D({{0, 0}, {2, 0}, {1, 0.3}, {1, 2}}), effmax::InputError);
    // Collinear midpoint breaks strict convexity.
    CHECK_THROWS_AS(ConvexDomain2D({{0, 0}, {1, 0}, {2, 0}, {2, 2}}), effmax::InputError);
    // Pentagram has positive turns but winds twice.
    std::vector<Point> star;
    for (int k = 0; k < 5; ++k)
        star.push_back({std::cos(4 * pi * k / 5), std::sin(4 * pi * k / 5)});
    CHECK_THROWS_AS(ConvexDomain2D{star}, effmax::InputError);

    ConvexDomain2D cw({{0, 0}, {0, 1}, {1, 1}, {1, 0}, {0, 0}});
    CHECK(cw.size() == 4);
    CHECK(polygon_area(cw.vertices()) == doctest::Approx(1.0));
}

TEST_CASE("families")
{
    auto sq = make_family("rectangle", {{"width", 1}, {"height", 1}});
    CHECK(sq.size() == 4);

    auto disk = make_family("disk", {{"radius", 1}}, 512);
    CHECK(disk.size() == 512);
    double inscribed = 0.5 * 512 * std::sin(2 * pi / 512);
    CHECK(polygon_area(disk.vertices()) == doctest::Approx(inscribed).epsilon(1e-12));
    CHECK(std::abs(polygon_area(disk.vertices()) - pi) / pi < 1e-4);

    auto ell = make_family("ellipse", {{"a", 4}, {"b", 1}}, 512);
    auto inv = invariants(ell);
    CHECK(inv.diameter == doctest::Approx(8.0).epsilon(1e-6));
    CHECK(std::abs(inv.min_width - 2.0) < 1e-4);
    // Dense-angle width scan of the exact ellipse: w(t) = 2 sqrt(a^2 sin^2 + b^2 cos^2).
    double wmin = 1e9;
    for (int k = 0; k < 100000; ++k) {
        double t = pi * k / 100000;
        wmin = std::min(wmin, 2 * std::sqrt(16 * std::pow(std::sin(t), 2) + std::pow(std::cos(t), 2)));
    }
    CHECK(std::abs(inv.min_width - wmin) < 1e-4);

    CHECK_THROWS_AS(make_family("blob", {}), effmax::InputError);
    CHECK_THROWS_AS(make_family("rectangle", {{"width", -1}, {"height", 1}}), effmax::InputError);
    CHECK_THROWS_AS(make_family("rectangle", {{"width", 1}}), effmax::InputError);
    CHECK_THROWS_AS(make_family("rectangle", {{"width", 1}, {"height", 1}, {"depth", 1}}),
                    effmax::InputError);
    CHECK_THROWS_AS(make_family("circular-sector", {{"radius", 1}, {"angle", pi}}),
                    effmax::InputError);
    CHECK_THROWS_AS(make_family("disk", {{"radius", 1}}, 32), effmax::InputError);

    for (const auto& [name, params] :
         std::vector<std::pair<std::string, std::map<std::string, double>>>{
             {"isoceles-triangle", {{"base", 2}, {"height", 3}}},
             {"rhombus", {{"d1", 3}, {"d2", 1}}},
             {"stadium", {{"core", 4}, {"radius", 0.5}}},
             {"circular-sector", {{"radius", 1}, {"angle", 2.0}}},
             {"regular-n-gon", {{"n", 7}}}}) {
        auto d = make_family(name, params, 256);
        CHECK(d.provenance().family == name);
        auto iv = invariants(d);
        CHECK(iv.inradius > 0);
        CHECK(iv.inradius <= iv.diameter / 2);
        CHECK(iv.inradius <= iv.min_width);
        CHECK(iv.min_width <= iv.diameter);
        CHECK(iv.area <= pi * iv.diameter * iv.diameter / 4);
    }

    auto st = make_family("stadium", {{"core", 10}, {"radius", 0.5}}, 512);
    auto sv = invariants(st);
    CHECK(sv.diameter == doctest::Approx(11.0).epsilon(1e-12));
    CHECK(sv.min_width == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sv.inradius == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("invariants on anchors")
{
    auto sq = make_family("rectangle", {{"width", 1}, {"height", 1}});
    auto inv = invariants(sq);
    CHECK(inv.inradius == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(inv.diameter == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(inv.area == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(inv.width_direction == 0.0);
    CHECK(inv.width_direction_ambiguous);

    ConvexDomain2D tri({{0, 0}, {3, 0}, {0, 4}});
    auto ti = invariants(tri);
    CHECK(ti.inradius == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ti.diameter == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(ti.chebyshev_center.x == doctest::Approx(1.0));
    CHECK(ti.chebyshev_center.y == doctest::Approx(1.0));
    // Smallest altitude is onto the hypotenuse: 12/5.
    CHECK(ti.min_width == doctest::Approx(2.4).epsilon(1e-14));

    auto thin = make_family("rectangle", {{"width", 1}, {"height", 0.1}});
    auto th = invariants(thin);
    CHECK(th.inradius == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(th.diameter == doctest::Approx(std::sqrt(1.01)).epsilon(1e-14));
    CHECK(th.min_width == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(th.width_direction == 0.0);
    CHECK_FALSE(th.width_direction_ambiguous);
}

TEST_CASE("calipers and linear program agree with brute force")
{
    std::mt19937_64 rng(20240611);
    for (int trial = 0; trial < 200; ++trial) {
        auto dom = random_polygon(rng, 6 + trial % 20);
        auto inv = invariants(dom);
        double D = brute_diameter(dom.vertices());
        CHECK(inv.diameter == doctest::Approx(D).epsilon(1e-12));
        CHECK(inv.min_width == doctest::Approx(brute_width(dom)).epsilon(1e-12));
        CHECK(std::abs(inv.inradius - brute_inradius(dom)) <= 1e-10 * D);
        auto ball = chebyshev_ball(dom);
        CHECK(ball.max_violation <= 1e-10 * D);
        CHECK(ball.duality_gap <= 1e-10 * D);
        CHECK(dom.signed_distance(ball.center) == doctest::Approx(ball.radius).epsilon(1e-10));
    }
}

TEST_CASE("scaling, rotation and translation")
{
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        auto dom = random_polygon(rng, 12);
        auto base = invariants(dom);
        for (double t : {0.5, 2.0, 7.0}) {
            auto iv = invariants(dom.scaled(t));
            CHECK(iv.inradius == doctest::Approx(t * base.inradius).epsilon(1e-12));
            CHECK(iv.diameter == doctest::Approx(t * base.diameter).epsilon(1e-12));
            CHECK(iv.area == doctest::Approx(t * t * base.area).epsilon(1e-12));
        }
        auto moved = invariants(dom.rotated(0.3 + trial).translated({3.5, -2.25}));
        CHECK(moved.inradius == doctest::Approx(base.inradius).epsilon(1e-10));
        CHECK(moved.diameter == doctest::Approx(base.diameter).epsilon(1e-10));
        CHECK(moved.area == doctest::Approx(base.area).epsilon(1e-10));
    }
}

TEST_CASE("normalize")
{
    auto sq = make_family("rectangle", {{"width", 1}, {"height", 1}});
    auto p = normalize(sq, 101);
    CHECK(p.N == doctest::Approx(1.0));
    for (std::size_t i = 0; i < p.x.size(); ++i) {
        CHECK(p.f1[i] == doctest::Approx(0.0));
        CHECK(p.f2[i] == doctest::Approx(1.0));
    }
    CHECK(p.L == doctest::Approx(1.0));

    auto st = make_family("stadium", {{"core", 10}, {"radius", 0.5}}, 512);
    auto ps = normalize(st, 2201);
    CHECK(ps.N == doctest::Approx(11.0).epsilon(1e-12));
    for (std::size_t i = 0; i < ps.x.size(); ++i) {
        double x = ps.x[i];
        double expect = 1.0;
        if (x < 0.5)
            expect = 2 * std::sqrt(std::max(0.0, 0.25 - (0.5 - x) * (0.5 - x)));
        else if (x > 10.5)
            expect = 2 * std::sqrt(std::max(0.0, 0.25 - (x - 10.5) * (x - 10.5)));
        CHECK(std::abs(ps.h[i] - expect) < 2e-3);
    }

    auto ell = make_family("ellipse", {{"a", 4}, {"b", 1}}, 2048);
    auto pe = normalize(ell, 4001);
    CHECK(pe.N == doctest::Approx(4.0).epsilon(1e-6));
    double err = 0.0;
    for (std::size_t i = 0; i < pe.x.size(); ++i) {
        double s = 2 * pe.x[i] / pe.N - 1;
        err = std::max(err, std::abs(pe.h[i] - std::sqrt(std::max(0.0, 1 - s * s))));
    }
    CHECK(err < 1e-3);

    // Rotated, translated input yields the same profile.
    auto pr = normalize(ell.rotated(0.7).translated({5, 5}), 4001);
    CHECK(pr.N == doctest::Approx(pe.N).epsilon(1e-9));
    CHECK(pr.L == doctest::Approx(pe.L).epsilon(1e-6));
}

TEST_CASE("profile invariants across families")
{
    for (const auto& [name, params] :
         std::vector<std::pair<std::string, std::map<std::string, double>>>{
             {"rectangle", {{"width", 6}, {"height", 1}}},
             {"ellipse", {{"a", 8}, {"b", 1}}},
             {"isoceles-triangle", {{"base", 1}, {"height", 9}}},
             {"rhombus", {{"d1", 7}, {"d2", 1}}},
             {"stadium", {{"core", 5}, {"radius", 0.5}}},
             {"circular-sector", {{"radius", 1}, {"angle", 0.3}}}}) {
        CAPTURE(name);
        auto dom = make_family(name, params, 512);
        auto p = normalize(dom, 4001);
        auto inv = invariants(p.domain);
        CHECK(inv.min_width == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(p.N >= inv.area - 1e-9);
        CHECK(inv.area >= p.N / 2 - 1e-9);
        CHECK(std::cbrt(p.N) <= p.L + 1e-6);
        CHECK(p.L <= p.N + 1e-9);
        // Extremes sit at vertex abscissae, which the uniform grid may miss.
        CHECK(*std::min_element(p.f1.begin(), p.f1.end()) < p.spacing());
        CHECK(*std::max_element(p.f2.begin(), p.f2.end()) > 1 - p.spacing());
        CHECK(std::abs(*std::max_element(p.h.begin(), p.h.end()) - 1) < 1e-3);
        for (std::size_t i = 1; i + 1 < p.x.size(); ++i) {
            CHECK(p.f1[i - 1] - 2 * p.f1[i] + p.f1[i + 1] >= -1e-8);
            CHECK(p.f2[i - 1] - 2 * p.f2[i] + p.f2[i + 1] <= 1e-8);
        }
        double level = 1 - 1 / (p.L * p.L);
        for (std::size_t i = 0; i < p.x.size(); ++i)
            if (p.x[i] >= p.I_lo + p.spacing() && p.x[i] <= p.I_hi - p.spacing())
                CHECK(p.h[i] >= level - 1e-9);
        CHECK(std::abs((p.I_hi - p.I_lo) - p.L) < 2 * p.spacing());

        auto again = normalize(p.domain, 4001);
        CHECK(again.N == doctest::Approx(p.N).epsilon(1e-8));
        double diff = 0.0;
        for (std::size_t i = 0; i < p.h.size(); ++i)
            diff = std::max({diff, std::abs(again.f1[i] - p.f1[i]), std::abs(again.f2[i] - p.f2[i])});
        CHECK(diff < 1e-8);
    }
}

TEST_CASE("effective length")
{
    std::vector<double> x, h;
    for (int i = 0; i <= 1000; ++i) {
        x.push_back(10.0 * i / 1000);
        h.push_back(1.0);
    }
    CHECK(effective_length(x, h).L == doctest::Approx(10.0));

    x.clear();
    h.clear();
    const double N = 64;
    for (int i = 0; i <= 64000; ++i) {
        double xi = N * i / 64000;
        x.push_back(xi);
        h.push_back(1 - std::abs(2 * xi / N - 1));
    }
    auto tent = effective_length(x, h);
    CHECK(tent.L >= 4.0 - 1e-6);
    CHECK(tent.L <= 2 * std::cbrt(N));
    CHECK(tent.L == doctest::Approx(4.0).epsilon(1e-4));

    // Ellipse profile: bisection vs brute-force scan of candidate lengths.
    x.clear();
    h.clear();
    const double Ne = 16;
    for (int i = 0; i <= 16000; ++i) {
        double xi = Ne * i / 16000;
        double s = 2 * xi / Ne - 1;
        x.push_back(xi);
        h.push_back(std::sqrt(std::max(0.0, 1 - s * s)));
    }
    double L = effective_length(x, h).L;
    double best = 1, gap = 1e9;
    for (int k = 0; k < 10000; ++k) {
        double cand = 1 + (Ne - 1) * k / 9999.0;
        double g = superlevel_interval(x, h, 1 - 1 / (cand * cand)).L;
        if (std::abs(g - cand) < gap) {
            gap = std::abs(g - cand);
            best = cand;
        }
    }
    CHECK(std::abs(L - best) < 2 * (Ne - 1) / 9999.0);
    CHECK(std::abs(L - std::sqrt(2 * Ne)) < 0.2 * std::sqrt(2 * Ne));

    std::vector<double> xs{0, 0.5}, hs{1, 1};
    CHECK_THROWS_AS(effective_length(xs, hs), effmax::InputError);
}

TEST_CASE("round domains")
{
    auto disk = make_family("disk", {{"radius", 1}}, 512);
    auto p = normalize(disk, 501);
    CHECK(p.N == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(p.L == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(p.L <= p.N + 1e-12);

    auto tiny = make_family("rectangle", {{"width", 1}, {"height", 1}});
    auto pt = normalize(tiny.scaled(3.0), 11);
    CHECK(pt.N == doctest::Approx(1.0));
}
