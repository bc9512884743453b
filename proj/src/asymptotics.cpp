#include "effmax/asymptotics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include "effmax/bounds.hpp"
#include "effmax/errors.hpp"

namespace effmax::asymptotics {

using geometry::ConvexDomain2D;
using std::numbers::pi;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v)
{
    if (std::isnan(v))
        return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// |u - phi_1 sin(alpha)| at grid node k.
double uncoupling_gap(const CoupledSolution& sol, std::size_t k)
{
    const auto& p = sol.grid.nodes[k].p;
    auto [lo, hi] = geometry::column_bounds(sol.profile.domain, p.x);
    const double h = hi - lo;
    const double model = h > 0.0 ? sol.phi(p.x) * std::sin(pi * (p.y - lo) / h) : 0.0;
    return std::abs(sol.eig.u[k] - model);
}

// Length of {x : f(x) > level} for the piecewise-linear interpolant of (xs, fs).
double superlevel_length(const std::vector<double>& xs, const std::vector<double>& fs, double level)
{
    double len = 0.0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        const double f0 = fs[i] - level, f1 = fs[i + 1] - level, dx = xs[i + 1] - xs[i];
        if (f0 > 0.0 && f1 > 0.0)
            len += dx;
        else if (f0 > 0.0)
            len += dx * f0 / (f0 - f1);
        else if (f1 > 0.0)
            len += dx * f1 / (f1 - f0);
    }
    return len;
}

}  // namespace

double GridPolicy::resolution(const ConvexDomain2D& domain) const
{
    const auto inv = geometry::invariants(domain);
    double n = thin_nodes / inv.min_width;
    const double nodes = inv.area * n * n;
    if (nodes > double(max_nodes)) {
        n = std::sqrt(double(max_nodes) / inv.area);
        if (n < 16.0 / inv.min_width)
            throw InputError("grid node cap " + std::to_string(max_nodes)
                             + " leaves the thin direction under-resolved");
    }
    return n;
}

std::size_t GridPolicy::oned_nodes(const geometry::NormalizedProfile& profile) const
{
    const double per_length = 400.0 * profile.N / std::max(profile.L, 1e-12);
    return std::min<std::size_t>(2'000'000, std::max<std::size_t>(min_oned_nodes, std::size_t(std::ceil(per_length))));
}

double CoupledSolution::phi(double x) const
{
    if (x <= oned.alpha || x >= oned.beta)
        return 0.0;
    const double t = (x - oned.alpha) / oned.spacing;
    const std::size_t i = std::min(static_cast<std::size_t>(t), oned.phi.size() - 2);
    const double f = t - double(i);
    return (1.0 - f) * oned.phi[i] + f * oned.phi[i + 1];
}

double CoupledSolution::phi_integral() const
{
    double s = 0.0;
    for (std::size_t i = 1; i + 1 < oned.phi.size(); ++i)
        s += oned.phi[i];
    return (s + 0.5 * (oned.phi.front() + oned.phi.back())) * oned.spacing;
}

CoupledSolution solve_coupled(const ConvexDomain2D& domain, const GridPolicy& policy)
{
    auto profile = geometry::normalize(domain, policy.profile_samples);
    auto grid = laplace2d::rasterize(profile.domain, policy.resolution(profile.domain));
    auto eig = laplace2d::principal_eigen(grid, policy.tol);
    auto oned = schrod1d::solve_dirichlet(schrod1d::potential_from_height(profile),
                                          policy.oned_nodes(profile));
    CoupledSolution sol{std::move(profile), std::move(grid), std::move(eig), std::move(oned)};
    return sol;
}

double gj_error(const CoupledSolution& sol)
{
    const auto& pr = sol.profile;
    if (!(pr.L >= 4.0))
        throw InputError("uncoupling error needs effective length L >= 4 (got " + std::to_string(pr.L)
                         + ")");
    const double lo = pr.a + 0.25 * pr.N, hi = pr.b - 0.25 * pr.N;
    double worst = 0.0;
    for (std::size_t k = 0; k < sol.grid.size(); ++k) {
        const double x = sol.grid.nodes[k].p.x;
        if (x >= lo && x <= hi)
            worst = std::max(worst, uncoupling_gap(sol, k));
    }
    return worst;
}

double gj_error(const ConvexDomain2D& domain, const GridPolicy& policy)
{
    return gj_error(solve_coupled(domain, policy));
}

ConvexDomain2D family_member(const std::string& family, double param, int resolution)
{
    if (!(param > 0.0) || !std::isfinite(param))
        throw InputError("family parameter must be positive (got " + fmt(param) + ")");
    if (family == "rectangle")
        return geometry::make_family(family, {{"width", param}, {"height", 1.0}});
    if (family == "ellipse")
        return geometry::make_family(family, {{"a", param}, {"b", 1.0}}, resolution);
    if (family == "stadium")
        return geometry::make_family(family, {{"core", param}, {"radius", 0.5}}, resolution);
    if (family == "isoceles-triangle")
        return geometry::make_family(family, {{"base", param}, {"height", 1.0}});
    if (family == "rhombus")
        return geometry::make_family(family, {{"d1", param}, {"d2", 1.0}});
    throw InputError("unknown scan family '" + family
                     + "' (expected rectangle, ellipse, stadium, isoceles-triangle or rhombus)");
}

FamilyScanRow scan_row(const std::string& family, double param, const GridPolicy& policy)
{
    FamilyScanRow row;
    row.family = family;
    row.param = param;
    try {
        const CoupledSolution sol = solve_coupled(family_member(family, param, policy.polygon_resolution), policy);
        const auto& inv = sol.grid.invariants;
        row.N = sol.profile.N;
        row.L = sol.profile.L;
        row.regime_gamma = row.N / row.L;
        row.lambda1 = sol.eig.lambda1;
        row.mu1 = sol.oned.mu1;
        row.E = sol.eig.efficiency;
        row.mass_ratio = sol.phi_integral() / inv.area;
        row.gj_error = row.L >= 4.0 ? gj_error(sol) : kNaN;
        const auto lower = bounds::eigenvalue_lower_bounds(inv.inradius, inv.diameter);
        row.slack_hersch = (row.lambda1 - lower.hersch) / row.lambda1;
        row.slack_thm1 = (row.lambda1 - lower.thm1) / row.lambda1;
        row.eff_a = bounds::efficiency_upper_bounds(bounds::delta_omega(row.lambda1, inv.diameter)).eff_a;
        row.slack_eff_a = (row.eff_a - row.E) / row.eff_a;
    }
    catch (const Error& e) {
        FamilyScanRow failed;
        failed.family = family;
        failed.param = param;
        for (double* v : {&failed.N, &failed.L, &failed.regime_gamma, &failed.lambda1, &failed.mu1,
                          &failed.E, &failed.mass_ratio, &failed.gj_error, &failed.slack_hersch,
                          &failed.slack_thm1, &failed.slack_eff_a, &failed.eff_a})
            *v = kNaN;
        failed.error = e.what();
        return failed;
    }
    return row;
}

std::vector<FamilyScanRow> family_scan(const std::string& family, const std::vector<double>& params,
                                       const GridPolicy& policy, unsigned threads)
{
    family_member(family, 1.0, policy.polygon_resolution);
    std::vector<FamilyScanRow> rows(params.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < params.size(); i = next++)
            rows[i] = scan_row(family, params[i], policy);
    };
    const unsigned n = std::max(1u, std::min<unsigned>(threads, unsigned(params.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();
    return rows;
}

std::vector<double> parameter_range(double a, double b, int steps, bool geometric)
{
    if (steps < 1)
        throw InputError("range needs at least one step");
    if (!(a > 0.0) || !(b >= a))
        throw InputError("range needs 0 < A <= B");
    std::vector<double> out(steps);
    for (int i = 0; i < steps; ++i) {
        const double t = steps == 1 ? 0.0 : double(i) / double(steps - 1);
        out[i] = geometric ? a * std::pow(b / a, t) : a + (b - a) * t;
    }
    out.back() = b;
    return out;
}

void write_scan_csv(const std::vector<FamilyScanRow>& rows, std::ostream& out)
{
    out << kScanHeader << '\n';
    for (const auto& r : rows) {
        out << r.family;
        for (double v : {r.param, r.N, r.L, r.regime_gamma, r.lambda1, r.mu1, r.E, r.mass_ratio,
                         r.gj_error, r.slack_hersch, r.slack_thm1, r.slack_eff_a})
            out << ',' << fmt(v);
        out << '\n';
    }
}

void write_scan_csv(const std::vector<FamilyScanRow>& rows, const std::filesystem::path& path)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out)
        throw InputError("cannot write " + path.string());
    write_scan_csv(rows, out);
}

void write_scan_svg(const std::vector<FamilyScanRow>& rows, const std::filesystem::path& path)
{
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : rows)
        if (r.ok())
            pts.emplace_back(r.L, r.E);
    const double W = 640, H = 400, m = 50;
    double xmin = 0.0, xmax = 1.0;
    if (!pts.empty()) {
        xmin = pts.front().first;
        xmax = pts.front().first;
        for (auto [x, y] : pts) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
        }
        if (xmax <= xmin)
            xmax = xmin + 1.0;
    }
    const double ymin = 0.0, ymax = 0.7;
    auto sx = [&](double x) { return m + (x - xmin) / (xmax - xmin) * (W - 2 * m); };
    auto sy = [&](double y) { return H - m - (y - ymin) / (ymax - ymin) * (H - 2 * m); };

    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out)
        throw InputError("cannot write " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<line x1=\"" << m << "\" y1=\"" << H - m << "\" x2=\"" << W - m << "\" y2=\"" << H - m
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << m << "\" y1=\"" << m << "\" x2=\"" << m << "\" y2=\"" << H - m
        << "\" stroke=\"black\"/>\n";
    for (auto [name, y] : {std::pair{"4/pi^2", 4 / (pi * pi)}, std::pair{"2/pi", 2 / pi}}) {
        out << "<line data-ref=\"" << name << "\" x1=\"" << m << "\" y1=\"" << fmt(sy(y)) << "\" x2=\""
            << W - m << "\" y2=\"" << fmt(sy(y)) << "\" stroke=\"gray\" stroke-dasharray=\"4 4\"/>\n";
        out << "<text x=\"" << W - m + 4 << "\" y=\"" << fmt(sy(y) + 4) << "\" font-size=\"11\">" << name
            << "</text>\n";
    }
    out << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i)
        out << (i ? " " : "") << fmt(sx(pts[i].first)) << ',' << fmt(sy(pts[i].second));
    out << "\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" font-size=\"12\">L (" << fmt(xmin) << " to "
        << fmt(xmax) << ")</text>\n";
    out << "<text x=\"8\" y=\"" << m - 12 << "\" font-size=\"12\">E</text>\n";
    out << "</svg>\n";
}

std::vector<std::string> scan_violations(const std::vector<FamilyScanRow>& rows)
{
    std::vector<std::string> out;
    for (const auto& r : rows) {
        const std::string tag = r.family + " param " + fmt(r.param) + ": ";
        if (!r.ok()) {
            out.push_back(tag + "failed: " + r.error);
            continue;
        }
        if (r.E > 2 / pi + 0.01)
            out.push_back(tag + "E = " + fmt(r.E) + " exceeds 2/pi + 0.01");
        if (r.E > r.eff_a + 0.01)
            out.push_back(tag + "E = " + fmt(r.E) + " exceeds eff_a + 0.01 = " + fmt(r.eff_a + 0.01));
        if (!(r.mu1 > pi * pi))
            out.push_back(tag + "mu1 = " + fmt(r.mu1) + " is not above pi^2");
    }
    return out;
}

LimsupReport mass_ratio_limsup(const std::vector<FamilyScanRow>& rows)
{
    std::vector<const FamilyScanRow*> ok;
    for (const auto& r : rows)
        if (r.ok())
            ok.push_back(&r);
    std::stable_sort(ok.begin(), ok.end(), [](auto* a, auto* b) { return a->L < b->L; });
    LimsupReport rep;
    rep.bound = 2 / pi + 0.01;
    for (auto* r : ok) {
        rep.L.push_back(r->L);
        rep.ratios.push_back(r->mass_ratio);
    }
    if (ok.empty())
        return rep;
    const std::size_t start = ok.size() - std::max<std::size_t>(1, (ok.size() + 3) / 4);
    rep.last_quartile_max = *std::max_element(rep.ratios.begin() + long(start), rep.ratios.end());
    rep.holds = rep.last_quartile_max <= rep.bound;
    return rep;
}

SigmaDecomposition sigma_decomposition(const CoupledSolution& sol, double sigma)
{
    if (!(sigma > 0.0 && sigma <= 1.0))
        throw InputError("sigma must lie in (0, 1]");
    const auto& gd = sol.grid;
    SigmaDecomposition d;
    d.sigma = sigma;
    d.efficiency = sol.eig.efficiency;
    for (std::size_t k = 0; k < gd.size(); ++k) {
        const double w = gd.nodes[k].weight, u = sol.eig.u[k];
        d.area += w;
        (u <= sigma ? d.sublevel : d.superlevel) += w * u;
    }
    d.total = d.sublevel + d.superlevel;
    d.sigma_area = sigma * d.area;

    // Column maxima of u, with zeros at the ends of [a, b].
    std::vector<double> colmax(std::size_t(gd.nx), 0.0);
    for (std::size_t k = 0; k < gd.size(); ++k)
        colmax[std::size_t(gd.nodes[k].i)] = std::max(colmax[std::size_t(gd.nodes[k].i)], sol.eig.u[k]);
    std::vector<double> xs, fs;
    xs.push_back(sol.profile.a);
    fs.push_back(0.0);
    for (int i = 0; i < gd.nx; ++i) {
        const double x = gd.origin.x + i * gd.spacing;
        if (x > xs.back() && x < sol.profile.b) {
            xs.push_back(x);
            fs.push_back(colmax[std::size_t(i)]);
        }
    }
    xs.push_back(sol.profile.b);
    fs.push_back(0.0);
    d.J_length = superlevel_length(xs, fs, sigma);

    for (std::size_t k = 0; k < gd.size(); ++k)
        if (colmax[std::size_t(gd.nodes[k].i)] > sigma)
            d.gj_residual = std::max(d.gj_residual, uncoupling_gap(sol, k));

    d.phi_integral = sol.phi_integral();
    d.phi_term = (2.0 / pi) * d.phi_integral;
    d.composite = sigma + d.phi_term / d.area;
    d.gj_term = d.gj_residual * d.J_length / d.area;
    d.margin = d.composite + d.gj_term - d.efficiency;
    d.holds = d.margin >= 0.0;
    return d;
}

}  // namespace effmax::asymptotics
