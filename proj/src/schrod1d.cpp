#include "effmax/schrod1d.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "effmax/errors.hpp"

namespace effmax::schrod1d {

using std::numbers::pi;

namespace {

double clip(double v, double cap)
{
    if (std::isnan(v))
        throw InputError("potential evaluates to NaN");
    return std::min(v, cap);
}

double column_height(const geometry::ConvexDomain2D& dom, double x)
{
    auto [lo, hi] = geometry::column_bounds(dom, x);
    return std::max(0.0, hi - lo);
}

// Number of eigenvalues of the tridiagonal matrix below mu.
int sturm_count(const std::vector<double>& diag, double off2, double mu)
{
    int count = 0;
    double q = 1.0;
    for (std::size_t i = 0; i < diag.size(); ++i) {
        q = diag[i] - mu - (i == 0 ? 0.0 : off2 / q);
        if (q == 0.0)
            q = -1e-300;
        if (q < 0.0)
            ++count;
    }
    return count;
}

}  // namespace

Potential1D::Potential1D(double alpha, double beta, std::vector<double> samples, bool convex,
                         double cap)
    : alpha_(alpha), beta_(beta), samples_(std::move(samples)), convex_(convex), cap_(cap)
{
    for (double& v : samples_)
        v = clip(v, cap_);
    validate();
}

Potential1D::Potential1D(double alpha, double beta, std::function<double(double)> w,
                         std::size_t samples, bool convex, double cap)
    : alpha_(alpha), beta_(beta), eval_(std::move(w)), convex_(convex), cap_(cap)
{
    if (samples < 3)
        throw InputError("potential needs at least 3 samples");
    samples_.resize(samples);
    for (std::size_t i = 0; i < samples; ++i)
        samples_[i] = clip(eval_(alpha_ + (beta_ - alpha_) * double(i) / double(samples - 1)), cap_);
    validate();
}

void Potential1D::validate()
{
    if (!(alpha_ < beta_) || !std::isfinite(alpha_) || !std::isfinite(beta_))
        throw InputError("potential interval must satisfy alpha < beta");
    if (samples_.size() < 3)
        throw InputError("potential needs at least 3 samples");
    if (!(cap_ > 0.0))
        throw InputError("potential cap must be positive");
    if (!convex_)
        return;
    double scale = 0.0;
    for (double v : samples_)
        if (v < cap_)
            scale = std::max(scale, std::abs(v));
    if (scale == 0.0)
        scale = 1.0;
    // Triples touching the cap are skipped: clipping breaks convexity there.
    for (std::size_t i = 1; i + 1 < samples_.size(); ++i) {
        if (samples_[i - 1] >= cap_ || samples_[i] >= cap_ || samples_[i + 1] >= cap_)
            continue;
        double d2 = samples_[i - 1] - 2.0 * samples_[i] + samples_[i + 1];
        if (d2 < -1e-8 * scale)
            throw InputError("potential flagged convex has a negative second difference at x = "
                             + std::to_string(alpha_ + double(i) * spacing()));
    }
}

double Potential1D::operator()(double x) const
{
    if (eval_)
        return clip(eval_(x), cap_);
    double t = std::clamp((x - alpha_) / spacing(), 0.0, double(samples_.size() - 1));
    std::size_t i = std::min(static_cast<std::size_t>(t), samples_.size() - 2);
    double f = t - double(i);
    return (1.0 - f) * samples_[i] + f * samples_[i + 1];
}

Potential1D potential_from_height(const geometry::NormalizedProfile& profile, double cap)
{
    const geometry::ConvexDomain2D dom = profile.domain;
    const double scale = profile.height_correction;
    const double a = profile.a, b = profile.b;
    // Interior nodes must see a positive height.
    for (std::size_t i = 1; i + 1 < profile.x.size(); ++i)
        if (!(column_height(dom, profile.x[i]) * scale > 0.0))
            throw InputError("height vanishes at interior abscissa " + std::to_string(profile.x[i]));
    auto V = [dom, scale, a, b](double x) {
        double h = scale * column_height(dom, std::clamp(x, a, b));
        return h > 0.0 ? pi * pi / (h * h) : std::numeric_limits<double>::infinity();
    };
    return Potential1D(a, b, V, std::max<std::size_t>(profile.x.size(), 3), true, cap);
}

Potential1D random_convex_potential(std::mt19937_64& rng, double alpha, double beta)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> pieces(1, 6);
    const int k = pieces(rng);
    std::vector<double> slope(k), intercept(k);
    for (int j = 0; j < k; ++j) {
        slope[j] = 4.0 * u(rng) - 2.0;
        intercept[j] = 2.0 * u(rng) - 1.0;
    }
    const double q = u(rng) < 0.3 ? 0.0 : 4.0 * u(rng);
    const double c = u(rng);
    auto f = [=](double t) {
        double m = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < k; ++j)
            m = std::max(m, slope[j] * t + intercept[j]);
        return m + q * (t - c) * (t - c);
    };
    // A convex function peaks at an endpoint; the minimum is located on a fine scan.
    double fmax = std::max(f(0.0), f(1.0));
    double fmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 4000; ++i)
        fmin = std::min(fmin, f(i / 4000.0));
    const double D = beta - alpha;
    const double target = u(rng) * 50.0 * pi * pi / (D * D);
    const double span = fmax - fmin;
    auto W = [=](double x) {
        if (span <= 0.0)
            return 0.0;
        return target * (f((x - alpha) / D) - fmin) / span;
    };
    return Potential1D(alpha, beta, W, 1001, true);
}

Eigen1D solve_dirichlet(const Potential1D& pot, std::size_t n)
{
    if (n < 200)
        throw InputError("solve_dirichlet needs at least 200 interior nodes");
    Eigen1D out;
    out.alpha = pot.alpha();
    out.beta = pot.beta();
    out.convex = pot.convex();
    out.spacing = pot.length() / double(n + 1);
    const double dx = out.spacing;
    const double inv = 1.0 / (dx * dx);
    std::vector<double> diag(n);
    double wmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        double w = pot(out.x(i + 1));
        wmin = std::min(wmin, w);
        diag[i] = 2.0 * inv + w;
    }
    const double off2 = inv * inv;

    // Rayleigh quotient of the free sine mode bounds mu1 from above.
    double num = 0.0, den = 0.0;
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i)
        s[i] = std::sin(pi * double(i + 1) / double(n + 1));
    for (std::size_t i = 0; i < n; ++i) {
        double ts = diag[i] * s[i];
        if (i > 0)
            ts -= inv * s[i - 1];
        if (i + 1 < n)
            ts -= inv * s[i + 1];
        num += s[i] * ts;
        den += s[i] * s[i];
    }
    double lo = wmin, hi = num / den * (1.0 + 1e-9) + 1e-300;
    if (sturm_count(diag, off2, lo) != 0 || sturm_count(diag, off2, hi) < 1)
        throw SolverError("Sturm counts inconsistent with the eigenvalue bracket");
    while (hi - lo > 1e-12 * std::abs(hi) && out.bisection_steps < 400) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        (sturm_count(diag, off2, mid) >= 1 ? hi : lo) = mid;
        ++out.bisection_steps;
    }
    out.mu1 = 0.5 * (lo + hi);

    // T - sigma is positive definite for sigma below lo, so the Thomas sweep
    // needs no pivoting and returns a positive vector. The gap is tied to the
    // largest diagonal entry so pivot roundoff cannot close it; a few sweeps
    // then remove what the wider gap lets through.
    const double dmax = *std::max_element(diag.begin(), diag.end());
    const double sigma = lo - std::max(1e-10 * std::max(std::abs(lo), 1.0), 1e-12 * dmax);
    std::vector<double> c(n), y(n, 1.0);
    for (int sweep = 0; sweep < 3; ++sweep) {
        double piv = diag[0] - sigma;
        c[0] = -inv / piv;
        y[0] /= piv;
        for (std::size_t i = 1; i < n; ++i) {
            piv = diag[i] - sigma + inv * c[i - 1];
            if (!(piv > 0.0))
                throw SolverError("shifted matrix lost definiteness in the inverse solve");
            c[i] = -inv / piv;
            y[i] = (y[i] + inv * y[i - 1]) / piv;
        }
        for (std::size_t i = n - 1; i-- > 0;)
            y[i] -= c[i] * y[i + 1];
        const double top = *std::max_element(y.begin(), y.end());
        for (double& v : y)
            v /= top;
    }
    out.phi.assign(n + 2, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        out.phi[i + 1] = y[i];

    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = out.phi;
        double r = diag[i] * p[i + 1] - inv * (p[i] + p[i + 2]) - out.mu1 * p[i + 1];
        out.residual = std::max(out.residual, std::abs(r) / std::abs(out.mu1));
    }
    return out;
}

double mass_ratio(const Eigen1D& eig)
{
    double sum = 0.0;
    for (std::size_t i = 1; i + 1 < eig.phi.size(); ++i)
        sum += eig.phi[i];
    sum += 0.5 * (eig.phi.front() + eig.phi.back());
    const double ratio = sum * eig.spacing / eig.length();
    if (eig.convex && ratio > 2.0 / pi + 1e-4)
        throw InequalityViolation("mass ratio " + std::to_string(ratio)
                                  + " exceeds 2/pi for a convex potential");
    return ratio;
}

bool is_unimodal(const Eigen1D& eig)
{
    const auto& p = eig.phi;
    const std::size_t top = std::max_element(p.begin(), p.end()) - p.begin();
    const double tol = 1e-14;
    for (std::size_t i = 1; i <= top; ++i)
        if (p[i] < p[i - 1] - tol)
            return false;
    for (std::size_t i = top + 1; i < p.size(); ++i)
        if (p[i] > p[i - 1] + tol)
            return false;
    return true;
}

std::vector<double> uniform_levels(std::size_t m)
{
    std::vector<double> t(m);
    for (std::size_t i = 0; i < m; ++i)
        t[i] = double(i) / double(m);
    return t;
}

LevelWidthCheck level_width_check(const Eigen1D& eig, const std::vector<double>& t_grid)
{
    if (!is_unimodal(eig))
        throw SolverError("eigenvector is not unimodal; refine the grid");
    const auto& p = eig.phi;
    const double D = eig.length();
    LevelWidthCheck out;
    out.max_violation = -std::numeric_limits<double>::infinity();
    for (double t : t_grid) {
        if (!(t >= 0.0 && t <= 1.0))
            throw InputError("levels must lie in [0, 1]");
        double width = 0.0;
        auto first = std::find_if(p.begin(), p.end(), [t](double v) { return v > t; });
        if (first != p.end()) {
            std::size_t i = first - p.begin();
            std::size_t j = p.size() - 1 - (std::find_if(p.rbegin(), p.rend(),
                                                         [t](double v) { return v > t; })
                                            - p.rbegin());
            double xl = eig.x(i - 1) + (t - p[i - 1]) / (p[i] - p[i - 1]) * eig.spacing;
            double xr = eig.x(j) + (p[j] - t) / (p[j] - p[j + 1]) * eig.spacing;
            width = xr - xl;
        }
        double v = width - (2.0 * D / pi) * std::acos(t);
        if (v > out.max_violation) {
            out.max_violation = v;
            out.worst_t = t;
        }
    }
    out.holds = out.max_violation <= 2.0 * eig.spacing;
    return out;
}

ModulusCheck logconcavity_modulus_check(const Eigen1D& eig, std::size_t sample_nodes)
{
    const auto& p = eig.phi;
    const double dx = eig.spacing, D = eig.length();
    struct Node
    {
        double x, dw, d2w;
    };
    std::vector<Node> eligible;
    for (std::size_t i = 1; i + 1 < p.size(); ++i) {
        if (p[i - 1] <= 1e-8 || p[i] <= 1e-8 || p[i + 1] <= 1e-8)
            continue;
        double wl = std::log(p[i - 1]), w = std::log(p[i]), wr = std::log(p[i + 1]);
        eligible.push_back({eig.x(i), (wr - wl) / (2.0 * dx), (wr - 2.0 * w + wl) / (dx * dx)});
    }
    std::vector<Node> nodes;
    if (sample_nodes < 2 || eligible.size() <= sample_nodes) {
        nodes = eligible;
    }
    else {
        for (std::size_t k = 0; k < sample_nodes; ++k)
            nodes.push_back(eligible[k * (eligible.size() - 1) / (sample_nodes - 1)]);
    }

    ModulusCheck out;
    out.max_violation = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < nodes.size(); ++a)
        for (std::size_t b = a + 1; b < nodes.size(); ++b) {
            const double gap = nodes[b].x - nodes[a].x;
            if (gap > 0.95 * D)
                continue;
            const double rhs = -(2.0 * pi / D) * std::tan(pi * gap / (2.0 * D));
            const double tau = 10.0 * dx * std::max(std::abs(nodes[a].d2w), std::abs(nodes[b].d2w));
            const double v = nodes[b].dw - nodes[a].dw - rhs - tau;
            ++out.pairs;
            if (v > out.max_violation) {
                out.max_violation = v;
                out.worst_x = nodes[a].x;
                out.worst_y = nodes[b].x;
            }
        }
    out.holds = out.pairs == 0 || out.max_violation <= 0.0;
    return out;
}

Mu1Window mu1_window(const geometry::NormalizedProfile& profile, const Eigen1D& eig)
{
    if (!(profile.L >= 4.0))
        throw InputError("mu1 window needs effective length L >= 4 (got "
                         + std::to_string(profile.L) + ")");
    Mu1Window w;
    w.L = profile.L;
    w.mu1 = eig.mu1;
    w.lower = pi * pi;
    w.upper_leading = pi * pi * (1.0 + 3.0 / (w.L * w.L));
    w.c_required = (w.mu1 - w.upper_leading) * std::pow(w.L, 4);
    w.lower_strict = w.mu1 > w.lower;
    return w;
}

double fit_window_constant(std::vector<Mu1Window> runs)
{
    std::sort(runs.begin(), runs.end(), [](const auto& a, const auto& b) { return a.L < b.L; });
    double C = 0.0;
    for (std::size_t i = 0; i < (runs.size() + 1) / 2; ++i)
        C = std::max(C, runs[i].c_required);
    return C;
}

bool window_upper_holds(const Mu1Window& w, double C)
{
    return w.mu1 <= (w.upper_leading + C / std::pow(w.L, 4)) * (1.0 + 1e-12);
}

void write_potential_csv(const Potential1D& pot, const std::filesystem::path& path)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out)
        throw InputError("cannot write " + path.string());
    out.precision(17);
    out << "x,value\n";
    for (std::size_t i = 0; i < pot.samples().size(); ++i)
        out << pot.alpha() + double(i) * pot.spacing() << ',' << pot.samples()[i] << '\n';
}

Potential1D read_potential_csv(const std::filesystem::path& path, bool convex)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot read " + path.string());
    std::string line;
    std::getline(in, line);
    if (line != "x,value")
        throw InputError(path.string() + ":1: expected header 'x,value'");
    std::vector<double> xs, vs;
    for (int row = 2; std::getline(in, line); ++row) {
        if (line.empty())
            continue;
        std::istringstream ss(line);
        double x, v;
        char comma;
        if (!(ss >> x >> comma >> v) || comma != ',')
            throw InputError(path.string() + ":" + std::to_string(row) + ": expected 'x,value'");
        xs.push_back(x);
        vs.push_back(v);
    }
    if (xs.size() < 3)
        throw InputError(path.string() + ": need at least 3 rows");
    const double dx = (xs.back() - xs.front()) / double(xs.size() - 1);
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (std::abs(xs[i] - (xs.front() + double(i) * dx)) > 1e-9 * std::abs(xs.back() - xs.front()))
            throw InputError(path.string() + ":" + std::to_string(i + 2) + ": x grid is not uniform");
    return Potential1D(xs.front(), xs.back(), vs, convex);
}

}  // namespace effmax::schrod1d
