#include "effmax/bounds.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "effmax/errors.hpp"
#include "effmax/specfun.hpp"

namespace effmax::bounds {

using std::numbers::pi;

double delta_omega(double lambda1, double D, int N)
{
    if (N < 2)
        throw InputError("dimension must be at least 2");
    const double base = (N - 1) * pi * pi;
    const double denom = lambda1 * D * D - base;
    if (!(denom > 0.0))
        throw InputError("delta undefined: lambda1 D^2 must exceed (N-1) pi^2 (got lambda1 = "
                         + std::to_string(lambda1) + ", D = " + std::to_string(D) + ")");
    return base / denom;
}

EigenvalueLowerBounds eigenvalue_lower_bounds(double R, double D, int N)
{
    if (!(R > 0.0) || !(R < D))
        throw InputError("lower bounds need 0 < R < D");
    const double q = 0.25 * pi * pi;
    EigenvalueLowerBounds b;
    b.hersch = q / (R * R);
    b.protter = q * (1.0 / (R * R) + (N - 1) / (D * D));
    b.hernandez = N == 2 ? q * (1.0 / (R * R) + 1.0 / ((D - R) * (D - R)))
                         : std::numeric_limits<double>::quiet_NaN();
    b.thm1 = q * (1.0 / (R * R) + 4.0 * (N - 1) / (D * D));
    return b;
}

double payne_series(double delta, double tol)
{
    if (!(delta >= 0.0))
        throw InputError("payne_series: delta must be non-negative");
    if (!(tol > 0.0))
        throw InputError("payne_series: tolerance must be positive");
    const double c = 1.0 + delta;
    const long K = std::max(1L, static_cast<long>(std::ceil(1.0 / std::sqrt(8.0 * tol))));

    // Integral of the summand over [K, inf), written with T = 2K+1 and
    // x = delta/T so that delta -> 0 stays cancellation free.
    auto tail_integral = [&](double Kd) {
        const double T = 2.0 * Kd + 1.0;
        const double x = delta / T;
        double g, gm1_over_x;
        if (x < 1e-4) {
            g = 1.0 - x / 2.0 + x * x / 3.0 - x * x * x / 4.0;
            gm1_over_x = -0.5 + x / 3.0 - x * x / 4.0;
        }
        else {
            g = std::log1p(x) / x;
            gm1_over_x = (g - 1.0) / x;
        }
        return (g + gm1_over_x / T) / (2.0 * T);
    };

    double sum = 0.0;
    for (long k = K; k >= 1; --k) {
        const double kd = double(k);
        const double t = 2.0 * kd + 1.0;
        sum += 2.0 * kd / (t * t * (c + 2.0 * kd));
    }
    return sum + 0.5 * (tail_integral(double(K)) + tail_integral(double(K + 1)));
}

double payne_refined(double delta, double tol)
{
    return pi * pi / 8.0 + delta * payne_series(delta, tol);
}

EfficiencyBounds efficiency_upper_bounds(double delta)
{
    if (!(delta >= 0.0))
        throw InputError("efficiency bounds need delta >= 0");
    EfficiencyBounds b;
    // Gamma(1) / (sqrt(pi) Gamma(3/2)) = 2/pi, returned exactly rather than through lgamma.
    b.eff_a = delta == 0.0 ? 2.0 / pi
                           : std::exp(specfun::lgamma_fn(0.5 * delta + 1.0)
                                      - specfun::lgamma_fn(0.5 * (delta + 3.0)))
                                 / std::sqrt(pi);
    b.eff_b = (2.0 / pi) * std::sqrt(2.0 / (2.0 + delta));
    b.eff_a_quadrature = eff_a_cosine_integral(delta);
    return b;
}

double gamma_ratio_f(double x)
{
    if (!(x > -0.5))
        throw InputError("gamma_ratio_f: x must exceed -1/2");
    return std::exp(specfun::lgamma_fn(x + 0.5) - specfun::lgamma_fn(x + 1.0)) * std::sqrt(x + 0.5);
}

double boundary_gradient_constant(double lambda1, double gamma)
{
    if (!(gamma >= 1.0))
        throw InputError("boundary_gradient_constant: gamma must be at least 1");
    return lambda1 * std::exp(specfun::lgamma_fn(0.5 * (gamma + 1.0))
                              - specfun::lgamma_fn(0.5 * gamma + 1.0))
           / std::sqrt(pi);
}

bool BoundReport::all_hold() const
{
    for (const auto& c : checks)
        if (!c.holds)
            return false;
    return true;
}

const InequalityCheck& BoundReport::check(const std::string& name) const
{
    for (const auto& c : checks)
        if (c.name == name)
            return c;
    throw InputError("no inequality named '" + name + "'");
}

BoundReport build_report(const ReportInputs& in, double allowance)
{
    BoundReport r;
    r.dimension = in.dimension;
    r.lambda1 = in.lambda1;
    r.R = in.geometry.inradius;
    r.D = in.geometry.diameter;
    r.area = in.geometry.area;
    r.E = in.efficiency;
    r.M = in.torsion_max;
    r.allowance = allowance;
    r.lambda_tilde = in.lambda1 - (in.dimension - 1) * pi * pi / (r.D * r.D);
    r.delta = delta_omega(in.lambda1, r.D, in.dimension);
    r.gamma = 1.0 + r.delta;
    r.lower = eigenvalue_lower_bounds(r.R, r.D, in.dimension);
    r.delta_certified = delta_omega(r.lower.thm1, r.D, in.dimension);
    r.payne_classic = pi * pi / 8.0;
    r.payne_refined = payne_refined(r.delta);
    r.product = r.lambda1 * r.M;
    r.ps_classic = 2.0 / pi;
    EfficiencyBounds eb = efficiency_upper_bounds(r.delta);
    r.eff_a = eb.eff_a;
    r.eff_b = eb.eff_b;
    r.boundary_gradient_constant = boundary_gradient_constant(r.lambda1, r.gamma);
    r.boundary_gradient_ratio = in.boundary_gradient_ratio;
    r.gradient_residual = in.gradient_residual;

    auto add = [&](const char* name, const char* relation, double larger, double smaller) {
        InequalityCheck c;
        c.name = name;
        c.relation = relation;
        c.larger = larger;
        c.smaller = smaller;
        c.slack = (larger - smaller) / std::abs(larger);
        c.holds = c.slack >= -allowance;
        r.checks.push_back(c);
    };
    add("hersch", "lambda1 >= hersch", r.lambda1, r.lower.hersch);
    add("protter", "lambda1 >= protter", r.lambda1, r.lower.protter);
    if (in.dimension == 2)
        add("hernandez", "lambda1 >= hernandez", r.lambda1, r.lower.hernandez);
    add("thm1", "lambda1 >= thm1", r.lambda1, r.lower.thm1);
    add("payne_torsion", "lambda1*M >= pi^2/8", r.product, r.payne_classic);
    add("thm2", "lambda1*M >= payne_refined", r.product, r.payne_refined);
    add("payne_stakgold", "2/pi >= E", r.ps_classic, r.E);
    add("eff_a", "eff_a >= E", r.eff_a, r.E);
    add("eff_b", "eff_b >= eff_a", r.eff_b, r.eff_a);
    if (r.boundary_gradient_ratio)
        add("boundary_gradient", "constant >= |grad u|/|grad v| on the boundary",
            r.boundary_gradient_constant, *r.boundary_gradient_ratio);
    return r;
}

BoundReport full_report(const laplace2d::GridDomain& gd, const laplace2d::EigenResult2D& eig,
                        const laplace2d::TorsionResult& tor, double allowance)
{
    ReportInputs in;
    in.geometry = gd.invariants;
    in.lambda1 = eig.lambda1;
    in.efficiency = eig.efficiency;
    in.torsion_max = tor.M;
    in.boundary_gradient_ratio = laplace2d::boundary_gradient_ratio(gd, eig, tor);
    const double D = gd.invariants.diameter;
    in.gradient_residual =
        laplace2d::gradient_estimate_residual(gd, eig, eig.lambda1 - pi * pi / (D * D));
    return build_report(in, allowance);
}

}  // namespace effmax::bounds
