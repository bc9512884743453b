// Quadrature-based quantities of the bounds module: the barrier Phi, its
// derivative w, and the cosine-integral form of eff_a.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>

#include "effmax/bounds.hpp"
#include "effmax/errors.hpp"

namespace effmax::bounds {

namespace {

using std::numbers::pi;
constexpr double kQuadTol = 1e-13;

template <class F>
double tanh_sinh_integral(F f, double a, double b, const char* what)
{
    boost::math::quadrature::tanh_sinh<double> integrator(12);
    double err = 0.0;
    double value = integrator.integrate(f, a, b, kQuadTol, &err);
    if (!(err <= 1e-10 * std::max(1.0, std::abs(value))))
        throw SolverError(std::string(what) + ": quadrature did not converge");
    return value;
}

template <class F>
double kronrod_integral(F f, double a, double b, const char* what)
{
    double err = 0.0;
    double value =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, kQuadTol, &err);
    if (!(err <= 1e-10 * std::max(1.0, std::abs(value))))
        throw SolverError(std::string(what) + ": quadrature did not converge");
    return value;
}

double sinc(double z) { return z < 1e-8 ? 1.0 - z * z / 6.0 : std::sin(z) / z; }

void check_gamma(double gamma)
{
    if (!(gamma >= 1.0) || !std::isfinite(gamma))
        throw InputError("gamma must be finite and at least 1");
}

}  // namespace

double barrier_phi(double s, double gamma)
{
    check_gamma(gamma);
    if (!(s >= 0.0 && s <= 1.0))
        throw InputError("barrier_phi: s must lie in [0, 1]");
    if (s == 1.0)
        return 0.0;
    // With tau = cos(psi) and r = cos(chi) the double integral becomes
    //   gamma int_0^{acos s} sin^{1-gamma}(psi) int_0^psi sin^{gamma-1}(chi) dchi dpsi,
    // and chi = psi v^{1/gamma} turns the inner factor into the bounded form
    //   (psi/gamma) (psi/sin psi)^{gamma-1} int_0^1 sinc(psi v^{1/gamma})^{gamma-1} dv.
    const double e = gamma - 1.0;
    auto outer = [&](double psi) {
        if (psi <= 0.0)
            return 0.0;
        double inner = 1.0;
        if (e != 0.0) {
            inner = tanh_sinh_integral(
                [&](double v) { return std::pow(sinc(psi * std::pow(v, 1.0 / gamma)), e); }, 0.0,
                1.0, "barrier_phi");
        }
        return (psi / gamma) * std::pow(1.0 / sinc(psi), e) * inner;
    };
    return gamma * kronrod_integral(outer, 0.0, std::acos(s), "barrier_phi");
}

double phi0(double gamma) { return barrier_phi(0.0, gamma); }

double w_value(double s, double gamma)
{
    check_gamma(gamma);
    if (!(s >= 0.0 && s < 1.0))
        throw InputError("w_fn: s must lie in [0, 1)");
    // t^{gamma/2} = 1 - p^2 in the representation over t in (0, 1).
    const double s2 = s * s;
    auto f = [&](double p) {
        double lt = (2.0 / gamma) * std::log1p(-p * p);
        double den = -std::expm1(lt) + s2 * std::exp(lt);
        return den > 0.0 ? 2.0 * p / std::sqrt(den) : std::sqrt(2.0 * gamma);
    };
    return tanh_sinh_integral(f, 0.0, 1.0, "w_fn");
}

WResult w_fn(double s, double gamma, double lambda1, double lambda_tilde)
{
    WResult out;
    out.value = w_value(s, gamma);
    const double h = 1e-3;
    double dw;
    if (s >= 2.0 * h) {
        dw = (-w_value(s + 2 * h, gamma) + 8 * w_value(s + h, gamma) - 8 * w_value(s - h, gamma)
              + w_value(s - 2 * h, gamma))
             / (12 * h);
    }
    else {
        dw = (-25 * out.value + 48 * w_value(s + h, gamma) - 36 * w_value(s + 2 * h, gamma)
              + 16 * w_value(s + 3 * h, gamma) - 3 * w_value(s + 4 * h, gamma))
             / (12 * h);
    }
    out.ode_residual =
        std::abs(dw * lambda_tilde * (1 - s * s) - lambda1 * s * out.value + lambda1) / lambda1;
    return out;
}

double eff_a_cosine_integral(double delta)
{
    if (!(delta >= 0.0))
        throw InputError("eff_a_cosine_integral: delta must be non-negative");
    double integral = tanh_sinh_integral([&](double x) { return std::pow(std::cos(x), delta + 1); },
                                         0.0, pi / 2, "eff_a_cosine_integral");
    return (2.0 / pi) * integral;
}

}  // namespace effmax::bounds
