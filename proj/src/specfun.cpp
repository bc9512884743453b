#include "effmax/specfun.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "effmax/errors.hpp"

namespace effmax::specfun {

namespace {

// Lanczos approximation, g = 7, nine coefficients.
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_sum(double z)
{
    double s = kLanczos[0];
    for (std::size_t i = 1; i < kLanczos.size(); ++i)
        s += kLanczos[i] / (z + double(i));
    return s;
}

void require_positive(double x, const char* name)
{
    if (!(x > 0.0) || !std::isfinite(x))
        throw InputError(std::string(name) + ": argument must be positive and finite");
}

double bessel_series(int order, double x)
{
    const double q = -0.25 * x * x;
    double term = order == 0 ? 1.0 : 0.5 * x;
    double sum = term;
    for (int k = 1; k < 200; ++k) {
        term *= q / (double(k) * double(k + order));
        sum += term;
        if (std::abs(term) < 1e-17 * std::max(1.0, std::abs(sum)))
            break;
    }
    return sum;
}

double bessel_hankel(int order, double x)
{
    using std::numbers::pi;
    const double mu = 4.0 * order * order;
    double p = 0.0, q = 0.0;
    double a = 1.0;  // a_k(order) / x^k
    double last = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 60; ++k) {
        double mag = std::abs(a);
        if (mag > last)
            break;
        last = mag;
        switch (k % 4) {
        case 0: p += a; break;
        case 1: q += a; break;
        case 2: p -= a; break;
        case 3: q -= a; break;
        }
        if (mag < 1e-17)
            break;
        double odd = 2.0 * k + 1.0;
        a *= (mu - odd * odd) / (8.0 * (k + 1) * x);
    }
    double chi = x - (0.5 * order + 0.25) * pi;
    return std::sqrt(2.0 / (pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace

double gamma_fn(double x)
{
    require_positive(x, "gamma_fn");
    if (x > 170.0)
        throw InputError("gamma_fn: argument above 170 overflows");
    if (x < 0.5)
        return gamma_fn(x + 1.0) / x;
    const double z = x - 1.0;
    const double t = z + kLanczosG + 0.5;
    // Split the power to stay finite up to x = 170.
    const double half = std::pow(t, 0.5 * (z + 0.5));
    return std::sqrt(2.0 * std::numbers::pi) * half * (half * std::exp(-t)) * lanczos_sum(z);
}

double lgamma_fn(double x)
{
    require_positive(x, "lgamma_fn");
    if (x < 0.5)
        return lgamma_fn(x + 1.0) - std::log(x);
    const double z = x - 1.0;
    const double t = z + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t
           + std::log(lanczos_sum(z));
}

double beta_fn(double a, double b)
{
    require_positive(a, "beta_fn");
    require_positive(b, "beta_fn");
    if (a + b <= 170.0)
        return gamma_fn(a) * gamma_fn(b) / gamma_fn(a + b);
    return std::exp(lgamma_fn(a) + lgamma_fn(b) - lgamma_fn(a + b));
}

double digamma(double x)
{
    require_positive(x, "digamma");
    double shift = 0.0;
    while (x < 10.0) {
        shift -= 1.0 / x;
        x += 1.0;
    }
    const double r = 1.0 / (x * x);
    // Bernoulli-number asymptotic series.
    double tail = r * (1.0 / 12
                       - r * (1.0 / 120
                              - r * (1.0 / 252
                                     - r * (1.0 / 240
                                            - r * (1.0 / 132
                                                   - r * (691.0 / 32760 - r / 12.0))))));
    return shift + std::log(x) - 0.5 / x - tail;
}

double bessel_j(int order, double x, const SpecFunConfig& config)
{
    if (order != 0 && order != 1)
        throw InputError("bessel_j: only orders 0 and 1 are supported");
    if (!(x >= 0.0) || x > 100.0)
        throw InputError("bessel_j: argument must lie in [0, 100]");
    if (x < config.switch_radius)
        return bessel_series(order, x);
    return bessel_hankel(order, x);
}

double bessel_j0_first_zero(const SpecFunConfig& config)
{
    double lo = 2.0, hi = 3.0;
    double flo = bessel_j(0, lo, config);
    while (hi - lo > 4e-16 * hi) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        double fm = bessel_j(0, mid, config);
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        }
        else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace effmax::specfun
