#pragma once

namespace effmax::specfun {

struct SpecFunConfig
{
    double accuracy = 1e-12;
    /// Bessel J0/J1 use the power series below this radius and the Hankel
    /// asymptotic expansion above it.
    double switch_radius = 12.0;
};

/// Gamma function on (0, 170]; throws InputError outside.
double gamma_fn(double x);
double lgamma_fn(double x);
double beta_fn(double a, double b);
double digamma(double x);

/// J0 or J1 on [0, 100].
double bessel_j(int order, double x, const SpecFunConfig& config = {});

/// First positive zero of J0 by bisection on [2, 3].
double bessel_j0_first_zero(const SpecFunConfig& config = {});

}  // namespace effmax::specfun
