#pragma once

#include <optional>
#include <string>
#include <vector>

#include "effmax/geometry.hpp"
#include "effmax/laplace2d.hpp"

namespace effmax::bounds {

/// delta = (N-1) pi^2 / (lambda1 D^2 - (N-1) pi^2); requires the denominator > 0.
double delta_omega(double lambda1, double D, int N = 2);

struct EigenvalueLowerBounds
{
    double hersch = 0.0;
    double protter = 0.0;
    /// Planar only; NaN for N != 2.
    double hernandez = 0.0;
    double thm1 = 0.0;
};

EigenvalueLowerBounds eigenvalue_lower_bounds(double R, double D, int N = 2);

/// sum_{k>=1} 2k / ((2k+1)^2 (delta+1+2k)), with absolute error at most tol.
///
/// Sums K = ceil(1/sqrt(8 tol)) terms and adds the midpoint of the integral
/// bounds on the remainder, whose half-width is at most f(K)/2 <= 1/(8K^2).
double payne_series(double delta, double tol = 1e-12);

/// pi^2/8 + delta * payne_series(delta).
double payne_refined(double delta, double tol = 1e-12);

/// Barrier Phi(s) for gamma >= 1, s in [0, 1], by nested quadrature.
double barrier_phi(double s, double gamma);
double phi0(double gamma);

/// w(s) = -Phi'(s) on [0, 1).
double w_value(double s, double gamma);

struct WResult
{
    double value = 0.0;
    /// |w' lambda_tilde (1-s^2) - lambda1 s w + lambda1| / lambda1 with a
    /// five-point derivative.
    double ode_residual = 0.0;
};

WResult w_fn(double s, double gamma, double lambda1, double lambda_tilde);

struct EfficiencyBounds
{
    double eff_a = 0.0;
    double eff_b = 0.0;
    /// eff_a recomputed as (2/pi) int_0^{pi/2} cos^{delta+1} x dx.
    double eff_a_quadrature = 0.0;
};

EfficiencyBounds efficiency_upper_bounds(double delta);

/// (2/pi) int_0^{pi/2} cos^{delta+1} x dx by adaptive quadrature.
double eff_a_cosine_integral(double delta);

/// Gamma(x+1/2) / Gamma(x+1) * sqrt(x+1/2) for x > -1/2.
double gamma_ratio_f(double x);

/// lambda1 / w(0, gamma).
double boundary_gradient_constant(double lambda1, double gamma);

/// One inequality `larger >= smaller` with slack (larger - smaller) / |larger|.
struct InequalityCheck
{
    std::string name;
    std::string relation;
    double larger = 0.0;
    double smaller = 0.0;
    double slack = 0.0;
    /// slack >= -allowance.
    bool holds = true;
};

struct ReportInputs
{
    geometry::GeomInvariants geometry;
    double lambda1 = 0.0;
    double efficiency = 0.0;
    double torsion_max = 0.0;
    int dimension = 2;
    std::optional<double> boundary_gradient_ratio;
    std::optional<double> gradient_residual;
};

struct BoundReport
{
    int dimension = 2;
    double lambda1 = 0.0;
    double lambda_tilde = 0.0;
    double R = 0.0;
    double D = 0.0;
    double area = 0.0;
    double E = 0.0;
    double M = 0.0;
    double delta = 0.0;
    double gamma = 0.0;
    /// delta with the thm1 lower bound in place of lambda1.
    double delta_certified = 0.0;
    EigenvalueLowerBounds lower;
    double payne_classic = 0.0;
    double payne_refined = 0.0;
    double product = 0.0;
    double ps_classic = 0.0;
    double eff_a = 0.0;
    double eff_b = 0.0;
    double boundary_gradient_constant = 0.0;
    std::optional<double> boundary_gradient_ratio;
    std::optional<double> gradient_residual;
    double allowance = 0.02;
    std::vector<InequalityCheck> checks;

    bool all_hold() const;
    const InequalityCheck& check(const std::string& name) const;
};

BoundReport build_report(const ReportInputs& in, double allowance = 0.02);

/// Report from grid solver outputs; includes the boundary-gradient ratio and
/// the gradient-estimate residual measured on the grid.
BoundReport full_report(const laplace2d::GridDomain& gd, const laplace2d::EigenResult2D& eig,
                        const laplace2d::TorsionResult& tor, double allowance = 0.02);

}  // namespace effmax::bounds
