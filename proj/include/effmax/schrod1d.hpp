#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <random>
#include <vector>

#include "effmax/geometry.hpp"

namespace effmax::schrod1d {

/// Value at which pi^2/h^2 is clipped where h vanishes (a numerical wall).
inline constexpr double kPotentialCap = 1e8;

/// Potential W on [alpha, beta], kept as uniform samples (endpoints included)
/// and optionally as an exact evaluator used by the solver.
class Potential1D
{
  public:
    /// Piecewise-linear potential through the samples.
    Potential1D(double alpha, double beta, std::vector<double> samples, bool convex = true,
                double cap = kPotentialCap);
    /// Exact potential; `samples` uniform samples are stored for checks and export.
    Potential1D(double alpha, double beta, std::function<double(double)> w, std::size_t samples,
                bool convex = true, double cap = kPotentialCap);

    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    double length() const { return beta_ - alpha_; }
    double cap() const { return cap_; }
    bool convex() const { return convex_; }
    const std::vector<double>& samples() const { return samples_; }
    double spacing() const { return length() / double(samples_.size() - 1); }

    /// W(x), clipped at the cap.
    double operator()(double x) const;

  private:
    void validate();

    double alpha_;
    double beta_;
    std::vector<double> samples_;
    std::function<double(double)> eval_;
    bool convex_;
    double cap_;
};

/// V = pi^2 / h^2 on [a, b] of a normalized profile, h taken from the exact
/// polygon chords (times the profile's height correction).
Potential1D potential_from_height(const geometry::NormalizedProfile& profile,
                                  double cap = kPotentialCap);

/// Maximum of up to six affine functions plus a quadratic, shifted to min 0 and
/// scaled so that max W is uniform in [0, 50 pi^2 / (beta - alpha)^2].
Potential1D random_convex_potential(std::mt19937_64& rng, double alpha = 0.0, double beta = 1.0);

struct Eigen1D
{
    double alpha = 0.0;
    double beta = 0.0;
    double spacing = 0.0;
    double mu1 = 0.0;
    /// Values at alpha + i * spacing, zero at both ends, max 1.
    std::vector<double> phi;
    bool convex = true;
    int bisection_steps = 0;
    /// max |(T - mu1) phi| / mu1 on interior nodes.
    double residual = 0.0;

    double x(std::size_t i) const { return alpha + double(i) * spacing; }
    double length() const { return beta - alpha; }
};

/// First Dirichlet eigenpair of -d^2/dx^2 + W with `n` interior nodes:
/// Sturm bisection to 1e-12 relative, then three shifted inverse-iteration sweeps.
Eigen1D solve_dirichlet(const Potential1D& pot, std::size_t n);

/// Trapezoid mean of phi over the interval. Throws InequalityViolation when
/// the potential is convex and the ratio exceeds 2/pi + 1e-4.
double mass_ratio(const Eigen1D& eig);

struct LevelWidthCheck
{
    /// max over t of l(t) - (2D/pi) arccos t.
    double max_violation = 0.0;
    double worst_t = 0.0;
    /// max_violation <= 2 spacing.
    bool holds = true;
};

/// l(t) = length of {phi > t} from interpolated crossings. Throws SolverError
/// if phi is not unimodal.
LevelWidthCheck level_width_check(const Eigen1D& eig, const std::vector<double>& t_grid);

/// t = 0, 1/m, ..., (m-1)/m.
std::vector<double> uniform_levels(std::size_t m);

/// True when phi rises to a single maximum and then falls.
bool is_unimodal(const Eigen1D& eig);

struct ModulusCheck
{
    /// max over pairs of w'(y) - w'(x) + (2pi/D) tan(pi (y-x) / 2D) - tau.
    double max_violation = 0.0;
    double worst_x = 0.0;
    double worst_y = 0.0;
    std::size_t pairs = 0;
    bool holds = true;
};

/// Log-concavity modulus on pairs of `sample_nodes` evenly spread nodes with
/// phi > 1e-8 and y - x <= 0.95 D. w' by central differences; the tolerance tau
/// is 10 * spacing * max(|w''(x)|, |w''(y)|) for each pair.
ModulusCheck logconcavity_modulus_check(const Eigen1D& eig, std::size_t sample_nodes = 200);

struct Mu1Window
{
    double L = 0.0;
    double mu1 = 0.0;
    double lower = 0.0;
    /// pi^2 (1 + 3/L^2).
    double upper_leading = 0.0;
    /// (mu1 - upper_leading) L^4; the constant this run needs.
    double c_required = 0.0;
    bool lower_strict = true;
};

/// Requires L >= 4.
Mu1Window mu1_window(const geometry::NormalizedProfile& profile, const Eigen1D& eig);

/// max(0, max c_required) over the runs with the smaller half of the L values.
double fit_window_constant(std::vector<Mu1Window> runs);

/// mu1 <= pi^2 (1 + 3/L^2) + C / L^4, with a 1e-12 relative rounding margin.
bool window_upper_holds(const Mu1Window& w, double C);

/// CSV "x,value" with the potential samples.
void write_potential_csv(const Potential1D& pot, const std::filesystem::path& path);
/// Reads a CSV written by write_potential_csv; x must be uniform.
Potential1D read_potential_csv(const std::filesystem::path& path, bool convex = true);

}  // namespace effmax::schrod1d
