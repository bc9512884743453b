#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "effmax/geometry.hpp"
#include "effmax/laplace2d.hpp"
#include "effmax/schrod1d.hpp"

namespace effmax::asymptotics {

/// Resolution rules for elongated domains.
struct GridPolicy
{
    /// Grid nodes per unit of minimal width.
    double thin_nodes = 48.0;
    /// Hard cap on interior grid nodes.
    std::size_t max_nodes = 4'000'000;
    std::size_t profile_samples = 4001;
    /// 1D nodes: at least this many, and at least 400 per effective length.
    std::size_t min_oned_nodes = 4000;
    /// Boundary points used for curved family members.
    int polygon_resolution = 512;
    double tol = 1e-10;

    /// Grid parameter n (nodes per unit length) for `domain`; throws
    /// InputError when the node cap leaves the thin direction under-resolved.
    double resolution(const geometry::ConvexDomain2D& domain) const;
    std::size_t oned_nodes(const geometry::NormalizedProfile& profile) const;
};

/// 2D eigenpair on the normalized domain together with the 1D profile eigenpair.
struct CoupledSolution
{
    geometry::NormalizedProfile profile;
    laplace2d::GridDomain grid;
    laplace2d::EigenResult2D eig;
    schrod1d::Eigen1D oned;

    /// phi_1 at abscissa x by linear interpolation (0 outside [a, b]).
    double phi(double x) const;
    /// Trapezoid integral of phi_1 over [a, b].
    double phi_integral() const;
};

CoupledSolution solve_coupled(const geometry::ConvexDomain2D& domain, const GridPolicy& policy = {});

/// sup |u - phi_1(x) sin(pi (y - f1) / h)| over grid nodes with x in the
/// central interval of length N/2. Requires L >= 4.
double gj_error(const CoupledSolution& sol);
double gj_error(const geometry::ConvexDomain2D& domain, const GridPolicy& policy = {});

/// Scan families and what the parameter means:
///   rectangle          aspect (width param, height 1)
///   ellipse            aspect (semi-axes param and 1)
///   stadium            core length (radius 1/2)
///   isoceles-triangle  base (height 1)
///   rhombus            long diagonal (short diagonal 1)
geometry::ConvexDomain2D family_member(const std::string& family, double param, int resolution = 512);

struct FamilyScanRow
{
    std::string family;
    double param = 0.0;
    double N = 0.0;
    double L = 0.0;
    /// N / L.
    double regime_gamma = 0.0;
    double lambda1 = 0.0;
    double mu1 = 0.0;
    double E = 0.0;
    /// (1/area) * integral of phi_1.
    double mass_ratio = 0.0;
    /// NaN when L < 4.
    double gj_error = 0.0;
    double slack_hersch = 0.0;
    double slack_thm1 = 0.0;
    double slack_eff_a = 0.0;
    double eff_a = 0.0;
    /// Non-empty when the row failed; numeric fields are then NaN.
    std::string error;

    bool ok() const { return error.empty(); }
};

FamilyScanRow scan_row(const std::string& family, double param, const GridPolicy& policy = {});

/// Rows in parameter order; rows run on up to `threads` workers and a failing
/// row records its error without stopping the scan.
std::vector<FamilyScanRow> family_scan(const std::string& family, const std::vector<double>& params,
                                       const GridPolicy& policy = {}, unsigned threads = 1);

/// `steps` values from a to b, evenly or geometrically spaced.
std::vector<double> parameter_range(double a, double b, int steps, bool geometric = false);

inline constexpr const char* kScanHeader =
    "family,param,N,L,regime_gamma,lambda1,mu1,E,mass_ratio,gj_error,slack_hersch,slack_thm1,"
    "slack_eff_a";

void write_scan_csv(const std::vector<FamilyScanRow>& rows, std::ostream& out);
void write_scan_csv(const std::vector<FamilyScanRow>& rows, const std::filesystem::path& path);

/// E against L with the 4/pi^2 and 2/pi reference lines.
void write_scan_svg(const std::vector<FamilyScanRow>& rows, const std::filesystem::path& path);

/// Failed rows and rows breaking E <= 2/pi + 0.01, E <= eff_a + 0.01 or mu1 > pi^2.
std::vector<std::string> scan_violations(const std::vector<FamilyScanRow>& rows);

struct LimsupReport
{
    std::vector<double> L;
    std::vector<double> ratios;
    /// Max of the ratio over the last quartile of rows (by L).
    double last_quartile_max = 0.0;
    double bound = 0.0;
    bool holds = true;
};

/// Checks the last-quartile max of (1/area) int phi_1 against 2/pi + 0.01.
LimsupReport mass_ratio_limsup(const std::vector<FamilyScanRow>& rows);

struct SigmaDecomposition
{
    double sigma = 0.0;
    double area = 0.0;
    double efficiency = 0.0;
    /// Integrals of u over {u <= sigma}, {u > sigma} and the whole domain.
    double sublevel = 0.0;
    double superlevel = 0.0;
    double total = 0.0;
    double sigma_area = 0.0;
    double phi_integral = 0.0;
    /// (2/pi) int phi_1.
    double phi_term = 0.0;
    /// |J_sigma|, J_sigma = {x : max_y u(x, y) > sigma}.
    double J_length = 0.0;
    /// sigma + (2 / (pi area)) int phi_1.
    double composite = 0.0;
    /// sup of |u - phi_1 sin alpha| over nodes with x in J_sigma.
    double gj_residual = 0.0;
    /// gj_residual * |J_sigma| / area.
    double gj_term = 0.0;
    /// composite + gj_term - E.
    double margin = 0.0;
    bool holds = true;
};

SigmaDecomposition sigma_decomposition(const CoupledSolution& sol, double sigma);

}  // namespace effmax::asymptotics
