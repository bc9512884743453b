#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "effmax/geometry.hpp"

namespace effmax::laplace2d {

using geometry::ConvexDomain2D;
using geometry::Point;

enum Direction { kEast = 0, kWest = 1, kNorth = 2, kSouth = 3 };

struct GridNode
{
    int i = 0;
    int j = 0;
    Point p;
    /// Distance to the next node or to the boundary, in units of the spacing.
    std::array<double, 4> arm{1.0, 1.0, 1.0, 1.0};
    /// Neighbour node index, or -1 where the arm ends on the boundary.
    std::array<int, 4> neighbor{-1, -1, -1, -1};
    double weight = 0.0;
};

/// Cartesian nodes strictly inside a convex polygon with Shortley-Weller
/// arm lengths. Node (i, j) sits at origin + (i, j) * spacing.
struct GridDomain
{
    ConvexDomain2D domain;
    geometry::GeomInvariants invariants;
    Point origin;
    double spacing = 0.0;
    int nx = 0;
    int ny = 0;
    /// nx * ny lookup from lattice position to node index (-1 outside).
    std::vector<int> index;
    std::vector<GridNode> nodes;

    std::size_t size() const { return nodes.size(); }
    int at(int i, int j) const
    {
        return (i < 0 || j < 0 || i >= nx || j >= ny) ? -1 : index[std::size_t(j) * nx + i];
    }
    double weighted_area() const;
};

/// Nodes closer than this fraction of the spacing to the boundary along an
/// axis are treated as boundary points.
inline constexpr double kMinArm = 1e-3;

/// `n` is the number of nodes per unit length; requires n >= 16 / min_width.
GridDomain rasterize(const ConvexDomain2D& domain, double n);

struct EigenResult2D
{
    /// Eigenfunction on grid nodes, positive, max 1.
    std::vector<double> u;
    double lambda1 = 0.0;
    Point max_location;
    std::size_t max_index = 0;
    double efficiency = 0.0;
    int iterations = 0;
    int factorizations = 0;
    /// ||A u - lambda1 u||_inf / lambda1.
    double residual = 0.0;
    double shift = 0.0;
};

/// Smallest eigenpair of the discrete Dirichlet Laplacian by shifted inverse
/// iteration, stopping when the Rayleigh quotient changes by at most `tol`
/// (relative) and the iterate has settled.
EigenResult2D principal_eigen(const GridDomain& gd, double tol = 1e-10, int max_iterations = 10000);

/// Weighted mean of u over the grid (u has max 1).
double efficiency(const GridDomain& gd, const EigenResult2D& eig);

struct TorsionResult
{
    std::vector<double> v;
    double M = 0.0;
    double residual = 0.0;
};

TorsionResult torsion(const GridDomain& gd, double tol = 1e-10);

/// max of |grad u|^2 - lambda (1 - u^2) over nodes at least two spacings
/// from the boundary, by central differences.
double gradient_estimate_residual(const GridDomain& gd, const EigenResult2D& eig, double lambda);

/// max of u / (v + d^2/2) over nodes adjacent to the boundary, d the distance
/// to it; approximates the ratio |grad u| / |grad v| of normal derivatives.
double boundary_gradient_ratio(const GridDomain& gd, const EigenResult2D& eig,
                               const TorsionResult& tor);

struct RichardsonEstimate
{
    double coarse = 0.0;
    double fine = 0.0;
    double extrapolated = 0.0;
};

/// Eigenvalue on grids n and 2n, extrapolated assuming second-order error.
RichardsonEstimate richardson_eigenvalue(const ConvexDomain2D& domain, double n, double tol = 1e-10);

void write_field_csv(const GridDomain& gd, const std::vector<double>& values,
                     const std::filesystem::path& path);

/// Contours at levels k/10, k = 1..9, of a field scaled to max 1.
void write_contours_svg(const GridDomain& gd, const std::vector<double>& values,
                        const std::filesystem::path& path);

}  // namespace effmax::laplace2d
