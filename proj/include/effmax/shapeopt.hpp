#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "effmax/geometry.hpp"

namespace effmax::shapeopt {

/// Number of theta samples on which convexity is enforced.
inline constexpr int kThetaGrid = 720;

/// Truncated support function s(t) = a0 + sum_{k=2..K} (a_k cos kt + b_k sin kt).
/// The k = 1 modes are translations and are left out.
struct SupportShape
{
    double a0 = 1.0;
    /// a[k-2], b[k-2] hold the order-k coefficients.
    std::vector<double> a;
    std::vector<double> b;

    explicit SupportShape(int K = 8);
    static SupportShape disk(int K = 8);
    /// Fourier truncation of the unit square's support function (may be infeasible).
    static SupportShape square_like(int K = 8);

    int order() const { return int(a.size()) + 1; }
    double s(double t) const;
    double ds(double t) const;
    /// Radius of curvature s + s''.
    double rho(double t) const;
    /// 1e-3 * a0.
    double rho_min() const { return 1e-3 * a0; }
    /// min of s + s'' over the theta grid.
    double min_rho() const;
    bool feasible() const { return min_rho() >= rho_min(); }

    /// (a_2, b_2, a_3, b_3, ...): the search coordinates.
    std::vector<double> coordinates() const;
    void set_coordinates(const std::vector<double>& x);
    /// FNV-1a over the coefficient bits.
    std::uint64_t hash() const;
};

/// m boundary points s(t)(cos t, sin t) + s'(t)(-sin t, cos t). Throws
/// InputError for infeasible shapes.
geometry::ConvexDomain2D to_polygon(const SupportShape& shape, int m = 256);

/// Scales the k >= 2 coefficients by the largest factor in (0, 1] keeping
/// s + s'' >= rho_min on the theta grid. The constraint is linear in the
/// factor, so the factor is exact rather than bisected.
SupportShape project_feasible(const SupportShape& shape);

struct OptimizerConfig
{
    /// Grid nodes across the minimal width for the screening and confirming grids.
    double coarse_width_nodes = 64.0;
    double fine_width_nodes = 256.0;
    int boundary_points = 256;
    double initial_step = 0.05;
    double min_step = 1e-4;
    /// Fraction of distinct screened shapes confirmed on the fine grid.
    double confirm_fraction = 0.1;
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

struct Evaluation
{
    std::uint64_t hash = 0;
    std::vector<double> coefficients;
    /// "coarse" or "fine".
    std::string level;
    double E = 0.0;
};

struct SearchState
{
    SupportShape best;
    /// Fine-grid efficiency of `best`.
    double best_E = 0.0;
    double best_E_coarse = 0.0;
    /// Fine-grid efficiency of the (projected) seed.
    double seed_E = 0.0;
    /// Running best coarse E after each coarse evaluation.
    std::vector<double> trace;
    std::vector<Evaluation> log;
    std::vector<double> steps;
    int evaluations = 0;
    int sweeps = 0;
};

/// E of the polygonized shape on a grid with `width_nodes` nodes across its minimal width.
double evaluate(const SupportShape& shape, double width_nodes, int boundary_points = 256);

/// Pattern search from `seed` (rescaled to a0 = 1) with `budget` coarse
/// evaluations. Each sweep tries +-step along every coordinate from the current
/// point, in an order shuffled by the config seed; the best improving
/// candidate is accepted, otherwise all steps halve. The best screened shapes
/// and the seed are then re-evaluated on the fine grid.
SearchState maximize_efficiency(const SupportShape& seed, int budget, const OptimizerConfig& config = {});

/// One JSON object per line: hash, coefficients, level, E.
void write_log_jsonl(const SearchState& state, const std::filesystem::path& path);

}  // namespace effmax::shapeopt
