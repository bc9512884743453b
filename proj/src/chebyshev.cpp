// Chebyshev ball of a convex polygon.
//
// Primal: maximize r subject to n_i . c + r <= b_i.
// Dual:   minimize b . y subject to sum y_i n_i = 0, sum y_i = 1, y >= 0.
// The dual is in standard form with three rows, so a dense two-phase
// simplex (Bland's rule) is enough; the primal point is read off as the
// simplex multipliers of the optimal basis.

#include <Eigen/Dense>

#include <algorithm>
#include <limits>

#include "effmax/errors.hpp"
#include "effmax/geometry.hpp"

namespace effmax::geometry {

namespace {

constexpr int kRows = 3;
constexpr double kPivotTol = 1e-12;

struct Tableau
{
    // Row-major, kRows constraint rows plus one objective row; last column is rhs.
    int cols = 0;
    std::vector<double> a;
    std::vector<int> basis;

    double& at(int r, int c) { return a[std::size_t(r) * (cols + 1) + c]; }
    double& rhs(int r) { return at(r, cols); }

    void pivot(int pr, int pc)
    {
        double p = at(pr, pc);
        for (int c = 0; c <= cols; ++c)
            at(pr, c) /= p;
        for (int r = 0; r <= kRows; ++r) {
            if (r == pr)
                continue;
            double f = at(r, pc);
            if (f == 0.0)
                continue;
            for (int c = 0; c <= cols; ++c)
                at(r, c) -= f * at(pr, c);
        }
        basis[pr] = pc;
    }

    // Minimizes the objective stored in row kRows (as reduced costs) over the
    // columns in [0, active). Returns false on an unbounded direction.
    bool run(int active)
    {
        for (int iter = 0; iter < 10000; ++iter) {
            int enter = -1;
            for (int c = 0; c < active; ++c) {
                if (at(kRows, c) < -kPivotTol) {
                    enter = c;
                    break;
                }
            }
            if (enter < 0)
                return true;
            int leave = -1;
            double best = std::numeric_limits<double>::infinity();
            for (int r = 0; r < kRows; ++r) {
                double col = at(r, enter);
                if (col <= kPivotTol)
                    continue;
                double ratio = rhs(r) / col;
                if (ratio < best - 1e-15
                    || (ratio <= best + 1e-15 && leave >= 0 && basis[r] < basis[leave])) {
                    best = ratio;
                    leave = r;
                }
            }
            if (leave < 0)
                return false;
            pivot(leave, enter);
        }
        throw SolverError("inradius simplex did not terminate");
    }
};

}  // namespace

ChebyshevBall chebyshev_ball(const ConvexDomain2D& domain)
{
    const auto& hps = domain.half_planes();
    const auto& verts = domain.vertices();
    const int m = static_cast<int>(hps.size());

    // Work relative to the vertex centroid for conditioning.
    Point origin{0.0, 0.0};
    for (const auto& p : verts)
        origin = origin + p;
    origin = (1.0 / double(verts.size())) * origin;
    std::vector<double> b(m);
    for (int i = 0; i < m; ++i)
        b[i] = hps[i].offset - dot(hps[i].normal, origin);

    Tableau t;
    t.cols = m + kRows;
    t.a.assign(std::size_t(kRows + 1) * (t.cols + 1), 0.0);
    t.basis.resize(kRows);
    for (int i = 0; i < m; ++i) {
        t.at(0, i) = hps[i].normal.x;
        t.at(1, i) = hps[i].normal.y;
        t.at(2, i) = 1.0;
    }
    for (int r = 0; r < kRows; ++r) {
        t.at(r, m + r) = 1.0;
        t.basis[r] = m + r;
    }
    t.rhs(2) = 1.0;

    // Phase I: minimize the sum of artificials.
    for (int c = 0; c <= t.cols; ++c) {
        double s = 0.0;
        for (int r = 0; r < kRows; ++r)
            s += (c >= m && c < m + kRows) ? 0.0 : t.at(r, c);
        t.at(kRows, c) = -s;
    }
    t.run(t.cols);
    if (-t.rhs(kRows) > 1e-9)
        throw SolverError("inradius linear program is infeasible");
    for (int r = 0; r < kRows; ++r) {
        if (t.basis[r] < m)
            continue;
        for (int c = 0; c < m; ++c) {
            if (std::abs(t.at(r, c)) > 1e-9) {
                t.pivot(r, c);
                break;
            }
        }
    }
    for (int r = 0; r < kRows; ++r) {
        if (t.basis[r] >= m)
            throw SolverError("inradius linear program has a degenerate basis");
    }

    // Phase II: reduced costs of b . y over the original columns.
    for (int c = 0; c <= t.cols; ++c)
        t.at(kRows, c) = c < m ? b[c] : 0.0;
    for (int r = 0; r < kRows; ++r) {
        double f = t.at(kRows, t.basis[r]);
        for (int c = 0; c <= t.cols; ++c)
            t.at(kRows, c) -= f * t.at(r, c);
    }
    if (!t.run(m))
        throw SolverError("inradius linear program is unbounded");

    Eigen::Matrix3d B;
    Eigen::Vector3d cb;
    for (int r = 0; r < kRows; ++r) {
        int j = t.basis[r];
        B(0, r) = hps[j].normal.x;
        B(1, r) = hps[j].normal.y;
        B(2, r) = 1.0;
        cb(r) = b[j];
    }
    Eigen::Vector3d z = B.transpose().fullPivLu().solve(cb);

    ChebyshevBall out;
    out.center = Point{z(0), z(1)} + origin;
    out.radius = z(2);
    double dual_obj = 0.0;
    for (int r = 0; r < kRows; ++r)
        dual_obj += b[t.basis[r]] * t.rhs(r);
    out.duality_gap = std::abs(dual_obj - out.radius);
    for (int i = 0; i < m; ++i)
        out.max_violation = std::max(out.max_violation,
                                     hps[i].normal.x * z(0) + hps[i].normal.y * z(1) + z(2) - b[i]);
    if (!(out.radius > 0.0))
        throw InputError("polygon has no interior");
    return out;
}

}  // namespace effmax::geometry
