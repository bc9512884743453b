#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "effmax/errors.hpp"
#include "effmax/laplace2d.hpp"

namespace effmax::laplace2d {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

// Shortley-Weller discretization of -Laplacian with homogeneous Dirichlet data.
SpMat assemble(const GridDomain& gd)
{
    const double h2 = gd.spacing * gd.spacing;
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(gd.size() * 5);
    for (std::size_t r = 0; r < gd.size(); ++r) {
        const GridNode& nd = gd.nodes[r];
        double diag = 0.0;
        for (int axis = 0; axis < 2; ++axis) {
            int kp = 2 * axis, km = 2 * axis + 1;
            double ap = nd.arm[kp], am = nd.arm[km];
            double s = ap + am;
            diag += 2.0 / (h2 * ap * am);
            if (nd.neighbor[kp] >= 0)
                trips.emplace_back(int(r), nd.neighbor[kp], -2.0 / (h2 * ap * s));
            if (nd.neighbor[km] >= 0)
                trips.emplace_back(int(r), nd.neighbor[km], -2.0 / (h2 * am * s));
        }
        trips.emplace_back(int(r), int(r), diag);
    }
    SpMat A(long(gd.size()), long(gd.size()));
    A.setFromTriplets(trips.begin(), trips.end());
    A.makeCompressed();
    return A;
}

class ShiftedSolver
{
  public:
    explicit ShiftedSolver(const SpMat& A) : A_(A), I_(A.rows(), A.cols())
    {
        I_.setIdentity();
        lu_.analyzePattern(A_);
    }

    void factor(double shift)
    {
        lu_.factorize(A_ - shift * I_);
        if (lu_.info() != Eigen::Success)
            throw SolverError("sparse LU factorization failed");
        shift_ = shift;
        ++factorizations_;
    }

    Vec solve(const Vec& b) const { return lu_.solve(b); }
    double shift() const { return shift_; }
    int factorizations() const { return factorizations_; }

  private:
    const SpMat& A_;
    SpMat I_;
    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu_;
    double shift_ = 0.0;
    int factorizations_ = 0;
};

// Scales to max |x| = 1 with a positive sum.
void normalize_sign_max(Vec& x)
{
    double m = x.cwiseAbs().maxCoeff();
    if (x.sum() < 0.0)
        m = -m;
    x /= m;
}

struct IterationOutcome
{
    Vec u;
    double lambda = 0.0;
    int iterations = 0;
    bool converged = false;
};

IterationOutcome inverse_iteration(const SpMat& A, ShiftedSolver& solver, double tol,
                                   int max_iterations, bool allow_refactor)
{
    IterationOutcome out;
    Vec u = Vec::Ones(A.rows());
    double rq_prev = 0.0;
    double change_prev = 0.0;
    int refactors = 0;
    for (int it = 1; it <= max_iterations; ++it) {
        Vec next = solver.solve(u);
        normalize_sign_max(next);
        double change = (next - u).cwiseAbs().maxCoeff();
        u = std::move(next);
        Vec Au = A * u;
        double rq = u.dot(Au) / u.squaredNorm();
        out.iterations = it;
        bool settled = std::abs(rq - rq_prev) <= tol * std::abs(rq) && change <= 1e-8;
        if (settled) {
            out.u = std::move(u);
            out.lambda = rq;
            out.converged = true;
            return out;
        }
        // Slow contraction: move the shift to the current Rayleigh quotient.
        if (allow_refactor && it >= 3 && refactors < 3 && change > 0.5 * change_prev
            && change_prev > 0.0 && change > 1e-6) {
            solver.factor(rq * (1.0 - 1e-8));
            ++refactors;
            change = 0.0;
        }
        rq_prev = rq;
        change_prev = change;
    }
    out.u = std::move(u);
    out.lambda = rq_prev;
    return out;
}

}  // namespace

EigenResult2D principal_eigen(const GridDomain& gd, double tol, int max_iterations)
{
    using std::numbers::pi;
    const SpMat A = assemble(gd);
    ShiftedSolver solver(A);

    const double R = gd.invariants.inradius, D = gd.invariants.diameter;
    const double lower = 0.25 * pi * pi * (1.0 / (R * R) + 4.0 / (D * D));
    solver.factor(lower);
    IterationOutcome run = inverse_iteration(A, solver, tol, max_iterations, true);

    bool positive = run.converged && (run.u.array() > 0.0).all();
    if (!positive) {
        // Unshifted iteration: A is an M-matrix, so the limit is the Perron vector.
        solver.factor(0.0);
        run = inverse_iteration(A, solver, tol, max_iterations, false);
        if (!run.converged)
            throw SolverError("eigen solver did not converge in "
                              + std::to_string(max_iterations) + " iterations");
        if (!(run.u.array() > 0.0).all())
            throw SolverError("principal eigenvector is not positive");
    }
    if (!(run.lambda > 0.0))
        throw SolverError("computed eigenvalue is not positive (assembly error)");

    EigenResult2D res;
    res.lambda1 = run.lambda;
    res.iterations = run.iterations;
    res.factorizations = solver.factorizations();
    res.shift = solver.shift();
    res.residual = (A * run.u - run.lambda * run.u).cwiseAbs().maxCoeff() / run.lambda;
    Eigen::Index imax = 0;
    run.u.maxCoeff(&imax);
    res.max_index = std::size_t(imax);
    res.max_location = gd.nodes[res.max_index].p;
    res.u.assign(run.u.data(), run.u.data() + run.u.size());
    res.efficiency = efficiency(gd, res);
    return res;
}

double efficiency(const GridDomain& gd, const EigenResult2D& eig)
{
    double num = 0.0, den = 0.0, umax = 0.0;
    for (std::size_t k = 0; k < gd.size(); ++k) {
        num += gd.nodes[k].weight * eig.u[k];
        den += gd.nodes[k].weight;
        umax = std::max(umax, eig.u[k]);
    }
    return num / (den * umax);
}

TorsionResult torsion(const GridDomain& gd, double tol)
{
    const SpMat A = assemble(gd);
    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu(A);
    if (lu.info() != Eigen::Success)
        throw SolverError("sparse LU factorization failed");
    Vec ones = Vec::Ones(A.rows());
    Vec v = lu.solve(ones);
    // One step of iterative refinement.
    v += lu.solve(ones - A * v);
    TorsionResult out;
    out.residual = (A * v - ones).cwiseAbs().maxCoeff();
    if (!(out.residual <= tol * std::max(1.0, A.diagonal().maxCoeff() * v.cwiseAbs().maxCoeff())))
        throw SolverError("torsion solve did not reach tolerance");
    out.v.assign(v.data(), v.data() + v.size());
    out.M = v.maxCoeff();
    return out;
}

double gradient_estimate_residual(const GridDomain& gd, const EigenResult2D& eig, double lambda)
{
    const double h = gd.spacing;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < gd.size(); ++k) {
        const GridNode& nd = gd.nodes[k];
        if (gd.domain.signed_distance(nd.p) < 2.0 * h)
            continue;
        const auto& nb = nd.neighbor;
        if (*std::min_element(nb.begin(), nb.end()) < 0)
            continue;
        double ux = (eig.u[nb[kEast]] - eig.u[nb[kWest]]) / (2.0 * h);
        double uy = (eig.u[nb[kNorth]] - eig.u[nb[kSouth]]) / (2.0 * h);
        double u = eig.u[k];
        worst = std::max(worst, ux * ux + uy * uy - lambda * (1.0 - u * u));
    }
    return worst;
}

double boundary_gradient_ratio(const GridDomain& gd, const EigenResult2D& eig,
                               const TorsionResult& tor)
{
    double worst = 0.0;
    for (std::size_t k = 0; k < gd.size(); ++k) {
        const auto& nb = gd.nodes[k].neighbor;
        if (*std::min_element(nb.begin(), nb.end()) >= 0)
            continue;
        // On a straight edge u_nn = 0 and v_nn = -1, so adding d^2/2 to v
        // removes the first-order bias of the one-sided quotient.
        const double d = gd.domain.signed_distance(gd.nodes[k].p);
        worst = std::max(worst, eig.u[k] / (tor.v[k] + 0.5 * d * d));
    }
    return worst;
}

RichardsonEstimate richardson_eigenvalue(const ConvexDomain2D& domain, double n, double tol)
{
    RichardsonEstimate out;
    out.coarse = principal_eigen(rasterize(domain, n), tol).lambda1;
    out.fine = principal_eigen(rasterize(domain, 2.0 * n), tol).lambda1;
    out.extrapolated = (4.0 * out.fine - out.coarse) / 3.0;
    return out;
}

}  // namespace effmax::laplace2d
