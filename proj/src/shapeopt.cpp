#include "effmax/shapeopt.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <thread>

#include "effmax/errors.hpp"
#include "effmax/laplace2d.hpp"
#include "json.hpp"

namespace effmax::shapeopt {

using std::numbers::pi;

namespace {

// Runs fn(i) for i in [0, n) on up to `threads` workers.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F fn)
{
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++)
            fn(i);
    };
    const unsigned count = std::max(1u, std::min<unsigned>(threads, unsigned(n)));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < count; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();
}

// min over the theta grid of sum_k (1 - k^2)(a_k cos kt + b_k sin kt).
double min_high_order_curvature(const SupportShape& s)
{
    double lo = std::numeric_limits<double>::infinity();
    for (int j = 0; j < kThetaGrid; ++j) {
        const double t = 2.0 * pi * j / kThetaGrid;
        lo = std::min(lo, s.rho(t) - s.a0);
    }
    return lo;
}

std::vector<double> all_coefficients(const SupportShape& s)
{
    std::vector<double> c{s.a0};
    for (std::size_t i = 0; i < s.a.size(); ++i) {
        c.push_back(s.a[i]);
        c.push_back(s.b[i]);
    }
    return c;
}

double safe_evaluate(const SupportShape& shape, double width_nodes, int boundary_points)
{
    try {
        return evaluate(shape, width_nodes, boundary_points);
    }
    catch (const InequalityViolation&) {
        throw;
    }
    catch (const Error&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

}  // namespace

SupportShape::SupportShape(int K)
{
    if (K < 2)
        throw InputError("support-function order K must be at least 2");
    a.assign(std::size_t(K - 1), 0.0);
    b.assign(std::size_t(K - 1), 0.0);
}

SupportShape SupportShape::disk(int K) { return SupportShape(K); }

SupportShape SupportShape::square_like(int K)
{
    // Support function of the square with corners (+-1/2, +-1/2):
    // (|cos t| + |sin t|) / 2 = (2/pi) [1 - 2 sum_{j even} cos(2jt) / (4j^2 - 1)].
    SupportShape s(K);
    s.a0 = 2.0 / pi;
    for (int k = 4; k <= K; k += 4) {
        const int j = k / 2;
        s.a[std::size_t(k - 2)] = -(4.0 / pi) / (4.0 * j * j - 1.0);
    }
    return s;
}

double SupportShape::s(double t) const
{
    double v = a0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double k = double(i + 2);
        v += a[i] * std::cos(k * t) + b[i] * std::sin(k * t);
    }
    return v;
}

double SupportShape::ds(double t) const
{
    double v = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double k = double(i + 2);
        v += k * (-a[i] * std::sin(k * t) + b[i] * std::cos(k * t));
    }
    return v;
}

double SupportShape::rho(double t) const
{
    double v = a0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double k = double(i + 2);
        v += (1.0 - k * k) * (a[i] * std::cos(k * t) + b[i] * std::sin(k * t));
    }
    return v;
}

double SupportShape::min_rho() const { return a0 + min_high_order_curvature(*this); }

std::vector<double> SupportShape::coordinates() const
{
    std::vector<double> x;
    for (std::size_t i = 0; i < a.size(); ++i) {
        x.push_back(a[i]);
        x.push_back(b[i]);
    }
    return x;
}

void SupportShape::set_coordinates(const std::vector<double>& x)
{
    if (x.size() != 2 * a.size())
        throw InputError("coordinate vector has the wrong length");
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = x[2 * i];
        b[i] = x[2 * i + 1];
    }
}

std::uint64_t SupportShape::hash() const
{
    std::uint64_t h = 1469598103934665603ull;
    for (double c : all_coefficients(*this)) {
        if (c == 0.0)
            c = 0.0;  // folds -0.0 into +0.0
        unsigned char bytes[sizeof(double)];
        std::memcpy(bytes, &c, sizeof c);
        for (unsigned char byte : bytes) {
            h ^= byte;
            h *= 1099511628211ull;
        }
    }
    return h;
}

geometry::ConvexDomain2D to_polygon(const SupportShape& shape, int m)
{
    if (m < 16)
        throw InputError("to_polygon needs at least 16 boundary points");
    if (!shape.feasible())
        throw InputError("support function violates the convexity floor (min s + s'' = "
                         + std::to_string(shape.min_rho()) + ")");
    std::vector<geometry::Point> pts;
    pts.reserve(std::size_t(m));
    for (int j = 0; j < m; ++j) {
        const double t = 2.0 * pi * j / m;
        const double c = std::cos(t), s = std::sin(t);
        const double v = shape.s(t), dv = shape.ds(t);
        pts.push_back({v * c - dv * s, v * s + dv * c});
    }
    geometry::Provenance prov;
    prov.family = "support-function";
    prov.params["a0"] = shape.a0;
    for (std::size_t i = 0; i < shape.a.size(); ++i) {
        prov.params["a" + std::to_string(i + 2)] = shape.a[i];
        prov.params["b" + std::to_string(i + 2)] = shape.b[i];
    }
    prov.resolution = m;
    return geometry::ConvexDomain2D(std::move(pts), prov);
}

SupportShape project_feasible(const SupportShape& shape)
{
    if (!(shape.a0 > 0.0))
        throw InputError("support function needs a0 > 0");
    const double g = min_high_order_curvature(shape);
    const double room = shape.a0 - shape.rho_min();
    if (shape.a0 + g >= shape.rho_min())
        return shape;
    // a0 + t g >= rho_min  <=>  t <= room / (-g).
    double t = room / -g;
    SupportShape out = shape;
    for (int iter = 0; iter < 8; ++iter) {
        for (std::size_t i = 0; i < out.a.size(); ++i) {
            out.a[i] = t * shape.a[i];
            out.b[i] = t * shape.b[i];
        }
        if (out.feasible())
            return out;
        t *= 1.0 - 1e-12;
    }
    return out;
}

double evaluate(const SupportShape& shape, double width_nodes, int boundary_points)
{
    const auto dom = to_polygon(shape, boundary_points);
    const auto inv = geometry::invariants(dom);
    const auto gd = laplace2d::rasterize(dom, width_nodes / inv.min_width);
    const double E = laplace2d::principal_eigen(gd).efficiency;
    if (E > 2.0 / pi + 0.01)
        throw InequalityViolation("efficiency " + std::to_string(E) + " exceeds 2/pi + 0.01");
    return E;
}

SearchState maximize_efficiency(const SupportShape& seed, int budget, const OptimizerConfig& cfg)
{
    if (budget < 50)
        throw InputError("optimizer budget must be at least 50 evaluations");
    if (!(seed.a0 > 0.0))
        throw InputError("seed needs a0 > 0");
    SupportShape start = seed;
    for (std::size_t i = 0; i < start.a.size(); ++i) {
        start.a[i] /= seed.a0;
        start.b[i] /= seed.a0;
    }
    start.a0 = 1.0;
    start = project_feasible(start);
    if (!start.feasible())
        throw SolverError("seed cannot be projected onto the convexity floor");

    SearchState st;
    std::map<std::uint64_t, double> coarse;
    std::map<std::uint64_t, SupportShape> shapes;
    double running = -std::numeric_limits<double>::infinity();
    auto record = [&](const SupportShape& s, double E) {
        coarse[s.hash()] = E;
        shapes.emplace(s.hash(), s);
        st.log.push_back({s.hash(), all_coefficients(s), "coarse", E});
        ++st.evaluations;
        if (E > running)
            running = E;
        st.trace.push_back(running);
    };

    SupportShape current = start;
    double current_E = safe_evaluate(current, cfg.coarse_width_nodes, cfg.boundary_points);
    if (std::isnan(current_E))
        throw SolverError("seed shape could not be evaluated");
    record(current, current_E);

    const std::size_t dim = current.coordinates().size();
    st.steps.assign(dim, cfg.initial_step);
    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> order(2 * dim);
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;

    while (st.evaluations < budget) {
        std::shuffle(order.begin(), order.end(), rng);
        std::vector<SupportShape> cands;
        std::vector<std::size_t> fresh;
        int remaining = budget - st.evaluations;
        for (std::size_t c : order) {
            std::vector<double> x = current.coordinates();
            x[c / 2] += (c % 2 == 0 ? 1.0 : -1.0) * st.steps[c / 2];
            SupportShape cand = current;
            cand.set_coordinates(x);
            cand = project_feasible(cand);
            const bool cached = coarse.count(cand.hash()) > 0;
            if (!cached) {
                if (remaining == 0)
                    continue;
                --remaining;
                fresh.push_back(cands.size());
            }
            cands.push_back(cand);
        }
        std::vector<double> values(cands.size(), std::numeric_limits<double>::quiet_NaN());
        parallel_for(fresh.size(), cfg.threads, [&](std::size_t i) {
            values[fresh[i]] = safe_evaluate(cands[fresh[i]], cfg.coarse_width_nodes, cfg.boundary_points);
        });
        std::size_t pick = cands.size();
        double pick_E = current_E;
        for (std::size_t i = 0; i < cands.size(); ++i) {
            const bool is_fresh = std::find(fresh.begin(), fresh.end(), i) != fresh.end();
            if (is_fresh)
                record(cands[i], values[i]);
            else
                values[i] = coarse[cands[i].hash()];
            if (values[i] > pick_E + 1e-12) {
                pick = i;
                pick_E = values[i];
            }
        }
        ++st.sweeps;
        if (pick < cands.size()) {
            current = cands[pick];
            current_E = pick_E;
        }
        else {
            for (double& s : st.steps)
                s *= 0.5;
            if (*std::max_element(st.steps.begin(), st.steps.end()) < cfg.min_step)
                break;
        }
    }

    // Confirm the best screened shapes, and the seed, on the fine grid.
    std::vector<std::pair<double, std::uint64_t>> ranked;
    for (auto [h, E] : coarse)
        if (!std::isnan(E))
            ranked.emplace_back(E, h);
    std::sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
        return x.first != y.first ? x.first > y.first : x.second < y.second;
    });
    const std::size_t keep = std::max<std::size_t>(
        1, std::size_t(std::ceil(cfg.confirm_fraction * double(ranked.size()))));
    std::vector<SupportShape> confirm{start};
    for (std::size_t i = 0; i < std::min(keep, ranked.size()); ++i)
        if (ranked[i].second != start.hash())
            confirm.push_back(shapes.at(ranked[i].second));
    std::vector<double> fine(confirm.size());
    parallel_for(confirm.size(), cfg.threads, [&](std::size_t i) {
        fine[i] = safe_evaluate(confirm[i], cfg.fine_width_nodes, cfg.boundary_points);
    });
    st.seed_E = fine[0];
    st.best = confirm[0];
    st.best_E = fine[0];
    for (std::size_t i = 0; i < confirm.size(); ++i) {
        st.log.push_back({confirm[i].hash(), all_coefficients(confirm[i]), "fine", fine[i]});
        if (fine[i] > st.best_E) {
            st.best = confirm[i];
            st.best_E = fine[i];
        }
    }
    st.best_E_coarse = coarse.at(st.best.hash());
    return st;
}

void write_log_jsonl(const SearchState& state, const std::filesystem::path& path)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out)
        throw InputError("cannot write " + path.string());
    for (const auto& e : state.log) {
        nlohmann::ordered_json j;
        j["hash"] = e.hash;
        j["coefficients"] = e.coefficients;
        j["level"] = e.level;
        j["E"] = std::isnan(e.E) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(e.E);
        out << j.dump() << '\n';
    }
}

}  // namespace effmax::shapeopt
