// effmax: command-line front end for the efficiency toolkit.
//
// Results go to stdout (JSON, or CSV for `scan`); --out DIR also writes them,
// with any extra artifacts, into DIR. Exit codes: 0 success, 2 input error,
// 3 solver failure, 4 inequality violation (with DIR/violations.json when
// --out is set, and the same record on stderr).

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "effmax/asymptotics.hpp"
#include "effmax/bounds.hpp"
#include "effmax/errors.hpp"
#include "effmax/io.hpp"
#include "effmax/laplace2d.hpp"
#include "effmax/schrod1d.hpp"
#include "effmax/shapeopt.hpp"

namespace fs = std::filesystem;
using namespace effmax;
using io::Json;
using std::numbers::pi;

namespace {

struct RunConfig
{
    std::string command;
    std::string domain;
    double grid = 0.0;
    double tol = 1e-10;
    double allowance = 0.02;
    std::string out;
    std::string family;
    std::string range;
    bool geometric = false;
    int budget = 400;
    std::uint64_t seed = 1;
    bool svg = false;
    std::string start = "disk";
    int order = 8;
    unsigned threads = 1;
};

// Collected violations; any entry turns the exit code into 4.
struct Violations
{
    std::vector<std::string> items;
    void check(bool ok, const std::string& what)
    {
        if (!ok)
            items.push_back(what);
    }
};

unsigned threads_from_env()
{
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const char* env = std::getenv("EFFMAX_THREADS");
    if (!env || !*env)
        return hw;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1)
        throw InputError(std::string("EFFMAX_THREADS must be a positive integer (got '") + env + "')");
    return unsigned(std::min<long>(v, 1024));
}

std::string fmt(double v)
{
    std::ostringstream s;
    s.precision(10);
    s << v;
    return s.str();
}

void emit(const RunConfig& cfg, const Json& j, const std::string& name)
{
    std::cout << io::dump(j);
    if (!cfg.out.empty())
        io::write_json(j, fs::path(cfg.out) / (name + ".json"));
}

geometry::ConvexDomain2D require_domain(const RunConfig& cfg)
{
    if (cfg.domain.empty())
        throw InputError(cfg.command + " needs --domain PATH");
    return io::load_domain_spec(cfg.domain);
}

void cmd_invariants(const RunConfig& cfg, Violations&)
{
    const auto domain = require_domain(cfg);
    const auto inv = geometry::invariants(domain);
    const auto profile = geometry::normalize(domain, asymptotics::GridPolicy{}.profile_samples);
    emit(cfg, io::to_json(inv, profile), "invariants");
}

void cmd_solve(const RunConfig& cfg, Violations& v)
{
    const auto domain = require_domain(cfg);
    const auto gd = laplace2d::rasterize(domain, cfg.grid > 0 ? cfg.grid : 256.0);
    const auto eig = laplace2d::principal_eigen(gd, cfg.tol);
    const auto tor = laplace2d::torsion(gd, cfg.tol);
    const double lambda_tilde = eig.lambda1 - pi * pi / (gd.invariants.diameter * gd.invariants.diameter);
    const double grad = laplace2d::gradient_estimate_residual(gd, eig, lambda_tilde);
    v.check(eig.efficiency <= 2 / pi + 0.01, "E = " + fmt(eig.efficiency) + " exceeds 2/pi + 0.01");
    v.check(eig.lambda1 * tor.M >= pi * pi / 8 * (1 - 0.02),
            "lambda1 M = " + fmt(eig.lambda1 * tor.M) + " below pi^2/8");
    emit(cfg, io::to_json(gd, eig, tor, grad), "solve");
    if (!cfg.out.empty()) {
        laplace2d::write_field_csv(gd, eig.u, fs::path(cfg.out) / "u.csv");
        if (cfg.svg)
            laplace2d::write_contours_svg(gd, eig.u, fs::path(cfg.out) / "contours.svg");
    }
    else if (cfg.svg) {
        throw InputError("--svg needs --out DIR");
    }
}

void cmd_bounds(const RunConfig& cfg, Violations& v)
{
    const auto domain = require_domain(cfg);
    const auto gd = laplace2d::rasterize(domain, cfg.grid > 0 ? cfg.grid : 256.0);
    const auto eig = laplace2d::principal_eigen(gd, cfg.tol);
    const auto tor = laplace2d::torsion(gd, cfg.tol);
    const auto report = bounds::full_report(gd, eig, tor, cfg.allowance);
    for (const auto& c : report.checks)
        v.check(c.holds, c.name + ": " + c.relation + " fails, slack " + fmt(c.slack));
    emit(cfg, io::to_json(report), "bounds");
}

std::vector<double> parse_range(const std::string& text, bool geometric)
{
    double a = 0, b = 0;
    int steps = 0;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> a >> c1 >> b >> c2 >> steps) || c1 != ':' || c2 != ':' || !in.eof())
        throw InputError("--range must look like A:B:STEPS (got '" + text + "')");
    return asymptotics::parameter_range(a, b, steps, geometric);
}

int cmd_scan(const RunConfig& cfg, Violations& v)
{
    if (cfg.family.empty() || cfg.range.empty())
        throw InputError("scan needs --family NAME and --range A:B:STEPS");
    asymptotics::family_member(cfg.family, 1.0);  // rejects unknown families up front
    asymptotics::GridPolicy policy;
    if (cfg.grid > 0)
        policy.thin_nodes = cfg.grid;
    policy.tol = cfg.tol;
    const auto rows = asymptotics::family_scan(cfg.family, parse_range(cfg.range, cfg.geometric), policy, cfg.threads);
    asymptotics::write_scan_csv(rows, std::cout);
    if (!cfg.out.empty()) {
        asymptotics::write_scan_csv(rows, fs::path(cfg.out) / "scan.csv");
        if (cfg.svg)
            asymptotics::write_scan_svg(rows, fs::path(cfg.out) / "scan.svg");
    }
    else if (cfg.svg) {
        throw InputError("--svg needs --out DIR");
    }
    bool failed = false;
    for (const auto& r : rows)
        failed = failed || !r.ok();
    for (const auto& s : asymptotics::scan_violations(rows))
        if (s.find("failed") == std::string::npos)
            v.items.push_back(s);
    if (failed && v.items.empty()) {
        for (const auto& r : rows)
            if (!r.ok())
                std::cerr << "effmax: scan row " << cfg.family << " " << fmt(r.param) << " failed: " << r.error << "\n";
        return 3;
    }
    return 0;
}

void cmd_oned(const RunConfig& cfg, Violations& v)
{
    const auto domain = require_domain(cfg);
    asymptotics::GridPolicy policy;
    const auto profile = geometry::normalize(domain, policy.profile_samples);
    const auto pot = schrod1d::potential_from_height(profile);
    const std::size_t n = cfg.grid > 0 ? std::size_t(cfg.grid) : policy.oned_nodes(profile);
    const auto eig = schrod1d::solve_dirichlet(pot, n);
    const double mass = schrod1d::mass_ratio(eig);
    const auto lw = schrod1d::level_width_check(eig, schrod1d::uniform_levels(20));
    const auto mod = schrod1d::logconcavity_modulus_check(eig);

    Json j;
    j["alpha"] = eig.alpha;
    j["beta"] = eig.beta;
    j["N"] = profile.N;
    j["L"] = profile.L;
    j["nodes"] = n;
    j["mu1"] = eig.mu1;
    j["convex"] = eig.convex;
    j["residual"] = eig.residual;
    j["bisection_steps"] = eig.bisection_steps;
    j["mass_ratio"] = mass;
    j["level_width"] = {{"max_violation", lw.max_violation}, {"worst_t", lw.worst_t}, {"holds", lw.holds}};
    j["modulus"] = {{"max_violation", mod.max_violation},
                    {"worst_x", mod.worst_x},
                    {"worst_y", mod.worst_y},
                    {"pairs", mod.pairs},
                    {"holds", mod.holds}};
    if (profile.L >= 4.0) {
        const auto w = schrod1d::mu1_window(profile, eig);
        j["window"] = {{"L", w.L},
                       {"lower", w.lower},
                       {"upper_leading", w.upper_leading},
                       {"c_required", w.c_required},
                       {"lower_strict", w.lower_strict}};
        v.check(w.lower_strict, "mu1 = " + fmt(eig.mu1) + " is not above pi^2");
    }
    else {
        j["window"] = nullptr;
    }
    if (eig.convex) {
        v.check(lw.holds, "level width exceeds (2D/pi) arccos t by " + fmt(lw.max_violation));
        v.check(mod.holds, "log-concavity modulus violated by " + fmt(mod.max_violation));
    }
    emit(cfg, j, "oned");
    if (!cfg.out.empty()) {
        schrod1d::write_potential_csv(pot, fs::path(cfg.out) / "potential.csv");
        std::ofstream phi(fs::path(cfg.out) / "phi.csv");
        phi << "x,value\n";
        phi.precision(12);
        for (std::size_t i = 0; i < eig.phi.size(); ++i)
            phi << eig.x(i) << ',' << eig.phi[i] << '\n';
    }
}

void cmd_gj(const RunConfig& cfg, Violations&)
{
    const auto domain = require_domain(cfg);
    asymptotics::GridPolicy policy;
    if (cfg.grid > 0)
        policy.thin_nodes = cfg.grid;
    policy.tol = cfg.tol;
    const auto sol = asymptotics::solve_coupled(domain, policy);
    const double err = asymptotics::gj_error(sol);
    Json j;
    j["N"] = sol.profile.N;
    j["L"] = sol.profile.L;
    j["lambda1"] = sol.eig.lambda1;
    j["mu1"] = sol.oned.mu1;
    j["E"] = sol.eig.efficiency;
    j["gj_error"] = err;
    j["gj_error_times_L"] = err * sol.profile.L;
    j["nodes"] = sol.grid.nodes.size();
    emit(cfg, j, "gj");
}

void cmd_optimize(const RunConfig& cfg, Violations& v)
{
    shapeopt::SupportShape seed(cfg.order);
    if (cfg.start == "square-like")
        seed = shapeopt::SupportShape::square_like(cfg.order);
    else if (cfg.start != "disk")
        throw InputError("--start must be 'disk' or 'square-like'");
    shapeopt::OptimizerConfig oc;
    oc.seed = cfg.seed;
    oc.threads = cfg.threads;
    if (cfg.grid > 0)
        oc.coarse_width_nodes = cfg.grid;
    const auto st = shapeopt::maximize_efficiency(seed, cfg.budget, oc);
    for (std::size_t i = 1; i < st.trace.size(); ++i)
        v.check(st.trace[i] >= st.trace[i - 1], "best-E trace decreased at evaluation " + std::to_string(i));
    v.check(st.best_E < 2 / pi - 0.05, "best E = " + fmt(st.best_E) + " is not below 2/pi - 0.05");
    emit(cfg, io::to_json(st), "optimize");
    if (!cfg.out.empty()) {
        shapeopt::write_log_jsonl(st, fs::path(cfg.out) / "optimize_log.jsonl");
        io::write_json(io::domain_to_spec(shapeopt::to_polygon(st.best)), fs::path(cfg.out) / "best_domain.json");
    }
}

void report_violations(const RunConfig& cfg, const std::vector<std::string>& items)
{
    Json rec;
    rec["command"] = cfg.command;
    rec["exit_code"] = 4;
    rec["violations"] = items;
    std::cerr << io::dump(rec);
    if (!cfg.out.empty())
        io::write_json(rec, fs::path(cfg.out) / "violations.json");
}

}  // namespace

int main(int argc, char** argv)
{
    RunConfig cfg;
    CLI::App app{"Dirichlet eigenfunction efficiency toolkit"};
    app.require_subcommand(1);

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", cfg.out, "Output directory");
        sub->add_option("--tol", cfg.tol, "Solver tolerance")->check(CLI::PositiveNumber);
    };
    auto add_domain = [&](CLI::App* sub) {
        sub->add_option("--domain", cfg.domain, "Domain spec JSON")->required();
    };

    auto* inv = app.add_subcommand("invariants", "Geometric invariants, N and L");
    add_domain(inv);
    add_common(inv);

    auto* solve = app.add_subcommand("solve", "First eigenpair, efficiency and torsion");
    add_domain(solve);
    add_common(solve);
    solve->add_option("--grid", cfg.grid, "Grid nodes per unit length (default 256)")->check(CLI::PositiveNumber);
    solve->add_flag("--svg", cfg.svg, "Write eigenfunction contours to DIR/contours.svg");

    auto* bnd = app.add_subcommand("bounds", "Bound report with slacks");
    add_domain(bnd);
    add_common(bnd);
    bnd->add_option("--grid", cfg.grid, "Grid nodes per unit length (default 256)")->check(CLI::PositiveNumber);
    bnd->add_option("--allowance", cfg.allowance, "Tolerated relative shortfall per check (default 0.02)")
        ->check(CLI::Range(-1.0, 1.0));

    auto* scan = app.add_subcommand("scan", "Family scan as CSV");
    add_common(scan);
    scan->add_option("--family", cfg.family, "rectangle, ellipse, stadium, isoceles-triangle or rhombus")->required();
    scan->add_option("--range", cfg.range, "A:B:STEPS")->required();
    scan->add_flag("--geometric", cfg.geometric, "Space the range geometrically");
    scan->add_option("--grid", cfg.grid, "Grid nodes per unit of minimal width (default 48)")->check(CLI::PositiveNumber);
    scan->add_flag("--svg", cfg.svg, "Write E against L to DIR/scan.svg");

    auto* oned = app.add_subcommand("oned", "1D Schrodinger eigenpair of the height profile");
    add_domain(oned);
    add_common(oned);
    oned->add_option("--grid", cfg.grid, "Interior 1D nodes")->check(CLI::PositiveNumber);

    auto* gj = app.add_subcommand("gj", "Uncoupling error of the separable approximation");
    add_domain(gj);
    add_common(gj);
    gj->add_option("--grid", cfg.grid, "Grid nodes per unit of minimal width (default 48)")->check(CLI::PositiveNumber);

    auto* opt = app.add_subcommand("optimize", "Pattern search for the efficiency maximizer");
    add_common(opt);
    opt->add_option("--budget", cfg.budget, "Coarse evaluations (>= 50)")->check(CLI::PositiveNumber);
    opt->add_option("--seed", cfg.seed, "Perturbation-order seed");
    opt->add_option("--start", cfg.start, "disk or square-like");
    opt->add_option("--order", cfg.order, "Support-function truncation order K")->check(CLI::Range(2, 64));
    opt->add_option("--grid", cfg.grid, "Coarse grid nodes across the minimal width (default 64)")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    cfg.command = app.get_subcommands().front()->get_name();

    Violations v;
    int code = 0;
    try {
        cfg.threads = threads_from_env();
        if (cfg.command == "invariants")
            cmd_invariants(cfg, v);
        else if (cfg.command == "solve")
            cmd_solve(cfg, v);
        else if (cfg.command == "bounds")
            cmd_bounds(cfg, v);
        else if (cfg.command == "scan")
            code = cmd_scan(cfg, v);
        else if (cfg.command == "oned")
            cmd_oned(cfg, v);
        else if (cfg.command == "gj")
            cmd_gj(cfg, v);
        else
            cmd_optimize(cfg, v);
    }
    catch (const InequalityViolation& e) {
        v.items.push_back(e.what());
    }
    catch (const InputError& e) {
        std::cerr << "effmax: input error: " << e.what() << "\n";
        return 2;
    }
    catch (const SolverError& e) {
        std::cerr << "effmax: solver error: " << e.what() << "\n";
        return 3;
    }
    catch (const std::exception& e) {
        std::cerr << "effmax: error: " << e.what() << "\n";
        return 3;
    }
    if (!v.items.empty()) {
        report_violations(cfg, v.items);
        return 4;
    }
    return code;
}
