#include "effmax/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "effmax/errors.hpp"

namespace effmax::io {

namespace {

struct Location
{
    std::size_t line = 1;
    std::size_t column = 1;
};

Location locate_offset(const std::string& text, std::size_t offset)
{
    Location loc;
    offset = std::min(offset, text.size());
    for (std::size_t i = 0; i < offset; ++i) {
        if (text[i] == '\n') {
            ++loc.line;
            loc.column = 1;
        }
        else {
            ++loc.column;
        }
    }
    return loc;
}

// Position of the first occurrence of the quoted key, or the start of the text.
Location locate_key(const std::string& text, const std::string& key)
{
    const auto pos = text.find('"' + key + '"');
    return locate_offset(text, pos == std::string::npos ? 0 : pos);
}

[[noreturn]] void fail(const std::string& source, Location loc, const std::string& what)
{
    std::ostringstream msg;
    msg << source << ':' << loc.line << ':' << loc.column << ": " << what;
    throw InputError(msg.str());
}

Json points_json(const std::vector<geometry::Point>& pts)
{
    Json arr = Json::array();
    for (const auto& p : pts)
        arr.push_back({p.x, p.y});
    return arr;
}

}  // namespace

geometry::ConvexDomain2D parse_domain_spec(const std::string& text, const std::string& source)
{
    Json j;
    try {
        j = Json::parse(text);
    }
    catch (const nlohmann::json::parse_error& e) {
        // e.byte is one past the offending character.
        fail(source, locate_offset(text, e.byte > 0 ? e.byte - 1 : 0),
             "malformed JSON (" + std::string(e.what()) + ")");
    }
    if (!j.is_object())
        fail(source, {}, "domain spec must be a JSON object");

    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (key != "family" && key != "params" && key != "resolution" && key != "polygon")
            fail(source, locate_key(text, key), "unknown field '" + key + "'");
    }

    const bool has_family = j.contains("family");
    const bool has_polygon = j.contains("polygon");
    if (has_family == has_polygon)
        fail(source, {}, "spec needs exactly one of 'family' or 'polygon'");

    try {
        if (has_polygon) {
            for (const char* key : {"params", "resolution"})
                if (j.contains(key))
                    fail(source, locate_key(text, key),
                         std::string("field '") + key + "' is not allowed with 'polygon'");
            const auto& poly = j["polygon"];
            if (!poly.is_array())
                fail(source, locate_key(text, "polygon"), "'polygon' must be an array of [x, y] pairs");
            std::vector<geometry::Point> pts;
            for (std::size_t k = 0; k < poly.size(); ++k) {
                const auto& v = poly[k];
                if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
                    fail(source, locate_key(text, "polygon"),
                         "polygon[" + std::to_string(k) + "] must be a pair of numbers");
                pts.push_back({v[0].get<double>(), v[1].get<double>()});
            }
            try {
                return geometry::ConvexDomain2D(std::move(pts));
            }
            catch (const InputError& e) {
                fail(source, locate_key(text, "polygon"), e.what());
            }
        }

        const auto& fam = j["family"];
        if (!fam.is_string())
            fail(source, locate_key(text, "family"), "'family' must be a string");
        if (!j.contains("params"))
            fail(source, locate_key(text, "family"), "family spec needs a 'params' object");
        const auto& params = j["params"];
        if (!params.is_object())
            fail(source, locate_key(text, "params"), "'params' must be an object");
        std::map<std::string, double> values;
        for (const auto& [key, value] : params.items()) {
            if (!value.is_number())
                fail(source, locate_key(text, key), "parameter '" + key + "' must be a number");
            values[key] = value.get<double>();
        }
        int resolution = 512;
        if (j.contains("resolution")) {
            const auto& r = j["resolution"];
            if (!r.is_number_integer() || r.get<long long>() < 3 || r.get<long long>() > 1'000'000)
                fail(source, locate_key(text, "resolution"), "'resolution' must be an integer in [3, 1e6]");
            resolution = r.get<int>();
        }
        try {
            return geometry::make_family(fam.get<std::string>(), values, resolution);
        }
        catch (const InputError& e) {
            fail(source, locate_key(text, "family"), e.what());
        }
    }
    catch (const nlohmann::json::exception& e) {
        fail(source, {}, e.what());
    }
}

geometry::ConvexDomain2D load_domain_spec(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot read domain spec " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_domain_spec(buf.str(), path.string());
}

Json domain_to_spec(const geometry::ConvexDomain2D& domain)
{
    Json j;
    j["polygon"] = points_json(domain.vertices());
    return j;
}

Json to_json(const geometry::GeomInvariants& inv, const geometry::NormalizedProfile& profile)
{
    Json j;
    j["R"] = inv.inradius;
    j["D"] = inv.diameter;
    j["area"] = inv.area;
    j["min_width"] = inv.min_width;
    j["N"] = profile.N;
    j["L"] = profile.L;
    j["width_direction"] = inv.width_direction;
    j["width_direction_ambiguous"] = inv.width_direction_ambiguous;
    j["chebyshev_center"] = {inv.chebyshev_center.x, inv.chebyshev_center.y};
    j["length_too_short"] = profile.length_too_short;
    j["height_correction"] = profile.height_correction;
    return j;
}

Json to_json(const laplace2d::GridDomain& gd, const laplace2d::EigenResult2D& eig,
             const laplace2d::TorsionResult& tor, double gradient_residual)
{
    Json j;
    j["lambda1"] = eig.lambda1;
    j["E"] = eig.efficiency;
    j["M"] = tor.M;
    j["gradient_residual"] = gradient_residual;
    j["gradient_residual_relative"] = gradient_residual / eig.lambda1;
    j["max_location"] = {eig.max_location.x, eig.max_location.y};
    j["nodes"] = gd.nodes.size();
    j["spacing"] = gd.spacing;
    j["iterations"] = eig.iterations;
    j["eigen_residual"] = eig.residual;
    j["torsion_residual"] = tor.residual;
    return j;
}

Json to_json(const bounds::BoundReport& r)
{
    Json j;
    j["dimension"] = r.dimension;
    j["lambda1"] = r.lambda1;
    j["lambda_tilde"] = r.lambda_tilde;
    j["R"] = r.R;
    j["D"] = r.D;
    j["area"] = r.area;
    j["E"] = r.E;
    j["M"] = r.M;
    j["delta"] = r.delta;
    j["gamma"] = r.gamma;
    j["delta_certified"] = r.delta_certified;
    j["lower_bounds"] = {{"hersch", r.lower.hersch},
                         {"protter", r.lower.protter},
                         {"hernandez", r.lower.hernandez},
                         {"thm1", r.lower.thm1}};
    j["payne_classic"] = r.payne_classic;
    j["payne_refined"] = r.payne_refined;
    j["product"] = r.product;
    j["ps_classic"] = r.ps_classic;
    j["eff_a"] = r.eff_a;
    j["eff_b"] = r.eff_b;
    j["boundary_gradient_constant"] = r.boundary_gradient_constant;
    j["boundary_gradient_ratio"] = r.boundary_gradient_ratio ? Json(*r.boundary_gradient_ratio) : Json(nullptr);
    j["gradient_residual"] = r.gradient_residual ? Json(*r.gradient_residual) : Json(nullptr);
    j["allowance"] = r.allowance;
    Json checks = Json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"name", c.name},
                          {"relation", c.relation},
                          {"larger", c.larger},
                          {"smaller", c.smaller},
                          {"slack", c.slack},
                          {"holds", c.holds}});
    j["checks"] = checks;
    j["all_hold"] = r.all_hold();
    return j;
}

Json to_json(const shapeopt::SupportShape& s)
{
    return {{"a0", s.a0}, {"a", s.a}, {"b", s.b}};
}

Json to_json(const shapeopt::SearchState& st)
{
    Json j;
    j["best"] = to_json(st.best);
    j["best_E"] = st.best_E;
    j["best_E_coarse"] = st.best_E_coarse;
    j["seed_E"] = st.seed_E;
    j["evaluations"] = st.evaluations;
    j["sweeps"] = st.sweeps;
    j["steps"] = st.steps;
    j["trace"] = st.trace;
    return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void write_json(const Json& j, const std::filesystem::path& path)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out)
        throw InputError("cannot write " + path.string());
    out << dump(j);
}

}  // namespace effmax::io
