#pragma once

#include <filesystem>
#include <string>

#include "effmax/asymptotics.hpp"
#include "effmax/bounds.hpp"
#include "effmax/geometry.hpp"
#include "effmax/laplace2d.hpp"
#include "effmax/schrod1d.hpp"
#include "effmax/shapeopt.hpp"
#include "json.hpp"

namespace effmax::io {

using Json = nlohmann::ordered_json;

/// Parses a domain spec, either
///   {"family": name, "params": {...}, "resolution": n}   (resolution optional)
/// or
///   {"polygon": [[x, y], ...]}.
/// Unknown fields are rejected. Errors are InputError with "source:line:col: ".
geometry::ConvexDomain2D parse_domain_spec(const std::string& text, const std::string& source = "<spec>");
geometry::ConvexDomain2D load_domain_spec(const std::filesystem::path& path);

/// The domain as a {"polygon": ...} spec.
Json domain_to_spec(const geometry::ConvexDomain2D& domain);

Json to_json(const geometry::GeomInvariants& inv, const geometry::NormalizedProfile& profile);
Json to_json(const laplace2d::GridDomain& gd, const laplace2d::EigenResult2D& eig,
             const laplace2d::TorsionResult& tor, double gradient_residual);
Json to_json(const bounds::BoundReport& report);
Json to_json(const shapeopt::SearchState& state);
Json to_json(const shapeopt::SupportShape& shape);

/// Pretty-printed with a trailing newline; creates parent directories.
void write_json(const Json& j, const std::filesystem::path& path);
std::string dump(const Json& j);

}  // namespace effmax::io
