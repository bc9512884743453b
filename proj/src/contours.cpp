#include <algorithm>
#include <cstdio>
#include <fstream>
#include <string>

#include "effmax/errors.hpp"
#include "effmax/laplace2d.hpp"

namespace effmax::laplace2d {

namespace {

std::ofstream open_output(const std::filesystem::path& path)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path);
    if (!os)
        throw InputError("cannot write " + path.string());
    return os;
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

void write_field_csv(const GridDomain& gd, const std::vector<double>& values,
                     const std::filesystem::path& path)
{
    if (values.size() != gd.size())
        throw InputError("field size does not match the grid");
    auto os = open_output(path);
    os << "x,y,value\n";
    char buf[96];
    for (std::size_t k = 0; k < gd.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.12g\n", gd.nodes[k].p.x, gd.nodes[k].p.y,
                      values[k]);
        os << buf;
    }
}

void write_contours_svg(const GridDomain& gd, const std::vector<double>& values,
                        const std::filesystem::path& path)
{
    if (values.size() != gd.size())
        throw InputError("field size does not match the grid");
    double vmax = 0.0;
    for (double v : values)
        vmax = std::max(vmax, v);
    if (!(vmax > 0.0))
        throw InputError("field has no positive values to contour");

    const double h = gd.spacing;
    const double width_u = (gd.nx - 1) * h, height_u = (gd.ny - 1) * h;
    const double px = 640.0 / std::max(width_u, height_u);
    auto sx = [&](double x) { return (x - gd.origin.x) * px + 10.0; };
    auto sy = [&](double y) { return (gd.origin.y + height_u - y) * px + 10.0; };
    auto value = [&](int i, int j) {
        int k = gd.at(i, j);
        return k < 0 ? 0.0 : values[std::size_t(k)] / vmax;
    };

    auto os = open_output(path);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width_u * px + 20)
       << "\" height=\"" << fmt(height_u * px + 20) << "\">\n";
    os << "<polygon fill=\"none\" stroke=\"black\" stroke-width=\"1\" points=\"";
    for (const auto& p : gd.domain.vertices())
        os << fmt(sx(p.x)) << ',' << fmt(sy(p.y)) << ' ';
    os << "\"/>\n";

    for (int level_k = 1; level_k <= 9; ++level_k) {
        const double level = level_k / 10.0;
        const int shade = 40 + 20 * level_k;
        os << "<path fill=\"none\" stroke=\"rgb(" << shade << ",0," << 255 - shade
           << ")\" stroke-width=\"1\" data-level=\"" << fmt(level) << "\" d=\"";
        for (int j = 0; j + 1 < gd.ny; ++j) {
            for (int i = 0; i + 1 < gd.nx; ++i) {
                // Corners counter-clockwise from (i, j).
                double c[4] = {value(i, j), value(i + 1, j), value(i + 1, j + 1), value(i, j + 1)};
                int mask = 0;
                for (int q = 0; q < 4; ++q)
                    mask |= (c[q] >= level) << q;
                if (mask == 0 || mask == 15)
                    continue;
                const double cx[4] = {0, 1, 1, 0}, cy[4] = {0, 0, 1, 1};
                auto edge_point = [&](int e) {
                    int a = e, b = (e + 1) % 4;
                    double t = (level - c[a]) / (c[b] - c[a]);
                    double x = gd.origin.x + (i + cx[a] + t * (cx[b] - cx[a])) * h;
                    double y = gd.origin.y + (j + cy[a] + t * (cy[b] - cy[a])) * h;
                    return std::pair{sx(x), sy(y)};
                };
                std::vector<int> crossed;
                for (int e = 0; e < 4; ++e)
                    if (((mask >> e) & 1) != ((mask >> ((e + 1) % 4)) & 1))
                        crossed.push_back(e);
                if (crossed.size() == 4) {
                    // Saddle: pair edges according to the cell-centre value.
                    double centre = 0.25 * (c[0] + c[1] + c[2] + c[3]);
                    bool high = centre >= level;
                    bool corner0_high = mask & 1;
                    if (high == corner0_high)
                        crossed = {0, 1, 2, 3};
                    else
                        crossed = {3, 0, 1, 2};
                }
                for (std::size_t s = 0; s + 1 < crossed.size(); s += 2) {
                    auto [x0, y0] = edge_point(crossed[s]);
                    auto [x1, y1] = edge_point(crossed[s + 1]);
                    os << 'M' << fmt(x0) << ' ' << fmt(y0) << 'L' << fmt(x1) << ' ' << fmt(y1);
                }
            }
        }
        os << "\"/>\n";
    }
    os << "</svg>\n";
}

}  // namespace effmax::laplace2d
