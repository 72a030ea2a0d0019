#include "routeforge/svg.hpp"

#include <algorithm>
#include <sstream>

#include "routeforge/verifier.hpp"

namespace routeforge {

namespace {

constexpr double kViewBox = 800.0;
constexpr double kMargin = 0.05 * kViewBox;

const char* kStrokes[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.2f", value);
    return buffer;
}

}  // namespace

std::string render_svg(const CandidateSolution& solution, const ProblemInstance& instance) {
    double min_x = instance.cities.front().x, max_x = min_x;
    double min_y = instance.cities.front().y, max_y = min_y;
    for (const Point2D& p : instance.cities) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    const double span = std::max({max_x - min_x, max_y - min_y, 1e-9});
    const double scale = (kViewBox - 2.0 * kMargin) / span;

    // Larger y renders upward, so the y axis flips.
    const auto px = [&](const Point2D& p) { return kMargin + (p.x - min_x) * scale; };
    const auto py = [&](const Point2D& p) { return kViewBox - kMargin - (p.y - min_y) * scale; };

    const DistanceMatrix matrix = build_distance_matrix(instance);
    const double cost = compute_cost(solution, matrix);

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << kViewBox << " "
        << kViewBox << "\">\n";
    out << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (std::size_t day = 0; day < solution.routes.size(); ++day) {
        const auto& route = solution.routes[day];
        out << "  <polyline class=\"day-" << day + 1 << "\" fill=\"none\" stroke=\""
            << kStrokes[day % (sizeof(kStrokes) / sizeof(kStrokes[0]))]
            << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < route.size(); ++i) {
            const Point2D& p = instance.cities.at(route[i]);
            if (i) out << " ";
            out << fmt(px(p)) << "," << fmt(py(p));
        }
        out << "\"/>\n";
    }

    for (std::size_t i = 0; i < instance.cities.size(); ++i) {
        const Point2D& p = instance.cities[i];
        if (instance.is_depot(static_cast<int>(i))) {
            const double r = 8.0;
            out << "  <rect class=\"depot\" x=\"" << fmt(px(p) - r) << "\" y=\"" << fmt(py(p) - r)
                << "\" width=\"" << fmt(2 * r) << "\" height=\"" << fmt(2 * r)
                << "\" fill=\"#000\"/>\n";
        } else {
            out << "  <circle class=\"city\" cx=\"" << fmt(px(p)) << "\" cy=\"" << fmt(py(p))
                << "\" r=\"5\" fill=\"#555\"/>\n";
        }
        out << "  <text x=\"" << fmt(px(p) + 10) << "\" y=\"" << fmt(py(p) - 10)
            << "\" font-size=\"14\">" << i << "</text>\n";
    }

    out << "  <text x=\"" << fmt(kMargin) << "\" y=\"" << fmt(kViewBox - 10)
        << "\" font-size=\"18\">Total cost: " << format_cost(cost) << "</text>\n";
    out << "</svg>\n";
    return out.str();
}

}  // namespace routeforge
