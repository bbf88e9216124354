#include "fimpkit/kde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fimpkit/csv.hpp"
#include "fimpkit/error.hpp"
#include "fimpkit/stats.hpp"

namespace fimpkit {
namespace {

void validate(std::span<const double> sample) {
    if (sample.size() < 2) {
        fail(ErrorCode::DegenerateSample, "density estimate needs at least 2 values");
    }
    for (double v : sample) {
        if (!std::isfinite(v)) {
            fail(ErrorCode::InvalidValue, "density sample contains a non-finite value");
        }
    }
    if (stats::variance(sample) <= 0.0) {
        fail(ErrorCode::DegenerateSample, "density estimate needs a non-constant sample");
    }
}

std::vector<double> even_grid(double lo, double hi, std::size_t points) {
    std::vector<double> grid(points);
    const double step = (hi - lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) {
        grid[i] = lo + step * static_cast<double>(i);
    }
    grid.back() = hi;
    return grid;
}

std::vector<double> evaluate(std::span<const double> sample, double h, std::span<const double> grid) {
    const double norm = 1.0 / (static_cast<double>(sample.size()) * h * std::sqrt(2.0 * std::numbers::pi));
    std::vector<double> density(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double s = 0.0;
        for (double v : sample) {
            const double u = (grid[g] - v) / h;
            s += std::exp(-0.5 * u * u);
        }
        density[g] = s * norm;
    }
    double area = 0.0;
    for (std::size_t g = 1; g < grid.size(); ++g) {
        area += 0.5 * (density[g] + density[g - 1]) * (grid[g] - grid[g - 1]);
    }
    if (area > 0.0) {
        for (auto& d : density) {
            d /= area;
        }
    }
    return density;
}

std::string xml_escape(std::string_view text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

double resolve_bandwidth(std::span<const double> sample, const KdeOptions& options) {
    if (options.bandwidth) {
        if (!(*options.bandwidth > 0.0) || !std::isfinite(*options.bandwidth)) {
            fail(ErrorCode::InvalidValue, "KDE bandwidth must be positive");
        }
        return *options.bandwidth;
    }
    return silverman_bandwidth(sample);
}

}  // namespace

double silverman_bandwidth(std::span<const double> sample) {
    validate(sample);
    const double sd = std::sqrt(stats::variance(sample));
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    const double iqr = stats::quantile_sorted(sorted, 0.75) - stats::quantile_sorted(sorted, 0.25);
    const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
    return 0.9 * spread * std::pow(static_cast<double>(sample.size()), -0.2);
}

DensityCurve kde_density(std::span<const double> sample, std::string tag, const KdeOptions& options) {
    validate(sample);
    if (options.grid_points < 2) {
        fail(ErrorCode::InvalidValue, "KDE grid needs at least 2 points");
    }
    DensityCurve curve;
    curve.tag = std::move(tag);
    curve.bandwidth = resolve_bandwidth(sample, options);
    const auto [lo, hi] = std::minmax_element(sample.begin(), sample.end());
    curve.grid = even_grid(*lo - 3.0 * curve.bandwidth, *hi + 3.0 * curve.bandwidth, options.grid_points);
    curve.density = evaluate(sample, curve.bandwidth, curve.grid);
    return curve;
}

std::vector<DensityCurve> kde_pair(std::span<const double> actual, std::span<const double> followed,
                                   const KdeOptions& options) {
    validate(actual);
    validate(followed);
    if (options.grid_points < 2) {
        fail(ErrorCode::InvalidValue, "KDE grid needs at least 2 points");
    }
    const double ha = resolve_bandwidth(actual, options);
    const double hf = resolve_bandwidth(followed, options);
    const auto [alo, ahi] = std::minmax_element(actual.begin(), actual.end());
    const auto [flo, fhi] = std::minmax_element(followed.begin(), followed.end());
    const double lo = std::min(*alo - 3.0 * ha, *flo - 3.0 * hf);
    const double hi = std::max(*ahi + 3.0 * ha, *fhi + 3.0 * hf);
    const auto grid = even_grid(lo, hi, options.grid_points);

    std::vector<DensityCurve> curves(2);
    curves[0] = {"actual", grid, evaluate(actual, ha, grid), ha};
    curves[1] = {"followed", grid, evaluate(followed, hf, grid), hf};
    return curves;
}

std::string density_csv(std::span<const DensityCurve> curves) {
    std::ostringstream out;
    out << "trait";
    for (const auto& c : curves) {
        out << ',' << csv::escape(c.tag);
    }
    out << '\n';
    if (curves.empty()) {
        return out.str();
    }
    for (const auto& c : curves) {
        if (c.grid != curves.front().grid) {
            fail(ErrorCode::DimensionMismatch, "density curves do not share a grid");
        }
    }
    for (std::size_t g = 0; g < curves.front().grid.size(); ++g) {
        out << csv::format_number(curves.front().grid[g]);
        for (const auto& c : curves) {
            out << ',' << csv::format_number(c.density[g]);
        }
        out << '\n';
    }
    return out.str();
}

std::string density_svg(std::span<const DensityCurve> curves, const std::string& title, const std::string& comment) {
    constexpr double width = 640.0;
    constexpr double height = 400.0;
    constexpr double left = 60.0;
    constexpr double right = 20.0;
    constexpr double top = 40.0;
    constexpr double bottom = 50.0;
    static constexpr const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

    double xmin = 0.0;
    double xmax = 1.0;
    double ymax = 0.0;
    bool first = true;
    for (const auto& c : curves) {
        for (std::size_t i = 0; i < c.grid.size(); ++i) {
            xmin = first ? c.grid[i] : std::min(xmin, c.grid[i]);
            xmax = first ? c.grid[i] : std::max(xmax, c.grid[i]);
            ymax = std::max(ymax, c.density[i]);
            first = false;
        }
    }
    if (ymax <= 0.0) {
        ymax = 1.0;
    }
    if (xmax <= xmin) {
        xmax = xmin + 1.0;
    }
    const auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (width - left - right); };
    const auto py = [&](double y) { return height - bottom - y / (ymax * 1.05) * (height - top - bottom); };
    const auto num = [](double v) { return csv::format_number(std::round(v * 100.0) / 100.0); };

    std::string safe_comment = comment;
    for (std::size_t pos; (pos = safe_comment.find("--")) != std::string::npos;) {
        safe_comment.replace(pos, 2, "- ");
    }

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    out << "<!-- " << safe_comment << " -->\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"16\">"
        << xml_escape(title) << "</text>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right << "\" y2=\""
        << height - bottom << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << height - bottom
        << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double x = xmin + (xmax - xmin) * t / 4.0;
        out << "<text x=\"" << num(px(x)) << "\" y=\"" << height - bottom + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << csv::format_number(std::round(x * 1000.0) / 1000.0) << "</text>\n";
    }
    out << "<text x=\"" << width / 2 << "\" y=\"" << height - 10
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">fWHR</text>\n";
    out << "<text x=\"16\" y=\"" << height / 2 << "\" transform=\"rotate(-90 16 " << height / 2
        << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">density</text>\n";

    for (std::size_t ci = 0; ci < curves.size(); ++ci) {
        const auto& c = curves[ci];
        const char* color = colors[ci % std::size(colors)];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < c.grid.size(); ++i) {
            out << (i ? " " : "") << num(px(c.grid[i])) << ',' << num(py(c.density[i]));
        }
        out << "\"/>\n";
        const double ly = top + 16.0 * static_cast<double>(ci);
        out << "<line x1=\"" << width - right - 110 << "\" y1=\"" << ly << "\" x2=\"" << width - right - 90
            << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << width - right - 85 << "\" y=\"" << ly + 4
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << xml_escape(c.tag) << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace fimpkit
