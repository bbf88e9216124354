#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fimpkit {

struct DensityCurve {
    std::string tag;  // "actual" or "followed"
    std::vector<double> grid;
    std::vector<double> density;
    double bandwidth = 0.0;
};

struct KdeOptions {
    /// Fixed bandwidth; Silverman's rule of thumb when unset.
    std::optional<double> bandwidth;
    std::size_t grid_points = 512;
};

/// 0.9 * min(sd, IQR / 1.34) * n^(-1/5), falling back to sd when the IQR is 0.
double silverman_bandwidth(std::span<const double> sample);

/// Gaussian kernel density on an even grid over [min - 3h, max + 3h],
/// rescaled so its trapezoidal integral over the grid is exactly 1.
DensityCurve kde_density(std::span<const double> sample, std::string tag, const KdeOptions& options = {});

/// `trait,<tag1>,<tag2>...` on the union grid; curves must share one grid.
std::string density_csv(std::span<const DensityCurve> curves);

/// Self-contained line chart of the curves. `comment` lands in an XML comment.
std::string density_svg(std::span<const DensityCurve> curves, const std::string& title, const std::string& comment);

/// Evaluates every curve on one common grid covering all samples.
std::vector<DensityCurve> kde_pair(std::span<const double> actual, std::span<const double> followed,
                                   const KdeOptions& options = {});

}  // namespace fimpkit
