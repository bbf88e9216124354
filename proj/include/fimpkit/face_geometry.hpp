#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fimpkit::face {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Named facial keypoints. Coordinates follow image convention: x to the
/// right, y downward. The brow points are optional and only used by the
/// eyebrow height variant.
enum class Landmark : std::size_t {
    LeftEye,
    RightEye,
    LeftBoundary,
    RightBoundary,
    UpperLipTop,
    LeftEyelidTop,
    RightEyelidTop,
    LeftBrowInner,
    RightBrowInner,
};

inline constexpr std::size_t kLandmarkCount = 9;
inline constexpr std::size_t kRequiredLandmarkCount = 7;

std::string_view to_string(Landmark l);

struct LandmarkSet {
    std::string image_id;
    double image_width = 0.0;
    double image_height = 0.0;
    double confidence = 1.0;
    std::array<std::optional<Point>, kLandmarkCount> points{};

    [[nodiscard]] bool has(Landmark l) const { return points[static_cast<std::size_t>(l)].has_value(); }
    /// Throws MissingLandmark when absent.
    [[nodiscard]] Point at(Landmark l) const;
    void set(Landmark l, Point p) { points[static_cast<std::size_t>(l)] = p; }
};

/// Parses the landmark JSON document shared with the extractor.
LandmarkSet parse_landmarks_json(std::string_view text);
LandmarkSet read_landmarks_file(const std::string& path);
std::string landmarks_to_json(const LandmarkSet& set);

/// Signed rotation, in degrees, that levels the segment from `left` to
/// `right`. The result lies in (-90, 90]; a vertical eye axis maps to 90.
double eye_rotation_angle(Point left, Point right);

/// Inter-eye distance after alignment.
inline constexpr double kCanonicalEyeDistance = 100.0;

/// Rotates every point about the inter-eye midpoint so the eyes are level,
/// moves that midpoint to the origin and scales the inter-eye distance to
/// kCanonicalEyeDistance.
LandmarkSet align_landmarks(const LandmarkSet& set);

enum class HeightReference { Eyelid, Brow };
enum class EyelidLine { Mean, Highest };

struct FwhrOptions {
    HeightReference reference = HeightReference::Eyelid;
    EyelidLine eyelid_line = EyelidLine::Mean;
    double level_tolerance_deg = 0.1;
};

enum class QualityStatus { Pass, LowConfidence, MissingPoint, BoundaryClipped, OutOfBounds, GeometryError };

std::string_view to_string(QualityStatus q);

struct FwhrRecord {
    std::string actor_id;
    double width = 0.0;
    double height = 0.0;
    double fwhr = 0.0;
    QualityStatus quality = QualityStatus::Pass;
    std::string reason;
};

/// Width between the facial boundaries over upper-face height, measured on
/// an aligned set.
FwhrRecord compute_fwhr(const LandmarkSet& aligned, const FwhrOptions& options = {});

struct QualityOptions {
    double min_confidence = 0.5;
    double margin_px = 2.0;
};

struct QualityResult {
    QualityStatus status = QualityStatus::Pass;
    std::string detail;
    [[nodiscard]] bool passed() const { return status == QualityStatus::Pass; }
};

/// Checks a raw (image-frame) landmark set before measurement.
QualityResult quality_gate(const LandmarkSet& set, const QualityOptions& options = {});

/// Gate, align and measure. Failing sets come back with quality != Pass and
/// zero measurements; geometry errors on gated sets are reported the same way.
FwhrRecord measure(const LandmarkSet& raw, const QualityOptions& quality = {}, const FwhrOptions& fwhr = {});

/// Measures every `*.json` file in `dir`, sorted by file name.
std::vector<FwhrRecord> measure_directory(const std::string& dir, const QualityOptions& quality = {},
                                          const FwhrOptions& fwhr = {});

/// `actor_id,fwhr,quality,reason`
std::string traits_csv(const std::vector<FwhrRecord>& records);

}  // namespace fimpkit::face
