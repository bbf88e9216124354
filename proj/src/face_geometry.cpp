#include "fimpkit/face_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "fimpkit/csv.hpp"
#include "fimpkit/error.hpp"

namespace fimpkit::face {
namespace {

constexpr std::array<std::string_view, kLandmarkCount> kJsonKeys = {
    "left_eye",      "right_eye",       "left_boundary",    "right_boundary", "upper_lip_top",
    "left_eyelid_top", "right_eyelid_top", "left_brow_inner", "right_brow_inner"};

constexpr double kDegPerRad = 180.0 / std::numbers::pi;

}  // namespace

std::string_view to_string(Landmark l) {
    return kJsonKeys[static_cast<std::size_t>(l)];
}

std::string_view to_string(QualityStatus q) {
    switch (q) {
        case QualityStatus::Pass: return "pass";
        case QualityStatus::LowConfidence: return "low_confidence";
        case QualityStatus::MissingPoint: return "missing_point";
        case QualityStatus::BoundaryClipped: return "boundary_clipped";
        case QualityStatus::OutOfBounds: return "out_of_bounds";
        case QualityStatus::GeometryError: return "geometry_error";
    }
    return "?";
}

Point LandmarkSet::at(Landmark l) const {
    const auto& p = points[static_cast<std::size_t>(l)];
    if (!p) {
        fail(ErrorCode::MissingLandmark, "'" + image_id + "' has no " + std::string(to_string(l)));
    }
    return *p;
}

LandmarkSet parse_landmarks_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorCode::InvalidValue, std::string("landmark JSON: ") + e.what());
    }
    if (!j.is_object()) {
        fail(ErrorCode::InvalidValue, "landmark JSON must be an object");
    }
    LandmarkSet set;
    try {
        set.image_id = j.value("image_id", std::string{});
        set.image_width = j.at("image_w").get<double>();
        set.image_height = j.at("image_h").get<double>();
        set.confidence = j.value("confidence", 1.0);
        for (std::size_t k = 0; k < kLandmarkCount; ++k) {
            const std::string key(kJsonKeys[k]);
            if (!j.contains(key) || j[key].is_null()) {
                continue;
            }
            const auto& xy = j[key];
            if (!xy.is_array() || xy.size() != 2) {
                fail(ErrorCode::InvalidValue, "'" + key + "' must be [x, y]");
            }
            set.points[k] = Point{xy[0].get<double>(), xy[1].get<double>()};
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::InvalidValue, std::string("landmark JSON: ") + e.what());
    }
    return set;
}

LandmarkSet read_landmarks_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::Io, "cannot open '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    auto set = parse_landmarks_json(buf.str());
    if (set.image_id.empty()) {
        set.image_id = std::filesystem::path(path).stem().string();
    }
    return set;
}

std::string landmarks_to_json(const LandmarkSet& set) {
    nlohmann::ordered_json j;
    j["image_id"] = set.image_id;
    j["image_w"] = set.image_width;
    j["image_h"] = set.image_height;
    for (std::size_t k = 0; k < kLandmarkCount; ++k) {
        if (set.points[k]) {
            j[std::string(kJsonKeys[k])] = {set.points[k]->x, set.points[k]->y};
        }
    }
    j["confidence"] = set.confidence;
    return j.dump();
}

double eye_rotation_angle(Point left, Point right) {
    const double dx = right.x - left.x;
    const double dy = right.y - left.y;
    if (dx == 0.0 && dy == 0.0) {
        fail(ErrorCode::CoincidentEyes, "eye centres coincide");
    }
    double angle = -std::atan2(dy, dx) * kDegPerRad;
    while (angle <= -90.0) {
        angle += 180.0;
    }
    while (angle > 90.0) {
        angle -= 180.0;
    }
    return angle;
}

LandmarkSet align_landmarks(const LandmarkSet& set) {
    const Point left = set.at(Landmark::LeftEye);
    const Point right = set.at(Landmark::RightEye);
    const double theta = eye_rotation_angle(left, right) / kDegPerRad;
    if (!(left.x < right.x)) {
        fail(ErrorCode::InvalidLandmarks, "'" + set.image_id + "': left eye is not left of right eye");
    }
    const Point mid{(left.x + right.x) / 2.0, (left.y + right.y) / 2.0};
    const double scale = kCanonicalEyeDistance / std::hypot(right.x - left.x, right.y - left.y);
    const double c = std::cos(theta);
    const double s = std::sin(theta);

    LandmarkSet out = set;
    for (auto& p : out.points) {
        if (!p) {
            continue;
        }
        const double dx = p->x - mid.x;
        const double dy = p->y - mid.y;
        p = Point{scale * (dx * c - dy * s), scale * (dx * s + dy * c)};
    }
    return out;
}

FwhrRecord compute_fwhr(const LandmarkSet& aligned, const FwhrOptions& options) {
    const double tilt = eye_rotation_angle(aligned.at(Landmark::LeftEye), aligned.at(Landmark::RightEye));
    if (std::abs(tilt) >= options.level_tolerance_deg) {
        fail(ErrorCode::NotAligned, "'" + aligned.image_id + "' eyes tilted by " + csv::format_number(tilt) + " deg");
    }

    FwhrRecord rec;
    rec.actor_id = aligned.image_id;
    rec.width = aligned.at(Landmark::RightBoundary).x - aligned.at(Landmark::LeftBoundary).x;
    if (!(rec.width > 0.0)) {
        fail(ErrorCode::NonPositiveWidth, "'" + aligned.image_id + "' facial boundaries are not ordered");
    }

    double upper_line = 0.0;
    if (options.reference == HeightReference::Brow) {
        upper_line = (aligned.at(Landmark::LeftBrowInner).y + aligned.at(Landmark::RightBrowInner).y) / 2.0;
    } else {
        const double l = aligned.at(Landmark::LeftEyelidTop).y;
        const double r = aligned.at(Landmark::RightEyelidTop).y;
        // y grows downward, so the visually highest eyelid has the smaller y.
        upper_line = options.eyelid_line == EyelidLine::Highest ? std::min(l, r) : (l + r) / 2.0;
    }
    rec.height = aligned.at(Landmark::UpperLipTop).y - upper_line;
    if (!(rec.height > 0.0)) {
        fail(ErrorCode::NonPositiveHeight, "'" + aligned.image_id + "' upper lip is not below the eye line");
    }
    rec.fwhr = rec.width / rec.height;
    return rec;
}

QualityResult quality_gate(const LandmarkSet& set, const QualityOptions& options) {
    if (!(set.confidence >= options.min_confidence) || set.confidence > 1.0) {
        return {QualityStatus::LowConfidence, "confidence " + csv::format_number(set.confidence)};
    }
    for (std::size_t k = 0; k < kRequiredLandmarkCount; ++k) {
        if (!set.points[k]) {
            return {QualityStatus::MissingPoint, std::string(kJsonKeys[k])};
        }
    }
    const double w = set.image_width;
    const double h = set.image_height;
    const double m = options.margin_px;
    for (Landmark b : {Landmark::LeftBoundary, Landmark::RightBoundary}) {
        const Point p = set.at(b);
        if (p.x <= m || p.x >= w - m || p.y <= m || p.y >= h - m) {
            return {QualityStatus::BoundaryClipped, std::string(to_string(b))};
        }
    }
    for (std::size_t k = 0; k < kLandmarkCount; ++k) {
        const auto& p = set.points[k];
        if (p && (p->x < 0.0 || p->x > w || p->y < 0.0 || p->y > h)) {
            return {QualityStatus::OutOfBounds, std::string(kJsonKeys[k])};
        }
    }
    return {};
}

FwhrRecord measure(const LandmarkSet& raw, const QualityOptions& quality, const FwhrOptions& fwhr) {
    FwhrRecord rec;
    rec.actor_id = raw.image_id;
    const auto gate = quality_gate(raw, quality);
    if (!gate.passed()) {
        rec.quality = gate.status;
        rec.reason = gate.detail;
        return rec;
    }
    try {
        rec = compute_fwhr(align_landmarks(raw), fwhr);
        rec.actor_id = raw.image_id;
    } catch (const Error& e) {
        rec = FwhrRecord{};
        rec.actor_id = raw.image_id;
        rec.quality = QualityStatus::GeometryError;
        rec.reason = std::string(to_string(e.code()));
    }
    return rec;
}

std::vector<FwhrRecord> measure_directory(const std::string& dir, const QualityOptions& quality,
                                          const FwhrOptions& fwhr) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
        fail(ErrorCode::Io, "'" + dir + "' is not a directory");
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<FwhrRecord> out;
    out.reserve(files.size());
    for (const auto& f : files) {
        out.push_back(measure(read_landmarks_file(f.string()), quality, fwhr));
    }
    return out;
}

std::string traits_csv(const std::vector<FwhrRecord>& records) {
    std::ostringstream out;
    csv::write_row(out, {"actor_id", "fwhr", "quality", "reason"});
    for (const auto& r : records) {
        const bool ok = r.quality == QualityStatus::Pass;
        csv::write_row(out, {r.actor_id, ok ? csv::format_number(r.fwhr) : std::string{},
                             std::string(to_string(r.quality)), r.reason});
    }
    return out.str();
}

}  // namespace fimpkit::face
