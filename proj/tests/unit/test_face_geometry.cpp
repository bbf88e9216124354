#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "fimpkit/error.hpp"
#include "fimpkit/face_geometry.hpp"
#include "fixtures.hpp"

using namespace fimpkit;
using namespace fimpkit::face;

namespace {

// Already aligned: eyes level at distance 100 around the origin.
LandmarkSet canonical(double width, double height) {
    LandmarkSet s;
    s.image_id = "canon";
    s.image_width = 1000;
    s.image_height = 1000;
    s.set(Landmark::LeftEye, {-50, 0});
    s.set(Landmark::RightEye, {50, 0});
    s.set(Landmark::LeftBoundary, {-width / 2, 15});
    s.set(Landmark::RightBoundary, {width / 2, 20});
    s.set(Landmark::LeftEyelidTop, {-50, -10});
    s.set(Landmark::RightEyelidTop, {50, -10});
    s.set(Landmark::UpperLipTop, {0, height - 10});
    return s;
}

void check_same_points(const LandmarkSet& a, const LandmarkSet& b, double tol) {
    for (std::size_t k = 0; k < kLandmarkCount; ++k) {
        REQUIRE(a.points[k].has_value() == b.points[k].has_value());
        if (a.points[k]) {
            CHECK(std::abs(a.points[k]->x - b.points[k]->x) <= tol);
            CHECK(std::abs(a.points[k]->y - b.points[k]->y) <= tol);
        }
    }
}

}  // namespace

TEST_SUITE("face_geometry") {
    TEST_CASE("rotation angle levels the eye axis") {
        CHECK(eye_rotation_angle({0, 5}, {10, 5}) == 0.0);
        CHECK(eye_rotation_angle({0, 0}, {10, 10}) == doctest::Approx(-45.0).epsilon(1e-12));
        CHECK(eye_rotation_angle({0, 0}, {std::sqrt(3.0), 1}) == doctest::Approx(-30.0).epsilon(1e-12));
        CHECK(eye_rotation_angle({0, 0}, {0, 10}) == 90.0);
        CHECK(eye_rotation_angle({0, 10}, {0, 0}) == 90.0);
        CHECK_THROWS_AS(eye_rotation_angle({3, 3}, {3, 3}), Error);
        // Translation and uniform scaling leave the angle unchanged.
        CHECK(eye_rotation_angle({1, 2}, {7, 5}) == doctest::Approx(eye_rotation_angle({21, -8}, {39, 1})));
    }

    TEST_CASE("fWHR of the reference faces") {
        CHECK(compute_fwhr(align_landmarks(canonical(220, 100))).fwhr == 2.2);
        CHECK(compute_fwhr(align_landmarks(canonical(186, 100))).fwhr == 1.86);
        CHECK(compute_fwhr(canonical(100, 100)).fwhr == 1.0);
        const auto rec = compute_fwhr(canonical(220, 100));
        CHECK(rec.width == 220.0);
        CHECK(rec.height == 100.0);
    }

    TEST_CASE("aligning a level canonical set is the identity") {
        const auto s = canonical(200, 90);
        check_same_points(align_landmarks(s), s, 0.0);
    }

    TEST_CASE("alignment undoes a known rotation, translation and scale") {
        testing::Rng rng(21);
        const auto base = testing::synthetic_landmarks("x", 190, 95, rng);
        const auto expected = align_landmarks(base);
        const Point left = base.at(Landmark::LeftEye);
        const Point right = base.at(Landmark::RightEye);
        const Point mid{(left.x + right.x) / 2, (left.y + right.y) / 2};
        const auto moved = testing::transform_landmarks(base, 17.0, mid, {-40, 12}, 1.7);
        check_same_points(align_landmarks(moved), expected, 1e-9);
        // Idempotent.
        check_same_points(align_landmarks(expected), expected, 1e-9);
        const auto aligned = align_landmarks(moved);
        CHECK(std::abs(eye_rotation_angle(aligned.at(Landmark::LeftEye), aligned.at(Landmark::RightEye))) < 1e-9);
        CHECK(std::hypot(aligned.at(Landmark::RightEye).x - aligned.at(Landmark::LeftEye).x,
                         aligned.at(Landmark::RightEye).y - aligned.at(Landmark::LeftEye).y) ==
              doctest::Approx(kCanonicalEyeDistance).epsilon(1e-12));
    }

    TEST_CASE("vertical or swapped eyes are rejected by alignment") {
        auto s = canonical(200, 100);
        s.set(Landmark::LeftEye, {0, -50});
        s.set(Landmark::RightEye, {0, 50});
        CHECK_THROWS_AS(align_landmarks(s), Error);
        s.set(Landmark::LeftEye, {50, 0});
        s.set(Landmark::RightEye, {-50, 0});
        CHECK_THROWS_AS(align_landmarks(s), Error);
    }

    TEST_CASE("measurement errors") {
        auto tilted = canonical(200, 100);
        tilted.set(Landmark::RightEye, {50, 1});
        try {
            compute_fwhr(tilted);
            FAIL("expected NotAligned");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::NotAligned);
        }
        auto flat = canonical(200, 100);
        flat.set(Landmark::UpperLipTop, {0, -20});
        try {
            compute_fwhr(flat);
            FAIL("expected NonPositiveHeight");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::NonPositiveHeight);
        }
        auto crossed = canonical(200, 100);
        crossed.set(Landmark::LeftBoundary, {120, 0});
        try {
            compute_fwhr(crossed);
            FAIL("expected NonPositiveWidth");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::NonPositiveWidth);
        }
    }

    TEST_CASE("height reference and eyelid line variants") {
        auto s = canonical(200, 100);
        s.set(Landmark::LeftEyelidTop, {-50, -14});
        s.set(Landmark::RightEyelidTop, {50, -6});
        s.set(Landmark::LeftBrowInner, {-10, -30});
        s.set(Landmark::RightBrowInner, {10, -30});
        CHECK(compute_fwhr(s).height == 100.0);
        FwhrOptions highest;
        highest.eyelid_line = EyelidLine::Highest;
        CHECK(compute_fwhr(s, highest).height == 104.0);
        FwhrOptions brow;
        brow.reference = HeightReference::Brow;
        CHECK(compute_fwhr(s, brow).height == 120.0);
        CHECK_THROWS_AS(compute_fwhr(canonical(200, 100), brow), Error);
    }

    TEST_CASE("quality gate") {
        testing::Rng rng(2);
        auto s = testing::synthetic_landmarks("q", 200, 100, rng);
        CHECK(quality_gate(s).passed());
        auto low = s;
        low.confidence = 0.2;
        CHECK(quality_gate(low).status == QualityStatus::LowConfidence);
        auto clipped = s;
        clipped.set(Landmark::RightBoundary, {s.image_width, 470});
        CHECK(quality_gate(clipped).status == QualityStatus::BoundaryClipped);
        auto missing = s;
        missing.points[static_cast<std::size_t>(Landmark::LeftEyelidTop)].reset();
        CHECK(quality_gate(missing).status == QualityStatus::MissingPoint);
        auto outside = s;
        outside.set(Landmark::UpperLipTop, {500, 1200});
        CHECK(quality_gate(outside).status == QualityStatus::OutOfBounds);
        const auto rec = measure(low);
        CHECK(rec.quality == QualityStatus::LowConfidence);
        CHECK(rec.fwhr == 0.0);
    }

    TEST_CASE("JSON round trip and schema errors") {
        testing::Rng rng(8);
        const auto s = testing::synthetic_landmarks("mp77", 205, 101, rng);
        const auto back = parse_landmarks_json(landmarks_to_json(s));
        CHECK(back.image_id == "mp77");
        CHECK(back.confidence == s.confidence);
        check_same_points(back, s, 0.0);
        CHECK_THROWS_AS(parse_landmarks_json("{not json"), Error);
        CHECK_THROWS_AS(parse_landmarks_json(R"({"image_id":"a","image_w":10,"image_h":10,"left_eye":[1]})"),
                        Error);
        const auto partial = parse_landmarks_json(
            R"({"image_id":"a","image_w":100,"image_h":100,"left_eye":[40,50],"right_eye":[60,50],"confidence":0.9})");
        CHECK_FALSE(partial.has(Landmark::UpperLipTop));
        CHECK(quality_gate(partial).status == QualityStatus::MissingPoint);
    }

    TEST_CASE("bundled landmark directory") {
        const auto records = measure_directory(FIMPKIT_TEST_DATA "/landmarks");
        REQUIRE(records.size() == 6);
        CHECK(records[0].actor_id == "mp01");
        CHECK(records[0].quality == QualityStatus::Pass);
        CHECK(records[0].fwhr == doctest::Approx(2.2).epsilon(1e-12));
        CHECK(records[1].fwhr == doctest::Approx(1.86).epsilon(1e-12));
        CHECK(records[2].quality == QualityStatus::Pass);
        CHECK(records[2].fwhr == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(records[3].quality == QualityStatus::LowConfidence);
        CHECK(records[4].quality == QualityStatus::MissingPoint);
        CHECK(records[5].quality == QualityStatus::BoundaryClipped);
        const auto text = traits_csv(records);
        CHECK(text.rfind("actor_id,fwhr,quality,reason\n", 0) == 0);
        CHECK(text.find("mp01,2.2,pass,") != std::string::npos);
    }
}
