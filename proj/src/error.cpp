#include "fimpkit/error.hpp"

namespace fimpkit {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::Io: return "Io";
        case ErrorCode::Config: return "Config";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::RaggedRow: return "RaggedRow";
        case ErrorCode::DuplicateActor: return "DuplicateActor";
        case ErrorCode::DuplicateBill: return "DuplicateBill";
        case ErrorCode::UnknownVoteToken: return "UnknownVoteToken";
        case ErrorCode::UnknownBillType: return "UnknownBillType";
        case ErrorCode::UnknownBillId: return "UnknownBillId";
        case ErrorCode::EmptyResult: return "EmptyResult";
        case ErrorCode::InvalidValue: return "InvalidValue";
        case ErrorCode::CoincidentEyes: return "CoincidentEyes";
        case ErrorCode::InvalidLandmarks: return "InvalidLandmarks";
        case ErrorCode::MissingLandmark: return "MissingLandmark";
        case ErrorCode::NotAligned: return "NotAligned";
        case ErrorCode::NonPositiveHeight: return "NonPositiveHeight";
        case ErrorCode::NonPositiveWidth: return "NonPositiveWidth";
        case ErrorCode::EmptyActorSet: return "EmptyActorSet";
        case ErrorCode::EmptyGraph: return "EmptyGraph";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::KOutOfRange: return "KOutOfRange";
        case ErrorCode::MissingTrait: return "MissingTrait";
        case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
        case ErrorCode::SampleTooSmall: return "SampleTooSmall";
        case ErrorCode::ZeroVarianceBoth: return "ZeroVarianceBoth";
        case ErrorCode::DegenerateSample: return "DegenerateSample";
    }
    return "Unknown";
}

}  // namespace fimpkit
