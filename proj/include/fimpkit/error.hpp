#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fimpkit {

enum class ErrorCode {
    // input and parsing
    Io,
    Config,
    EmptyInput,
    RaggedRow,
    DuplicateActor,
    DuplicateBill,
    UnknownVoteToken,
    UnknownBillType,
    UnknownBillId,
    EmptyResult,
    InvalidValue,
    // face geometry
    CoincidentEyes,
    InvalidLandmarks,
    MissingLandmark,
    NotAligned,
    NonPositiveHeight,
    NonPositiveWidth,
    // graph and neighbors
    EmptyActorSet,
    EmptyGraph,
    DimensionMismatch,
    KOutOfRange,
    MissingTrait,
    // numerics and statistics
    ConvergenceFailure,
    SampleTooSmall,
    ZeroVarianceBoth,
    DegenerateSample,
};

std::string_view to_string(ErrorCode code);

/// Exception type thrown by every fimpkit module. The code identifies the
/// failure; `stage` is filled in by the pipeline when the error crosses a
/// stage boundary.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }
    [[nodiscard]] const std::string& stage() const noexcept { return stage_; }
    void set_stage(std::string stage) { stage_ = std::move(stage); }

private:
    ErrorCode code_;
    std::string stage_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, std::string(to_string(code)) + ": " + message);
}

}  // namespace fimpkit
