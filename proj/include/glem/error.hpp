#pragma once

#include <stdexcept>
#include <string>

namespace glem {

/// Stable status codes shared between the C++ core and the C API.
/// The hundreds digit selects the CLI exit category: 2xx bad configuration,
/// 3xx bad input data, 4xx numeric failure.
enum class Status : int {
    Ok = 0,

    BadConfig = 200,
    BadArgument = 201,

    IoError = 300,
    MalformedHeader = 301,
    PayloadTruncated = 302,
    NonFiniteValue = 303,
    DuplicateUtteranceId = 304,
    DimensionMismatch = 305,
    InvalidRecord = 306,
    EmptyResult = 307,
    NoPredictions = 308,
    UnknownMeaningId = 309,
    EmptyTranscription = 310,
    EmptyPair = 311,
    MissingLanguage = 312,
    LabelMismatch = 313,
    MissingMetadata = 314,
    MissingGroup = 315,
    OverFiltered = 316,
    InsufficientData = 317,
    DegenerateDenominator = 318,

    InsufficientRank = 400,
    SingularScatter = 401,
    ZeroVector = 402,
    ConstantInput = 403,
    CollinearDesign = 404,
    NnlsStalled = 405,
    NumericFailure = 406,
};

const char* status_name(Status s) noexcept;

/// CLI exit category for a status: 0, 2, 3 or 4.
inline int exit_category(Status s) noexcept {
    const int v = static_cast<int>(s);
    return v == 0 ? 0 : v / 100;
}

class Error : public std::runtime_error {
public:
    Error(Status status, const std::string& message)
        : std::runtime_error(message), status_(status) {}

    Status status() const noexcept { return status_; }

private:
    Status status_;
};

[[noreturn]] inline void fail(Status status, const std::string& message) {
    throw Error(status, message);
}

inline void require(bool condition, Status status, const std::string& message) {
    if (!condition)
        fail(status, message);
}

} // namespace glem
