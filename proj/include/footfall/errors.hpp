#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace footfall {

// Base class for everything this library throws.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MalformedRecord : Error {
    MalformedRecord(std::size_t line_no, const std::string& why)
        : Error("line " + std::to_string(line_no) + ": " + why), line(line_no), reason(why) {}
    std::size_t line;
    std::string reason;
};

struct UnknownField : Error {
    using Error::Error;
};

struct WindowNotMultipleOfStep : Error {
    using Error::Error;
};
struct MismatchedInterval : Error {
    using Error::Error;
};
struct GridMismatch : Error {
    using Error::Error;
};
struct InsufficientData : Error {
    using Error::Error;
};
struct TooShort : Error {
    using Error::Error;
};
struct ContainsMissing : Error {
    using Error::Error;
};
struct ConstantInput : Error {
    using Error::Error;
};
struct LengthMismatch : Error {
    using Error::Error;
};
struct NoOverlap : Error {
    using Error::Error;
};
struct EmptyInput : Error {
    using Error::Error;
};
struct InvalidParameter : Error {
    using Error::Error;
};
struct ParameterMismatch : Error {
    using Error::Error;
};
struct OutOfRange : Error {
    using Error::Error;
};
struct ZeroDistanceStep : Error {
    using Error::Error;
};
struct InvalidScenario : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};
struct IoError : Error {
    using Error::Error;
};

}  // namespace footfall
