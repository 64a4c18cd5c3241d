#pragma once

#include <stdexcept>
#include <string>

namespace travelsim {

// Input document violates a schema rule; message names the offending field.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// A referenced entity (POI id, place name, fixture key) cannot be resolved.
struct ReferenceError : std::runtime_error {
    explicit ReferenceError(const std::string& msg) : std::runtime_error(msg) {}
};

// Caller passed an argument outside the operation's contract.
struct ArgumentError : std::invalid_argument {
    explicit ArgumentError(const std::string& msg) : std::invalid_argument(msg) {}
};

// A forbidden or unknown transport mode was requested.
struct ModeError : std::runtime_error {
    explicit ModeError(const std::string& msg) : std::runtime_error(msg) {}
};

// A provider (map, dining, sightseeing, network) failed to answer.
struct EnvironmentError : std::runtime_error {
    explicit EnvironmentError(const std::string& msg) : std::runtime_error(msg) {}
};

// A model pipeline stage produced output that cannot be used.
struct PipelineError : std::runtime_error {
    explicit PipelineError(const std::string& msg) : std::runtime_error(msg) {}
};

// A remote peer answered with a payload that violates the wire contract.
struct ProtocolError : std::runtime_error {
    explicit ProtocolError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace travelsim
