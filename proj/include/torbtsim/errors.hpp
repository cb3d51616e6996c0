#pragma once

#include <stdexcept>
#include <string>

namespace torbtsim {

struct MalformedBencoding : std::runtime_error {
    explicit MalformedBencoding(const std::string& what) : std::runtime_error("malformed bencoding: " + what) {}
};

struct SchedulingInPast : std::logic_error {
    explicit SchedulingInPast(const std::string& what) : std::logic_error("scheduling in past: " + what) {}
};

struct WeightSumInvalid : std::invalid_argument {
    explicit WeightSumInvalid(const std::string& what) : std::invalid_argument("weight sum invalid: " + what) {}
};

struct InsufficientRelays : std::runtime_error {
    explicit InsufficientRelays(const std::string& what) : std::runtime_error("insufficient relays: " + what) {}
};

struct UnknownInfoHash : std::runtime_error {
    explicit UnknownInfoHash(const std::string& what) : std::runtime_error("unknown info_hash: " + what) {}
};

struct ConnectionRefused : std::runtime_error {
    explicit ConnectionRefused(const std::string& what) : std::runtime_error("connection refused: " + what) {}
};

struct GroundTruthMissing : std::runtime_error {
    explicit GroundTruthMissing(const std::string& what) : std::runtime_error("ground truth missing: " + what) {}
};

struct EmptyInput : std::invalid_argument {
    explicit EmptyInput(const std::string& what) : std::invalid_argument("empty input: " + what) {}
};

struct ConfigInvalid : std::invalid_argument {
    explicit ConfigInvalid(const std::string& what) : std::invalid_argument("invalid config: " + what) {}
};

struct IoFailure : std::runtime_error {
    explicit IoFailure(const std::string& what) : std::runtime_error("i/o failure: " + what) {}
};

} // namespace torbtsim
