#pragma once

#include <stdexcept>
#include <string>

namespace cvvdp {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad display geometry or photometry.
class InvalidSpec : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    using Error::Error;
};

// Test and reference do not match in size, frame count or rate.
class PairingError : public Error {
public:
    using Error::Error;
};

// Wraps an error raised inside the metric pipeline with where it happened.
class StageError : public Error {
public:
    StageError(std::string stage, int frame, const std::string& what)
        : Error(stage + " (frame " + std::to_string(frame) + "): " + what),
          stage_(std::move(stage)), frame_(frame) {}

    const std::string& stage() const { return stage_; }
    int frame() const { return frame_; }

private:
    std::string stage_;
    int frame_;
};

}  // namespace cvvdp
