#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace spinboson {

using Complex = std::complex<double>;
inline constexpr Complex I{0.0, 1.0};

// Thrown when a phase-space denominator 1 + w*z collapses.
class PoleError : public std::runtime_error {
public:
    explicit PoleError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a noise-factor square root cannot be validated against its
// diffusion block.
class FactorizationError : public std::runtime_error {
public:
    explicit FactorizationError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a requested Hilbert-space dimension exceeds the configured cap.
class DimensionLimitError : public std::runtime_error {
public:
    explicit DimensionLimitError(const std::string& what) : std::runtime_error(what) {}
};

// Configuration file / parameter validation failure.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Reduction requested over an ensemble with no contributing samples.
class EmptyEnsembleError : public std::runtime_error {
public:
    explicit EmptyEnsembleError(const std::string& what) : std::runtime_error(what) {}
};

// Spin magnitude: either a positive half-integer or the classical limit.
struct Spin {
    double s = 0.5;
    bool infinite = false;

    static Spin finite(double value) { return Spin{value, false}; }
    static Spin inf() { return Spin{0.0, true}; }

    // 1/s with the classical limit mapped to zero.
    double inverse() const { return infinite ? 0.0 : 1.0 / s; }

    bool operator==(const Spin&) const = default;
};

} // namespace spinboson
