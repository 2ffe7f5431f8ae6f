#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ribbonopt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A curvature sample was <= 0; the energy divides by kappa^2.
class NonPositiveCurvature : public Error {
public:
    NonPositiveCurvature(double t, double kappa)
        : Error("non-positive curvature kappa=" + std::to_string(kappa) +
                " at t=" + std::to_string(t)),
          t_(t), kappa_(kappa) {}
    double t() const { return t_; }
    double kappa() const { return kappa_; }

private:
    double t_;
    double kappa_;
};

class GridMismatch : public Error {
public:
    using Error::Error;
};

class TorsionVanishes : public Error {
public:
    using Error::Error;
};

class ZeroTorsionAtPoint : public Error {
public:
    using Error::Error;
};

class EmptyMesh : public Error {
public:
    using Error::Error;
};

/// kappa_n and tau_g both vanish, so the ruling direction is undefined.
class DegenerateRuling : public Error {
public:
    using Error::Error;
};

/// Malformed or out-of-range configuration; names the offending key.
class ConfigError : public Error {
public:
    ConfigError(std::string key, const std::string& what) : Error(key + ": " + what), key_(std::move(key)) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

} // namespace ribbonopt
