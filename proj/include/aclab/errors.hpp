#pragma once

#include <stdexcept>
#include <string>

namespace aclab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class NonConvergence : public Error {
public:
    using Error::Error;
};

/// Adaptive step size fell below the configured minimum.
class StepFailure : public Error {
public:
    using Error::Error;
};

class OrderingViolation : public Error {
public:
    using Error::Error;
};

/// Two consecutive layers came closer than the configured gap floor.
class CollisionError : public Error {
public:
    CollisionError(const std::string& what, double t, int layer)
        : Error(what), time_(t), layer_(layer) {}
    double time() const noexcept { return time_; }
    /// 1-based index of the lower layer of the colliding pair.
    int layer() const noexcept { return layer_; }

private:
    double time_;
    int layer_;
};

class EigenFailure : public Error {
public:
    using Error::Error;
};

class NoContraction : public Error {
public:
    using Error::Error;
};

class LinAlgFailure : public Error {
public:
    using Error::Error;
};

/// The number of zero crossings dropped below the expected layer count.
class InterfaceLost : public Error {
public:
    InterfaceLost(const std::string& what, double t) : Error(what), time_(t) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

class SpuriousInterface : public Error {
public:
    SpuriousInterface(const std::string& what, double t) : Error(what), time_(t) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

class WindowTooShort : public Error {
public:
    using Error::Error;
};

class WindowMismatch : public Error {
public:
    using Error::Error;
};

class GridMismatch : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    ConfigError(const std::string& field, const std::string& message)
        : Error(field + ": " + message), field_(field) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class SchemaMismatch : public Error {
public:
    using Error::Error;
};

}  // namespace aclab
