#pragma once

#include <stdexcept>
#include <string>

namespace rangecap {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid input: bad generator sets, malformed configs, out-of-range windows.
class ValidationError : public Error {
public:
    using Error::Error;
};

class NonSymmetricGenerators : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class DuplicateGenerator : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class EmptyGeneratorSet : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class WindowOutOfBounds : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class TooManyLevels : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class DegenerateGenerators : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class InsufficientCounts : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// A computation would exceed a configured resource cap.
class ResourceError : public Error {
public:
    using Error::Error;
};

/// Ball enumeration exceeded the element cap. `reached_radius` is the largest
/// radius whose closed ball was enumerated completely.
class BallTooLarge : public ResourceError {
public:
    BallTooLarge(const std::string& what, int reached_radius)
        : ResourceError(what), reached_radius_(reached_radius)
    {
    }

    int reached_radius() const noexcept { return reached_radius_; }

private:
    int reached_radius_;
};

/// An iterative solver hit its iteration cap before reaching tolerance.
class NonConvergence : public ResourceError {
public:
    using ResourceError::ResourceError;
};

}  // namespace rangecap
