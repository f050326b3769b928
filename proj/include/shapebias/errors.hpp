#pragma once

#include <stdexcept>
#include <string>

namespace shapebias {

// Root of every error the library throws.
class ShapeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A caller broke a precondition (mismatched spaces, wrong group variant, bad lengths).
class ContractViolation : public ShapeError {
public:
    using ShapeError::ShapeError;
};

// Input outside the mathematical domain (NaN, negative sigma, empty data, ...).
class DomainError : public ShapeError {
public:
    using ShapeError::ShapeError;
};

// A bias correction would leave a nonpositive signal.
class DegenerateSignalError : public DomainError {
public:
    using DomainError::DomainError;
};

// Logarithm or transport requested between antipodal sphere points.
class CutLocusError : public ShapeError {
public:
    using ShapeError::ShapeError;
};

// Registration against a point fixed by the whole group (zero vector, pole, collapsed landmarks).
class DegenerateOrbitError : public ShapeError {
public:
    using ShapeError::ShapeError;
};

class ConvergenceError : public ShapeError {
public:
    using ShapeError::ShapeError;
};

class QuadratureError : public ShapeError {
public:
    using ShapeError::ShapeError;
};

}  // namespace shapebias
