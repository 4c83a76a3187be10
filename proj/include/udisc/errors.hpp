#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Core>

namespace udisc {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Vectors or operators with incompatible dimensions were combined.
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// The Gram matrix is numerically singular: the states are linearly dependent.
class SingularGram : public Error {
public:
    using Error::Error;
};

class ZeroVector : public Error {
public:
    using Error::Error;
};

/// The requested vector is entangled across the given tensor factorization.
class NotProduct : public Error {
public:
    using Error::Error;
};

class NotABasis : public Error {
public:
    using Error::Error;
};

class NotAllProduct : public Error {
public:
    using Error::Error;
};

/// A reciprocal overlap required to be nonzero vanished.
class ZeroOverlap : public Error {
public:
    using Error::Error;
};

/// Problem size exceeds what the exhaustive oracle can afford.
class TooLarge : public Error {
public:
    using Error::Error;
};

class UnknownScenario : public Error {
public:
    using Error::Error;
};

/// An input file violated an ensemble invariant. `field` names the offender.
class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& what)
        : Error(what), field_(std::move(field)) {}

    const std::string& field() const { return field_; }

private:
    std::string field_;
};

class ParseError : public Error {
public:
    using Error::Error;
};

/// The interior-point solver hit its iteration cap. Carries the best iterate
/// so callers can still inspect a near-optimal point.
class NoConvergence : public Error {
public:
    NoConvergence(int iterations, double residual, Eigen::VectorXd best_p)
        : Error("solver did not converge after " + std::to_string(iterations) +
                " Newton steps (best residual " + std::to_string(residual) + ")"),
          iterations_(iterations),
          residual_(residual),
          best_p_(std::move(best_p)) {}

    int iterations() const { return iterations_; }
    double residual() const { return residual_; }
    const Eigen::VectorXd& best_p() const { return best_p_; }

private:
    int iterations_;
    double residual_;
    Eigen::VectorXd best_p_;
};

}  // namespace udisc
