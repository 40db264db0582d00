#pragma once

#include <stdexcept>
#include <string>

namespace resorb {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input outside an operation's domain (bad eccentricity, non-coprime p/q, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// The particle reaches (or comes within threshold of) a primary.
class CollisionError : public Error {
public:
    using Error::Error;
};

/// An iteration (Kepler, quadrature doubling, Newton shooting) did not converge.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

}  // namespace resorb
