#pragma once

#include <stdexcept>
#include <string>

namespace pwe {

// Base class for all library errors. Subclasses mirror the failure modes of
// the public operations so callers can catch them selectively.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// The map description itself is inconsistent (regions overlap, closures do
// not cover the phase space, expansion below lambda, ...).
class InvalidMapError : public Error {
public:
    using Error::Error;
};

// A point lies outside every closed piece region.
class NoPieceError : public Error {
public:
    using Error::Error;
};

// The orbit of a point leaves the prescribed itinerary word.
class WordMismatchError : public Error {
public:
    using Error::Error;
};

class EmptyCylinderError : public Error {
public:
    using Error::Error;
};

// Cylinder enumeration would exceed the configured budget. Carries the bound
// on the count that was reached.
class DepthExplosionError : public Error {
public:
    DepthExplosionError(const std::string& what, long long count_bound)
        : Error(what), count_bound(count_bound) {}
    long long count_bound;
};

class NotMarkovError : public Error {
public:
    using Error::Error;
};

class UnsupportedGeometryError : public Error {
public:
    using Error::Error;
};

// A bound parameter violates the theorem hypotheses (e.g. t >= 1/p).
class ParameterError : public Error {
public:
    using Error::Error;
};

class NoMeasuresError : public Error {
public:
    using Error::Error;
};

class NoConvergenceError : public Error {
public:
    NoConvergenceError(const std::string& what, double residual)
        : Error(what), residual(residual) {}
    double residual;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace pwe
