#pragma once

#include <stdexcept>
#include <string>

namespace slabperc {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller-supplied parameter is outside its domain.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// An event or block does not fit inside the box it is evaluated on.
class GeometryError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// A request exceeds a configured size limit (index width, enumeration cap).
class ResourceLimit : public Error {
public:
    using Error::Error;
};

/// Too few usable points for a regression.
class FitInfeasible : public Error {
public:
    using Error::Error;
};

/// Monte Carlo output inconsistent with a property that must hold up to noise.
class DiagnosticError : public Error {
public:
    using Error::Error;
};

}  // namespace slabperc
