#pragma once

#include <stdexcept>
#include <string>

namespace twistor {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DegreeError : public Error { using Error::Error; };
class NonInvolutiveError : public Error { using Error::Error; };
class RealityError : public Error { using Error::Error; };
class WeightError : public Error { using Error::Error; };
class DimensionError : public Error { using Error::Error; };
class FiberError : public Error { using Error::Error; };
class OriginError : public Error { using Error::Error; };
class ModelError : public Error { using Error::Error; };
class ParseError : public Error { using Error::Error; };

/// Raised when a purported group fails closure, identity, inverse or
/// associativity. The witness holds the offending element indices.
class GroupAxiomError : public Error {
public:
    GroupAxiomError(const std::string& what, int a, int b, int c)
        : Error(what), witness{a, b, c} {}
    int witness[3];
};

} // namespace twistor
