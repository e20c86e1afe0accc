#pragma once

#include <stdexcept>
#include <string>

namespace qmskit {

/// Base class for all qmskit errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidMatrix : public Error { public: using Error::Error; };
class DimError : public Error { public: using Error::Error; };
class EmptyInput : public Error { public: using Error::Error; };
class ZeroVector : public Error { public: using Error::Error; };
class InvalidTime : public Error { public: using Error::Error; };
class GridError : public Error { public: using Error::Error; };
class NotAntiSelfAdjoint : public Error { public: using Error::Error; };
class InvalidRate : public Error { public: using Error::Error; };
class ParseError : public Error { public: using Error::Error; };
class ValidationError : public Error { public: using Error::Error; };
class NotApplicable : public Error { public: using Error::Error; };
class ToleranceAmbiguity : public Error { public: using Error::Error; };

/// A mathematically impossible state was reached (e.g. a closure loop
/// failed to terminate, or two routes that a theorem forces to agree
/// disagreed). Always indicates a bug, never bad user input.
class InternalError : public Error { public: using Error::Error; };

} // namespace qmskit
