#pragma once

#include <stdexcept>
#include <string>

namespace swingsafe {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SchemaError : public Error { using Error::Error; };
class UnbalancedInjection : public Error { using Error::Error; };
class DisconnectedGraph : public Error { using Error::Error; };
class InvalidNetwork : public Error { using Error::Error; };
class PreconditionError : public Error { using Error::Error; };
class DimensionMismatch : public Error { using Error::Error; };
class NoConvergence : public Error { using Error::Error; };
class Divergence : public Error { using Error::Error; };
class NonFinite : public Error { using Error::Error; };
class SingularF : public Error { using Error::Error; };
class SingularG : public Error { using Error::Error; };
class OwnershipGap : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };
class MismatchError : public Error { using Error::Error; };

/// Raised by the locality audit; `row` is the offending constraint row, or
/// -1 when the violation is a Hessian coupling.
class LocalityViolation : public Error {
public:
    LocalityViolation(const std::string& what, long row) : Error(what), row_(row) {}
    long row() const noexcept { return row_; }

private:
    long row_;
};

} // namespace swingsafe
