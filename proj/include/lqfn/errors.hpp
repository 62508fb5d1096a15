// errors.hpp: exception hierarchy shared by every lqfn module.
//
// Each error optionally carries one numeric diagnostic (a residual, a
// singular value, a deviation) so callers and the CLI can report it.

#pragma once

#include <stdexcept>
#include <string>

namespace lqfn {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what, double diagnostic = 0.0)
        : std::runtime_error(what), diagnostic_(diagnostic) {}

    double diagnostic() const noexcept { return diagnostic_; }

private:
    double diagnostic_;
};

#define LQFN_DEFINE_ERROR(Name, Base)                                   \
    class Name : public Base {                                          \
    public:                                                             \
        explicit Name(const std::string& what, double diagnostic = 0.0) \
            : Base(what, diagnostic) {}                                 \
    }

// doubled-algebra
LQFN_DEFINE_ERROR(StructureError, Error);
LQFN_DEFINE_ERROR(DimensionError, Error);
LQFN_DEFINE_ERROR(NonSymplectic, Error);
LQFN_DEFINE_ERROR(NumericalFailure, Error);
LQFN_DEFINE_ERROR(InvalidGenerator, Error);

// gaussian-states
LQFN_DEFINE_ERROR(InvalidCovariance, Error);
LQFN_DEFINE_ERROR(InconsistentZeroMode, Error);

// components
LQFN_DEFINE_ERROR(ParameterError, Error);
LQFN_DEFINE_ERROR(NotRealizable, Error);
LQFN_DEFINE_ERROR(ChannelMismatch, Error);
LQFN_DEFINE_ERROR(NotZeroHamiltonian, Error);

// network
LQFN_DEFINE_ERROR(IllPosed, Error);
LQFN_DEFINE_ERROR(BadPartition, Error);
LQFN_DEFINE_ERROR(ValidationError, Error);
LQFN_DEFINE_ERROR(DanglingPort, ValidationError);
LQFN_DEFINE_ERROR(PortReuse, ValidationError);
LQFN_DEFINE_ERROR(CycleWithoutComponent, ValidationError);

// transfer
LQFN_DEFINE_ERROR(PoleHit, Error);
LQFN_DEFINE_ERROR(ZeroHit, Error);
LQFN_DEFINE_ERROR(SharedModes, Error);

#undef LQFN_DEFINE_ERROR

class ParseError : public Error {
public:
    ParseError(const std::string& what, int line, int column)
        : Error(what), line_(line), column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

}  // namespace lqfn
