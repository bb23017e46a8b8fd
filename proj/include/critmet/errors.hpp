#pragma once

#include <stdexcept>
#include <string>

namespace critmet {

// Base of all library errors. exit_code() maps onto the CLI contract:
// 2 config, 3 physics domain, 4 numerical certificate.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual int exit_code() const { return 1; }
};

class ConfigError : public Error {
public:
    using Error::Error;
    int exit_code() const override { return 2; }
};

class PhysicsError : public Error {
public:
    using Error::Error;
    int exit_code() const override { return 3; }
};

class NumericalError : public Error {
public:
    using Error::Error;
    int exit_code() const override { return 4; }
};

#define CRITMET_ERROR(Name, Base) \
    class Name : public Base {    \
    public:                       \
        using Base::Base;         \
    };

CRITMET_ERROR(RangeError, ConfigError)
CRITMET_ERROR(UnsupportedCombo, ConfigError)
CRITMET_ERROR(UnknownFigure, ConfigError)

CRITMET_ERROR(PhaseError, PhysicsError)
CRITMET_ERROR(AmbiguousRegion, PhysicsError)
CRITMET_ERROR(GapClosed, PhysicsError)

CRITMET_ERROR(TruncationError, NumericalError)
CRITMET_ERROR(NotHermitian, NumericalError)
CRITMET_ERROR(DegenerateGround, NumericalError)
CRITMET_ERROR(NoConvergence, NumericalError)
CRITMET_ERROR(StepRejection, NumericalError)
CRITMET_ERROR(PositivityError, NumericalError)
CRITMET_ERROR(ZeroVariance, NumericalError)
CRITMET_ERROR(InsufficientData, NumericalError)
CRITMET_ERROR(NonPositiveData, NumericalError)

#undef CRITMET_ERROR

}  // namespace critmet
