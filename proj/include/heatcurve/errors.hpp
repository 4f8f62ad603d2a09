#pragma once

#include <stdexcept>
#include <string>

namespace heatcurve {

/// Base class of every error raised by the library. The CLI maps
/// ConfigurationError subclasses to exit code 1 and everything else to 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigurationError : public Error {
public:
    using Error::Error;
};

class InvalidParameter : public ConfigurationError {
public:
    using ConfigurationError::ConfigurationError;
};

class DegenerateCurve : public Error {
public:
    using Error::Error;
};

class DegenerateFrame : public Error {
public:
    using Error::Error;
};

class NotSimple : public Error {
public:
    using Error::Error;
};

class TubeTooWide : public Error {
public:
    using Error::Error;
};

class ToleranceNotMet : public Error {
public:
    ToleranceNotMet(const std::string& what, double best_value, double achieved_error)
        : Error(what), best_value_(best_value), achieved_error_(achieved_error) {}

    double best_value() const noexcept { return best_value_; }
    double achieved_error() const noexcept { return achieved_error_; }

private:
    double best_value_;
    double achieved_error_;
};

class FitFailure : public Error {
public:
    FitFailure(const std::string& what, double condition_number)
        : Error(what), condition_number_(condition_number) {}

    double condition_number() const noexcept { return condition_number_; }

private:
    double condition_number_;
};

class CalibrationFailure : public Error {
public:
    using Error::Error;
};

}  // namespace heatcurve
