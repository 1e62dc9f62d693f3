#pragma once

#include <stdexcept>
#include <string>

namespace ehlora {

enum class ErrorKind { Config, Numerical, Infeasible, OutOfRange, Model, Statistics };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Malformed or inconsistent configuration. Carries the offending field and,
// when the error came from a file, its line number (0 when unknown).
class ConfigError : public Error {
public:
    ConfigError(const std::string& field, const std::string& what, int line = 0)
        : Error(ErrorKind::Config, format(field, what, line)), field_(field), detail_(what), line_(line) {}
    const std::string& field() const noexcept { return field_; }
    // The message without the "config error [field]" prefix.
    const std::string& detail() const noexcept { return detail_; }
    int line() const noexcept { return line_; }

private:
    static std::string format(const std::string& field, const std::string& what, int line) {
        std::string s = "config error";
        if (line > 0) s += " (line " + std::to_string(line) + ")";
        if (!field.empty()) s += " [" + field + "]";
        return s + ": " + what;
    }
    std::string field_;
    std::string detail_;
    int line_;
};

class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

class InfeasibleError : public Error {
public:
    InfeasibleError(int sf, const std::string& what)
        : Error(ErrorKind::Infeasible, "SF" + std::to_string(sf) + ": " + what), sf_(sf) {}
    int sf() const noexcept { return sf_; }

private:
    int sf_;
};

class OutOfRangeError : public Error {
public:
    explicit OutOfRangeError(const std::string& what) : Error(ErrorKind::OutOfRange, what) {}
};

class ModelError : public Error {
public:
    explicit ModelError(const std::string& what) : Error(ErrorKind::Model, what) {}
};

class StatisticsError : public Error {
public:
    StatisticsError(int ring, const std::string& what)
        : Error(ErrorKind::Statistics, "ring " + std::to_string(ring) + ": " + what), ring_(ring) {}
    int ring() const noexcept { return ring_; }

private:
    int ring_;
};

}  // namespace ehlora
