#pragma once

#include <stdexcept>
#include <string>

namespace polyjet {

/// Broad failure classes. The CLI maps each to a distinct exit code.
enum class ErrorCategory {
    syntax,
    unknown_identifier,
    unbound_variable,
    domain,
    singular_jacobian,
    singular_metric,
    not_regular,
    residual_too_large,
    config,
    dimension,
};

const char* to_string(ErrorCategory category);

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

/// Malformed expression text. `position` is the 0-based byte offset.
class SyntaxError : public Error {
public:
    SyntaxError(const std::string& message, std::size_t position, const std::string& source);

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

class UnknownIdentifier : public Error {
public:
    explicit UnknownIdentifier(std::string name)
        : Error(ErrorCategory::unknown_identifier, "unknown identifier '" + name + "'"),
          name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class UnboundVariable : public Error {
public:
    explicit UnboundVariable(std::string name)
        : Error(ErrorCategory::unbound_variable, "unbound variable '" + name + "'"),
          name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(ErrorCategory::domain, what) {}
};

class SingularJacobian : public Error {
public:
    explicit SingularJacobian(const std::string& what)
        : Error(ErrorCategory::singular_jacobian, what) {}
};

class SingularMetric : public Error {
public:
    explicit SingularMetric(const std::string& what) : Error(ErrorCategory::singular_metric, what) {}
};

class NotRegular : public Error {
public:
    explicit NotRegular(const std::string& what) : Error(ErrorCategory::not_regular, what) {}
};

class ResidualTooLarge : public Error {
public:
    explicit ResidualTooLarge(const std::string& what)
        : Error(ErrorCategory::residual_too_large, what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorCategory::config, what) {}
};

class DimensionError : public Error {
public:
    explicit DimensionError(const std::string& what) : Error(ErrorCategory::dimension, what) {}
};

}  // namespace polyjet
