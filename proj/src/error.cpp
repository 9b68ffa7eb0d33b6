#include "polyjet/error.hpp"

namespace polyjet {

SyntaxError::SyntaxError(const std::string& message, std::size_t position, const std::string& source)
    : Error(ErrorCategory::syntax, "syntax error at position " + std::to_string(position) + ": " +
                                       message + "\n  " + source + "\n  " +
                                       std::string(position, ' ') + "^"),
      position_(position) {}

const char* to_string(ErrorCategory category) {
    switch (category) {
        case ErrorCategory::syntax: return "SyntaxError";
        case ErrorCategory::unknown_identifier: return "UnknownIdentifier";
        case ErrorCategory::unbound_variable: return "UnboundVariable";
        case ErrorCategory::domain: return "DomainError";
        case ErrorCategory::singular_jacobian: return "SingularJacobian";
        case ErrorCategory::singular_metric: return "SingularMetric";
        case ErrorCategory::not_regular: return "NotRegular";
        case ErrorCategory::residual_too_large: return "ResidualTooLarge";
        case ErrorCategory::config: return "ConfigError";
        case ErrorCategory::dimension: return "DimensionError";
    }
    return "Error";
}

}  // namespace polyjet
