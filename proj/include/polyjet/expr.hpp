#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace polyjet {

enum class NodeKind { constant, variable, sum, product, power, negation, quotient, function };

enum class Func { exp, ln, sin, cos, sqrt };

const char* to_string(Func f);

/// Immutable symbolic expression over named real variables.
///
/// Every constructor returns a canonical node: sums and products are flattened,
/// constants are folded, like terms and repeated factors are merged, and no
/// quotient by the constant zero can be built (attempting it throws
/// DomainError). Copies share the underlying node, so an Expr is cheap to pass
/// by value and safe to read from many threads.
class Expr {
public:
    struct Node;

    /// The constant zero.
    Expr();
    Expr(double value);  // NOLINT(google-explicit-constructor)

    static Expr constant(double value);
    static Expr variable(std::string name);

    NodeKind kind() const;
    /// Constant value; only meaningful for NodeKind::constant.
    double value() const;
    /// Variable name; only meaningful for NodeKind::variable.
    const std::string& name() const;
    /// Integer exponent; only meaningful for NodeKind::power.
    int exponent() const;
    Func func() const;
    std::span<const Expr> children() const;

    /// Structural hash; equal expressions hash equally.
    std::uint64_t hash() const;
    /// Bloom mask of the variables occurring in the expression.
    std::uint64_t variable_mask() const;

    bool is_constant() const { return kind() == NodeKind::constant; }
    bool is_constant(double v) const { return is_constant() && value() == v; }
    bool is_zero() const { return is_constant(0.0); }

    /// True when `name` may occur in the expression (exact when false).
    bool may_depend_on(const std::string& name) const;

    const Node* node() const { return node_.get(); }

    friend bool operator==(const Expr& a, const Expr& b);
    friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

private:
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    friend struct ExprFactory;

    std::shared_ptr<const Node> node_;
};

std::uint64_t variable_bit(const std::string& name);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);

Expr& operator+=(Expr& a, const Expr& b);
Expr& operator-=(Expr& a, const Expr& b);
Expr& operator*=(Expr& a, const Expr& b);

Expr sum(std::span<const Expr> terms);
Expr product(std::span<const Expr> factors);
Expr pow(const Expr& base, int exponent);
Expr apply(Func f, const Expr& arg);
Expr exp(const Expr& arg);
Expr ln(const Expr& arg);
Expr sin(const Expr& arg);
Expr cos(const Expr& arg);
Expr sqrt(const Expr& arg);

/// Renders an expression in the parser's grammar; parse(print(e)) == e.
std::string to_string(const Expr& e);
std::ostream& operator<<(std::ostream& os, const Expr& e);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double value);

}  // namespace polyjet
