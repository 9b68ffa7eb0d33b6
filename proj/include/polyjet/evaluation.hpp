#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "polyjet/expr.hpp"

namespace polyjet {

using Assignment = std::map<std::string, double>;

/// Recursive numeric evaluation. Throws UnboundVariable or DomainError.
double evaluate(const Expr& e, const Assignment& a);

/// A batch of expressions compiled to a flat instruction tape with common
/// subexpressions merged. Variables are bound positionally, in the order given
/// at construction. `run` holds no shared state and may be called concurrently.
class Program {
public:
    Program() = default;
    /// Throws UnboundVariable when an output uses a variable not in `variables`.
    Program(std::vector<std::string> variables, std::span<const Expr> outputs);

    const std::vector<std::string>& variables() const { return variables_; }
    std::size_t output_count() const { return outputs_.size(); }
    std::size_t instruction_count() const { return tape_.size(); }

    void run(std::span<const double> inputs, std::span<double> outputs) const;
    std::vector<double> run(std::span<const double> inputs) const;

private:
    struct Instr {
        NodeKind op;
        Func func = Func::exp;
        double constant = 0.0;
        int exponent = 0;
        std::uint32_t first = 0;  // variable index, or offset into args_
        std::uint32_t count = 0;
    };

    [[noreturn]] void domain_failure(std::size_t instr, const char* what, double arg,
                                     std::span<const double> inputs) const;

    std::vector<std::string> variables_;
    std::vector<Instr> tape_;
    std::vector<std::uint32_t> args_;
    std::vector<std::uint32_t> outputs_;
    std::vector<Expr> sources_;
};

struct Interval {
    std::string name;
    double lo = 0.0;
    double hi = 0.0;
};

/// Box of sample points: one closed interval per variable, `count` points
/// drawn uniformly from a seeded 64-bit Mersenne Twister.
class SampleDomain {
public:
    /// Throws ConfigError unless lo < hi everywhere, names are distinct, count >= 1.
    SampleDomain(std::vector<Interval> intervals, std::size_t count, std::uint64_t seed);

    const std::vector<Interval>& intervals() const { return intervals_; }
    std::vector<std::string> variables() const;
    std::size_t count() const { return count_; }
    std::uint64_t seed() const { return seed_; }
    bool covers(const std::string& name) const;

    SampleDomain with_count(std::size_t count) const;
    SampleDomain with_seed(std::uint64_t seed) const;

    /// Deterministic sample points, each ordered as variables().
    std::vector<std::vector<double>> points() const;
    /// Midpoint of every interval.
    std::vector<double> center() const;

private:
    std::vector<Interval> intervals_;
    std::size_t count_;
    std::uint64_t seed_;
};

inline constexpr double kDefaultEquivTolerance = 1e-9;
inline constexpr std::size_t kDefaultSampleCount = 20;

struct Discrepancy {
    double max_scaled = 0.0;          ///< max |a-b| / max(1, |a|, |b|)
    std::vector<double> worst_point;  ///< ordered as the domain's variables()
};

/// Largest scaled difference between e1 and e2 over the domain's samples.
Discrepancy compare(const Expr& e1, const Expr& e2, const SampleDomain& dom);

/// Probabilistic equality: |e1 - e2| <= tol * max(1, |e1|, |e2|) at every
/// sample. A true result is evidence, not proof.
bool equiv(const Expr& e1, const Expr& e2, const SampleDomain& dom,
           double tol = kDefaultEquivTolerance);

}  // namespace polyjet
