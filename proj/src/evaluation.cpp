#include "polyjet/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <unordered_map>

#include "polyjet/calculus.hpp"
#include "polyjet/error.hpp"

namespace polyjet {

Program::Program(std::vector<std::string> variables, std::span<const Expr> outputs)
    : variables_(std::move(variables)) {
    std::unordered_map<std::string, std::uint32_t> var_index;
    for (std::uint32_t i = 0; i < variables_.size(); ++i) var_index.emplace(variables_[i], i);

    // Nodes are merged on (op, payload, child slots). Children are compiled
    // first, so equal subtrees already share a slot and the key is O(1) per
    // node; deep structural comparison would revisit shared subgraphs.
    std::unordered_map<const Expr::Node*, std::uint32_t> by_node;
    std::unordered_map<std::string, std::uint32_t> by_key;

    auto compile = [&](const Expr& root) -> std::uint32_t {
        std::vector<std::pair<Expr, bool>> stack{{root, false}};
        std::string key;
        while (!stack.empty()) {
            auto [e, expanded] = stack.back();
            stack.pop_back();
            if (by_node.count(e.node())) continue;
            if (!expanded) {
                stack.emplace_back(e, true);
                for (const auto& c : e.children()) {
                    if (!by_node.count(c.node())) stack.emplace_back(c, false);
                }
                continue;
            }
            Instr in{e.kind()};
            switch (e.kind()) {
                case NodeKind::constant: in.constant = e.value(); break;
                case NodeKind::variable: {
                    auto it = var_index.find(e.name());
                    if (it == var_index.end()) throw UnboundVariable(e.name());
                    in.first = it->second;
                    break;
                }
                case NodeKind::power: in.exponent = e.exponent(); break;
                case NodeKind::function: in.func = e.func(); break;
                default: break;
            }
            key.clear();
            auto put = [&key](const auto& v) { key.append(reinterpret_cast<const char*>(&v), sizeof v); };
            put(in.op);
            put(in.func);
            put(in.constant);
            put(in.exponent);
            put(in.first);
            for (const auto& c : e.children()) put(by_node.at(c.node()));
            if (auto it = by_key.find(key); it != by_key.end()) {
                by_node.emplace(e.node(), it->second);
                continue;
            }
            if (!e.children().empty()) {
                in.first = static_cast<std::uint32_t>(args_.size());
                in.count = static_cast<std::uint32_t>(e.children().size());
                for (const auto& c : e.children()) args_.push_back(by_node.at(c.node()));
            }
            const auto slot = static_cast<std::uint32_t>(tape_.size());
            tape_.push_back(in);
            sources_.push_back(e);
            by_node.emplace(e.node(), slot);
            by_key.emplace(key, slot);
        }
        return by_node.at(root.node());
    };

    outputs_.reserve(outputs.size());
    for (const auto& e : outputs) outputs_.push_back(compile(e));
}

void Program::domain_failure(std::size_t instr, const char* what, double arg,
                             std::span<const double> inputs) const {
    std::string msg = std::string(what) + " (argument " + format_number(arg) + ") in '" +
                      to_string(sources_[instr]) + "'";
    std::string bindings;
    const auto used = free_variables(sources_[instr]);
    for (std::size_t i = 0; i < variables_.size(); ++i) {
        if (!used.count(variables_[i])) continue;
        if (!bindings.empty()) bindings += ", ";
        bindings += variables_[i] + "=" + format_number(inputs[i]);
    }
    if (!bindings.empty()) msg += " at " + bindings;
    throw DomainError(msg);
}

void Program::run(std::span<const double> inputs, std::span<double> outputs) const {
    if (inputs.size() != variables_.size()) {
        throw DimensionError("program expects " + std::to_string(variables_.size()) +
                             " inputs, got " + std::to_string(inputs.size()));
    }
    std::vector<double> reg(tape_.size());
    for (std::size_t i = 0; i < tape_.size(); ++i) {
        const Instr& in = tape_[i];
        const std::uint32_t* a = args_.data() + in.first;
        double v = 0.0;
        switch (in.op) {
            case NodeKind::constant: v = in.constant; break;
            case NodeKind::variable: v = inputs[in.first]; break;
            case NodeKind::sum:
                for (std::uint32_t k = 0; k < in.count; ++k) v += reg[a[k]];
                break;
            case NodeKind::product:
                v = 1.0;
                for (std::uint32_t k = 0; k < in.count; ++k) v *= reg[a[k]];
                break;
            case NodeKind::negation: v = -reg[a[0]]; break;
            case NodeKind::power: {
                const double b = reg[a[0]];
                v = in.exponent == 2 ? b * b : std::pow(b, in.exponent);
                break;
            }
            case NodeKind::quotient: {
                const double den = reg[a[1]];
                if (den == 0.0) domain_failure(i, "division by zero", den, inputs);
                v = reg[a[0]] / den;
                break;
            }
            case NodeKind::function: {
                const double x = reg[a[0]];
                switch (in.func) {
                    case Func::exp: v = std::exp(x); break;
                    case Func::ln:
                        if (!(x > 0.0)) domain_failure(i, "ln of non-positive value", x, inputs);
                        v = std::log(x);
                        break;
                    case Func::sin: v = std::sin(x); break;
                    case Func::cos: v = std::cos(x); break;
                    case Func::sqrt:
                        if (!(x >= 0.0)) domain_failure(i, "sqrt of negative value", x, inputs);
                        v = std::sqrt(x);
                        break;
                }
                break;
            }
        }
        reg[i] = v;
    }
    for (std::size_t k = 0; k < outputs_.size(); ++k) outputs[k] = reg[outputs_[k]];
}

std::vector<double> Program::run(std::span<const double> inputs) const {
    std::vector<double> out(outputs_.size());
    run(inputs, out);
    return out;
}

double evaluate(const Expr& e, const Assignment& a) {
    const auto vars = free_variables(e);
    std::vector<std::string> names;
    std::vector<double> values;
    for (const auto& v : vars) {
        auto it = a.find(v);
        if (it == a.end()) throw UnboundVariable(v);
        names.push_back(v);
        values.push_back(it->second);
    }
    const Expr outs[] = {e};
    return Program(std::move(names), outs).run(values)[0];
}

SampleDomain::SampleDomain(std::vector<Interval> intervals, std::size_t count, std::uint64_t seed)
    : intervals_(std::move(intervals)), count_(count), seed_(seed) {
    if (count_ < 1) throw ConfigError("sample domain needs at least one point");
    std::set<std::string> seen;
    for (const auto& iv : intervals_) {
        if (!(iv.lo < iv.hi)) {
            throw ConfigError("sample interval for '" + iv.name + "' must satisfy lo < hi");
        }
        if (!seen.insert(iv.name).second) {
            throw ConfigError("duplicate sample interval for '" + iv.name + "'");
        }
    }
}

std::vector<std::string> SampleDomain::variables() const {
    std::vector<std::string> out;
    out.reserve(intervals_.size());
    for (const auto& iv : intervals_) out.push_back(iv.name);
    return out;
}

bool SampleDomain::covers(const std::string& name) const {
    return std::any_of(intervals_.begin(), intervals_.end(),
                       [&](const Interval& iv) { return iv.name == name; });
}

SampleDomain SampleDomain::with_count(std::size_t count) const {
    return SampleDomain(intervals_, count, seed_);
}

SampleDomain SampleDomain::with_seed(std::uint64_t seed) const {
    return SampleDomain(intervals_, count_, seed);
}

std::vector<std::vector<double>> SampleDomain::points() const {
    std::mt19937_64 gen(seed_);
    std::vector<std::vector<double>> out(count_, std::vector<double>(intervals_.size()));
    for (auto& pt : out) {
        for (std::size_t i = 0; i < intervals_.size(); ++i) {
            const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
            pt[i] = intervals_[i].lo + u * (intervals_[i].hi - intervals_[i].lo);
        }
    }
    return out;
}

std::vector<double> SampleDomain::center() const {
    std::vector<double> out;
    out.reserve(intervals_.size());
    for (const auto& iv : intervals_) out.push_back(0.5 * (iv.lo + iv.hi));
    return out;
}

Discrepancy compare(const Expr& e1, const Expr& e2, const SampleDomain& dom) {
    const Expr outs[] = {e1, e2};
    const Program prog(dom.variables(), outs);
    Discrepancy d;
    std::vector<double> vals(2);
    for (const auto& pt : dom.points()) {
        prog.run(pt, vals);
        const double scale = std::max({1.0, std::abs(vals[0]), std::abs(vals[1])});
        const double r = std::abs(vals[0] - vals[1]) / scale;
        if (!(r <= d.max_scaled)) {  // NaN counts as worst
            d.max_scaled = std::isnan(r) ? INFINITY : r;
            d.worst_point = pt;
        }
    }
    return d;
}

bool equiv(const Expr& e1, const Expr& e2, const SampleDomain& dom, double tol) {
    return compare(e1, e2, dom).max_scaled <= tol;
}

}  // namespace polyjet
