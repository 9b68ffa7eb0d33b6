#include "polyjet/expr.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <optional>
#include <ostream>
#include <unordered_map>

#include "polyjet/error.hpp"

namespace polyjet {

struct Expr::Node {
    NodeKind kind = NodeKind::constant;
    double value = 0.0;
    int exponent = 0;
    Func func = Func::exp;
    std::string name;
    std::vector<Expr> children;
    std::uint64_t hash = 0;
    std::uint64_t mask = 0;
};

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

std::uint64_t fnv1a(std::string_view text, std::uint64_t h = kFnvOffset) {
    for (unsigned char c : text) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

std::uint64_t double_bits(double v) {
    std::uint64_t bits = 0;
    static_assert(sizeof bits == sizeof v);
    std::memcpy(&bits, &v, sizeof bits);
    return bits;
}

}  // namespace

std::uint64_t variable_bit(const std::string& name) { return 1ULL << (fnv1a(name) % 64); }

const char* to_string(Func f) {
    switch (f) {
        case Func::exp: return "exp";
        case Func::ln: return "ln";
        case Func::sin: return "sin";
        case Func::cos: return "cos";
        case Func::sqrt: return "sqrt";
    }
    return "?";
}

/// Raw node construction and the canonicalizing constructors.
struct ExprFactory {
    static Expr finish(Expr::Node node) {
        std::uint64_t h = mix(kFnvOffset, static_cast<std::uint64_t>(node.kind));
        std::uint64_t mask = 0;
        switch (node.kind) {
            case NodeKind::constant: h = mix(h, double_bits(node.value)); break;
            case NodeKind::variable:
                h = mix(h, fnv1a(node.name));
                mask = variable_bit(node.name);
                break;
            case NodeKind::power: h = mix(h, static_cast<std::uint64_t>(node.exponent)); break;
            case NodeKind::function: h = mix(h, static_cast<std::uint64_t>(node.func)); break;
            default: break;
        }
        for (const auto& c : node.children) {
            h = mix(h, c.hash());
            mask |= c.variable_mask();
        }
        node.hash = h;
        node.mask = mask;
        return Expr(std::make_shared<const Expr::Node>(std::move(node)));
    }

    static Expr constant(double v) {
        Expr::Node n;
        n.kind = NodeKind::constant;
        n.value = v == 0.0 ? 0.0 : v;
        return finish(std::move(n));
    }

    static Expr raw(NodeKind kind, std::vector<Expr> children) {
        Expr::Node n;
        n.kind = kind;
        n.children = std::move(children);
        return finish(std::move(n));
    }

    static Expr raw_power(Expr base, int k) {
        Expr::Node n;
        n.kind = NodeKind::power;
        n.exponent = k;
        n.children = {std::move(base)};
        return finish(std::move(n));
    }

    // Splits e into coefficient * rest. rest is empty for constants.
    struct Split {
        double coef;
        std::optional<Expr> rest;
    };

    static Split split(const Expr& e) {
        switch (e.kind()) {
            case NodeKind::constant: return {e.value(), std::nullopt};
            case NodeKind::negation: return {-1.0, e.children()[0]};
            case NodeKind::product: {
                auto ch = e.children();
                if (!ch.empty() && ch[0].is_constant()) {
                    if (ch.size() == 2) return {ch[0].value(), ch[1]};
                    return {ch[0].value(), raw(NodeKind::product, {ch.begin() + 1, ch.end()})};
                }
                return {1.0, e};
            }
            default: return {1.0, e};
        }
    }

    // coef * rest, where rest carries no coefficient of its own.
    static Expr scale(const Expr& rest, double coef) {
        if (coef == 0.0) return constant(0.0);
        if (coef == 1.0) return rest;
        if (rest.kind() == NodeKind::sum) {
            if (coef == -1.0) return negate(rest);
            return raw(NodeKind::product, {constant(coef), rest});
        }
        if (coef == -1.0 && rest.kind() != NodeKind::product) return raw(NodeKind::negation, {rest});
        std::vector<Expr> factors{constant(coef)};
        if (rest.kind() == NodeKind::product) {
            factors.insert(factors.end(), rest.children().begin(), rest.children().end());
        } else {
            factors.push_back(rest);
        }
        return raw(NodeKind::product, std::move(factors));
    }

    static Expr negate(const Expr& e) {
        switch (e.kind()) {
            case NodeKind::constant: return constant(-e.value());
            case NodeKind::negation: return e.children()[0];
            case NodeKind::sum: {
                std::vector<Expr> terms;
                terms.reserve(e.children().size());
                for (const auto& t : e.children()) terms.push_back(negate(t));
                return make_sum(terms);
            }
            case NodeKind::product: {
                auto s = split(e);
                return scale(*s.rest, -s.coef);
            }
            default: return raw(NodeKind::negation, {e});
        }
    }

    // Index of expressions by structural hash, preserving first-occurrence order.
    template <typename Payload>
    struct OrderedBag {
        std::vector<std::pair<Expr, Payload>> items;
        std::unordered_multimap<std::uint64_t, std::size_t> index;

        Payload& at(const Expr& key, Payload init) {
            auto [lo, hi] = index.equal_range(key.hash());
            for (auto it = lo; it != hi; ++it) {
                if (items[it->second].first == key) return items[it->second].second;
            }
            index.emplace(key.hash(), items.size());
            items.emplace_back(key, init);
            return items.back().second;
        }
    };

    static void collect_terms(const Expr& e, double& c, OrderedBag<double>& bag) {
        if (e.kind() == NodeKind::sum) {
            for (const auto& t : e.children()) collect_terms(t, c, bag);
            return;
        }
        auto s = split(e);
        if (!s.rest) {
            c += s.coef;
            return;
        }
        bag.at(*s.rest, 0.0) += s.coef;
    }

    static Expr make_sum(std::span<const Expr> terms) {
        double c = 0.0;
        OrderedBag<double> bag;
        for (const auto& t : terms) collect_terms(t, c, bag);
        std::vector<Expr> out;
        out.reserve(bag.items.size() + 1);
        bool nested = false;
        for (const auto& [rest, coef] : bag.items) {
            if (coef == 0.0) continue;
            Expr term = scale(rest, coef);
            nested = nested || term.kind() == NodeKind::sum;
            out.push_back(std::move(term));
        }
        if (c != 0.0) out.push_back(constant(c));
        if (nested) return make_sum(out);
        if (out.empty()) return constant(0.0);
        if (out.size() == 1) return out[0];
        return raw(NodeKind::sum, std::move(out));
    }

    static void collect_factors(const Expr& e, double& coef, OrderedBag<int>& bag) {
        switch (e.kind()) {
            case NodeKind::constant: coef *= e.value(); return;
            case NodeKind::product:
                for (const auto& f : e.children()) collect_factors(f, coef, bag);
                return;
            case NodeKind::negation:
                coef = -coef;
                collect_factors(e.children()[0], coef, bag);
                return;
            case NodeKind::power: bag.at(e.children()[0], 0) += e.exponent(); return;
            default: bag.at(e, 0) += 1; return;
        }
    }

    static Expr make_product(std::span<const Expr> factors) {
        double coef = 1.0;
        OrderedBag<int> bag;
        for (const auto& f : factors) collect_factors(f, coef, bag);
        if (coef == 0.0) return constant(0.0);
        std::vector<Expr> out;
        out.reserve(bag.items.size() + 1);
        for (const auto& [base, k] : bag.items) {
            if (k == 0) continue;
            if (k == 1) {
                out.push_back(base);
            } else if (k > 0) {
                out.push_back(raw_power(base, k));
            } else {
                out.push_back(make_quotient(constant(1.0), raw_power(base, -k)));
            }
        }
        if (out.empty()) return constant(coef);
        if (out.size() == 1) {
            if (coef == 1.0) return out[0];
            if (coef == -1.0) return negate(out[0]);
            return raw(NodeKind::product, {constant(coef), out[0]});
        }
        if (coef != 1.0) out.insert(out.begin(), constant(coef));
        return raw(NodeKind::product, std::move(out));
    }

    static Expr make_power(const Expr& base, int k) {
        if (k == 0) return constant(1.0);
        if (k == 1) return base;
        if (k < 0) return make_quotient(constant(1.0), make_power(base, -k));
        switch (base.kind()) {
            case NodeKind::constant: {
                const double v = std::pow(base.value(), k);
                if (std::isfinite(v)) return constant(v);
                return raw_power(base, k);
            }
            case NodeKind::power: return make_power(base.children()[0], base.exponent() * k);
            case NodeKind::negation: {
                Expr inner = make_power(base.children()[0], k);
                return k % 2 == 0 ? inner : negate(inner);
            }
            case NodeKind::product: {
                std::vector<Expr> fs;
                for (const auto& f : base.children()) fs.push_back(make_power(f, k));
                return make_product(fs);
            }
            case NodeKind::quotient:
                return make_quotient(make_power(base.children()[0], k),
                                     make_power(base.children()[1], k));
            default: return raw_power(base, k);
        }
    }

    static Expr make_quotient(const Expr& num, const Expr& den) {
        if (den.is_constant()) {
            if (den.value() == 0.0) {
                throw DomainError("quotient by the constant zero: (" + to_string(num) + ")/0");
            }
            const Expr f[] = {constant(1.0 / den.value()), num};
            return make_product(f);
        }
        if (num.is_zero()) return constant(0.0);
        if (num == den) return constant(1.0);
        if (num.kind() == NodeKind::quotient) {
            const Expr f[] = {num.children()[1], den};
            return make_quotient(num.children()[0], make_product(f));
        }
        if (den.kind() == NodeKind::quotient) {
            const Expr f[] = {num, den.children()[1]};
            return make_quotient(make_product(f), den.children()[0]);
        }
        if (den.kind() == NodeKind::negation) return negate(make_quotient(num, den.children()[0]));
        auto ds = split(den);
        if (ds.coef != 1.0) {
            const Expr f[] = {constant(1.0 / ds.coef), make_quotient(num, *ds.rest)};
            return make_product(f);
        }
        auto ns = split(num);
        if (ns.coef != 1.0 && ns.rest) {
            const Expr f[] = {constant(ns.coef), make_quotient(*ns.rest, den)};
            return make_product(f);
        }
        if (ns.coef != 1.0 && !ns.rest) {
            const Expr f[] = {constant(ns.coef), make_quotient(constant(1.0), den)};
            return make_product(f);
        }
        return raw(NodeKind::quotient, {num, den});
    }

    static Expr make_function(Func f, const Expr& arg) {
        if (arg.is_constant()) {
            const double x = arg.value();
            double v = 0.0;
            switch (f) {
                case Func::exp: v = std::exp(x); break;
                case Func::ln: v = x > 0.0 ? std::log(x) : NAN; break;
                case Func::sin: v = std::sin(x); break;
                case Func::cos: v = std::cos(x); break;
                case Func::sqrt: v = x >= 0.0 ? std::sqrt(x) : NAN; break;
            }
            if (std::isfinite(v)) return constant(v);
        }
        Expr::Node n;
        n.kind = NodeKind::function;
        n.func = f;
        n.children = {arg};
        return finish(std::move(n));
    }
};

Expr::Expr() : Expr(ExprFactory::constant(0.0)) {}
Expr::Expr(double value) : Expr(ExprFactory::constant(value)) {}

Expr Expr::constant(double value) { return ExprFactory::constant(value); }

Expr Expr::variable(std::string name) {
    Node n;
    n.kind = NodeKind::variable;
    n.name = std::move(name);
    return ExprFactory::finish(std::move(n));
}

NodeKind Expr::kind() const { return node_->kind; }
double Expr::value() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
int Expr::exponent() const { return node_->exponent; }
Func Expr::func() const { return node_->func; }
std::span<const Expr> Expr::children() const { return node_->children; }
std::uint64_t Expr::hash() const { return node_->hash; }
std::uint64_t Expr::variable_mask() const { return node_->mask; }

bool Expr::may_depend_on(const std::string& name) const {
    return (node_->mask & variable_bit(name)) != 0;
}

bool operator==(const Expr& a, const Expr& b) {
    if (a.node_ == b.node_) return true;
    const auto& x = *a.node_;
    const auto& y = *b.node_;
    if (x.hash != y.hash || x.kind != y.kind || x.children.size() != y.children.size()) return false;
    switch (x.kind) {
        case NodeKind::constant:
            if (double_bits(x.value) != double_bits(y.value)) return false;
            break;
        case NodeKind::variable:
            if (x.name != y.name) return false;
            break;
        case NodeKind::power:
            if (x.exponent != y.exponent) return false;
            break;
        case NodeKind::function:
            if (x.func != y.func) return false;
            break;
        default: break;
    }
    for (std::size_t i = 0; i < x.children.size(); ++i) {
        if (!(x.children[i] == y.children[i])) return false;
    }
    return true;
}

Expr operator+(const Expr& a, const Expr& b) {
    const Expr t[] = {a, b};
    return ExprFactory::make_sum(t);
}

Expr operator-(const Expr& a, const Expr& b) {
    const Expr t[] = {a, ExprFactory::negate(b)};
    return ExprFactory::make_sum(t);
}

Expr operator*(const Expr& a, const Expr& b) {
    const Expr f[] = {a, b};
    return ExprFactory::make_product(f);
}

Expr operator/(const Expr& a, const Expr& b) { return ExprFactory::make_quotient(a, b); }
Expr operator-(const Expr& a) { return ExprFactory::negate(a); }

Expr& operator+=(Expr& a, const Expr& b) { return a = a + b; }
Expr& operator-=(Expr& a, const Expr& b) { return a = a - b; }
Expr& operator*=(Expr& a, const Expr& b) { return a = a * b; }

Expr sum(std::span<const Expr> terms) { return ExprFactory::make_sum(terms); }
Expr product(std::span<const Expr> factors) { return ExprFactory::make_product(factors); }
Expr pow(const Expr& base, int exponent) { return ExprFactory::make_power(base, exponent); }
Expr apply(Func f, const Expr& arg) { return ExprFactory::make_function(f, arg); }
Expr exp(const Expr& arg) { return apply(Func::exp, arg); }
Expr ln(const Expr& arg) { return apply(Func::ln, arg); }
Expr sin(const Expr& arg) { return apply(Func::sin, arg); }
Expr cos(const Expr& arg) { return apply(Func::cos, arg); }
Expr sqrt(const Expr& arg) { return apply(Func::sqrt, arg); }

std::string format_number(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, end);
}

namespace {

// Binding strength used to decide parenthesization.
enum Prec { kSum = 1, kProduct = 2, kPower = 3, kAtom = 4 };

bool is_negative_term(const Expr& e) {
    switch (e.kind()) {
        case NodeKind::constant: return e.value() < 0.0;
        case NodeKind::negation: return true;
        case NodeKind::product: return e.children()[0].is_constant() && e.children()[0].value() < 0.0;
        default: return false;
    }
}

int precedence(const Expr& e) {
    switch (e.kind()) {
        case NodeKind::constant: return e.value() < 0.0 ? kProduct : kAtom;
        case NodeKind::variable:
        case NodeKind::function: return kAtom;
        case NodeKind::sum: return kSum;
        case NodeKind::product:
        case NodeKind::quotient:
        case NodeKind::negation: return kProduct;
        case NodeKind::power: return kPower;
    }
    return kAtom;
}

void print(const Expr& e, int min_prec, std::string& out);

void print_wrapped(const Expr& e, int min_prec, std::string& out) {
    if (precedence(e) < min_prec) {
        out += '(';
        print(e, kSum, out);
        out += ')';
    } else {
        print(e, min_prec, out);
    }
}

void print(const Expr& e, int min_prec, std::string& out) {
    switch (e.kind()) {
        case NodeKind::constant: out += format_number(e.value()); return;
        case NodeKind::variable: out += e.name(); return;
        case NodeKind::function:
            out += to_string(e.func());
            out += '(';
            print(e.children()[0], kSum, out);
            out += ')';
            return;
        case NodeKind::sum: {
            bool first = true;
            for (const auto& t : e.children()) {
                if (first) {
                    print_wrapped(t, kProduct, out);
                } else if (is_negative_term(t)) {
                    out += " - ";
                    print_wrapped(-t, kProduct, out);
                } else {
                    out += " + ";
                    print_wrapped(t, kProduct, out);
                }
                first = false;
            }
            return;
        }
        case NodeKind::product: {
            auto ch = e.children();
            std::size_t i = 0;
            if (ch[0].is_constant()) {
                if (ch[0].value() == -1.0) {
                    out += '-';
                } else {
                    out += format_number(ch[0].value());
                    out += '*';
                }
                i = 1;
            }
            for (std::size_t k = i; k < ch.size(); ++k) {
                if (k > i) out += '*';
                print_wrapped(ch[k], kPower, out);
            }
            return;
        }
        case NodeKind::negation:
            out += '-';
            print_wrapped(e.children()[0], kAtom, out);
            return;
        case NodeKind::quotient:
            print_wrapped(e.children()[0], kProduct, out);
            out += '/';
            print_wrapped(e.children()[1], kPower, out);
            return;
        case NodeKind::power: {
            const Expr& base = e.children()[0];
            if (base.kind() == NodeKind::variable && base.name().find('^') != std::string::npos) {
                out += '(' + base.name() + ')';
            } else {
                print_wrapped(base, kAtom, out);
            }
            out += '^';
            out += std::to_string(e.exponent());
            return;
        }
    }
    (void)min_prec;
}

}  // namespace

std::string to_string(const Expr& e) {
    std::string out;
    print(e, kSum, out);
    return out;
}

std::ostream& operator<<(std::ostream& os, const Expr& e) { return os << to_string(e); }

}  // namespace polyjet
