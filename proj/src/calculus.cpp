#include "polyjet/calculus.hpp"

#include <functional>
#include <unordered_map>

namespace polyjet {

namespace {

class Differentiator {
public:
    explicit Differentiator(const std::string& var) : var_(var), bit_(variable_bit(var)) {}

    Expr operator()(const Expr& e) {
        if ((e.variable_mask() & bit_) == 0) return Expr(0.0);
        if (auto it = memo_.find(e.node()); it != memo_.end()) return it->second;
        Expr d = rule(e);
        memo_.emplace(e.node(), d);
        keep_.push_back(e);
        return d;
    }

private:
    Expr rule(const Expr& e) {
        auto ch = e.children();
        switch (e.kind()) {
            case NodeKind::constant: return Expr(0.0);
            case NodeKind::variable: return Expr(e.name() == var_ ? 1.0 : 0.0);
            case NodeKind::sum: {
                std::vector<Expr> terms;
                terms.reserve(ch.size());
                for (const auto& t : ch) terms.push_back((*this)(t));
                return sum(terms);
            }
            case NodeKind::product: {
                std::vector<Expr> terms;
                for (std::size_t i = 0; i < ch.size(); ++i) {
                    Expr di = (*this)(ch[i]);
                    if (di.is_zero()) continue;
                    std::vector<Expr> fs(ch.begin(), ch.end());
                    fs[i] = di;
                    terms.push_back(product(fs));
                }
                return sum(terms);
            }
            case NodeKind::negation: return -(*this)(ch[0]);
            case NodeKind::power: {
                const int k = e.exponent();
                return Expr(static_cast<double>(k)) * pow(ch[0], k - 1) * (*this)(ch[0]);
            }
            case NodeKind::quotient: {
                const Expr& a = ch[0];
                const Expr& b = ch[1];
                Expr da = (*this)(a);
                Expr db = (*this)(b);
                if (db.is_zero()) return da / b;
                return (da * b - a * db) / pow(b, 2);
            }
            case NodeKind::function: {
                const Expr& u = ch[0];
                Expr du = (*this)(u);
                switch (e.func()) {
                    case Func::exp: return e * du;
                    case Func::ln: return du / u;
                    case Func::sin: return cos(u) * du;
                    case Func::cos: return -(sin(u) * du);
                    case Func::sqrt: return du / (Expr(2.0) * e);
                }
            }
        }
        return Expr(0.0);
    }

    const std::string& var_;
    std::uint64_t bit_;
    std::unordered_map<const Expr::Node*, Expr> memo_;
    std::vector<Expr> keep_;
};

}  // namespace

Expr differentiate(const Expr& e, const std::string& var) { return Differentiator(var)(e); }

Expr substitute(const Expr& e, const std::map<std::string, Expr>& bindings) {
    std::uint64_t mask = 0;
    for (const auto& [name, _] : bindings) mask |= variable_bit(name);
    std::unordered_map<const Expr::Node*, Expr> memo;

    std::function<Expr(const Expr&)> go = [&](const Expr& x) -> Expr {
        if ((x.variable_mask() & mask) == 0) return x;
        if (auto it = memo.find(x.node()); it != memo.end()) return it->second;
        Expr out;
        auto ch = x.children();
        std::vector<Expr> mapped;
        mapped.reserve(ch.size());
        for (const auto& c : ch) mapped.push_back(go(c));
        switch (x.kind()) {
            case NodeKind::constant: out = x; break;
            case NodeKind::variable: {
                auto it = bindings.find(x.name());
                out = it == bindings.end() ? x : it->second;
                break;
            }
            case NodeKind::sum: out = sum(mapped); break;
            case NodeKind::product: out = product(mapped); break;
            case NodeKind::negation: out = -mapped[0]; break;
            case NodeKind::power: out = pow(mapped[0], x.exponent()); break;
            case NodeKind::quotient: out = mapped[0] / mapped[1]; break;
            case NodeKind::function: out = apply(x.func(), mapped[0]); break;
        }
        memo.emplace(x.node(), out);
        return out;
    };
    return go(e);
}

std::set<std::string> free_variables(const Expr& e) {
    std::set<std::string> out;
    std::unordered_map<const Expr::Node*, bool> seen;
    std::function<void(const Expr&)> go = [&](const Expr& x) {
        if (!seen.emplace(x.node(), true).second) return;
        if (x.kind() == NodeKind::variable) out.insert(x.name());
        for (const auto& c : x.children()) go(c);
    };
    go(e);
    return out;
}

bool depends_on(const Expr& e, const std::string& var) {
    if (!e.may_depend_on(var)) return false;
    return free_variables(e).count(var) != 0;
}

}  // namespace polyjet
