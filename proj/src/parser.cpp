#include "polyjet/parser.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>

#include "polyjet/error.hpp"

namespace polyjet {

namespace {

std::optional<Func> function_named(std::string_view name) {
    if (name == "exp") return Func::exp;
    if (name == "ln") return Func::ln;
    if (name == "sin") return Func::sin;
    if (name == "cos") return Func::cos;
    if (name == "sqrt") return Func::sqrt;
    return std::nullopt;
}

class Parser {
public:
    Parser(std::string_view src, const std::set<std::string>& vars,
           const std::map<std::string, double>& constants)
        : src_(src), vars_(vars), constants_(constants) {}

    Expr parse() {
        Expr e = expr();
        skip_ws();
        if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& message) const {
        throw SyntaxError(message, pos_, std::string(src_));
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            fail(pos_ < src_.size() ? "expected '" + std::string(1, c) + "'"
                                    : "expected '" + std::string(1, c) + "' before end of input");
        }
    }

    Expr expr() {
        std::vector<Expr> terms{term()};
        for (;;) {
            if (accept('+')) {
                terms.push_back(term());
            } else if (accept('-')) {
                terms.push_back(-term());
            } else {
                break;
            }
        }
        return sum(terms);
    }

    Expr term() {
        Expr acc = factor();
        for (;;) {
            if (accept('*')) {
                acc = acc * factor();
            } else if (accept('/')) {
                const std::size_t at = pos_;
                Expr den = factor();
                if (den.is_zero()) {
                    pos_ = at;
                    fail("division by zero");
                }
                acc = acc / den;
            } else {
                return acc;
            }
        }
    }

    Expr factor() {
        Expr b = base();
        if (accept('^')) {
            skip_ws();
            const std::size_t start = pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            if (start == pos_) fail("expected integer exponent");
            int k = 0;
            auto [p, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, k);
            if (ec != std::errc{}) {
                pos_ = start;
                fail("exponent out of range");
            }
            return pow(b, k);
        }
        return b;
    }

    Expr base() {
        skip_ws();
        if (pos_ >= src_.size()) fail("unexpected end of input");
        const char c = src_[pos_];
        if (c == '-') {
            ++pos_;
            return -base();
        }
        if (c == '(') {
            ++pos_;
            Expr e = expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
        fail("unexpected '" + std::string(1, c) + "'");
    }

    Expr number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                ++pos_;
                ++n;
            }
            return n;
        };
        std::size_t n = digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            n += digits();
        }
        if (n == 0) fail("malformed number");
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            const std::size_t mark = pos_;
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (digits() == 0) pos_ = mark;  // not an exponent; leave 'e' for the caller
        }
        double v = 0.0;
        auto [p, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, v);
        if (ec != std::errc{} || p != src_.data() + pos_) {
            pos_ = start;
            fail("malformed number");
        }
        return Expr::constant(v);
    }

    bool known(std::string_view name) const {
        const std::string s(name);
        return vars_.count(s) != 0 || constants_.count(s) != 0 || s == "pi" || function_named(s);
    }

    Expr identifier() {
        const std::size_t start = pos_;
        std::size_t end = pos_;
        while (end < src_.size()) {
            const char ch = src_[end];
            if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '^') {
                ++end;
            } else {
                break;
            }
        }
        const std::string_view full = src_.substr(start, end - start);

        // Longest known prefix, cutting only immediately before a '^'.
        std::size_t len = full.size();
        while (!known(full.substr(0, len))) {
            const std::size_t cut = full.substr(0, len).rfind('^');
            if (cut == std::string_view::npos || cut == 0) {
                len = 0;
                break;
            }
            len = cut;
        }
        if (len == 0) {
            std::string_view offender = full;
            const std::size_t caret = full.rfind('^');
            if (caret != std::string_view::npos && caret + 1 < full.size() &&
                full.find_first_not_of("0123456789", caret + 1) == std::string_view::npos) {
                offender = full.substr(0, caret);
            }
            throw UnknownIdentifier(std::string(offender));
        }
        const std::string name(full.substr(0, len));
        pos_ = start + len;

        if (vars_.count(name)) return Expr::variable(name);
        if (auto it = constants_.find(name); it != constants_.end()) return Expr::constant(it->second);
        if (auto f = function_named(name)) {
            expect('(');
            Expr arg = expr();
            expect(')');
            return apply(*f, arg);
        }
        return Expr::constant(std::numbers::pi);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    const std::set<std::string>& vars_;
    const std::map<std::string, double>& constants_;
};

}  // namespace

Expr parse_expr(std::string_view source, const std::set<std::string>& allowed_vars,
                const std::map<std::string, double>& constants) {
    return Parser(source, allowed_vars, constants).parse();
}

}  // namespace polyjet
