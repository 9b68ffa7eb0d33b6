#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>

#include "polyjet/expr.hpp"

namespace polyjet {

/// Parses the expression grammar
///
///     expr   := term (('+'|'-') term)*
///     term   := factor (('*'|'/') factor)*
///     factor := base ('^' integer)?
///     base   := number | ident | func '(' expr ')' | '(' expr ')' | '-' base
///
/// with func in {exp, ln, sin, cos, sqrt} and ident matching
/// [A-Za-z][A-Za-z0-9_^]*. Because '^' is legal inside identifiers, an
/// identifier token is the longest prefix of the maximal match (cut at a '^')
/// that names a known variable, constant or function; so "t1^2" reads as t1
/// squared while "p_1^1" stays one name when it is allowed.
///
/// Note that '-' binds to a base, so "-x^2" is (-x)^2.
///
/// `constants` are substituted by value; "pi" is always available unless
/// shadowed. Throws SyntaxError or UnknownIdentifier.
Expr parse_expr(std::string_view source, const std::set<std::string>& allowed_vars,
                const std::map<std::string, double>& constants = {});

}  // namespace polyjet
