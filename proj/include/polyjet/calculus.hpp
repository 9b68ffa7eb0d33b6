#pragma once

#include <map>
#include <set>
#include <string>

#include "polyjet/expr.hpp"

namespace polyjet {

/// Exact symbolic derivative. Shared subtrees are differentiated once.
Expr differentiate(const Expr& e, const std::string& var);

/// Replaces every variable named in `bindings` by its expression, simultaneously.
Expr substitute(const Expr& e, const std::map<std::string, Expr>& bindings);

std::set<std::string> free_variables(const Expr& e);

/// True when `var` occurs in `e` (exact).
bool depends_on(const Expr& e, const std::string& var);

}  // namespace polyjet
