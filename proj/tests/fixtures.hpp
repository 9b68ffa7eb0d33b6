#pragma once

// Seeded smooth test data shared by the unit tests and the acceptance suite.

#include <cmath>
#include <random>
#include <vector>

#include "polyjet/chart.hpp"
#include "polyjet/hamilton.hpp"
#include "polyjet/metric.hpp"

namespace fixtures {

namespace pj = polyjet;

inline double coef(std::mt19937_64& gen, double lo, double hi) {
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    return std::round((lo + u * (hi - lo)) * 100) / 100;
}

/// Smooth bump in the given variables: c0 + sum c_k sin(v_k + s_k) + c v_0 v_1.
inline pj::Expr smooth(std::mt19937_64& gen, const std::vector<pj::Expr>& vars, double amp) {
    pj::Expr e(coef(gen, -amp, amp));
    for (const auto& v : vars) e += pj::Expr(coef(gen, -amp, amp)) * pj::sin(v + coef(gen, -1, 1));
    if (vars.size() >= 2) e += pj::Expr(coef(gen, -amp, amp)) * vars[0] * vars[1];
    else e += pj::Expr(coef(gen, -amp, amp)) * pj::pow(vars[0], 2);
    return e;
}

/// Diagonally dominant symmetric metric in `vars` (definite on [-1, 1]^k).
inline std::vector<std::vector<pj::Expr>> dominant_rows(std::mt19937_64& gen, std::size_t d,
                                                         const std::vector<pj::Expr>& vars,
                                                         bool indefinite = false) {
    std::vector<std::vector<pj::Expr>> rows(d, std::vector<pj::Expr>(d));
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            if (i == j) {
                const double sign = indefinite && i == 0 && d > 1 ? -1.0 : 1.0;
                rows[i][i] = pj::Expr(sign) * (pj::Expr(2.0) + smooth(gen, vars, 0.15));
            } else {
                rows[i][j] = smooth(gen, vars, 0.1);
                rows[j][i] = rows[i][j];
            }
        }
    }
    return rows;
}

inline std::vector<pj::Expr> t_vars(const pj::JetChart& c) {
    std::vector<pj::Expr> v;
    for (std::size_t a = 0; a < c.m(); ++a) v.push_back(c.tvar(a));
    return v;
}

inline std::vector<pj::Expr> x_vars(const pj::JetChart& c) {
    std::vector<pj::Expr> v;
    for (std::size_t i = 0; i < c.n(); ++i) v.push_back(c.xvar(i));
    return v;
}

inline pj::Metric curved_h(const pj::JetChart& c, std::uint64_t seed, bool indefinite = false) {
    std::mt19937_64 gen(seed);
    return pj::Metric(pj::MetricKind::temporal, c, dominant_rows(gen, c.m(), t_vars(c), indefinite));
}

inline pj::Metric curved_phi(const pj::JetChart& c, std::uint64_t seed) {
    std::mt19937_64 gen(seed ^ 0x9e3779b97f4a7c15ULL);
    return pj::Metric(pj::MetricKind::spatial, c, dominant_rows(gen, c.n(), x_vars(c)));
}

/// g_ij(t, x), lower indices.
inline pj::Metric curved_g(const pj::JetChart& c, std::uint64_t seed) {
    std::mt19937_64 gen(seed ^ 0x51ed27f3a2b4c6d8ULL);
    auto vars = t_vars(c);
    const auto xs = x_vars(c);
    vars.insert(vars.end(), xs.begin(), xs.end());
    return pj::Metric(pj::MetricKind::spatiotemporal, c, dominant_rows(gen, c.n(), vars));
}

/// Smooth function of (t, x).
inline pj::Expr smooth_tx(const pj::JetChart& c, std::uint64_t seed, double amp = 0.5) {
    std::mt19937_64 gen(seed);
    auto vars = t_vars(c);
    const auto xs = x_vars(c);
    vars.insert(vars.end(), xs.begin(), xs.end());
    return smooth(gen, vars, amp);
}

/// U^(i)_(a) from explicit rows (i over a).
inline pj::DTensorField potential(const pj::JetChart& c, const std::vector<std::vector<pj::Expr>>& rows) {
    pj::ExprArray u({c.n(), c.m()});
    for (std::size_t i = 0; i < c.n(); ++i) {
        for (std::size_t a = 0; a < c.m(); ++a) u(i, a) = rows[i][a];
    }
    return pj::DTensorField(c, pj::potential_slots(), u);
}

inline pj::DTensorField random_potential(const pj::JetChart& c, std::uint64_t seed, bool x_only = false) {
    std::vector<std::vector<pj::Expr>> rows(c.n(), std::vector<pj::Expr>(c.m()));
    for (std::size_t i = 0; i < c.n(); ++i) {
        for (std::size_t a = 0; a < c.m(); ++a) {
            std::mt19937_64 gen(seed * 131 + i * 7 + a);
            auto vars = x_vars(c);
            if (!x_only) {
                const auto ts = t_vars(c);
                vars.insert(vars.end(), ts.begin(), ts.end());
            }
            rows[i][a] = smooth(gen, vars, 0.5);
        }
    }
    return potential(c, rows);
}

/// Non-autonomous electrodynamic space with smooth g(t, x), U(t, x), F(t, x).
inline pj::HamiltonSpace random_h3(const pj::JetChart& c, std::uint64_t seed) {
    return pj::nonautonomous_ed(curved_h(c, seed), curved_g(c, seed), random_potential(c, seed),
                                smooth_tx(c, seed + 7));
}

/// N1^(a)_(i)b = K^a_cb p_i^c with K(a, c, b) drawn from smooth functions of t.
inline pj::ExprArray p_linear_n1(const pj::JetChart& c, std::uint64_t seed, bool symmetric) {
    const std::size_t m = c.m();
    pj::ExprArray K({m, m, m});
    std::mt19937_64 gen(seed);
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t cc = 0; cc < m; ++cc) {
            for (std::size_t b = 0; b < m; ++b) {
                if (symmetric && b < cc) K(a, cc, b) = K(a, b, cc);
                else K(a, cc, b) = smooth(gen, t_vars(c), 0.5);
            }
        }
    }
    pj::ExprArray n1({m, c.n(), m});
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t i = 0; i < c.n(); ++i) {
            for (std::size_t b = 0; b < m; ++b) {
                std::vector<pj::Expr> terms;
                for (std::size_t cc = 0; cc < m; ++cc) terms.push_back(K(a, cc, b) * c.pvar(i, cc));
                n1(a, i, b) = pj::sum(terms);
            }
        }
    }
    return n1;
}

}  // namespace fixtures
