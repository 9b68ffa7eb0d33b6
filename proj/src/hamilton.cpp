#include "polyjet/hamilton.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "polyjet/calculus.hpp"
#include "polyjet/error.hpp"
#include "polyjet/report.hpp"

namespace polyjet {

namespace {

using Rows = std::vector<std::vector<Expr>>;

std::map<std::string, Expr> p_to_zero(const JetChart& c) {
    std::map<std::string, Expr> zero;
    for (const auto& name : c.p_names()) zero.emplace(name, Expr(0.0));
    return zero;
}

std::vector<IndexSlot> n2_like_slots() {
    return {IndexSlot::upper_t("a", 1), IndexSlot::lower_x("i", 0), IndexSlot::lower_x("j")};
}

void require_free_of(const Expr& e, const std::set<std::string>& allowed, const char* what) {
    for (const auto& v : free_variables(e)) {
        if (!allowed.contains(v)) {
            throw ConfigError(std::string(what) + " may not depend on '" + v + "'");
        }
    }
}

/// h_ab g^ij p_i^a p_j^b
Expr quadratic_form(const Metric& h, const Rows& g_upper) {
    const auto& c = h.chart();
    std::vector<Expr> terms;
    for (std::size_t a = 0; a < c.m(); ++a) {
        for (std::size_t b = 0; b < c.m(); ++b) {
            if (h(a, b).is_zero()) continue;
            for (std::size_t i = 0; i < c.n(); ++i) {
                for (std::size_t j = 0; j < c.n(); ++j) {
                    if (g_upper[i][j].is_zero()) continue;
                    terms.push_back(h(a, b) * g_upper[i][j] * c.pvar(i, a) * c.pvar(j, b));
                }
            }
        }
    }
    return sum(terms);
}

/// U^(i)_(a) p_i^a
Expr linear_form(const DTensorField& U) {
    const auto& c = U.chart();
    std::vector<Expr> terms;
    for (std::size_t i = 0; i < c.n(); ++i) {
        for (std::size_t a = 0; a < c.m(); ++a) {
            if (!U.components()(i, a).is_zero()) terms.push_back(U.components()(i, a) * c.pvar(i, a));
        }
    }
    return sum(terms);
}

void require_potential(const DTensorField& U) {
    if (U.slots() != potential_slots()) {
        throw ConfigError("potential needs slots (upper spatial i, lower temporal a) as a pair");
    }
}

std::string describe(const Assignment& point) {
    std::ostringstream os;
    bool first = true;
    for (const auto& [name, value] : point) {
        os << (first ? "" : ", ") << name << "=" << value;
        first = false;
    }
    return os.str();
}

/// x-derivatives of the g_ij entries: dg[k][i][j] = d g_ij / d x^k.
std::vector<Rows> x_gradient(const JetChart& c, const Rows& g) {
    const std::size_t n = c.n();
    std::vector<Rows> dg(n, Rows(n, std::vector<Expr>(n)));
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i; j < n; ++j) {
                dg[k][i][j] = differentiate(g[i][j], c.x(k));
                dg[k][j][i] = dg[k][i][j];
            }
        }
    }
    return dg;
}

}  // namespace

std::vector<IndexSlot> potential_slots() {
    return {IndexSlot::upper_x("i", 1), IndexSlot::lower_t("a", 0)};
}

DTensorField fundamental_vertical_dtensor(const Expr& H, const JetChart& c) {
    const std::size_t m = c.m();
    const std::size_t n = c.n();
    ExprArray G({n, m, n, m});
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < m; ++a) {
            const Expr first = differentiate(H, c.p(i, a));
            for (std::size_t j = 0; j < n; ++j) {
                for (std::size_t b = 0; b < m; ++b) {
                    if (c.p_index(j, b) < c.p_index(i, a)) {
                        G(i, a, j, b) = G(j, b, i, a);
                        continue;
                    }
                    G(i, a, j, b) = Expr(0.5) * differentiate(first, c.p(j, b));
                }
            }
        }
    }
    return DTensorField(c,
                        {IndexSlot::upper_x("i", 1), IndexSlot::lower_t("a", 0),
                         IndexSlot::upper_x("j", 3), IndexSlot::lower_t("b", 2)},
                        std::move(G));
}

HamiltonSpace::HamiltonSpace(Metric h, Expr H, PhysicalConstants constants)
    : h_(std::move(h)),
      H_(std::move(H)),
      constants_(constants),
      G_(DTensorField::scalar(h_.chart(), Expr(0.0))) {
    if (h_.kind() != MetricKind::temporal) throw ConfigError("Hamilton space needs a temporal h");
    require_free_of(H_, chart().all_names(), "Hamiltonian");
    if (!(constants_.mass > 0 && constants_.light_speed > 0 && constants_.charge > 0)) {
        throw ConfigError("physical constants must be positive");
    }
    G_ = fundamental_vertical_dtensor(H_, chart());
}

RegularityResult check_kronecker_regularity(const HamiltonSpace& hs, const SampleDomain& dom,
                                            double tol) {
    const auto& c = hs.chart();
    const std::size_t m = c.m();
    const std::size_t n = c.n();
    const auto& h = hs.h();
    const auto& G = hs.fundamental().components();
    const auto h_inv = h.symbolic_inverse();

    RegularityResult out;
    out.g_upper.assign(n, std::vector<Expr>(n));
    const Expr inv_m(1.0 / static_cast<double>(m));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            std::vector<Expr> terms;
            for (std::size_t a = 0; a < m; ++a) {
                for (std::size_t b = 0; b < m; ++b) {
                    if (!h_inv[a][b].is_zero() && !G(i, a, j, b).is_zero()) {
                        terms.push_back(h_inv[a][b] * G(i, a, j, b));
                    }
                }
            }
            out.g_upper[i][j] = inv_m * sum(terms);
            out.g_upper[j][i] = out.g_upper[i][j];
        }
    }

    ExprArray defect(G.shape());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < m; ++a) {
            for (std::size_t j = 0; j < n; ++j) {
                for (std::size_t b = 0; b < m; ++b) {
                    defect(i, a, j, b) = G(i, a, j, b) - h(a, b) * out.g_upper[i][j];
                }
            }
        }
    }
    const ArrayEvaluator eval_defect(c.names(), defect);
    const ArrayEvaluator eval_G(c.names(), G);
    double scale = 1.0;
    for (const auto& q : chart_points(c, dom)) {
        const auto where = assignment(c, q);
        inverse_at(h, where);
        const NumArray d = eval_defect(q.coords);
        const NumArray g = eval_G(q.coords);
        for (std::size_t k = 0; k < d.size(); ++k) {
            scale = std::max(scale, std::abs(g[k]));
            const double r = std::isnan(d[k]) ? INFINITY : std::abs(d[k]);
            if (r > out.residual || out.worst_point.empty()) {
                out.residual = r;
                out.worst_point = where;
            }
        }
    }
    out.threshold = tol * scale;
    if (!(out.residual <= out.threshold)) {
        out.reason = "G does not factor as h (x) g: residual " + format_number(out.residual) +
                     " at " + describe(out.worst_point);
        return out;
    }

    const Metric candidate(MetricKind::spatiotemporal, c, out.g_upper, true);
    for (const auto& q : chart_points(c, dom)) inverse_at(candidate, assignment(c, q));

    if (m >= 2) {
        for (std::size_t i = 0; i < n && out.g_p_independent; ++i) {
            for (std::size_t j = i; j < n && out.g_p_independent; ++j) {
                for (const auto& p : c.p_names()) {
                    if (!equiv(differentiate(out.g_upper[i][j], p), Expr(0.0), dom, tol)) {
                        out.g_p_independent = false;
                        out.reason = "g^ij depends on " + p + " although m >= 2";
                        break;
                    }
                }
            }
        }
    }
    out.regular = out.g_p_independent;
    return out;
}

Expr assemble_hamiltonian(const Metric& h, const Rows& g_upper, const DTensorField& U,
                          const Expr& F) {
    return quadratic_form(h, g_upper) + linear_form(U) + F;
}

ElectrodynamicForm extract_electrodynamic_form(const HamiltonSpace& hs, const SampleDomain& dom,
                                               double tol) {
    const auto& c = hs.chart();
    const std::size_t m = c.m();
    const std::size_t n = c.n();
    if (m < 2) throw DimensionError("the electrodynamic form is forced only for m >= 2");
    const auto r = check_kronecker_regularity(hs, dom, tol);
    if (!r.regular) throw NotRegular(r.reason);

    const auto zero = p_to_zero(c);
    const auto& H = hs.hamiltonian();
    const auto& h = hs.h();

    Rows g_upper(n, std::vector<Expr>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) g_upper[i][j] = substitute(r.g_upper[i][j], zero);
    }

    // U = dH/dp - 2 h_ab g^ij p_j^b, evaluated at p = 0 once shown p-free.
    ExprArray U({n, m});
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < m; ++a) {
            const Expr dH = differentiate(H, c.p(i, a));
            std::vector<Expr> terms;
            for (std::size_t b = 0; b < m; ++b) {
                for (std::size_t j = 0; j < n; ++j) {
                    if (!h(a, b).is_zero() && !g_upper[i][j].is_zero()) {
                        terms.push_back(h(a, b) * g_upper[i][j] * c.pvar(j, b));
                    }
                }
            }
            const Expr formula = dH - Expr(2.0) * sum(terms);
            U(i, a) = substitute(dH, zero);
            if (!equiv(formula, U(i, a), dom, tol)) {
                throw ResidualTooLarge("U^(" + std::to_string(i + 1) + ")_(" + std::to_string(a + 1) +
                                       ") depends on p");
            }
        }
    }
    DTensorField Ufield(c, potential_slots(), std::move(U));

    Expr F = substitute(H, zero);
    const Expr F_formula = H - quadratic_form(h, g_upper) - linear_form(Ufield);
    if (!equiv(F_formula, F, dom, tol)) throw ResidualTooLarge("F depends on p");
    if (!equiv(assemble_hamiltonian(h, g_upper, Ufield, F), H, dom, tol)) {
        throw ResidualTooLarge("reassembled Hamiltonian differs from H");
    }

    Metric g(MetricKind::spatiotemporal, c, symbolic_inverse(g_upper));
    return {std::move(g), std::move(g_upper), std::move(Ufield), std::move(F)};
}

NonlinearConnection canonical_connection_of_hamilton_space(const HamiltonSpace& hs,
                                                           const SampleDomain& dom, double tol) {
    const auto& c = hs.chart();
    const std::size_t m = c.m();
    const std::size_t n = c.n();
    const auto& H = hs.hamiltonian();

    Rows g_upper;
    if (m >= 2) {
        g_upper = extract_electrodynamic_form(hs, dom, tol).g_upper;
    } else {
        auto r = check_kronecker_regularity(hs, dom, tol);
        if (!r.regular) throw NotRegular(r.reason);
        g_upper = std::move(r.g_upper);
    }
    const Metric g(MetricKind::spatiotemporal, c, symbolic_inverse(g_upper), m == 1);
    const auto h_inv = hs.h().symbolic_inverse();
    const auto dg = x_gradient(c, g.rows());

    std::vector<Expr> dH_dx(n);
    for (std::size_t k = 0; k < n; ++k) dH_dx[k] = differentiate(H, c.x(k));
    ExprArray dH_dp({n, m});
    ExprArray d2H({n, n, m});  // (j, k, b) = d^2 H / dx^j dp_k^b
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t b = 0; b < m; ++b) {
            dH_dp(k, b) = differentiate(H, c.p(k, b));
            for (std::size_t j = 0; j < n; ++j) d2H(j, k, b) = differentiate(dH_dp(k, b), c.x(j));
        }
    }

    // Bracket [.] of the defining formula for each (b, i, j).
    ExprArray bracket({m, n, n});
    for (std::size_t b = 0; b < m; ++b) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i; j < n; ++j) {
                std::vector<Expr> terms;
                for (std::size_t k = 0; k < n; ++k) {
                    if (!dg[k][i][j].is_zero()) terms.push_back(dg[k][i][j] * dH_dp(k, b));
                    const Expr dg_dp = differentiate(g(i, j), c.p(k, b));
                    if (!dg_dp.is_zero()) terms.push_back(-(dg_dp * dH_dx[k]));
                    terms.push_back(g(i, k) * d2H(j, k, b));
                    terms.push_back(g(j, k) * d2H(i, k, b));
                }
                bracket(b, i, j) = sum(terms);
                bracket(b, j, i) = bracket(b, i, j);
            }
        }
    }

    auto base = canonical_metric_connection(hs.h(), g);
    ExprArray n2({m, n, n});
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                std::vector<Expr> terms;
                for (std::size_t b = 0; b < m; ++b) {
                    if (!h_inv[a][b].is_zero()) terms.push_back(h_inv[a][b] * bracket(b, i, j));
                }
                n2(a, i, j) = Expr(0.25) * sum(terms);
            }
        }
    }
    return NonlinearConnection(c, base.n1(), std::move(n2));
}

DTensorField electrodynamic_correction(const Metric& g, const DTensorField& U, const Metric& h) {
    require_potential(U);
    const auto& c = g.chart();
    const std::size_t m = c.m();
    const std::size_t n = c.n();
    const auto& u = U.components();
    const auto h_inv = h.symbolic_inverse();
    const auto dg = x_gradient(c, g.rows());

    ExprArray inner({m, n, n});  // (b, i, j)
    for (std::size_t b = 0; b < m; ++b) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                std::vector<Expr> terms;
                for (std::size_t k = 0; k < n; ++k) {
                    if (!dg[k][i][j].is_zero()) terms.push_back(dg[k][i][j] * u(k, b));
                    terms.push_back(g(i, k) * differentiate(u(k, b), c.x(j)));
                    terms.push_back(g(j, k) * differentiate(u(k, b), c.x(i)));
                }
                inner(b, i, j) = sum(terms);
            }
        }
    }
    ExprArray T({m, n, n});
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                std::vector<Expr> terms;
                for (std::size_t b = 0; b < m; ++b) {
                    if (!h_inv[a][b].is_zero()) terms.push_back(h_inv[a][b] * inner(b, i, j));
                }
                T(a, i, j) = Expr(0.25) * sum(terms);
            }
        }
    }
    return DTensorField(c, n2_like_slots(), std::move(T));
}

NonlinearConnection electrodynamic_connection(const Metric& g, const DTensorField& U,
                                              const Metric& h) {
    const auto base = canonical_metric_connection(h, g);
    const auto T = electrodynamic_correction(g, U, h);
    ExprArray n2 = base.n2();
    for (std::size_t k = 0; k < n2.size(); ++k) n2[k] = n2[k] + T.components()[k];
    return NonlinearConnection(g.chart(), base.n1(), std::move(n2));
}

NonlinearConnection electrodynamic_connection_closed_form(const Metric& g, const DTensorField& U,
                                                          const Metric& h) {
    require_potential(U);
    const auto& c = g.chart();
    const std::size_t m = c.m();
    const std::size_t n = c.n();
    const auto& u = U.components();
    const auto h_inv = h.symbolic_inverse();
    const auto gamma = christoffel(g);

    ExprArray u_low({n, m});  // U_ib = g_ik U^(k)_(b)
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t b = 0; b < m; ++b) {
            std::vector<Expr> terms;
            for (std::size_t k = 0; k < n; ++k) terms.push_back(g(i, k) * u(k, b));
            u_low(i, b) = sum(terms);
        }
    }
    ExprArray cov({n, m, n});  // U_kb.r
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t b = 0; b < m; ++b) {
            for (std::size_t r = 0; r < n; ++r) {
                std::vector<Expr> terms{differentiate(u_low(k, b), c.x(r))};
                for (std::size_t s = 0; s < n; ++s) {
                    if (!gamma(s, k, r).is_zero()) terms.push_back(-(u_low(s, b) * gamma(s, k, r)));
                }
                cov(k, b, r) = sum(terms);
            }
        }
    }

    const auto base = canonical_metric_connection(h, g);
    ExprArray n2 = base.n2();
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                std::vector<Expr> terms;
                for (std::size_t b = 0; b < m; ++b) {
                    if (!h_inv[a][b].is_zero()) {
                        terms.push_back(h_inv[a][b] * (cov(i, b, j) + cov(j, b, i)));
                    }
                }
                n2(a, i, j) = n2(a, i, j) + Expr(0.25) * sum(terms);
            }
        }
    }
    return NonlinearConnection(c, base.n1(), std::move(n2));
}

HamiltonSpace gravitational(const Metric& h, const Metric& phi, PhysicalConstants k) {
    if (phi.kind() == MetricKind::temporal) throw ConfigError("gravitational space needs a spatial phi");
    const Expr H = Expr(1.0 / (k.mass * k.light_speed)) * quadratic_form(h, phi.symbolic_inverse());
    return HamiltonSpace(h, H, k);
}

HamiltonSpace autonomous_ed(const Metric& h, const Metric& phi, const DTensorField& A,
                            PhysicalConstants k) {
    require_potential(A);
    const auto& c = h.chart();
    for (const auto& e : A.components()) require_free_of(e, c.x_names(), "potential A");
    const auto h_inv = h.symbolic_inverse();
    const auto& a = A.components();
    std::vector<Expr> terms;
    for (std::size_t p = 0; p < c.m(); ++p) {
        for (std::size_t q = 0; q < c.m(); ++q) {
            if (h_inv[p][q].is_zero()) continue;
            for (std::size_t i = 0; i < c.n(); ++i) {
                for (std::size_t j = 0; j < c.n(); ++j) {
                    if (phi(i, j).is_zero() || a(i, p).is_zero() || a(j, q).is_zero()) continue;
                    terms.push_back(h_inv[p][q] * phi(i, j) * a(i, p) * a(j, q));
                }
            }
        }
    }
    const Expr F = sum(terms);
    const double mc = k.mass * k.light_speed;
    const Expr H = Expr(1.0 / mc) * quadratic_form(h, phi.symbolic_inverse()) -
                   Expr(2.0 * k.charge / (mc * k.light_speed)) * linear_form(A) +
                   Expr(k.charge * k.charge / (mc * k.light_speed * k.light_speed)) * F;
    return HamiltonSpace(h, H, k);
}

HamiltonSpace nonautonomous_ed(const Metric& h, const Metric& g, const DTensorField& U,
                               const Expr& F) {
    require_potential(U);
    const auto& c = h.chart();
    auto tx = c.t_names();
    tx.merge(c.x_names());
    for (const auto& e : U.components()) require_free_of(e, tx, "U");
    require_free_of(F, tx, "F");
    if (g.p_dependent()) throw ConfigError("g must not depend on p");
    return HamiltonSpace(h, assemble_hamiltonian(h, g.symbolic_inverse(), U, F));
}

HamiltonSpace pullback(const HamiltonSpace& hs, const TransitionMap& tm) {
    const InducedTransform it(tm);
    return HamiltonSpace(pullback(hs.h(), tm), it.in_target(hs.hamiltonian()), hs.constants());
}

}  // namespace polyjet
