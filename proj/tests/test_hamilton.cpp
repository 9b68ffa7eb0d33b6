#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "polyjet/calculus.hpp"
#include "polyjet/error.hpp"
#include "polyjet/hamilton.hpp"
#include "polyjet/parser.hpp"
#include "polyjet/random_transition.hpp"

namespace pj = polyjet;

namespace {

using fixtures::potential;
using fixtures::random_h3;
using fixtures::random_potential;

pj::Expr P(const std::string& s) { return pj::parse_expr(s, {"t1", "t2", "x1", "x2", "p1_1", "p1_2", "p2_1", "p2_2"}); }

void expect_equiv_arrays(const pj::ExprArray& x, const pj::ExprArray& y, const pj::SampleDomain& dom,
                         double tol = pj::kDefaultEquivTolerance) {
    ASSERT_EQ(x.shape(), y.shape());
    for (std::size_t k = 0; k < x.size(); ++k) {
        const auto d = pj::compare(x[k], y[k], dom);
        EXPECT_LE(d.max_scaled, tol) << "entry " << k << ": " << x[k] << " vs " << y[k];
    }
}

}  // namespace

TEST(FundamentalVerticalDTensor, GravitationalIsKroneckerDelta) {
    const pj::JetChart c(2, 2);
    const auto h = pj::Metric::identity(pj::MetricKind::temporal, c);
    const auto phi = pj::Metric::identity(pj::MetricKind::spatial, c);
    const auto hs = pj::gravitational(h, phi);
    const auto& G = hs.fundamental().components();
    const auto dom = c.default_domain();
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t a = 0; a < 2; ++a) {
            for (std::size_t j = 0; j < 2; ++j) {
                for (std::size_t b = 0; b < 2; ++b) {
                    EXPECT_TRUE(pj::equiv(G(i, a, j, b), pj::Expr(i == j && a == b ? 1.0 : 0.0), dom));
                }
            }
        }
    }
    const auto A = potential(c, {{P("x1"), P("x2^2")}, {P("sin(x1)"), P("1")}});
    const auto ed = pj::autonomous_ed(h, phi, A);
    expect_equiv_arrays(ed.fundamental().components(), G, dom);
}

TEST(FundamentalVerticalDTensor, PFreeHamiltonianGivesZero) {
    const pj::JetChart c(2, 2);
    const pj::HamiltonSpace hs(pj::Metric::identity(pj::MetricKind::temporal, c), P("t1*x2 + exp(x1)"));
    for (const auto& e : hs.fundamental().components()) EXPECT_TRUE(e.is_zero());
}

TEST(FundamentalVerticalDTensor, HessianSymmetry) {
    const pj::JetChart c(2, 2);
    const auto dom = c.default_domain();
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        std::mt19937_64 gen(seed);
        std::vector<pj::Expr> vars;
        for (const auto& name : c.names()) vars.push_back(pj::Expr::variable(name));
        const pj::Expr H = fixtures::smooth(gen, vars, 1.0) * fixtures::smooth(gen, vars, 1.0);
        const auto G = pj::fundamental_vertical_dtensor(H, c).components();
        for (std::size_t i = 0; i < 2; ++i) {
            for (std::size_t a = 0; a < 2; ++a) {
                for (std::size_t j = 0; j < 2; ++j) {
                    for (std::size_t b = 0; b < 2; ++b) {
                        EXPECT_TRUE(pj::equiv(G(i, a, j, b), G(j, b, i, a), dom));
                    }
                }
            }
        }
    }
}

TEST(HamiltonSpace, RejectsBadInput) {
    const pj::JetChart c(2, 2);
    const auto h = pj::Metric::identity(pj::MetricKind::temporal, c);
    EXPECT_THROW(pj::HamiltonSpace(pj::Metric::identity(pj::MetricKind::spatial, c), P("p1_1")),
                 pj::ConfigError);
    EXPECT_THROW(pj::HamiltonSpace(h, pj::Expr::variable("y")), pj::ConfigError);
    EXPECT_THROW(pj::HamiltonSpace(h, P("p1_1"), {.mass = 0.0}), pj::ConfigError);
}

TEST(Builders, Examples) {
    const pj::JetChart c(1, 1);
    const auto h = pj::Metric::identity(pj::MetricKind::temporal, c);
    const auto phi = pj::Metric::identity(pj::MetricKind::spatial, c);
    const auto dom = c.default_domain();
    const auto p = c.pvar(0, 0);
    const auto x = c.xvar(0);
    EXPECT_TRUE(pj::equiv(pj::gravitational(h, phi).hamiltonian(), p * p, dom));

    const auto zeroA = potential(c, {{pj::Expr(0.0)}});
    EXPECT_TRUE(pj::equiv(pj::autonomous_ed(h, phi, zeroA).hamiltonian(),
                          pj::gravitational(h, phi).hamiltonian(), dom));

    // F = x1^2, so H2 = p^2 - 2 x1 p + x1^2.
    const auto A = potential(c, {{x}});
    EXPECT_TRUE(pj::equiv(pj::autonomous_ed(h, phi, A).hamiltonian(), p * p - pj::Expr(2.0) * x * p + x * x, dom));

    EXPECT_THROW(pj::autonomous_ed(h, phi, potential(c, {{c.tvar(0)}})), pj::ConfigError);
    EXPECT_THROW(pj::gravitational(h, h), pj::ConfigError);
}

TEST(KroneckerRegularity, BuildersAreRegular) {
    const pj::JetChart c(2, 2);
    const auto dom = c.default_domain();
    const auto h = fixtures::curved_h(c, 1);
    const auto phi = fixtures::curved_phi(c, 1);
    const pj::PhysicalConstants k{.mass = 2.0, .light_speed = 1.5, .charge = 0.7};
    for (const auto& hs : {pj::gravitational(h, phi, k),
                           pj::autonomous_ed(h, phi, random_potential(c, 1, true), k), random_h3(c, 1)}) {
        const auto r = pj::check_kronecker_regularity(hs, dom);
        EXPECT_TRUE(r.regular) << r.reason;
        EXPECT_LE(r.residual, 1e-10);
        EXPECT_TRUE(r.g_p_independent);
        EXPECT_TRUE(r.reason.empty());
    }
}

TEST(KroneckerRegularity, QuarticIsNotRegular) {
    const pj::JetChart c(2, 2);
    const pj::HamiltonSpace hs(pj::Metric::identity(pj::MetricKind::temporal, c), P("p1_1^4"));
    const auto r = pj::check_kronecker_regularity(hs, c.default_domain());
    EXPECT_FALSE(r.regular);
    // G^(1)(1)_(1)(1) = 6 p^2 against a candidate of 3 p^2: the defect is 3 p^2.
    const double p = r.worst_point.at("p1_1");
    EXPECT_NEAR(r.residual, 3 * p * p, 1e-9 * r.residual);
    EXPECT_GT(r.residual, 1.0);
    EXPECT_FALSE(r.reason.empty());
    EXPECT_THROW(pj::extract_electrodynamic_form(hs, c.default_domain()), pj::NotRegular);
    EXPECT_THROW(pj::canonical_connection_of_hamilton_space(hs, c.default_domain()), pj::NotRegular);
}

TEST(KroneckerRegularity, SingleTimeAllowsPDependentG) {
    const pj::JetChart c(1, 2);
    const auto h = pj::Metric::parse(pj::MetricKind::temporal, c, {{"1 + t1^2"}});
    const auto H = pj::parse_expr("(1 + t1^2)*(p1_1^2 + p2_1^2 + (x1*p1_1)^4/12 + p1_1^2*p2_1^2/4)",
                             {"t1", "x1", "x2", "p1_1", "p2_1"});
    const pj::HamiltonSpace hs(h, H);
    const auto dom = c.default_domain();
    const auto r = pj::check_kronecker_regularity(hs, dom);
    EXPECT_TRUE(r.regular) << r.reason;
    EXPECT_LE(r.residual, 1e-10);
    EXPECT_FALSE(pj::equiv(pj::differentiate(r.g_upper[0][0], "p1_1"), pj::Expr(0.0), dom));
    EXPECT_THROW(pj::extract_electrodynamic_form(hs, dom), pj::DimensionError);
}

TEST(KroneckerRegularity, ScaleInvariance) {
    const pj::JetChart c(2, 2);
    const auto dom = c.default_domain();
    const auto hs = random_h3(c, 4);
    const pj::HamiltonSpace scaled(hs.h(), pj::Expr(3.0) * hs.hamiltonian());
    const auto r1 = pj::check_kronecker_regularity(hs, dom);
    const auto r3 = pj::check_kronecker_regularity(scaled, dom);
    EXPECT_EQ(r1.regular, r3.regular);
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            EXPECT_TRUE(pj::equiv(r3.g_upper[i][j], pj::Expr(3.0) * r1.g_upper[i][j], dom));
        }
    }
    const pj::HamiltonSpace bad(hs.h(), P("p1_1^4"));
    const pj::HamiltonSpace bad3(hs.h(), P("5*p1_1^4"));
    EXPECT_EQ(pj::check_kronecker_regularity(bad, dom).regular,
              pj::check_kronecker_regularity(bad3, dom).regular);
}

TEST(ExtractElectrodynamicForm, Gravitational) {
    const pj::JetChart c(2, 2);
    const auto dom = c.default_domain();
    const auto h = fixtures::curved_h(c, 2);
    const auto phi = fixtures::curved_phi(c, 2);
    const pj::PhysicalConstants k{.mass = 2.0, .light_speed = 1.5};
    const auto form = pj::extract_electrodynamic_form(pj::gravitational(h, phi, k), dom);
    const auto phi_inv = phi.symbolic_inverse();
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            EXPECT_TRUE(pj::equiv(form.g_upper[i][j], pj::Expr(1.0 / 3.0) * phi_inv[i][j], dom));
            EXPECT_TRUE(pj::equiv(form.g(i, j), pj::Expr(3.0) * phi(i, j), dom));
        }
    }
    for (const auto& e : form.U.components()) EXPECT_TRUE(pj::equiv(e, pj::Expr(0.0), dom));
    EXPECT_TRUE(pj::equiv(form.F, pj::Expr(0.0), dom));

    const pj::HamiltonSpace shifted(h, pj::gravitational(h, phi, k).hamiltonian() + pj::Expr(7.0));
    const auto f7 = pj::extract_electrodynamic_form(shifted, dom);
    EXPECT_TRUE(pj::equiv(f7.F, pj::Expr(7.0), dom));
    for (const auto& e : f7.U.components()) EXPECT_TRUE(pj::equiv(e, pj::Expr(0.0), dom));
}

TEST(ExtractElectrodynamicForm, AutonomousElectrodynamics) {
    const pj::JetChart c(2, 2);
    const auto dom = c.default_domain();
    const auto h = fixtures::curved_h(c, 3);
    const auto phi = fixtures::curved_phi(c, 3);
    const auto A = random_potential(c, 3, true);
    const pj::PhysicalConstants k{.mass = 2.0, .light_speed = 1.5, .charge = 0.7};
    const auto form = pj::extract_electrodynamic_form(pj::autonomous_ed(h, phi, A, k), dom);
    const double mc = 3.0;
    for (std::size_t q = 0; q < A.components().size(); ++q) {
        EXPECT_TRUE(pj::equiv(form.U.components()[q],
                              pj::Expr(-2 * 0.7 / (mc * 1.5)) * A.components()[q], dom));
    }
    const auto h_inv = h.symbolic_inverse();
    std::vector<pj::Expr> terms;
    for (std::size_t a = 0; a < 2; ++a) {
        for (std::size_t b = 0; b < 2; ++b) {
            for (std::size_t i = 0; i < 2; ++i) {
                for (std::size_t j = 0; j < 2; ++j) {
                    terms.push_back(h_inv[a][b] * phi(i, j) * A.components()(i, a) * A.components()(j, b));
                }
            }
        }
    }
    EXPECT_TRUE(pj::equiv(form.F, pj::Expr(0.49 / (mc * 1.5 * 1.5)) * pj::sum(terms), dom));
}

TEST(ExtractElectrodynamicForm, RoundTripOnRandomSpaces) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const pj::JetChart c(2 + seed % 2, 1 + seed % 3);
        const auto dom = c.default_domain(20, seed);
        const auto hs = random_h3(c, seed);
        const auto form = pj::extract_electrodynamic_form(hs, dom);
        EXPECT_TRUE(pj::equiv(pj::assemble_hamiltonian(hs.h(), form.g_upper, form.U, form.F),
                              hs.hamiltonian(), dom));
        const auto g = fixtures::curved_g(c, seed);
        for (std::size_t i = 0; i < c.n(); ++i) {
            for (std::size_t j = 0; j < c.n(); ++j) EXPECT_TRUE(pj::equiv(form.g(i, j), g(i, j), dom));
        }
        for (const auto& e : form.U.components()) {
            for (const auto& p : c.p_names()) EXPECT_FALSE(pj::depends_on(e, p));
        }
        for (const auto& p : c.p_names()) EXPECT_FALSE(pj::depends_on(form.F, p));
    }
}

TEST(CanonicalConnection, GravitationalExample) {
    const pj::JetChart c(2, 2);
    const auto dom = c.default_domain();
    const auto h = pj::Metric::identity(pj::MetricKind::temporal, c);
    const auto phi = pj::Metric::parse(pj::MetricKind::spatial, c, {{"exp(2*x1)", "0"}, {"0", "1"}});
    const auto N = pj::canonical_connection_of_hamilton_space(pj::gravitational(h, phi), dom);
    for (const auto& e : N.n1()) EXPECT_TRUE(pj::equiv(e, pj::Expr(0.0), dom));
    for (std::size_t a = 0; a < 2; ++a) {
        for (std::size_t i = 0; i < 2; ++i) {
            for (std::size_t j = 0; j < 2; ++j) {
                const pj::Expr expect = i == 0 && j == 0 ? -c.pvar(0, a) : pj::Expr(0.0);
                EXPECT_TRUE(pj::equiv(N.n2()(a, i, j), expect, dom)) << a << i << j;
            }
        }
    }
    const auto flat = pj::canonical_connection_of_hamilton_space(
        pj::gravitational(h, pj::Metric::identity(pj::MetricKind::spatial, c)), dom);
    for (const auto& e : flat.n2()) EXPECT_TRUE(pj::equiv(e, pj::Expr(0.0), dom));
}

TEST(CanonicalConnection, ThreeFormsAgree) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const pj::JetChart c(2 + seed % 2, 1 + seed % 3);
        const auto dom = c.default_domain(20, seed);
        const auto hs = random_h3(c, seed);
        const auto form = pj::extract_electrodynamic_form(hs, dom);
        const auto N = pj::canonical_connection_of_hamilton_space(hs, dom);
        const auto E = pj::electrodynamic_connection(form.g, form.U, hs.h());
        const auto Q = pj::electrodynamic_connection_closed_form(form.g, form.U, hs.h());
        expect_equiv_arrays(N.n2(), E.n2(), dom);
        expect_equiv_arrays(N.n2(), Q.n2(), dom);
        const auto N0 = pj::canonical_metric_connection(hs.h(), form.g);
        expect_equiv_arrays(N.n1(), N0.n1(), dom, 1e-12);
        expect_equiv_arrays(Q.n1(), N0.n1(), dom, 1e-12);
    }
}

TEST(ClosedForm, Examples) {
    const pj::JetChart c(2, 2);
    const auto dom = c.default_domain();
    const auto h = fixtures::curved_h(c, 8);

    // U = 0 leaves the Christoffel part.
    const auto g = fixtures::curved_g(c, 8);
    const auto zeroU = potential(c, {{pj::Expr(0.0), pj::Expr(0.0)}, {pj::Expr(0.0), pj::Expr(0.0)}});
    expect_equiv_arrays(pj::electrodynamic_connection_closed_form(g, zeroU, h).n2(),
                        pj::canonical_metric_connection(h, g).n2(), dom);

    // Flat g with constant U.
    const auto flat = pj::Metric::identity(pj::MetricKind::spatiotemporal, c);
    const auto constU = potential(c, {{pj::Expr(1.5), pj::Expr(-2.0)}, {pj::Expr(0.25), pj::Expr(3.0)}});
    const auto flatN = pj::electrodynamic_connection_closed_form(flat, constU, h);
    for (const auto& e : flatN.n2()) {
        EXPECT_TRUE(pj::equiv(e, pj::Expr(0.0), dom));
    }

    // g = diag(exp(2 x1), 1), U_ib = x1 delta_i1 delta_b1, so U^(1)_(1) = x1 exp(-2 x1).
    const auto ge = pj::Metric::parse(pj::MetricKind::spatiotemporal, c, {{"exp(2*x1)", "0"}, {"0", "1"}});
    const auto U = potential(c, {{P("x1*exp(-2*x1)"), pj::Expr(0.0)}, {pj::Expr(0.0), pj::Expr(0.0)}});
    const auto hs = pj::nonautonomous_ed(h, ge, U, pj::Expr(0.0));
    expect_equiv_arrays(pj::electrodynamic_connection_closed_form(ge, U, h).n2(),
                        pj::canonical_connection_of_hamilton_space(hs, dom).n2(), dom);
}

TEST(ElectrodynamicCorrection, IsADTensor) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const pj::JetChart c(2, 2);
        const auto tm = pj::random_transition(c, 6000 + seed);
        const pj::InducedTransform it(tm);
        const auto dom = c.default_domain(20, seed);
        const auto h = fixtures::curved_h(c, seed);
        const auto g = fixtures::curved_g(c, seed);
        const auto U = random_potential(c, seed);
        const auto TA = pj::electrodynamic_correction(g, U, h);
        const auto TB = pj::electrodynamic_correction(pj::pullback(g, tm), pj::pushforward(U, it),
                                                      pj::pullback(h, tm));
        const auto r = pj::verify_dtensor_law(TA, TB, it, dom);
        EXPECT_TRUE(r.passed) << seed << " " << r.max_residual;
    }
}

TEST(CanonicalConnection, SatisfiesConnectionLawUnderPullback) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const pj::JetChart c(2, 2);
        const auto tm = pj::random_transition(c, 6100 + seed);
        const pj::InducedTransform it(tm);
        const auto dom = c.default_domain(20, seed);
        const auto hsA = random_h3(c, seed);
        const auto hsB = pj::pullback(hsA, tm);
        const auto NA = pj::canonical_connection_of_hamilton_space(hsA, dom);
        const auto NB = pj::canonical_connection_of_hamilton_space(hsB, dom);
        const auto law = pj::verify_connection_law(NA, NB, it, dom);
        EXPECT_TRUE(law.passed) << seed << " " << law.max_residual;
        const auto cof = pj::verify_adapted_coframe(NA, NB, it, dom);
        EXPECT_TRUE(cof.passed) << seed << " " << cof.max_residual;
    }
}

TEST(CanonicalConnection, SingleTimeWithPDependentG) {
    const pj::JetChart c(1, 2);
    const auto tm = pj::random_transition(c, 6200);
    const pj::InducedTransform it(tm);
    const auto dom = c.default_domain();
    const auto h = pj::Metric::parse(pj::MetricKind::temporal, c, {{"1 + t1^2/4"}});
    const auto H = pj::parse_expr("(1 + t1^2/4)*((1 + x2^2/4)*p1_1^2 + p2_1^2 + (x1*p1_1)^4/12)",
                             {"t1", "x1", "x2", "p1_1", "p2_1"});
    const pj::HamiltonSpace hsA(h, H);
    const auto NA = pj::canonical_connection_of_hamilton_space(hsA, dom);
    const auto NB = pj::canonical_connection_of_hamilton_space(pj::pullback(hsA, tm), dom);
    const auto law = pj::verify_connection_law(NA, NB, it, dom);
    EXPECT_TRUE(law.passed) << law.max_residual << " " << law.worst_component;
}
