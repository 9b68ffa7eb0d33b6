#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "polyjet/error.hpp"
#include "polyjet/random_transition.hpp"
#include "polyjet/semispray.hpp"

namespace pj = polyjet;

namespace {

// T^(b)_(i)j = p_i^b delta^1_j, a d-tensor built from C*.
pj::DTensorField liouville_perturbation(const pj::JetChart& c) {
    pj::ExprArray T({c.m(), c.n(), c.n()});
    for (std::size_t b = 0; b < c.m(); ++b) {
        for (std::size_t i = 0; i < c.n(); ++i) T(b, i, 0) = c.pvar(i, b);
    }
    return pj::DTensorField(c, pj::semispray_slots(), T);
}

}  // namespace

TEST(CanonicalTemporal, Examples) {
    const pj::JetChart c(2, 2);
    EXPECT_THROW(pj::canonical_temporal(pj::Metric::identity(pj::MetricKind::spatial, c)),
                 pj::ConfigError);
    const auto flat = pj::canonical_temporal(pj::Metric::identity(pj::MetricKind::temporal, c));
    for (const auto& e : flat.components()) EXPECT_TRUE(e.is_zero());

    const auto h = pj::Metric::parse(pj::MetricKind::temporal, c, {{"1", "0"}, {"0", "t1^2 + 1"}});
    const auto G = pj::canonical_temporal(h);
    pj::Assignment at{{"t1", 1}, {"t2", 0.3}, {"x1", 0}, {"x2", 0}};
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t a = 0; a < 2; ++a) at[c.p(i, a)] = 1;
    }
    for (std::size_t j = 0; j < 2; ++j) {
        for (std::size_t k = 0; k < 2; ++k) EXPECT_DOUBLE_EQ(pj::evaluate(G(0, j, k), at), -0.5);
    }
    const auto dom = c.default_domain();
    const auto curved = pj::canonical_temporal(fixtures::curved_h(c, 9));
    for (std::size_t a = 0; a < 2; ++a) {
        EXPECT_TRUE(pj::equiv(curved(a, 0, 1), curved(a, 1, 0), dom));
    }
}

TEST(CanonicalSpatial, Examples) {
    const pj::JetChart c(2, 2);
    const auto flat = pj::canonical_spatial(pj::Metric::identity(pj::MetricKind::spatial, c));
    for (const auto& e : flat.components()) EXPECT_TRUE(e.is_zero());

    const auto phi = pj::Metric::parse(pj::MetricKind::spatial, c, {{"exp(2*x1)", "0"}, {"0", "1"}});
    const auto G = pj::canonical_spatial(phi);
    const auto dom = c.default_domain();
    for (std::size_t b = 0; b < 2; ++b) {
        EXPECT_TRUE(pj::equiv(G(b, 0, 0), pj::Expr(-0.5) * c.pvar(0, b), dom));
    }
    EXPECT_DOUBLE_EQ(pj::evaluate(G(0, 0, 0), {{"x1", 0.2}, {"p1_1", 4}}), -2.0);
}

TEST(VerifySemisprayLaw, CanonicalPassesUnderRandomTransitions) {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const pj::JetChart c(1 + seed % 3, 1 + (seed + 1) % 3);
        const auto tm = pj::random_transition(c, 3000 + seed);
        const pj::InducedTransform it(tm);
        const auto dom = c.default_domain(20, seed);
        const auto h = fixtures::curved_h(c, seed);
        const auto phi = fixtures::curved_phi(c, seed);
        const auto rt = pj::verify_semispray_law(pj::canonical_temporal(h),
                                                 pj::canonical_temporal(pj::pullback(h, tm)), it, dom);
        EXPECT_TRUE(rt.passed) << seed << " " << rt.max_residual;
        const auto rs = pj::verify_semispray_law(
            pj::canonical_spatial(phi), pj::canonical_spatial(pj::pullback(phi, tm)), it, dom);
        EXPECT_TRUE(rs.passed) << seed << " " << rs.max_residual;
    }
}

TEST(VerifySemisprayLaw, IdentityTransitionIsExact) {
    const pj::JetChart c(2, 2);
    const auto G = pj::canonical_spatial(fixtures::curved_phi(c, 4));
    const auto r = pj::verify_semispray_law(G, G, pj::TransitionMap::identity(c), c.default_domain());
    EXPECT_TRUE(r.passed);
    EXPECT_EQ(r.max_residual, 0.0);
}

TEST(VerifySemisprayLaw, ZeroSemisprayIsNotPreservedByNonlinearMaps) {
    const pj::JetChart c(1, 2);
    const auto tm = pj::random_transition(c, 77);
    const pj::Semispray zero(pj::SemisprayKind::spatial, c, pj::ExprArray({1, 2, 2}));
    const auto r = pj::verify_semispray_law(zero, zero, tm, c.default_domain());
    EXPECT_FALSE(r.passed);
    EXPECT_EQ(r.worst_component.rfind("G[", 0), 0u);
}

TEST(VerifySemisprayLaw, RejectsMixedKinds) {
    const pj::JetChart c(1, 1);
    const pj::Semispray a(pj::SemisprayKind::spatial, c, pj::ExprArray({1, 1, 1}));
    const pj::Semispray b(pj::SemisprayKind::temporal, c, pj::ExprArray({1, 1, 1}));
    EXPECT_THROW(pj::verify_semispray_law(a, b, pj::TransitionMap::identity(c), c.default_domain()),
                 pj::ConfigError);
}

TEST(CheckCharacterization, Examples) {
    const pj::JetChart c(2, 3);
    const auto h = fixtures::curved_h(c, 12);
    const auto dom = c.default_domain();
    pj::ExprArray p({2, 3});
    pj::ExprArray p2({2, 3});
    for (std::size_t a = 0; a < 2; ++a) {
        for (std::size_t i = 0; i < 3; ++i) {
            p(a, i) = c.pvar(i, a);
            p2(a, i) = pj::Expr(2.0) * c.pvar(i, a);
        }
    }
    const std::vector<pj::IndexSlot> ts{pj::IndexSlot::upper_t("c"), pj::IndexSlot::lower_x("i")};
    EXPECT_TRUE(pj::check_characterization(pj::DTensorField(c, ts, p), pj::SemisprayKind::temporal, h, dom));
    EXPECT_FALSE(pj::check_characterization(pj::DTensorField(c, ts, p2), pj::SemisprayKind::temporal, h, dom));

    pj::ExprArray delta({3, 3});
    for (std::size_t k = 0; k < 3; ++k) delta(k, k) = pj::Expr(1.0);
    const std::vector<pj::IndexSlot> ss{pj::IndexSlot::upper_x("k"), pj::IndexSlot::lower_x("i")};
    EXPECT_TRUE(pj::check_characterization(pj::DTensorField(c, ss, delta), pj::SemisprayKind::spatial, h, dom));
    EXPECT_FALSE(pj::check_characterization(pj::DTensorField(c, ss, delta).scaled(pj::Expr(0.5)),
                                            pj::SemisprayKind::spatial, h, dom));
    EXPECT_THROW(pj::check_characterization(pj::DTensorField(c, ts, p), pj::SemisprayKind::spatial, h, dom),
                 pj::DimensionError);
}

TEST(Decompose, CanonicalGivesZero) {
    const pj::JetChart c(2, 2);
    const auto h = fixtures::curved_h(c, 2);
    const auto T = pj::decompose(pj::canonical_temporal(h), h);
    const auto dom = c.default_domain();
    for (const auto& e : T.components()) EXPECT_TRUE(pj::equiv(e, pj::Expr(0.0), dom));
}

TEST(Decompose, RecoversPerturbationAndIsCovariant) {
    const pj::JetChart c(2, 2);
    const auto tm = pj::random_transition(c, 88);
    const auto phi = fixtures::curved_phi(c, 88);
    const auto dom = c.default_domain();
    const auto Tp = liouville_perturbation(c);
    const auto S = pj::canonical_spatial(phi).plus(Tp);
    const auto T = pj::decompose(S, phi);
    for (std::size_t k = 0; k < T.components().size(); ++k) {
        EXPECT_TRUE(pj::equiv(T.components()[k], Tp.components()[k], dom));
    }
    const auto TB = pj::pushforward(Tp, pj::InducedTransform(tm));
    EXPECT_TRUE(pj::verify_dtensor_law(T, TB, tm, dom).passed);
}

TEST(Decompose, InjectiveOnPerturbations) {
    const pj::JetChart c(2, 2);
    const auto h = fixtures::curved_h(c, 6);
    const auto dom = c.default_domain();
    const auto base = pj::canonical_temporal(h);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto f1 = fixtures::smooth_tx(c, 100 + seed);
        const auto f2 = fixtures::smooth_tx(c, 200 + seed);
        const auto P = liouville_perturbation(c);
        const auto T1 = pj::decompose(base.plus(P.scaled(f1)), h);
        const auto T2 = pj::decompose(base.plus(P.scaled(f2)), h);
        bool differ = false;
        for (std::size_t k = 0; k < T1.components().size(); ++k) {
            differ |= !pj::equiv(T1.components()[k], T2.components()[k], dom);
        }
        EXPECT_TRUE(differ) << seed;
    }
}

TEST(Property, DifferenceOfSemisprayIsADTensor) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const pj::JetChart c(2, 2);
        const auto tm = pj::random_transition(c, 4000 + seed);
        const auto dom = c.default_domain(20, seed);
        const auto h1 = fixtures::curved_h(c, seed);
        const auto h2 = fixtures::curved_h(c, seed + 50);
        const auto DA = pj::canonical_temporal(h1).as_dtensor() - pj::canonical_temporal(h2).as_dtensor();
        const auto DB = pj::canonical_temporal(pj::pullback(h1, tm)).as_dtensor() -
                        pj::canonical_temporal(pj::pullback(h2, tm)).as_dtensor();
        EXPECT_TRUE(pj::verify_dtensor_law(DA, DB, tm, dom).passed) << seed;

        const auto p1 = fixtures::curved_phi(c, seed);
        const auto p2 = fixtures::curved_phi(c, seed + 50);
        const auto EA = pj::canonical_spatial(p1).as_dtensor() - pj::canonical_spatial(p2).as_dtensor();
        const auto EB = pj::canonical_spatial(pj::pullback(p1, tm)).as_dtensor() -
                        pj::canonical_spatial(pj::pullback(p2, tm)).as_dtensor();
        EXPECT_TRUE(pj::verify_dtensor_law(EA, EB, tm, dom).passed) << seed;
    }
}

TEST(Property, CanonicalPlusDTensorStillSatisfiesLaw) {
    const pj::JetChart c(2, 3);
    const auto tm = pj::random_transition(c, 91);
    const pj::InducedTransform it(tm);
    const auto h = fixtures::curved_h(c, 91);
    const auto Tp = liouville_perturbation(c).scaled(pj::Expr(0.3));
    const auto SA = pj::canonical_temporal(h).plus(Tp);
    const auto SB = pj::canonical_temporal(pj::pullback(h, tm)).plus(pj::pushforward(Tp, it));
    EXPECT_TRUE(pj::verify_semispray_law(SA, SB, it, c.default_domain()).passed);
}
