#include "polyjet/connection.hpp"

#include "polyjet/calculus.hpp"
#include "polyjet/error.hpp"

namespace polyjet {

namespace {

std::vector<IndexSlot> n1_slots() {
    return {IndexSlot::upper_t("a", 1), IndexSlot::lower_x("i", 0), IndexSlot::lower_t("b")};
}

std::vector<IndexSlot> n2_slots() {
    return {IndexSlot::upper_t("a", 1), IndexSlot::lower_x("i", 0), IndexSlot::lower_x("j")};
}

}  // namespace

NonlinearConnection::NonlinearConnection(const JetChart& chart, ExprArray n1, ExprArray n2)
    : chart_(chart), n1_(std::move(n1)), n2_(std::move(n2)) {
    const std::size_t m = chart_.m();
    const std::size_t n = chart_.n();
    if (n1_.shape() != std::vector<std::size_t>{m, n, m}) {
        throw DimensionError("N1 needs shape (m, n, m)");
    }
    if (n2_.shape() != std::vector<std::size_t>{m, n, n}) {
        throw DimensionError("N2 needs shape (m, n, n)");
    }
}

NonlinearConnection NonlinearConnection::zero(const JetChart& chart) {
    const std::size_t m = chart.m();
    const std::size_t n = chart.n();
    return NonlinearConnection(chart, ExprArray({m, n, m}), ExprArray({m, n, n}));
}

NonlinearConnection NonlinearConnection::with_n2_offset(std::size_t a, std::size_t i,
                                                        std::size_t j, double delta) const {
    ExprArray n2 = n2_;
    n2(a, i, j) = n2(a, i, j) + Expr(delta);
    return NonlinearConnection(chart_, n1_, std::move(n2));
}

VerificationReport verify_connection_law(const NonlinearConnection& N_A,
                                         const NonlinearConnection& N_B,
                                         const InducedTransform& it, const SampleDomain& dom,
                                         double tol) {
    const auto& c = it.chart();
    const std::size_t m = c.m();
    const std::size_t n = c.n();
    const ArrayEvaluator a1(c.names(), N_A.n1()), a2(c.names(), N_A.n2());
    const ArrayEvaluator b1(c.names(), N_B.n1()), b2(c.names(), N_B.n2());
    const auto s1 = n1_slots();
    const auto s2 = n2_slots();
    return sweep("connection law", it, dom, tol, [&](const JetPoint& q, const InducedAt& at) {
        NumArray t1 = apply_slot_factors(s1, at, a1(q.coords));
        NumArray t2 = apply_slot_factors(s2, at, a2(q.coords));
        const NumArray r1 = b1(at.image.coords);
        const NumArray r2 = b2(at.image.coords);
        for (std::size_t b = 0; b < m; ++b) {
            for (std::size_t j = 0; j < n; ++j) {
                for (std::size_t d = 0; d < m; ++d) {
                    double corr = 0;
                    for (std::size_t a = 0; a < m; ++a) corr += at.jt_inv(a, d) * at.dp_dt(j * m + b, a);
                    t1(b, j, d) += -corr - r1(b, j, d);
                }
                for (std::size_t r = 0; r < n; ++r) {
                    double corr = 0;
                    for (std::size_t i = 0; i < n; ++i) corr += at.jx_inv(i, r) * at.dp_dx(j * m + b, i);
                    t2(b, j, r) += -corr - r2(b, j, r);
                }
            }
        }
        NumArray src1 = apply_slot_factors(s1, at, t1, true);
        NumArray src2 = apply_slot_factors(s2, at, t2, true);
        return LawResidual{{"N1", {"a", "i", "b"}, std::move(t1), std::move(src1)},
                           {"N2", {"a", "i", "j"}, std::move(t2), std::move(src2)}};
    });
}

VerificationReport verify_connection_law(const NonlinearConnection& N_A,
                                         const NonlinearConnection& N_B, const TransitionMap& tm,
                                         const SampleDomain& dom, double tol) {
    return verify_connection_law(N_A, N_B, InducedTransform(tm), dom, tol);
}

NonlinearConnection connection_from_semispray(const PolymomentaSemispray& G, const Metric& phi) {
    if (G.temporal.kind() != SemisprayKind::temporal || G.spatial.kind() != SemisprayKind::spatial) {
        throw ConfigError("semispray pair has the wrong kinds");
    }
    const auto& c = G.temporal.chart();
    const std::size_t m = c.m();
    const std::size_t n = c.n();
    if (phi.dim() != n) throw DimensionError("auxiliary metric has the wrong dimension");
    const auto phi_inv = phi.symbolic_inverse();

    ExprArray n1({m, n, m});
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < m; ++b) {
            // D(i, j, k) = d G1^(a)_(j)k / d p_i^b
            ExprArray D({n, n, n});
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    for (std::size_t k = 0; k < n; ++k) {
                        D(i, j, k) = differentiate(G.temporal(a, j, k), c.p(i, b));
                    }
                }
            }
            for (std::size_t r = 0; r < n; ++r) {
                std::vector<Expr> terms;
                for (std::size_t i = 0; i < n; ++i) {
                    if (phi(i, r).is_zero()) continue;
                    for (std::size_t j = 0; j < n; ++j) {
                        for (std::size_t k = 0; k < n; ++k) {
                            if (D(i, j, k).is_zero() || phi_inv[j][k].is_zero()) continue;
                            terms.push_back(phi_inv[j][k] * D(i, j, k) * phi(i, r));
                        }
                    }
                }
                n1(a, r, b) = sum(terms);
            }
        }
    }
    ExprArray n2 = G.spatial.components().map([](const Expr& e) { return Expr(2.0) * e; });
    return NonlinearConnection(c, std::move(n1), std::move(n2));
}

PolymomentaSemispray semispray_from_connection(const NonlinearConnection& N) {
    const auto& c = N.chart();
    const std::size_t m = c.m();
    const std::size_t n = c.n();
    ExprArray g1({m, n, n});
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                std::vector<Expr> terms;
                for (std::size_t b = 0; b < m; ++b) terms.push_back(N.n1()(a, i, b) * c.pvar(j, b));
                g1(a, i, j) = Expr(0.5) * sum(terms);
            }
        }
    }
    ExprArray g2 = N.n2().map([](const Expr& e) { return Expr(0.5) * e; });
    return {Semispray(SemisprayKind::temporal, c, std::move(g1)),
            Semispray(SemisprayKind::spatial, c, std::move(g2))};
}

NonlinearConnection canonical_metric_connection(const Metric& h, const Metric& phi) {
    if (h.kind() != MetricKind::temporal) throw ConfigError("canonical connection needs temporal h");
    const auto& c = h.chart();
    const std::size_t m = c.m();
    const std::size_t n = c.n();
    const auto kappa = christoffel(h);
    const auto gamma = christoffel(phi);
    ExprArray n1({m, n, m});
    ExprArray n2({m, n, n});
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t b = 0; b < m; ++b) {
                std::vector<Expr> terms;
                for (std::size_t cc = 0; cc < m; ++cc) {
                    if (!kappa(a, cc, b).is_zero()) terms.push_back(kappa(a, cc, b) * c.pvar(i, cc));
                }
                n1(a, i, b) = sum(terms);
            }
            for (std::size_t j = 0; j < n; ++j) {
                std::vector<Expr> terms;
                for (std::size_t k = 0; k < n; ++k) {
                    if (!gamma(k, i, j).is_zero()) terms.push_back(gamma(k, i, j) * c.pvar(k, a));
                }
                n2(a, i, j) = -sum(terms);
            }
        }
    }
    return NonlinearConnection(c, std::move(n1), std::move(n2));
}

namespace {

Eigen::MatrixXd coframe_rows(const JetChart& c, const NumArray& n1, const NumArray& n2) {
    const std::size_t m = c.m();
    const std::size_t n = c.n();
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m * n),
                                              static_cast<Eigen::Index>(c.dim()));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < m; ++a) {
            const auto row = static_cast<Eigen::Index>(i * m + a);
            D(row, static_cast<Eigen::Index>(c.p_index(i, a))) = 1.0;
            for (std::size_t b = 0; b < m; ++b) {
                D(row, static_cast<Eigen::Index>(c.t_index(b))) = n1(a, i, b);
            }
            for (std::size_t j = 0; j < n; ++j) {
                D(row, static_cast<Eigen::Index>(c.x_index(j))) = n2(a, i, j);
            }
        }
    }
    return D;
}

}  // namespace

Eigen::MatrixXd adapted_coframe(const NonlinearConnection& N, const JetPoint& q) {
    const auto& c = N.chart();
    const ArrayEvaluator e1(c.names(), N.n1()), e2(c.names(), N.n2());
    return coframe_rows(c, e1(q.coords), e2(q.coords));
}

VerificationReport verify_adapted_coframe(const NonlinearConnection& N_A,
                                          const NonlinearConnection& N_B,
                                          const InducedTransform& it, const SampleDomain& dom,
                                          double tol) {
    const auto& c = it.chart();
    const std::size_t m = c.m();
    const std::size_t n = c.n();
    const std::size_t D = c.dim();
    const ArrayEvaluator a1(c.names(), N_A.n1()), a2(c.names(), N_A.n2());
    const ArrayEvaluator b1(c.names(), N_B.n1()), b2(c.names(), N_B.n2());
    return sweep("adapted coframe", it, dom, tol, [&](const JetPoint& q, const InducedAt& at) {
        const Eigen::MatrixXd F = frame_matrix(c, at);
        const Eigen::MatrixXd DA = coframe_rows(c, a1(q.coords), a2(q.coords));
        const Eigen::MatrixXd DB = coframe_rows(c, b1(at.image.coords), b2(at.image.coords));
        // P((j,b), (i,a)) = d p~_j^b / d p_i^a
        Eigen::MatrixXd P(static_cast<Eigen::Index>(m * n), static_cast<Eigen::Index>(m * n));
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t b = 0; b < m; ++b) {
                for (std::size_t i = 0; i < n; ++i) {
                    for (std::size_t a = 0; a < m; ++a) {
                        P(static_cast<Eigen::Index>(j * m + b), static_cast<Eigen::Index>(i * m + a)) =
                            at.jx_inv(i, j) * at.jt(b, a);
                    }
                }
            }
        }
        const Eigen::MatrixXd R = DB * F.transpose() - P * DA;
        const Eigen::MatrixXd S = P.partialPivLu().solve(R);

        LawBlock rows{"delta p", {"a", "i", "col"}, NumArray({m, n, D}), NumArray()};
        LawBlock s1{"N1", {"a", "i", "b"}, NumArray(), NumArray({m, n, m})};
        LawBlock s2{"N2", {"a", "i", "j"}, NumArray(), NumArray({m, n, n})};
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t a = 0; a < m; ++a) {
                const auto row = static_cast<Eigen::Index>(i * m + a);
                for (std::size_t col = 0; col < D; ++col) {
                    rows.target(a, i, col) = R(row, static_cast<Eigen::Index>(col));
                }
                // The source residual is minus the discrepancy in N_A's entries.
                for (std::size_t b = 0; b < m; ++b) {
                    s1.source(a, i, b) = S(row, static_cast<Eigen::Index>(c.t_index(b)));
                }
                for (std::size_t j = 0; j < n; ++j) {
                    s2.source(a, i, j) = S(row, static_cast<Eigen::Index>(c.x_index(j)));
                }
            }
        }
        return LawResidual{std::move(rows), std::move(s1), std::move(s2)};
    });
}

}  // namespace polyjet
