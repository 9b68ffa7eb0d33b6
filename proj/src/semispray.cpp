#include "polyjet/semispray.hpp"

#include "polyjet/error.hpp"

namespace polyjet {

const char* to_string(SemisprayKind kind) {
    return kind == SemisprayKind::temporal ? "temporal" : "spatial";
}

std::vector<IndexSlot> semispray_slots() {
    return {IndexSlot::upper_t("b", 1), IndexSlot::lower_x("j", 0), IndexSlot::lower_x("i")};
}

Semispray::Semispray(SemisprayKind kind, const JetChart& chart, ExprArray components)
    : kind_(kind), chart_(chart), components_(std::move(components)) {
    const std::vector<std::size_t> shape{chart_.m(), chart_.n(), chart_.n()};
    if (components_.shape() != shape) {
        throw DimensionError("semispray components need shape (m, n, n)");
    }
}

DTensorField Semispray::as_dtensor() const {
    return DTensorField(chart_, semispray_slots(), components_);
}

Semispray Semispray::plus(const DTensorField& T) const {
    return Semispray(kind_, chart_, (as_dtensor() + T).components());
}

Semispray canonical_temporal(const Metric& h) {
    if (h.kind() != MetricKind::temporal) throw ConfigError("temporal semispray needs h");
    const auto& c = h.chart();
    const std::size_t m = c.m();
    const std::size_t n = c.n();
    const auto kappa = christoffel(h);
    ExprArray G({m, n, n});
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < n; ++k) {
                std::vector<Expr> terms;
                for (std::size_t b = 0; b < m; ++b) {
                    for (std::size_t cc = 0; cc < m; ++cc) {
                        const Expr& K = kappa(a, b, cc);
                        if (!K.is_zero()) terms.push_back(K * c.pvar(j, b) * c.pvar(k, cc));
                    }
                }
                G(a, j, k) = Expr(0.5) * sum(terms);
            }
        }
    }
    return Semispray(SemisprayKind::temporal, c, std::move(G));
}

Semispray canonical_spatial(const Metric& phi) {
    if (phi.kind() == MetricKind::temporal) throw ConfigError("spatial semispray needs a spatial metric");
    const auto& c = phi.chart();
    const std::size_t m = c.m();
    const std::size_t n = c.n();
    const auto gamma = christoffel(phi);
    ExprArray G({m, n, n});
    for (std::size_t b = 0; b < m; ++b) {
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < n; ++k) {
                std::vector<Expr> terms;
                for (std::size_t i = 0; i < n; ++i) {
                    const Expr& g = gamma(i, j, k);
                    if (!g.is_zero()) terms.push_back(g * c.pvar(i, b));
                }
                G(b, j, k) = Expr(-0.5) * sum(terms);
            }
        }
    }
    return Semispray(SemisprayKind::spatial, c, std::move(G));
}

Semispray canonical(SemisprayKind kind, const Metric& metric) {
    return kind == SemisprayKind::temporal ? canonical_temporal(metric) : canonical_spatial(metric);
}

VerificationReport verify_semispray_law(const Semispray& S_A, const Semispray& S_B,
                                        const InducedTransform& it, const SampleDomain& dom,
                                        double tol) {
    if (S_A.kind() != S_B.kind()) throw ConfigError("semispray kinds differ");
    const auto& c = it.chart();
    const std::size_t m = c.m();
    const std::size_t n = c.n();
    const auto slots = semispray_slots();
    const ArrayEvaluator eval_a(c.names(), S_A.components());
    const ArrayEvaluator eval_b(c.names(), S_B.components());
    const bool temporal = S_A.kind() == SemisprayKind::temporal;
    const std::string name = std::string(to_string(S_A.kind())) + " semispray law";
    return sweep(name, it, dom, tol, [&](const JetPoint& q, const InducedAt& at) {
        NumArray target = apply_slot_factors(slots, at, eval_a(q.coords));
        const NumArray b = eval_b(at.image.coords);
        for (std::size_t cc = 0; cc < m; ++cc) {
            for (std::size_t k = 0; k < n; ++k) {
                for (std::size_t r = 0; r < n; ++r) {
                    double corr = 0;
                    for (std::size_t i = 0; i < n; ++i) {
                        const double bbar = at.jx_inv(i, r);
                        if (temporal) {
                            for (std::size_t a = 0; a < m; ++a) {
                                corr += bbar * at.dp_dt(k * m + cc, a) * q.p(i, a);
                            }
                        } else {
                            corr += bbar * at.dp_dx(k * m + cc, i);
                        }
                    }
                    target(cc, k, r) += -0.5 * corr - b(cc, k, r);
                }
            }
        }
        NumArray source = apply_slot_factors(slots, at, target, true);
        return LawResidual{{"G", {"b", "j", "i"}, std::move(target), std::move(source)}};
    });
}

VerificationReport verify_semispray_law(const Semispray& S_A, const Semispray& S_B,
                                        const TransitionMap& tm, const SampleDomain& dom,
                                        double tol) {
    return verify_semispray_law(S_A, S_B, InducedTransform(tm), dom, tol);
}

bool check_characterization(const DTensorField& first_block, SemisprayKind kind, const Metric& h,
                            const SampleDomain& dom, double tol) {
    const auto& c = h.chart();
    const std::size_t m = c.m();
    const std::size_t n = c.n();
    const std::size_t lead = kind == SemisprayKind::temporal ? m : n;
    const std::vector<std::size_t> shape{lead, n};
    if (first_block.components().shape() != shape) {
        throw DimensionError("leading block has the wrong shape");
    }
    const auto builtins = builtin_dtensors(h);
    const auto& J = builtins.normalization.components();
    const auto& L = builtins.polymomentum_liouville.components();
    const auto& G = first_block.components();
    for (std::size_t u = 0; u < lead; ++u) {
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t a = 0; a < m; ++a) {
                for (std::size_t b = 0; b < m; ++b) {
                    std::vector<Expr> terms;
                    for (std::size_t i = 0; i < n; ++i) terms.push_back(J(i, a, b, j) * G(u, i));
                    const Expr rhs = kind == SemisprayKind::temporal ? L(u, j, a, b) : J(u, a, b, j);
                    if (!equiv(sum(terms), rhs, dom, tol)) return false;
                }
            }
        }
    }
    return true;
}

DTensorField decompose(const Semispray& S, const Metric& metric) {
    return S.as_dtensor() - canonical(S.kind(), metric).as_dtensor();
}

}  // namespace polyjet
