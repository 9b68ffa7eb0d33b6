#include "polyjet/dtensor.hpp"

#include "polyjet/calculus.hpp"
#include "polyjet/error.hpp"

namespace polyjet {

namespace {

std::size_t axis_size(const JetChart& chart, const IndexSlot& s) {
    return s.family == Family::temporal ? chart.m() : chart.n();
}

// out[.., a, ..] = sum_b M(a, b) in[.., b, ..] along `axis`.
template <typename T, typename M>
Tensor<T> apply_axis(const Tensor<T>& in, std::size_t axis, const M& mat) {
    Tensor<T> out(in.shape());
    const std::size_t d = in.shape()[axis];
    std::size_t inner = 1;
    for (std::size_t k = axis + 1; k < in.rank(); ++k) inner *= in.shape()[k];
    const std::size_t outer = in.size() / (d * inner);
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t i = 0; i < inner; ++i) {
            for (std::size_t a = 0; a < d; ++a) {
                if constexpr (std::is_same_v<T, double>) {
                    double s = 0;
                    for (std::size_t b = 0; b < d; ++b) s += mat(a, b) * in[(o * d + b) * inner + i];
                    out[(o * d + a) * inner + i] = s;
                } else {
                    std::vector<Expr> terms;
                    for (std::size_t b = 0; b < d; ++b) {
                        const Expr& v = in[(o * d + b) * inner + i];
                        if (!v.is_zero()) terms.push_back(mat(a, b) * v);
                    }
                    out[(o * d + a) * inner + i] = sum(terms);
                }
            }
        }
    }
    return out;
}

void require_same_slots(const DTensorField& a, const DTensorField& b) {
    if (!(a.chart() == b.chart()) || a.slots() != b.slots()) {
        throw DimensionError("d-tensor slot signatures differ");
    }
}

}  // namespace

DTensorField::DTensorField(const JetChart& chart, std::vector<IndexSlot> slots,
                           ExprArray components)
    : chart_(chart), slots_(std::move(slots)), components_(std::move(components)) {
    if (slots_.empty() && components_.size() == 1 && components_.rank() == 0) {
        // scalar
    } else if (components_.shape() != shape_for(chart_, slots_)) {
        throw DimensionError("d-tensor component array does not match its slots");
    }
    for (std::size_t k = 0; k < slots_.size(); ++k) {
        const auto& s = slots_[k];
        if (!s.partner) continue;
        const std::size_t p = *s.partner;
        if (p >= slots_.size() || p == k || slots_[p].partner != k) {
            throw ConfigError("doubled index slot " + std::to_string(k) + " has no mutual partner");
        }
        if (slots_[p].family == s.family || slots_[p].variance == s.variance) {
            throw ConfigError("doubled index pair must join a spatial and a temporal slot of "
                              "opposite variance");
        }
    }
}

DTensorField DTensorField::scalar(const JetChart& chart, const Expr& value) {
    ExprArray c(std::vector<std::size_t>{});
    c[0] = value;
    return DTensorField(chart, {}, std::move(c));
}

DTensorField DTensorField::zeros(const JetChart& chart, std::vector<IndexSlot> slots) {
    auto shape = shape_for(chart, slots);
    return DTensorField(chart, std::move(slots), ExprArray(std::move(shape)));
}

std::vector<std::size_t> DTensorField::shape_for(const JetChart& chart,
                                                 const std::vector<IndexSlot>& slots) {
    std::vector<std::size_t> shape;
    for (const auto& s : slots) shape.push_back(axis_size(chart, s));
    return shape;
}

std::vector<std::string> DTensorField::letters() const {
    std::vector<std::string> out;
    for (const auto& s : slots_) out.push_back(s.letter);
    return out;
}

DTensorField operator+(const DTensorField& a, const DTensorField& b) {
    require_same_slots(a, b);
    ExprArray c = a.components_;
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = c[k] + b.components_[k];
    return DTensorField(a.chart_, a.slots_, std::move(c));
}

DTensorField operator-(const DTensorField& a, const DTensorField& b) {
    require_same_slots(a, b);
    ExprArray c = a.components_;
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = c[k] - b.components_[k];
    return DTensorField(a.chart_, a.slots_, std::move(c));
}

DTensorField DTensorField::scaled(const Expr& c) const {
    return DTensorField(chart_, slots_, components_.map([&](const Expr& e) { return c * e; }));
}

NumArray apply_slot_factors(const std::vector<IndexSlot>& slots, const InducedAt& at,
                            const NumArray& values, bool inverse) {
    NumArray out = values;
    for (std::size_t k = 0; k < slots.size(); ++k) {
        const auto& s = slots[k];
        const bool t = s.family == Family::temporal;
        const Eigen::MatrixXd& fwd = t ? at.jt : at.jx;
        const Eigen::MatrixXd& bwd = t ? at.jt_inv : at.jx_inv;
        const bool up = s.variance == Variance::upper;
        // Upper: new = J old. Lower: new = (J^-1)^T old.
        const Eigen::MatrixXd& J = inverse ? bwd : fwd;
        const Eigen::MatrixXd& Jinv = inverse ? fwd : bwd;
        if (up) {
            out = apply_axis(out, k, [&](std::size_t a, std::size_t b) {
                return J(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
            });
        } else {
            out = apply_axis(out, k, [&](std::size_t a, std::size_t b) {
                return Jinv(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a));
            });
        }
    }
    return out;
}

NumArray transform_dtensor(const DTensorField& T, const InducedTransform& it, const JetPoint& q) {
    const auto at = it.at(q);
    const ArrayEvaluator eval(T.chart().names(), T.components());
    return apply_slot_factors(T.slots(), at, eval(q.coords));
}

NumArray transform_dtensor(const DTensorField& T, const TransitionMap& tm, const JetPoint& q) {
    return transform_dtensor(T, InducedTransform(tm), q);
}

VerificationReport verify_dtensor_law(const DTensorField& T_A, const DTensorField& T_B,
                                      const InducedTransform& it, const SampleDomain& dom,
                                      double tol) {
    if (T_A.slots() != T_B.slots()) throw DimensionError("d-tensor slot signatures differ");
    const auto& names = it.chart().names();
    const ArrayEvaluator eval_a(names, T_A.components());
    const ArrayEvaluator eval_b(names, T_B.components());
    const auto letters = T_A.letters();
    return sweep("d-tensor law", it, dom, tol, [&](const JetPoint& q, const InducedAt& at) {
        const NumArray b = eval_b(at.image.coords);
        NumArray target = apply_slot_factors(T_A.slots(), at, eval_a(q.coords));
        for (std::size_t k = 0; k < target.size(); ++k) target[k] -= b[k];
        NumArray source = apply_slot_factors(T_A.slots(), at, target, true);
        return LawResidual{{"", letters, std::move(target), std::move(source)}};
    });
}

VerificationReport verify_dtensor_law(const DTensorField& T_A, const DTensorField& T_B,
                                      const TransitionMap& tm, const SampleDomain& dom,
                                      double tol) {
    return verify_dtensor_law(T_A, T_B, InducedTransform(tm), dom, tol);
}

BuiltinDTensors builtin_dtensors(const Metric& h) {
    if (h.kind() != MetricKind::temporal) throw ConfigError("builtin d-tensors need a temporal metric");
    const auto& c = h.chart();
    const std::size_t m = c.m();
    const std::size_t n = c.n();

    ExprArray cs({m, n});
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t i = 0; i < n; ++i) cs(a, i) = c.pvar(i, a);
    }
    ExprArray L({m, n, m, m});
    for (std::size_t cc = 0; cc < m; ++cc) {
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t a = 0; a < m; ++a) {
                for (std::size_t b = 0; b < m; ++b) L(cc, j, a, b) = h(a, b) * c.pvar(j, cc);
            }
        }
    }
    ExprArray J({n, m, m, n});
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < m; ++a) {
            for (std::size_t b = 0; b < m; ++b) J(i, a, b, i) = h(a, b);
        }
    }
    using S = IndexSlot;
    return {
        DTensorField(c, {S::upper_t("a", 1), S::lower_x("i", 0)}, std::move(cs)),
        DTensorField(c, {S::upper_t("c", 1), S::lower_x("j", 0), S::lower_t("a"), S::lower_t("b")},
                     std::move(L)),
        DTensorField(c, {S::upper_x("i", 1), S::lower_t("a", 0), S::lower_t("b"), S::lower_x("j")},
                     std::move(J)),
    };
}

DTensorField pushforward(const DTensorField& T, const InducedTransform& it) {
    const auto& c = it.chart();
    const auto& tm = it.map();
    const std::size_t m = c.m();
    const std::size_t n = c.n();
    using Rows = std::vector<std::vector<Expr>>;
    Rows A(m, std::vector<Expr>(m)), Abar(m, std::vector<Expr>(m));
    Rows B(n, std::vector<Expr>(n)), Bbar(n, std::vector<Expr>(n));
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < m; ++b) {
            A[a][b] = it.in_target(it.jt(a, b));
            Abar[a][b] = differentiate(tm.t_inverse()[a], c.t(b));
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            B[i][j] = it.in_target(it.jx(i, j));
            Bbar[i][j] = differentiate(tm.x_inverse()[i], c.x(j));
        }
    }
    ExprArray out = T.components().map([&](const Expr& e) { return it.in_target(e); });
    for (std::size_t k = 0; k < T.slots().size(); ++k) {
        const auto& s = T.slots()[k];
        const bool t = s.family == Family::temporal;
        const Rows& fwd = t ? A : B;
        const Rows& bwd = t ? Abar : Bbar;
        if (s.variance == Variance::upper) {
            out = apply_axis(out, k, [&](std::size_t a, std::size_t b) { return fwd[a][b]; });
        } else {
            out = apply_axis(out, k, [&](std::size_t a, std::size_t b) { return bwd[b][a]; });
        }
    }
    return DTensorField(c, T.slots(), std::move(out));
}

DTensorField contract_pairs(const DTensorField& T, std::size_t t_slot, const DTensorField& U,
                            std::size_t u_slot) {
    if (!(T.chart() == U.chart())) throw DimensionError("cannot contract across charts");
    const auto& ts = T.slots();
    const auto& us = U.slots();
    if (t_slot >= ts.size() || u_slot >= us.size() || !ts[t_slot].partner || !us[u_slot].partner) {
        throw ConfigError("contraction needs a doubled slot on each side");
    }
    const std::size_t t2 = *ts[t_slot].partner;
    const std::size_t u_a = us[u_slot].family == ts[t_slot].family ? u_slot : *us[u_slot].partner;
    const std::size_t u_b = u_a == u_slot ? *us[u_slot].partner : u_slot;
    if (us[u_a].variance == ts[t_slot].variance || us[u_b].variance == ts[t2].variance) {
        throw ConfigError("contracted slots must have opposite variances");
    }

    // Result slots and a map from old slot index to new.
    std::vector<IndexSlot> slots;
    std::vector<std::ptrdiff_t> t_new(ts.size(), -1), u_new(us.size(), -1);
    for (std::size_t k = 0; k < ts.size(); ++k) {
        if (k == t_slot || k == t2) continue;
        t_new[k] = static_cast<std::ptrdiff_t>(slots.size());
        slots.push_back(ts[k]);
    }
    for (std::size_t k = 0; k < us.size(); ++k) {
        if (k == u_a || k == u_b) continue;
        u_new[k] = static_cast<std::ptrdiff_t>(slots.size());
        slots.push_back(us[k]);
    }
    auto remap = [&](std::optional<std::size_t> p, const std::vector<std::ptrdiff_t>& map)
        -> std::optional<std::size_t> {
        if (!p || map[*p] < 0) return std::nullopt;
        return static_cast<std::size_t>(map[*p]);
    };
    {
        std::size_t k = 0;
        for (std::size_t o = 0; o < ts.size(); ++o) {
            if (t_new[o] >= 0) slots[k++].partner = remap(ts[o].partner, t_new);
        }
        for (std::size_t o = 0; o < us.size(); ++o) {
            if (u_new[o] >= 0) slots[k++].partner = remap(us[o].partner, u_new);
        }
    }

    const auto shape = DTensorField::shape_for(T.chart(), slots);
    ExprArray out(shape);
    const std::size_t d1 = axis_size(T.chart(), ts[t_slot]);
    const std::size_t d2 = axis_size(T.chart(), ts[t2]);
    std::vector<std::size_t> ti(ts.size()), ui(us.size());
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        const auto idx = slots.empty() ? std::vector<std::size_t>{} : out.unravel(flat);
        for (std::size_t k = 0; k < ts.size(); ++k) {
            if (t_new[k] >= 0) ti[k] = idx[static_cast<std::size_t>(t_new[k])];
        }
        for (std::size_t k = 0; k < us.size(); ++k) {
            if (u_new[k] >= 0) ui[k] = idx[static_cast<std::size_t>(u_new[k])];
        }
        std::vector<Expr> terms;
        for (std::size_t x = 0; x < d1; ++x) {
            for (std::size_t y = 0; y < d2; ++y) {
                ti[t_slot] = x;
                ti[t2] = y;
                ui[u_a] = x;
                ui[u_b] = y;
                const Expr& a = T.components().at(ti);
                const Expr& b = U.components().at(ui);
                if (!a.is_zero() && !b.is_zero()) terms.push_back(a * b);
            }
        }
        out[flat] = sum(terms);
    }
    return DTensorField(T.chart(), std::move(slots), std::move(out));
}

}  // namespace polyjet
