#include "polyjet/metric.hpp"

#include <cmath>
#include <sstream>

#include "polyjet/calculus.hpp"
#include "polyjet/error.hpp"
#include "polyjet/parser.hpp"

namespace polyjet {

namespace {

using Rows = std::vector<std::vector<Expr>>;

std::set<std::string> allowed_for(MetricKind kind, const JetChart& chart, bool p_dependent) {
    switch (kind) {
        case MetricKind::temporal: return chart.t_names();
        case MetricKind::spatial: return chart.x_names();
        case MetricKind::spatiotemporal: {
            auto s = chart.t_names();
            s.merge(chart.x_names());
            if (p_dependent) s.merge(chart.p_names());
            return s;
        }
    }
    return {};
}

Rows minor(const Rows& a, std::size_t row, std::size_t col) {
    Rows out;
    for (std::size_t r = 0; r < a.size(); ++r) {
        if (r == row) continue;
        std::vector<Expr> line;
        for (std::size_t c = 0; c < a.size(); ++c) {
            if (c != col) line.push_back(a[r][c]);
        }
        out.push_back(std::move(line));
    }
    return out;
}

std::string describe(const Assignment& point) {
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, v] : point) {
        if (!first) os << ", ";
        first = false;
        os << k << "=" << format_number(v);
    }
    return os.str();
}

}  // namespace

const char* to_string(MetricKind kind) {
    switch (kind) {
        case MetricKind::temporal: return "temporal";
        case MetricKind::spatial: return "spatial";
        case MetricKind::spatiotemporal: return "spatiotemporal";
    }
    return "?";
}

Metric::Metric(MetricKind kind, const JetChart& chart, Rows rows, bool p_dependent)
    : kind_(kind),
      chart_(chart),
      dim_(kind == MetricKind::temporal ? chart.m() : chart.n()),
      p_dependent_(p_dependent),
      rows_(std::move(rows)) {
    if (p_dependent_ && kind_ != MetricKind::spatiotemporal) {
        throw ConfigError("only a spatiotemporal metric may depend on p");
    }
    if (rows_.size() != dim_) {
        throw DimensionError(std::string(to_string(kind_)) + " metric needs " +
                             std::to_string(dim_) + " rows, got " + std::to_string(rows_.size()));
    }
    for (const auto& r : rows_) {
        if (r.size() != dim_) {
            throw DimensionError(std::string(to_string(kind_)) + " metric rows need " +
                                 std::to_string(dim_) + " entries");
        }
    }
    const auto allowed = allowed_for(kind_, chart_, p_dependent_);
    for (const auto& r : rows_) {
        for (const auto& e : r) {
            for (const auto& v : free_variables(e)) {
                if (!allowed.count(v)) {
                    throw ConfigError(std::string(to_string(kind_)) + " metric may not depend on '" +
                                      v + "'");
                }
            }
        }
    }
}

Metric Metric::parse(MetricKind kind, const JetChart& chart,
                     const std::vector<std::vector<std::string>>& rows,
                     const std::map<std::string, double>& constants, bool p_dependent) {
    // Parse against the full chart so a stray variable reports the kind rule,
    // not an unknown identifier.
    const auto vars = chart.all_names();
    Rows out;
    for (const auto& r : rows) {
        std::vector<Expr> line;
        for (const auto& s : r) line.push_back(parse_expr(s, vars, constants));
        out.push_back(std::move(line));
    }
    return Metric(kind, chart, std::move(out), p_dependent);
}

Metric Metric::identity(MetricKind kind, const JetChart& chart) {
    const std::size_t d = kind == MetricKind::temporal ? chart.m() : chart.n();
    return diagonal(kind, chart, std::vector<Expr>(d, Expr(1.0)));
}

Metric Metric::diagonal(MetricKind kind, const JetChart& chart, const std::vector<Expr>& diag) {
    Rows rows(diag.size(), std::vector<Expr>(diag.size()));
    for (std::size_t i = 0; i < diag.size(); ++i) rows[i][i] = diag[i];
    return Metric(kind, chart, std::move(rows));
}

ExprArray Metric::array() const {
    ExprArray a({dim_, dim_});
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = 0; j < dim_; ++j) a(i, j) = rows_[i][j];
    }
    return a;
}

std::vector<std::string> Metric::base_variables() const {
    std::vector<std::string> out;
    if (kind_ == MetricKind::temporal) {
        for (std::size_t a = 0; a < chart_.m(); ++a) out.push_back(chart_.t(a));
    } else {
        for (std::size_t i = 0; i < chart_.n(); ++i) out.push_back(chart_.x(i));
    }
    return out;
}

Metric Metric::scaled(double c) const {
    Rows rows = rows_;
    for (auto& r : rows) {
        for (auto& e : r) e = Expr(c) * e;
    }
    return Metric(kind_, chart_, std::move(rows), p_dependent_);
}

void Metric::validate(const SampleDomain& dom, double tol) const {
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = i + 1; j < dim_; ++j) {
            const auto d = compare(rows_[i][j], rows_[j][i], dom);
            if (d.max_scaled > tol) {
                throw ConfigError(std::string(to_string(kind_)) + " metric is not symmetric: (" +
                                  std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                  ") differs from its transpose by " + format_number(d.max_scaled));
            }
        }
    }
    const auto vars = dom.variables();
    for (const auto& pt : dom.points()) {
        Assignment a;
        for (std::size_t k = 0; k < vars.size(); ++k) a.emplace(vars[k], pt[k]);
        inverse_at(*this, a);
    }
}

Expr Metric::determinant() const { return symbolic_determinant(rows_); }

Rows Metric::symbolic_inverse() const { return polyjet::symbolic_inverse(rows_); }

Expr symbolic_determinant(const Rows& a) {
    const std::size_t d = a.size();
    if (d > kSymbolicInverseMaxDim) {
        throw DimensionError("symbolic determinant is limited to dimension " +
                             std::to_string(kSymbolicInverseMaxDim));
    }
    if (d == 0) return Expr(1.0);
    if (d == 1) return a[0][0];
    if (d == 2) return a[0][0] * a[1][1] - a[0][1] * a[1][0];
    std::vector<Expr> terms;
    for (std::size_t c = 0; c < d; ++c) {
        if (a[0][c].is_zero()) continue;
        const Expr cof = symbolic_determinant(minor(a, 0, c));
        terms.push_back(c % 2 == 0 ? a[0][c] * cof : -(a[0][c] * cof));
    }
    return sum(terms);
}

Rows symbolic_inverse(const Rows& a) {
    const std::size_t d = a.size();
    const Expr det = symbolic_determinant(a);
    if (det.is_zero()) throw SingularMetric("matrix is identically singular");
    Rows inv(d, std::vector<Expr>(d));
    if (d == 1) {
        inv[0][0] = Expr(1.0) / det;
        return inv;
    }
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            // inv_ij = (-1)^(i+j) M_ji / det
            const Expr cof = symbolic_determinant(minor(a, j, i));
            inv[i][j] = ((i + j) % 2 == 0 ? cof : -cof) / det;
        }
    }
    return inv;
}

Eigen::MatrixXd inverse_at(const Metric& g, const Assignment& point) {
    const std::size_t d = g.dim();
    Eigen::MatrixXd M(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = evaluate(g(i, j), point);
        }
    }
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    const double det = lu.determinant();
    if (!(std::abs(det) >= kMetricDeterminantFloor)) {
        throw SingularMetric(std::string(to_string(g.kind())) + " metric is singular (det = " +
                             format_number(det) + ") at " + describe(point));
    }
    return lu.inverse();
}

ChristoffelField::ChristoffelField(ExprArray symbols)
    : dim_(symbols.shape().empty() ? 0 : symbols.shape()[0]),
      symbolic_(true),
      symbols_(std::move(symbols)) {}

ChristoffelField::ChristoffelField(std::size_t dim, std::function<NumArray(const Assignment&)> eval)
    : dim_(dim), symbolic_(false), eval_(std::move(eval)) {}

const ExprArray& ChristoffelField::symbols() const {
    if (!symbolic_) {
        throw DimensionError("Christoffel symbols of dimension " + std::to_string(dim_) +
                             " are only available numerically");
    }
    return symbols_;
}

NumArray ChristoffelField::at(const Assignment& point) const {
    if (!symbolic_) return eval_(point);
    return symbols_.map([&](const Expr& e) { return evaluate(e, point); });
}

ChristoffelField christoffel(const Metric& g) {
    const std::size_t d = g.dim();
    const auto vars = g.base_variables();
    // dg(l, i, j) = d g_ij / d v_l
    ExprArray dg({d, d, d});
    for (std::size_t l = 0; l < d; ++l) {
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) dg(l, i, j) = differentiate(g(i, j), vars[l]);
        }
    }
    // lowered(l, i, j) = (d_j g_li + d_i g_lj - d_l g_ij) / 2
    ExprArray lowered({d, d, d});
    bool flat = true;
    for (std::size_t l = 0; l < d; ++l) {
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                lowered(l, i, j) = Expr(0.5) * (dg(j, l, i) + dg(i, l, j) - dg(l, i, j));
                flat = flat && lowered(l, i, j).is_zero();
            }
        }
    }
    if (flat) return ChristoffelField(ExprArray({d, d, d}));

    if (d <= kSymbolicInverseMaxDim) {
        const auto inv = g.symbolic_inverse();
        ExprArray gamma({d, d, d});
        for (std::size_t k = 0; k < d; ++k) {
            for (std::size_t i = 0; i < d; ++i) {
                for (std::size_t j = i; j < d; ++j) {
                    std::vector<Expr> terms;
                    for (std::size_t l = 0; l < d; ++l) terms.push_back(inv[k][l] * lowered(l, i, j));
                    gamma(k, i, j) = sum(terms);
                    gamma(k, j, i) = gamma(k, i, j);
                }
            }
        }
        return ChristoffelField(std::move(gamma));
    }
    return ChristoffelField(d, [g, lowered, d](const Assignment& point) {
        const Eigen::MatrixXd inv = inverse_at(g, point);
        const NumArray low = lowered.map([&](const Expr& e) { return evaluate(e, point); });
        NumArray gamma({d, d, d});
        for (std::size_t k = 0; k < d; ++k) {
            for (std::size_t i = 0; i < d; ++i) {
                for (std::size_t j = 0; j < d; ++j) {
                    double s = 0;
                    for (std::size_t l = 0; l < d; ++l) {
                        s += inv(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) *
                             low(l, i, j);
                    }
                    gamma(k, i, j) = s;
                }
            }
        }
        return gamma;
    });
}

Metric pullback(const Metric& g, const TransitionMap& tm) {
    const auto& chart = g.chart();
    const std::size_t d = g.dim();
    const bool temporal = g.kind() == MetricKind::temporal;
    const auto& inv = temporal ? tm.t_inverse() : tm.x_inverse();
    const auto vars = g.base_variables();

    std::map<std::string, Expr> back;
    if (g.p_dependent()) {
        back = InducedTransform(tm).to_source();
    } else {
        for (std::size_t a = 0; a < chart.m(); ++a) back.emplace(chart.t(a), tm.t_inverse()[a]);
        for (std::size_t i = 0; i < chart.n(); ++i) back.emplace(chart.x(i), tm.x_inverse()[i]);
    }
    // J(c, a) = d y^c / d y~^a, in chart-B variables.
    Rows J(d, std::vector<Expr>(d));
    for (std::size_t c = 0; c < d; ++c) {
        for (std::size_t a = 0; a < d; ++a) J[c][a] = differentiate(inv[c], vars[a]);
    }
    Rows moved(d, std::vector<Expr>(d));
    for (std::size_t c = 0; c < d; ++c) {
        for (std::size_t e = 0; e < d; ++e) moved[c][e] = substitute(g(c, e), back);
    }
    Rows out(d, std::vector<Expr>(d));
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = a; b < d; ++b) {
            std::vector<Expr> terms;
            for (std::size_t c = 0; c < d; ++c) {
                for (std::size_t e = 0; e < d; ++e) {
                    if (moved[c][e].is_zero()) continue;
                    terms.push_back(J[c][a] * J[e][b] * moved[c][e]);
                }
            }
            out[a][b] = sum(terms);
            out[b][a] = out[a][b];
        }
    }
    return Metric(g.kind(), chart, std::move(out), g.p_dependent());
}

}  // namespace polyjet
