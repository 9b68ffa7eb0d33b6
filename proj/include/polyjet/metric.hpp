#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "polyjet/chart.hpp"
#include "polyjet/tensor.hpp"

namespace polyjet {

/// temporal: h_ab(t); spatial: phi_ij(x); spatiotemporal: g_ij(t, x), or
/// g_ij(t, x, p) when p-dependence is allowed (only meaningful for m = 1).
enum class MetricKind { temporal, spatial, spatiotemporal };

const char* to_string(MetricKind kind);

inline constexpr double kMetricDeterminantFloor = 1e-8;
inline constexpr std::size_t kSymbolicInverseMaxDim = 4;

/// Symmetric matrix of expressions with lower indices. Signature is never
/// constrained; only invertibility is checked (see validate).
class Metric {
public:
    /// Throws DimensionError on a wrong shape and ConfigError when a component
    /// uses variables outside the kind's base.
    Metric(MetricKind kind, const JetChart& chart, std::vector<std::vector<Expr>> rows,
           bool p_dependent = false);

    static Metric parse(MetricKind kind, const JetChart& chart,
                        const std::vector<std::vector<std::string>>& rows,
                        const std::map<std::string, double>& constants = {},
                        bool p_dependent = false);
    static Metric identity(MetricKind kind, const JetChart& chart);
    static Metric diagonal(MetricKind kind, const JetChart& chart, const std::vector<Expr>& diag);

    MetricKind kind() const { return kind_; }
    const JetChart& chart() const { return chart_; }
    std::size_t dim() const { return dim_; }
    bool p_dependent() const { return p_dependent_; }

    const Expr& operator()(std::size_t i, std::size_t j) const { return rows_[i][j]; }
    const std::vector<std::vector<Expr>>& rows() const { return rows_; }
    ExprArray array() const;

    /// Variables the metric is differentiated against for Christoffel symbols:
    /// t for temporal, x otherwise.
    std::vector<std::string> base_variables() const;

    Metric scaled(double c) const;

    /// Symmetry under equiv and |det| >= 1e-8 at every sample. Throws
    /// ConfigError (asymmetric) or SingularMetric.
    void validate(const SampleDomain& dom, double tol = kDefaultEquivTolerance) const;

    /// Upper-index inverse by adjugate over determinant; dim <= 4 only
    /// (DimensionError otherwise).
    std::vector<std::vector<Expr>> symbolic_inverse() const;
    Expr determinant() const;

private:
    MetricKind kind_;
    JetChart chart_;
    std::size_t dim_;
    bool p_dependent_;
    std::vector<std::vector<Expr>> rows_;
};

/// Pivoted-LU inverse at a point. Throws SingularMetric (|det| < 1e-8) naming
/// the point, UnboundVariable when the point misses a base variable.
Eigen::MatrixXd inverse_at(const Metric& g, const Assignment& point);

/// Determinant and inverse of a square expression matrix, dim <= 4.
Expr symbolic_determinant(const std::vector<std::vector<Expr>>& a);
std::vector<std::vector<Expr>> symbolic_inverse(const std::vector<std::vector<Expr>>& a);

/// Gamma^k_ij with shape (d, d, d), index order (k, i, j).
class ChristoffelField {
public:
    /// Symbolic field.
    explicit ChristoffelField(ExprArray symbols);
    /// Numeric fallback evaluated through a closure.
    ChristoffelField(std::size_t dim, std::function<NumArray(const Assignment&)> eval);

    std::size_t dim() const { return dim_; }
    bool is_symbolic() const { return symbolic_; }
    /// Throws DimensionError for the numeric fallback.
    const ExprArray& symbols() const;
    const Expr& operator()(std::size_t k, std::size_t i, std::size_t j) const {
        return symbols()(k, i, j);
    }

    NumArray at(const Assignment& point) const;

private:
    std::size_t dim_;
    bool symbolic_;
    ExprArray symbols_;
    std::function<NumArray(const Assignment&)> eval_;
};

/// Gamma^k_ij = (g^kl / 2)(d_j g_li + d_i g_lj - d_l g_ij) with derivatives in
/// the metric's base variables; p is a passive parameter for p-dependent g.
/// Uses the symbolic inverse up to dimension 4, per-point numeric inverses
/// above.
ChristoffelField christoffel(const Metric& g);

/// The metric expressed in chart B: components
/// (d y^c / d y~^a)(d y^d / d y~^b) g_cd(y(y~)), all in chart-B variables.
Metric pullback(const Metric& g, const TransitionMap& tm);

}  // namespace polyjet
