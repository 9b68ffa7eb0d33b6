#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "polyjet/evaluation.hpp"
#include "polyjet/expr.hpp"

namespace polyjet {

/// Local coordinates (t^a, x^i, p_i^a) on the dual 1-jet bundle.
///
/// Indices are 0-based in code; default names are 1-based: t1..tm, x1..xn and
/// p<i>_<a> for the polymomentum p_i^a. Coordinates are laid out as
/// t (m entries), x (n entries), then p in i-major order (p_1^1, p_1^2, ...).
class JetChart {
public:
    JetChart(std::size_t m, std::size_t n);
    JetChart(std::size_t m, std::size_t n, std::vector<std::string> t_names,
             std::vector<std::string> x_names, std::vector<std::string> p_names);

    std::size_t m() const { return m_; }
    std::size_t n() const { return n_; }
    std::size_t dim() const { return names_.size(); }

    const std::string& t(std::size_t a) const { return names_[t_index(a)]; }
    const std::string& x(std::size_t i) const { return names_[x_index(i)]; }
    const std::string& p(std::size_t i, std::size_t a) const { return names_[p_index(i, a)]; }

    Expr tvar(std::size_t a) const { return Expr::variable(t(a)); }
    Expr xvar(std::size_t i) const { return Expr::variable(x(i)); }
    Expr pvar(std::size_t i, std::size_t a) const { return Expr::variable(p(i, a)); }

    std::size_t t_index(std::size_t a) const { return a; }
    std::size_t x_index(std::size_t i) const { return m_ + i; }
    std::size_t p_index(std::size_t i, std::size_t a) const { return m_ + n_ + i * m_ + a; }

    const std::vector<std::string>& names() const { return names_; }
    std::set<std::string> t_names() const;
    std::set<std::string> x_names() const;
    std::set<std::string> p_names() const;
    std::set<std::string> all_names() const;

    /// t and x in [-0.9, 0.9], p in [-2, 2].
    SampleDomain default_domain(std::size_t count = kDefaultSampleCount,
                                std::uint64_t seed = 0) const;

    friend bool operator==(const JetChart&, const JetChart&) = default;

private:
    std::size_t m_;
    std::size_t n_;
    std::vector<std::string> names_;
};

/// Numeric coordinates (t, x, p) laid out as in JetChart.
struct JetPoint {
    std::size_t m = 0;
    std::size_t n = 0;
    std::vector<double> coords;

    JetPoint() = default;
    JetPoint(std::size_t m_, std::size_t n_, std::vector<double> c);

    double t(std::size_t a) const { return coords[a]; }
    double x(std::size_t i) const { return coords[m + i]; }
    double p(std::size_t i, std::size_t a) const { return coords[m + n + i * m + a]; }
    double& p(std::size_t i, std::size_t a) { return coords[m + n + i * m + a]; }
};

/// Numeric 1-jet coordinates (t^a, x^i, x_a^i); v(i, a) holds x_a^i.
struct JetVelocityPoint {
    std::vector<double> t;
    std::vector<double> x;
    Eigen::MatrixXd v;  // n x m
};

/// Chart change t~(t), x~(x) on T x M together with its explicit inverse.
/// Inverse expressions are written in the same variable names, read as the
/// tilde coordinates.
class TransitionMap {
public:
    /// Throws DimensionError / ConfigError on wrong sizes or when a t-map
    /// depends on x (or vice versa).
    TransitionMap(const JetChart& chart, std::vector<Expr> t_forward, std::vector<Expr> t_inverse,
                  std::vector<Expr> x_forward, std::vector<Expr> x_inverse);

    static TransitionMap identity(const JetChart& chart);
    static TransitionMap parse(const JetChart& chart, const std::vector<std::string>& t_forward,
                               const std::vector<std::string>& t_inverse,
                               const std::vector<std::string>& x_forward,
                               const std::vector<std::string>& x_inverse,
                               const std::map<std::string, double>& constants = {});

    const JetChart& chart() const { return chart_; }
    const std::vector<Expr>& t_forward() const { return t_forward_; }
    const std::vector<Expr>& t_inverse() const { return t_inverse_; }
    const std::vector<Expr>& x_forward() const { return x_forward_; }
    const std::vector<Expr>& x_inverse() const { return x_inverse_; }

    TransitionMap inverse() const;
    /// The map "apply this, then next".
    TransitionMap then(const TransitionMap& next) const;

    /// Checks |det| >= 1e-8 for both Jacobians at every sample (SingularJacobian)
    /// and forward o inverse == identity under equiv (ConfigError).
    void validate(const SampleDomain& dom, double tol = kDefaultEquivTolerance) const;

private:
    JetChart chart_;
    std::vector<Expr> t_forward_;
    std::vector<Expr> t_inverse_;
    std::vector<Expr> x_forward_;
    std::vector<Expr> x_inverse_;
};

inline constexpr double kJacobianDeterminantFloor = 1e-8;

/// Everything a transition induces on the dual jet bundle at one point.
struct InducedAt {
    JetPoint image;
    Eigen::MatrixXd jt;      ///< (a, b) = d t~^a / d t^b
    Eigen::MatrixXd jt_inv;  ///< (a, b) = d t^a / d t~^b
    Eigen::MatrixXd jx;      ///< (i, j) = d x~^i / d x^j
    Eigen::MatrixXd jx_inv;  ///< (i, j) = d x^i / d x~^j
    Eigen::MatrixXd dp_dt;   ///< (p~ index, a) = d p~ / d t^a, p~ index = j*m + b
    Eigen::MatrixXd dp_dx;   ///< (p~ index, i) = d p~ / d x^i
};

/// Symbolic and compiled data of the transformation group a TransitionMap
/// induces on (t, x, p). All "source" expressions are in chart-A variables;
/// `to_source()` expresses chart-A coordinates in chart-B variables.
class InducedTransform {
public:
    explicit InducedTransform(const TransitionMap& tm);

    const JetChart& chart() const { return chart_; }
    const TransitionMap& map() const { return map_; }

    /// d t~^a / d t^b, in chart-A t variables.
    const Expr& jt(std::size_t a, std::size_t b) const { return jt_[a * chart_.m() + b]; }
    /// d t^a / d t~^b, in chart-A t variables.
    const Expr& jt_inv(std::size_t a, std::size_t b) const { return jt_inv_[a * chart_.m() + b]; }
    const Expr& jx(std::size_t i, std::size_t j) const { return jx_[i * chart_.n() + j]; }
    const Expr& jx_inv(std::size_t i, std::size_t j) const { return jx_inv_[i * chart_.n() + j]; }
    /// p~_i^a as a function of (t, x, p).
    const Expr& p_tilde(std::size_t i, std::size_t a) const { return p_tilde_[i * chart_.m() + a]; }

    /// Chart-A coordinates as expressions in chart-B variables.
    const std::map<std::string, Expr>& to_source() const { return to_source_; }
    /// Re-expresses a chart-A expression in chart-B variables.
    Expr in_target(const Expr& e) const;

    /// Numeric evaluation at a chart-A point. Throws SingularJacobian.
    InducedAt at(const JetPoint& q) const;

private:
    JetChart chart_;
    TransitionMap map_;
    std::vector<Expr> jt_, jt_inv_, jx_, jx_inv_, p_tilde_;
    std::vector<Expr> dp_dt_, dp_dx_;
    std::map<std::string, Expr> to_source_;
    Program program_;
};

/// x~_a^i = (d x~^i / d x^j)(d t^b / d t~^a) x_b^j.
JetVelocityPoint transform_velocity(const TransitionMap& tm, const JetVelocityPoint& q);

/// p~_i^a = (d x^j / d x~^i)(d t~^a / d t^b) p_j^b.
JetPoint transform_polymomenta(const TransitionMap& tm, const JetPoint& q);
JetPoint transform_polymomenta(const InducedTransform& it, const JetPoint& q);

/// Row alpha holds the natural vector field d/dy^alpha expanded in the tilde
/// frame: entry (alpha, beta) = d y~^beta / d y^alpha.
Eigen::MatrixXd frame_transform(const TransitionMap& tm, const JetPoint& q);
Eigen::MatrixXd frame_transform(const InducedTransform& it, const JetPoint& q);
Eigen::MatrixXd frame_matrix(const JetChart& chart, const InducedAt& at);

/// Row alpha holds dy^alpha expanded in the tilde coframe: entry
/// (alpha, beta) = d y^alpha / d y~^beta. Built from the inverse transition at
/// the image point, independently of frame_transform.
Eigen::MatrixXd coframe_transform(const TransitionMap& tm, const JetPoint& q);

}  // namespace polyjet
