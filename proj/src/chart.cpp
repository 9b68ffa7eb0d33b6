#include "polyjet/chart.hpp"

#include <cmath>
#include <sstream>

#include "polyjet/calculus.hpp"
#include "polyjet/error.hpp"
#include "polyjet/parser.hpp"

namespace polyjet {

namespace {

std::vector<std::string> numbered(const char* prefix, std::size_t count) {
    std::vector<std::string> out;
    for (std::size_t k = 1; k <= count; ++k) out.push_back(prefix + std::to_string(k));
    return out;
}

std::string describe_point(const JetChart& chart, std::span<const double> coords) {
    std::ostringstream os;
    for (std::size_t k = 0; k < coords.size(); ++k) {
        if (k) os << ", ";
        os << chart.names()[k] << "=" << format_number(coords[k]);
    }
    return os.str();
}

void require_only(const std::vector<Expr>& exprs, const std::set<std::string>& allowed,
                  const char* what) {
    for (const auto& e : exprs) {
        for (const auto& v : free_variables(e)) {
            if (!allowed.count(v)) {
                throw ConfigError(std::string(what) + " may not depend on '" + v + "'");
            }
        }
    }
}

std::map<std::string, Expr> bind(const std::vector<std::string>& names,
                                 const std::vector<Expr>& values) {
    std::map<std::string, Expr> out;
    for (std::size_t k = 0; k < names.size(); ++k) out.emplace(names[k], values[k]);
    return out;
}

std::vector<std::string> slice(const std::vector<std::string>& names, std::size_t from,
                               std::size_t count) {
    return {names.begin() + static_cast<std::ptrdiff_t>(from),
            names.begin() + static_cast<std::ptrdiff_t>(from + count)};
}

std::vector<Expr> substitute_all(const std::vector<Expr>& exprs,
                                 const std::map<std::string, Expr>& b) {
    std::vector<Expr> out;
    out.reserve(exprs.size());
    for (const auto& e : exprs) out.push_back(substitute(e, b));
    return out;
}

}  // namespace

JetChart::JetChart(std::size_t m, std::size_t n) : m_(m), n_(n) {
    if (m < 1 || n < 1) throw DimensionError("jet chart needs m >= 1 and n >= 1");
    names_ = numbered("t", m);
    for (auto& s : numbered("x", n)) names_.push_back(std::move(s));
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t a = 1; a <= m; ++a) {
            names_.push_back("p" + std::to_string(i) + "_" + std::to_string(a));
        }
    }
}

JetChart::JetChart(std::size_t m, std::size_t n, std::vector<std::string> t_names,
                   std::vector<std::string> x_names, std::vector<std::string> p_names)
    : m_(m), n_(n) {
    if (m < 1 || n < 1) throw DimensionError("jet chart needs m >= 1 and n >= 1");
    if (t_names.size() != m || x_names.size() != n || p_names.size() != m * n) {
        throw DimensionError("jet chart name lists do not match (m, n)");
    }
    names_ = std::move(t_names);
    names_.insert(names_.end(), x_names.begin(), x_names.end());
    names_.insert(names_.end(), p_names.begin(), p_names.end());
    std::set<std::string> seen;
    for (const auto& s : names_) {
        if (!seen.insert(s).second) throw ConfigError("duplicate coordinate name '" + s + "'");
    }
}

std::set<std::string> JetChart::t_names() const {
    return {names_.begin(), names_.begin() + static_cast<std::ptrdiff_t>(m_)};
}

std::set<std::string> JetChart::x_names() const {
    return {names_.begin() + static_cast<std::ptrdiff_t>(m_),
            names_.begin() + static_cast<std::ptrdiff_t>(m_ + n_)};
}

std::set<std::string> JetChart::p_names() const {
    return {names_.begin() + static_cast<std::ptrdiff_t>(m_ + n_), names_.end()};
}

std::set<std::string> JetChart::all_names() const { return {names_.begin(), names_.end()}; }

SampleDomain JetChart::default_domain(std::size_t count, std::uint64_t seed) const {
    std::vector<Interval> iv;
    for (std::size_t k = 0; k < names_.size(); ++k) {
        const double r = k < m_ + n_ ? 0.9 : 2.0;
        iv.push_back({names_[k], -r, r});
    }
    return SampleDomain(std::move(iv), count, seed);
}

JetPoint::JetPoint(std::size_t m_, std::size_t n_, std::vector<double> c)
    : m(m_), n(n_), coords(std::move(c)) {
    if (coords.size() != m + n + m * n) {
        throw DimensionError("jet point needs " + std::to_string(m + n + m * n) +
                             " coordinates, got " + std::to_string(coords.size()));
    }
}

// ---------------------------------------------------------------------------

TransitionMap::TransitionMap(const JetChart& chart, std::vector<Expr> t_forward,
                             std::vector<Expr> t_inverse, std::vector<Expr> x_forward,
                             std::vector<Expr> x_inverse)
    : chart_(chart),
      t_forward_(std::move(t_forward)),
      t_inverse_(std::move(t_inverse)),
      x_forward_(std::move(x_forward)),
      x_inverse_(std::move(x_inverse)) {
    if (t_forward_.size() != chart_.m() || t_inverse_.size() != chart_.m()) {
        throw DimensionError("temporal transition needs " + std::to_string(chart_.m()) +
                             " components each way");
    }
    if (x_forward_.size() != chart_.n() || x_inverse_.size() != chart_.n()) {
        throw DimensionError("spatial transition needs " + std::to_string(chart_.n()) +
                             " components each way");
    }
    const auto ts = chart_.t_names();
    const auto xs = chart_.x_names();
    require_only(t_forward_, ts, "temporal transition");
    require_only(t_inverse_, ts, "temporal transition");
    require_only(x_forward_, xs, "spatial transition");
    require_only(x_inverse_, xs, "spatial transition");
}

TransitionMap TransitionMap::identity(const JetChart& chart) {
    std::vector<Expr> t, x;
    for (std::size_t a = 0; a < chart.m(); ++a) t.push_back(chart.tvar(a));
    for (std::size_t i = 0; i < chart.n(); ++i) x.push_back(chart.xvar(i));
    return TransitionMap(chart, t, t, x, x);
}

TransitionMap TransitionMap::parse(const JetChart& chart, const std::vector<std::string>& t_forward,
                                   const std::vector<std::string>& t_inverse,
                                   const std::vector<std::string>& x_forward,
                                   const std::vector<std::string>& x_inverse,
                                   const std::map<std::string, double>& constants) {
    const auto ts = chart.t_names();
    const auto xs = chart.x_names();
    auto go = [&](const std::vector<std::string>& src, const std::set<std::string>& vars) {
        std::vector<Expr> out;
        for (const auto& s : src) out.push_back(parse_expr(s, vars, constants));
        return out;
    };
    return TransitionMap(chart, go(t_forward, ts), go(t_inverse, ts), go(x_forward, xs),
                         go(x_inverse, xs));
}

TransitionMap TransitionMap::inverse() const {
    return TransitionMap(chart_, t_inverse_, t_forward_, x_inverse_, x_forward_);
}

TransitionMap TransitionMap::then(const TransitionMap& next) const {
    if (!(chart_ == next.chart_)) throw DimensionError("cannot compose maps on different charts");
    const auto& names = chart_.names();
    const auto tn = slice(names, 0, chart_.m());
    const auto xn = slice(names, chart_.m(), chart_.n());
    return TransitionMap(chart_, substitute_all(next.t_forward_, bind(tn, t_forward_)),
                         substitute_all(t_inverse_, bind(tn, next.t_inverse_)),
                         substitute_all(next.x_forward_, bind(xn, x_forward_)),
                         substitute_all(x_inverse_, bind(xn, next.x_inverse_)));
}

void TransitionMap::validate(const SampleDomain& dom, double tol) const {
    const auto& names = chart_.names();
    const auto tn = slice(names, 0, chart_.m());
    const auto xn = slice(names, chart_.m(), chart_.n());

    std::vector<Expr> outs;
    auto jac = [&](const std::vector<Expr>& f, const std::vector<std::string>& vars) {
        for (const auto& e : f) {
            for (const auto& v : vars) outs.push_back(differentiate(e, v));
        }
    };
    jac(t_forward_, tn);
    jac(x_forward_, xn);
    jac(t_inverse_, tn);
    jac(x_inverse_, xn);
    const Program prog(dom.variables(), outs);

    const std::size_t m = chart_.m();
    const std::size_t n = chart_.n();
    std::vector<double> vals(outs.size());
    for (const auto& pt : dom.points()) {
        prog.run(pt, vals);
        std::size_t off = 0;
        const char* labels[] = {"d t~/d t", "d x~/d x", "d t/d t~", "d x/d x~"};
        const std::size_t dims[] = {m, n, m, n};
        for (int k = 0; k < 4; ++k) {
            const std::size_t d = dims[k];
            Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
                J(vals.data() + off, static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
            off += d * d;
            const double det = J.determinant();
            if (!(std::abs(det) >= kJacobianDeterminantFloor)) {
                std::ostringstream os;
                os << "Jacobian " << labels[k] << " is singular (det = " << format_number(det)
                   << ") at ";
                const auto vars = dom.variables();
                for (std::size_t v = 0; v < vars.size(); ++v) {
                    if (v) os << ", ";
                    os << vars[v] << "=" << format_number(pt[v]);
                }
                throw SingularJacobian(os.str());
            }
        }
    }

    auto roundtrip = [&](const std::vector<Expr>& outer, const std::vector<Expr>& inner,
                         const std::vector<std::string>& vars, const char* what) {
        const auto b = bind(vars, inner);
        for (std::size_t k = 0; k < outer.size(); ++k) {
            const Expr id = Expr::variable(vars[k]);
            const auto d = compare(substitute(outer[k], b), id, dom);
            if (d.max_scaled > tol) {
                throw ConfigError(std::string(what) + " component " + std::to_string(k + 1) +
                                  " is not inverted by the supplied inverse (scaled error " +
                                  format_number(d.max_scaled) + ")");
            }
        }
    };
    roundtrip(t_forward_, t_inverse_, tn, "temporal transition");
    roundtrip(t_inverse_, t_forward_, tn, "temporal transition");
    roundtrip(x_forward_, x_inverse_, xn, "spatial transition");
    roundtrip(x_inverse_, x_forward_, xn, "spatial transition");
}

// ---------------------------------------------------------------------------

InducedTransform::InducedTransform(const TransitionMap& tm) : chart_(tm.chart()), map_(tm) {
    const std::size_t m = chart_.m();
    const std::size_t n = chart_.n();
    const auto& names = chart_.names();
    const auto tn = slice(names, 0, m);
    const auto xn = slice(names, m, n);
    const auto to_t = bind(tn, tm.t_forward());
    const auto to_x = bind(xn, tm.x_forward());
    const auto back_t = bind(tn, tm.t_inverse());
    const auto back_x = bind(xn, tm.x_inverse());

    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < m; ++b) {
            jt_.push_back(differentiate(tm.t_forward()[a], tn[b]));
            jt_inv_.push_back(substitute(differentiate(tm.t_inverse()[a], tn[b]), to_t));
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            jx_.push_back(differentiate(tm.x_forward()[i], xn[j]));
            jx_inv_.push_back(substitute(differentiate(tm.x_inverse()[i], xn[j]), to_x));
        }
    }

    // p~_i^a = (d x^j / d x~^i)(d t~^a / d t^b) p_j^b
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < m; ++a) {
            std::vector<Expr> terms;
            for (std::size_t j = 0; j < n; ++j) {
                for (std::size_t b = 0; b < m; ++b) {
                    terms.push_back(jx_inv(j, i) * jt(a, b) * chart_.pvar(j, b));
                }
            }
            p_tilde_.push_back(sum(terms));
        }
    }
    for (const auto& pt : p_tilde_) {
        for (const auto& v : tn) dp_dt_.push_back(differentiate(pt, v));
        for (const auto& v : xn) dp_dx_.push_back(differentiate(pt, v));
    }

    // Chart-A coordinates in chart-B variables, via the inverse group element.
    for (std::size_t a = 0; a < m; ++a) to_source_.emplace(tn[a], tm.t_inverse()[a]);
    for (std::size_t i = 0; i < n; ++i) to_source_.emplace(xn[i], tm.x_inverse()[i]);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < m; ++a) {
            std::vector<Expr> terms;
            for (std::size_t j = 0; j < n; ++j) {
                const Expr dxt = substitute(differentiate(tm.x_forward()[j], xn[i]), back_x);
                for (std::size_t b = 0; b < m; ++b) {
                    const Expr dt = differentiate(tm.t_inverse()[a], tn[b]);
                    terms.push_back(dxt * dt * chart_.pvar(j, b));
                }
            }
            to_source_.emplace(chart_.p(i, a), sum(terms));
        }
    }

    std::vector<Expr> outs;
    outs.insert(outs.end(), tm.t_forward().begin(), tm.t_forward().end());
    outs.insert(outs.end(), tm.x_forward().begin(), tm.x_forward().end());
    for (const auto* block : {&p_tilde_, &jt_, &jt_inv_, &jx_, &jx_inv_, &dp_dt_, &dp_dx_}) {
        outs.insert(outs.end(), block->begin(), block->end());
    }
    program_ = Program(names, outs);
}

Expr InducedTransform::in_target(const Expr& e) const { return substitute(e, to_source_); }

InducedAt InducedTransform::at(const JetPoint& q) const {
    const std::size_t m = chart_.m();
    const std::size_t n = chart_.n();
    if (q.m != m || q.n != n) throw DimensionError("jet point does not match the chart");
    const auto vals = program_.run(q.coords);

    InducedAt r;
    std::size_t off = 0;
    std::vector<double> image(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(m + n + m * n));
    off = m + n + m * n;
    r.image = JetPoint(m, n, std::move(image));
    auto take = [&](std::size_t rows, std::size_t cols) {
        Eigen::MatrixXd M(rows, cols);
        for (std::size_t r0 = 0; r0 < rows; ++r0) {
            for (std::size_t c = 0; c < cols; ++c) M(r0, c) = vals[off++];
        }
        return M;
    };
    r.jt = take(m, m);
    r.jt_inv = take(m, m);
    r.jx = take(n, n);
    r.jx_inv = take(n, n);
    r.dp_dt = take(m * n, m);
    r.dp_dx = take(m * n, n);

    auto check = [&](const Eigen::MatrixXd& J, const char* label) {
        const double det = J.determinant();
        if (!(std::abs(det) >= kJacobianDeterminantFloor)) {
            throw SingularJacobian(std::string("Jacobian ") + label + " is singular (det = " +
                                   format_number(det) + ") at " +
                                   describe_point(chart_, q.coords));
        }
    };
    check(r.jt, "d t~/d t");
    check(r.jx, "d x~/d x");
    check(r.jt_inv, "d t/d t~");
    check(r.jx_inv, "d x/d x~");
    return r;
}

// ---------------------------------------------------------------------------

JetVelocityPoint transform_velocity(const TransitionMap& tm, const JetVelocityPoint& q) {
    const auto& chart = tm.chart();
    const std::size_t m = chart.m();
    const std::size_t n = chart.n();
    if (q.t.size() != m || q.x.size() != n || q.v.rows() != static_cast<Eigen::Index>(n) ||
        q.v.cols() != static_cast<Eigen::Index>(m)) {
        throw DimensionError("velocity point does not match the chart");
    }
    std::vector<double> coords(q.t);
    coords.insert(coords.end(), q.x.begin(), q.x.end());
    coords.resize(m + n + m * n, 0.0);
    const auto at = InducedTransform(tm).at(JetPoint(m, n, std::move(coords)));

    JetVelocityPoint out;
    for (std::size_t a = 0; a < m; ++a) out.t.push_back(at.image.t(a));
    for (std::size_t i = 0; i < n; ++i) out.x.push_back(at.image.x(i));
    // x~_a^i = (d x~^i / d x^j)(d t^b / d t~^a) x_b^j
    out.v = at.jx * q.v * at.jt_inv;
    return out;
}

JetPoint transform_polymomenta(const InducedTransform& it, const JetPoint& q) {
    return it.at(q).image;
}

JetPoint transform_polymomenta(const TransitionMap& tm, const JetPoint& q) {
    return transform_polymomenta(InducedTransform(tm), q);
}

Eigen::MatrixXd frame_matrix(const JetChart& chart, const InducedAt& at) {
    const std::size_t m = chart.m();
    const std::size_t n = chart.n();
    const auto D = static_cast<Eigen::Index>(chart.dim());
    Eigen::MatrixXd F = Eigen::MatrixXd::Zero(D, D);
    for (std::size_t a = 0; a < m; ++a) {
        const auto row = static_cast<Eigen::Index>(chart.t_index(a));
        for (std::size_t b = 0; b < m; ++b) {
            F(row, static_cast<Eigen::Index>(chart.t_index(b))) = at.jt(b, a);
        }
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t b = 0; b < m; ++b) {
                F(row, static_cast<Eigen::Index>(chart.p_index(j, b))) = at.dp_dt(j * m + b, a);
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = static_cast<Eigen::Index>(chart.x_index(i));
        for (std::size_t j = 0; j < n; ++j) {
            F(row, static_cast<Eigen::Index>(chart.x_index(j))) = at.jx(j, i);
        }
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t b = 0; b < m; ++b) {
                F(row, static_cast<Eigen::Index>(chart.p_index(j, b))) = at.dp_dx(j * m + b, i);
            }
        }
    }
    // d p~_j^b / d p_i^a = (d x^i / d x~^j)(d t~^b / d t^a)
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < m; ++a) {
            const auto row = static_cast<Eigen::Index>(chart.p_index(i, a));
            for (std::size_t j = 0; j < n; ++j) {
                for (std::size_t b = 0; b < m; ++b) {
                    F(row, static_cast<Eigen::Index>(chart.p_index(j, b))) =
                        at.jx_inv(i, j) * at.jt(b, a);
                }
            }
        }
    }
    return F;
}

Eigen::MatrixXd frame_transform(const InducedTransform& it, const JetPoint& q) {
    return frame_matrix(it.chart(), it.at(q));
}

Eigen::MatrixXd frame_transform(const TransitionMap& tm, const JetPoint& q) {
    return frame_transform(InducedTransform(tm), q);
}

Eigen::MatrixXd coframe_transform(const TransitionMap& tm, const JetPoint& q) {
    const InducedTransform fwd(tm);
    const InducedTransform back(tm.inverse());
    const JetPoint image = fwd.at(q).image;
    // Frame of the inverse map at the image: (beta, alpha) = d y^alpha / d y~^beta.
    return frame_matrix(back.chart(), back.at(image)).transpose();
}

}  // namespace polyjet
