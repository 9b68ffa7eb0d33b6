#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "polyjet/calculus.hpp"
#include "polyjet/cli.hpp"

namespace polyjet::cli {

namespace {

using nlohmann::json;

// Step for the central-difference Christoffel oracle; O(h^2) truncation stays
// far below the 1e-6 relative tolerance for the smooth metrics we accept.
constexpr double kFiniteDifferenceStep = 1e-5;
constexpr double kFiniteDifferenceTolerance = 1e-6;

json nested(const NumArray& a, std::size_t axis, std::size_t& flat) {
    if (axis == a.rank()) {
        const double v = a[flat++];
        return v == 0.0 ? 0.0 : v;  // no "-0" in reports
    }
    json out = json::array();
    for (std::size_t k = 0; k < a.shape()[axis]; ++k) out.push_back(nested(a, axis + 1, flat));
    return out;
}

json nested(const ExprArray& a, std::size_t axis, std::size_t& flat) {
    if (axis == a.rank()) return to_string(a[flat++]);
    json out = json::array();
    for (std::size_t k = 0; k < a.shape()[axis]; ++k) out.push_back(nested(a, axis + 1, flat));
    return out;
}

NumArray evaluate_at(const ExprArray& a, const Assignment& point) {
    return a.map([&](const Expr& e) { return evaluate(e, point); });
}

/// {"indices", "symbolic", "at_point"}; indices name the axes for the table.
json field_object(const std::string& indices, const ExprArray& a, const Assignment& point) {
    std::size_t f1 = 0;
    std::size_t f2 = 0;
    return json{{"indices", indices},
                {"symbolic", nested(a, 0, f1)},
                {"at_point", nested(evaluate_at(a, point), 0, f2)}};
}

ExprArray from_rows(const std::vector<std::vector<Expr>>& rows) {
    ExprArray out({rows.size(), rows.size()});
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows.size(); ++j) out(i, j) = rows[i][j];
    }
    return out;
}

json point_object(const JetChart& chart, const JetPoint& q) {
    json out = json::object();
    for (std::size_t k = 0; k < chart.dim(); ++k) out[chart.names()[k]] = q.coords[k];
    return out;
}

/// Componentwise compare() of two arrays, labelled with 1-based indices.
VerificationReport compare_arrays(std::string name, const ExprArray& a, const ExprArray& b,
                                  const std::vector<std::string>& letters, const SampleDomain& dom,
                                  double tol) {
    VerificationReport r;
    r.name = std::move(name);
    r.tolerance = tol;
    r.point_names = dom.variables();
    r.samples = dom.count();
    for (std::size_t k = 0; k < a.size(); ++k) {
        const auto d = compare(a[k], b[k], dom);
        if (r.worst_point.empty() || d.max_scaled > r.max_residual || std::isnan(d.max_scaled)) {
            r.max_residual = std::isnan(d.max_scaled) ? INFINITY : d.max_scaled;
            r.worst_point = d.worst_point;
            const auto idx = a.unravel(k);
            r.worst_component = d.max_scaled > 0 ? index_label(letters, idx) : "";
        }
    }
    r.passed = r.max_residual <= tol;
    return r;
}

/// Symbolic Christoffel symbols against central differences of the metric,
/// scaled by max(1, |fd|), at every sample.
VerificationReport christoffel_oracle(std::string name, const Metric& g, const ChristoffelField& gamma,
                                      const SampleDomain& dom) {
    const auto base = g.base_variables();
    const std::size_t d = g.dim();
    const auto vars = dom.variables();
    VerificationReport r;
    r.name = std::move(name);
    r.tolerance = kFiniteDifferenceTolerance;
    r.point_names = vars;
    for (const auto& pt : dom.points()) {
        Assignment a;
        for (std::size_t k = 0; k < vars.size(); ++k) a[vars[k]] = pt[k];
        // dg[l](i, j) = d g_ij / d base_l
        std::vector<Eigen::MatrixXd> dg(base.size(), Eigen::MatrixXd(d, d));
        for (std::size_t l = 0; l < base.size(); ++l) {
            Assignment hi = a;
            Assignment lo = a;
            hi[base[l]] += kFiniteDifferenceStep;
            lo[base[l]] -= kFiniteDifferenceStep;
            for (std::size_t i = 0; i < d; ++i) {
                for (std::size_t j = 0; j < d; ++j) {
                    dg[l](i, j) = (evaluate(g(i, j), hi) - evaluate(g(i, j), lo)) / (2 * kFiniteDifferenceStep);
                }
            }
        }
        const Eigen::MatrixXd inv = inverse_at(g, a);
        const NumArray sym = gamma.at(a);
        ++r.samples;
        double here = 0.0;
        std::string label;
        for (std::size_t k = 0; k < d; ++k) {
            for (std::size_t i = 0; i < d; ++i) {
                for (std::size_t j = 0; j < d; ++j) {
                    double fd = 0.0;
                    for (std::size_t l = 0; l < d; ++l) {
                        fd += 0.5 * inv(k, l) * (dg[j](l, i) + dg[i](l, j) - dg[l](i, j));
                    }
                    const double err = std::abs(sym(k, i, j) - fd) / std::max(1.0, std::abs(fd));
                    if (err > here || std::isnan(err)) {
                        here = std::isnan(err) ? INFINITY : err;
                        const std::vector<std::string> letters{"k", "i", "j"};
                        const std::vector<std::size_t> idx{k, i, j};
                        label = index_label(letters, idx);
                    }
                }
            }
        }
        if (r.worst_point.empty() || here > r.max_residual) {
            r.max_residual = here;
            r.worst_point = pt;
            r.worst_component = here > 0 ? label : "";
        }
    }
    r.passed = r.max_residual <= r.tolerance;
    return r;
}

ExprArray christoffel_array(const ChristoffelField& c) {
    if (c.is_symbolic()) return c.symbols();
    throw DimensionError("symbolic Christoffel symbols need dimension <= 4");
}

VerificationReport regularity_check(const RegularityResult& reg, const SampleDomain& dom) {
    VerificationReport r;
    r.name = "kronecker_regularity";
    r.passed = reg.regular;
    r.tolerance = reg.threshold;
    r.max_residual = reg.residual;
    r.samples = dom.count();
    for (const auto& [name, value] : reg.worst_point) {
        r.point_names.push_back(name);
        r.worst_point.push_back(value);
    }
    if (!reg.regular) r.worst_component = reg.reason;
    return r;
}

json regularity_object(const RegularityResult& reg) {
    json g = json::array();
    for (const auto& row : reg.g_upper) {
        json out = json::array();
        for (const auto& e : row) out.push_back(to_string(e));
        g.push_back(out);
    }
    return json{{"regular", reg.regular},
                {"g_upper_candidate", g},
                {"residual", reg.residual},
                {"threshold", reg.threshold},
                {"g_p_independent", reg.g_p_independent},
                {"reason", reg.reason}};
}

const char* kRegularityNote =
    "Kronecker regularity is decided numerically: max |G - h g| <= tol * max(1, max |G|) over the sample domain";

void add_connection_objects(Report& r, const NonlinearConnection& N, const JetPoint& q) {
    const auto a = assignment(N.chart(), q);
    r.objects["N1"] = field_object("a,i,b", N.n1(), a);
    r.objects["N2"] = field_object("a,i,j", N.n2(), a);
    const Eigen::MatrixXd M = adapted_coframe(N, q);
    json rows = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
        rows.push_back(row);
    }
    r.objects["adapted_coframe"] = json{{"rows", "delta p_i^a, row i*m + a"}, {"columns", N.chart().names()},
                                        {"at_point", rows}};
}

NonlinearConnection with_fault(const NonlinearConnection& N, const std::optional<Fault>& f) {
    return f ? N.with_n2_offset(f->a, f->i, f->j, f->delta) : N;
}

VerificationReport renamed(VerificationReport r, std::string name) {
    r.name = std::move(name);
    return r;
}

/// Spatial metric used by the correspondence checks: the manifest's when
/// present, else the identity.
Metric auxiliary_phi(const Manifest& m, Report& r) {
    if (m.phi) {
        r.notes.push_back("auxiliary spatial metric phi: spatial_metric from the manifest");
        return *m.phi;
    }
    r.notes.push_back("auxiliary spatial metric phi: identity (no spatial_metric given)");
    return Metric::identity(MetricKind::spatial, m.chart);
}

Report start(const std::string& command, const Manifest& m) {
    Report r;
    r.command = command;
    r.inputs_digest = m.digest;
    r.seed = m.domain.seed();
    r.objects["point"] = point_object(m.chart, m.point);
    return r;
}

}  // namespace

bool Report::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.result.passed; });
}

int exit_code(ErrorCategory category) {
    return 2 + static_cast<int>(category);
}

int Report::exit_code() const {
    for (const auto& c : checks) {
        if (!c.result.passed) return cli::exit_code(c.category);
    }
    return 0;
}

Report cmd_christoffel(const Manifest& m) {
    if (!m.h && !m.phi) throw ConfigError("christoffel needs temporal_metric or spatial_metric");
    Report r = start("christoffel", m);
    const auto a = assignment(m.chart, m.point);
    if (m.h) {
        const auto kappa = christoffel(*m.h);
        r.objects["kappa"] = field_object("a,b,c", christoffel_array(kappa), a);
        r.checks.push_back({christoffel_oracle("kappa.finite_difference", *m.h, kappa, m.domain)});
    }
    if (m.phi) {
        const auto gamma = christoffel(*m.phi);
        r.objects["gamma"] = field_object("k,i,j", christoffel_array(gamma), a);
        r.checks.push_back({christoffel_oracle("gamma.finite_difference", *m.phi, gamma, m.domain)});
    }
    if (m.hamiltonian) {
        const auto& hs = *m.hamiltonian;
        const auto reg = check_kronecker_regularity(hs, m.domain, m.tol.regularity);
        r.checks.push_back({regularity_check(reg, m.domain), ErrorCategory::not_regular});
        r.notes.push_back(kRegularityNote);
        if (reg.regular) {
            std::optional<Metric> g;
            if (m.chart.m() >= 2) {
                g = extract_electrodynamic_form(hs, m.domain, m.tol.regularity).g;
            } else {
                g = Metric(MetricKind::spatiotemporal, m.chart, symbolic_inverse(reg.g_upper), true);
                r.notes.push_back("m = 1: g may depend on p; p is a passive parameter in Gamma");
            }
            const auto Gamma = christoffel(*g);
            r.objects["Gamma_g"] = field_object("k,i,j", christoffel_array(Gamma), a);
            r.checks.push_back({christoffel_oracle("Gamma_g.finite_difference", *g, Gamma, m.domain)});
        }
    }
    return r;
}

Report cmd_connection(const Manifest& m) {
    Report r = start("connection", m);
    if (m.hamiltonian) {
        const auto& hs = *m.hamiltonian;
        const auto reg = check_kronecker_regularity(hs, m.domain, m.tol.regularity);
        r.checks.push_back({regularity_check(reg, m.domain), ErrorCategory::not_regular});
        r.notes.push_back(kRegularityNote);
        r.objects["regularity"] = regularity_object(reg);
        if (!reg.regular) return r;
        r.objects["connection"] = "canonical nonlinear connection of the Hamilton space";
        add_connection_objects(r, canonical_connection_of_hamilton_space(hs, m.domain, m.tol.regularity),
                               m.point);
    } else {
        if (!m.h || !m.phi) throw ConfigError("connection needs temporal_metric and spatial_metric");
        r.objects["connection"] = "canonical metric connection N0";
        add_connection_objects(r, canonical_metric_connection(*m.h, *m.phi), m.point);
    }
    if (m.h) {
        const Metric phi = auxiliary_phi(m, r);
        const auto N0 = canonical_metric_connection(*m.h, phi);
        const auto via = connection_from_semispray({canonical_temporal(*m.h), canonical_spatial(phi)}, phi);
        r.checks.push_back({compare_arrays("n0_formula.N1_from_semisprays", via.n1(), N0.n1(), {"a", "i", "b"},
                                           m.domain, m.tol.equiv)});
        r.checks.push_back({compare_arrays("n0_formula.N2_from_semisprays", via.n2(), N0.n2(), {"a", "i", "j"},
                                           m.domain, m.tol.equiv)});
    }
    return r;
}

Report cmd_verify(const Manifest& m) {
    if (!m.h) throw ConfigError("verify needs temporal_metric");
    Report r = start("verify", m);
    TransitionMap tm = TransitionMap::identity(m.chart);
    if (m.transition) {
        tm = *m.transition;
    } else {
        r.notes.push_back("no transition given: verifying against the identity map");
    }
    if (m.fault) {
        std::ostringstream note;
        note << "fault injected: N2[a=" << m.fault->a + 1 << ",i=" << m.fault->i + 1 << ",j=" << m.fault->j + 1
             << "] += " << m.fault->delta;
        r.notes.push_back(note.str());
    }
    const InducedTransform it(tm);
    const double tol = m.tol.law;
    const Metric hB = pullback(*m.h, tm);

    const auto bA = builtin_dtensors(*m.h);
    const auto bB = builtin_dtensors(hB);
    r.checks.push_back({renamed(verify_dtensor_law(bA.liouville, bB.liouville, it, m.domain, tol),
                                "dtensor_law.liouville")});
    r.checks.push_back({renamed(verify_dtensor_law(bA.polymomentum_liouville, bB.polymomentum_liouville, it,
                                                   m.domain, tol),
                                "dtensor_law.polymomentum_liouville")});
    r.checks.push_back({renamed(verify_dtensor_law(bA.normalization, bB.normalization, it, m.domain, tol),
                                "dtensor_law.normalization")});
    r.checks.push_back({renamed(verify_semispray_law(canonical_temporal(*m.h), canonical_temporal(hB), it,
                                                     m.domain, tol),
                                "semispray_law.temporal")});

    if (m.phi) {
        const Metric phiB = pullback(*m.phi, tm);
        r.checks.push_back({renamed(verify_semispray_law(canonical_spatial(*m.phi), canonical_spatial(phiB), it,
                                                         m.domain, tol),
                                    "semispray_law.spatial")});
        const auto NA = with_fault(canonical_metric_connection(*m.h, *m.phi), m.fault);
        const auto NB = canonical_metric_connection(hB, phiB);
        r.checks.push_back({renamed(verify_connection_law(NA, NB, it, m.domain, tol), "connection_law.N0")});
        r.checks.push_back({renamed(verify_adapted_coframe(NA, NB, it, m.domain, tol), "adapted_coframe.N0")});
    } else {
        r.notes.push_back("no spatial_metric: spatial semispray and N0 checks skipped");
    }

    if (m.hamiltonian) {
        const auto& hs = *m.hamiltonian;
        const auto reg = check_kronecker_regularity(hs, m.domain, m.tol.regularity);
        r.checks.push_back({regularity_check(reg, m.domain), ErrorCategory::not_regular});
        r.notes.push_back(kRegularityNote);
        if (reg.regular) {
            const auto NA = with_fault(canonical_connection_of_hamilton_space(hs, m.domain, m.tol.regularity),
                                       m.fault);
            const auto NB = canonical_connection_of_hamilton_space(pullback(hs, tm), m.domain, m.tol.regularity);
            r.checks.push_back(
                {renamed(verify_connection_law(NA, NB, it, m.domain, tol), "connection_law.hamilton")});
            r.checks.push_back(
                {renamed(verify_adapted_coframe(NA, NB, it, m.domain, tol), "adapted_coframe.hamilton")});
        }
    }
    return r;
}

Report cmd_regularity(const Manifest& m) {
    if (!m.hamiltonian) throw ConfigError("regularity needs a hamiltonian");
    const auto& hs = *m.hamiltonian;
    Report r = start("regularity", m);
    const auto reg = check_kronecker_regularity(hs, m.domain, m.tol.regularity);
    r.checks.push_back({regularity_check(reg, m.domain), ErrorCategory::not_regular});
    r.notes.push_back(kRegularityNote);
    r.objects["regular"] = reg.regular;
    r.objects["regularity"] = regularity_object(reg);
    if (!reg.regular) return r;

    const auto a = assignment(m.chart, m.point);
    if (m.chart.m() >= 2) {
        const auto form = extract_electrodynamic_form(hs, m.domain, m.tol.regularity);
        r.objects["g"] = field_object("i,j", form.g.array(), a);
        r.objects["g_upper"] = field_object("i,j", from_rows(form.g_upper), a);
        r.objects["U"] = field_object("i,a", form.U.components(), a);
        ExprArray F({1});
        F[0] = form.F;
        r.objects["F"] = field_object("-", F, a);
        ExprArray H({1});
        H[0] = hs.hamiltonian();
        ExprArray rebuilt({1});
        rebuilt[0] = assemble_hamiltonian(hs.h(), form.g_upper, form.U, form.F);
        r.checks.push_back({compare_arrays("reconstruction", rebuilt, H, {"-"}, m.domain, m.tol.equiv)});
    } else {
        r.objects["g_upper"] = field_object("i,j", from_rows(reg.g_upper), a);
        bool p_dependent = false;
        for (const auto& row : reg.g_upper) {
            for (const auto& e : row) {
                for (const auto& p : m.chart.p_names()) p_dependent = p_dependent || depends_on(e, p);
            }
        }
        r.notes.push_back(p_dependent ? "m = 1: g depends on p; no electrodynamic normal form is forced"
                                      : "m = 1: g happens to be free of p; no normal form is forced");
    }
    add_connection_objects(r, canonical_connection_of_hamilton_space(hs, m.domain, m.tol.regularity), m.point);
    return r;
}

Report run_command(const std::string& name, const Manifest& m) {
    const auto t0 = std::chrono::steady_clock::now();
    Report r;
    if (name == "christoffel") {
        r = cmd_christoffel(m);
    } else if (name == "connection") {
        r = cmd_connection(m);
    } else if (name == "verify") {
        r = cmd_verify(m);
    } else if (name == "regularity") {
        r = cmd_regularity(m);
    } else {
        throw ConfigError("unknown command '" + name + "'");
    }
    r.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

json to_json(const Report& r) {
    json checks = json::array();
    for (const auto& c : r.checks) {
        json j = to_json(c.result);
        j["name"] = c.result.name;
        j["failure_category"] = to_string(c.category);
        checks.push_back(j);
    }
    return json{{"schema", kReportSchema},
                {"command", r.command},
                {"inputs_digest", r.inputs_digest},
                {"seed", r.seed},
                {"passed", r.passed()},
                {"checks", checks},
                {"objects", r.objects},
                {"notes", r.notes},
                {"wall_time_ms", r.wall_time_ms}};
}

namespace {

std::string number(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

void render_entries(std::ostringstream& os, const std::string& name, std::vector<std::size_t>& idx,
                    const json& values) {
    if (!values.is_array()) {
        os << "  " << name << '[';
        for (std::size_t k = 0; k < idx.size(); ++k) os << (k ? "," : "") << idx[k] + 1;
        os << "] = " << number(values.get<double>()) << '\n';
        return;
    }
    for (std::size_t k = 0; k < values.size(); ++k) {
        idx.push_back(k);
        render_entries(os, name, idx, values[k]);
        idx.pop_back();
    }
}

}  // namespace

std::string render_table(const Report& r) {
    std::ostringstream os;
    os << "polyjet " << r.command << "  digest " << r.inputs_digest << "  seed " << r.seed << "\n\n";
    os << std::left << std::setw(40) << "CHECK" << std::setw(8) << "RESULT" << std::setw(14) << "MAX RESIDUAL"
       << std::setw(12) << "TOL" << "WORST\n";
    for (const auto& c : r.checks) {
        const auto& v = c.result;
        os << std::setw(40) << v.name << std::setw(8) << (v.passed ? "PASS" : "FAIL") << std::setw(14)
           << number(v.max_residual) << std::setw(12) << number(v.tolerance) << v.worst_component << '\n';
    }
    for (const auto& [name, obj] : r.objects.items()) {
        if (!obj.is_object() || !obj.contains("at_point") || !obj.contains("indices")) continue;
        os << '\n' << name << " [" << obj["indices"].get<std::string>() << "] at point\n";
        std::vector<std::size_t> idx;
        render_entries(os, name, idx, obj["at_point"]);
    }
    if (!r.notes.empty()) {
        os << "\nnotes:\n";
        for (const auto& n : r.notes) os << "  - " << n << '\n';
    }
    os << '\n' << (r.passed() ? "ALL CHECKS PASSED" : "SOME CHECKS FAILED") << '\n';
    return os.str();
}

}  // namespace polyjet::cli
