#include "polyjet/report.hpp"

#include <algorithm>
#include <cmath>

#include "polyjet/error.hpp"

namespace polyjet {

nlohmann::json to_json(const VerificationReport& r) {
    nlohmann::json point = nlohmann::json::object();
    for (std::size_t k = 0; k < r.worst_point.size() && k < r.point_names.size(); ++k) {
        point[r.point_names[k]] = r.worst_point[k];
    }
    nlohmann::json j;
    j["passed"] = r.passed;
    j["tolerance"] = r.tolerance;
    // JSON has no infinity; a non-finite residual is reported as null.
    if (std::isfinite(r.max_residual)) {
        j["max_residual"] = r.max_residual;
    } else {
        j["max_residual"] = nullptr;
    }
    j["worst_point"] = point;
    j["samples"] = r.samples;
    j["worst_component"] = r.worst_component;
    return j;
}

std::vector<JetPoint> chart_points(const JetChart& chart, const SampleDomain& dom) {
    const auto vars = dom.variables();
    std::vector<std::size_t> where(chart.dim());
    for (std::size_t k = 0; k < chart.dim(); ++k) {
        const auto it = std::find(vars.begin(), vars.end(), chart.names()[k]);
        if (it == vars.end()) {
            throw ConfigError("sample domain does not cover '" + chart.names()[k] + "'");
        }
        where[k] = static_cast<std::size_t>(it - vars.begin());
    }
    std::vector<JetPoint> out;
    for (const auto& pt : dom.points()) {
        std::vector<double> c(chart.dim());
        for (std::size_t k = 0; k < c.size(); ++k) c[k] = pt[where[k]];
        out.emplace_back(chart.m(), chart.n(), std::move(c));
    }
    return out;
}

Assignment assignment(const JetChart& chart, const JetPoint& q) {
    Assignment a;
    for (std::size_t k = 0; k < chart.dim(); ++k) a.emplace(chart.names()[k], q.coords[k]);
    return a;
}

VerificationReport sweep(std::string name, const InducedTransform& it, const SampleDomain& dom,
                         double tol, const LawEvaluator& law) {
    auto mag = [](double v) { return std::isnan(v) ? INFINITY : std::abs(v); };
    VerificationReport r;
    r.name = std::move(name);
    r.tolerance = tol;
    r.point_names = it.chart().names();
    for (const auto& q : chart_points(it.chart(), dom)) {
        const auto at = it.at(q);
        const auto blocks = law(q, at);
        ++r.samples;
        double here = 0.0;
        for (const auto& b : blocks) {
            for (double v : b.target.data()) here = std::max(here, mag(v));
        }
        if (!r.worst_point.empty() && !(here > r.max_residual)) continue;
        r.max_residual = here;
        r.worst_point = q.coords;
        r.worst_component.clear();
        if (here == 0.0) continue;
        // Name the source entry that dominates at the worst point.
        double best = -1.0;
        for (const auto& b : blocks) {
            for (std::size_t k = 0; k < b.source.size(); ++k) {
                if (mag(b.source[k]) > best) {
                    best = mag(b.source[k]);
                    r.worst_component = b.name + index_label(b.letters, b.source.unravel(k));
                }
            }
        }
    }
    r.passed = r.max_residual <= tol;
    return r;
}

}  // namespace polyjet
