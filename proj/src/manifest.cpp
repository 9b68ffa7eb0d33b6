#include <fstream>
#include <set>
#include <sstream>

#include "polyjet/cli.hpp"
#include "polyjet/parser.hpp"
#include "polyjet/random_transition.hpp"

namespace polyjet::cli {

namespace {

using nlohmann::json;

const std::set<std::string> kTopLevelKeys{
    "schema",     "description", "dimensions",    "temporal_metric", "spatial_metric", "hamiltonian",
    "constants",  "transition",  "sample_domain", "tolerances",      "point",          "fault",
};

const json& require(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError(where + " is missing '" + key + "'");
    return j.at(key);
}

std::size_t get_size(const json& j, const std::string& key, const std::string& where) {
    const auto& v = require(j, key, where);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ConfigError(where + "." + key + " must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

double get_positive(const json& j, const std::string& key, double fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_number() || !(v.get<double>() > 0)) {
        throw ConfigError(where + "." + key + " must be a positive number");
    }
    return v.get<double>();
}

std::vector<std::string> strings(const json& j, std::size_t expect, const std::string& where) {
    if (!j.is_array() || j.size() != expect) {
        throw DimensionError(where + " must be an array of " + std::to_string(expect) + " strings");
    }
    std::vector<std::string> out;
    for (const auto& e : j) {
        if (!e.is_string()) throw ConfigError(where + " entries must be expression strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

std::vector<std::vector<std::string>> matrix(const json& j, std::size_t rows, std::size_t cols,
                                             const std::string& where) {
    if (!j.is_array() || j.size() != rows) {
        throw DimensionError(where + " must have " + std::to_string(rows) + " rows");
    }
    std::vector<std::vector<std::string>> out;
    for (std::size_t r = 0; r < rows; ++r) {
        out.push_back(strings(j[r], cols, where + "[" + std::to_string(r) + "]"));
    }
    return out;
}

DTensorField potential(const JetChart& c, const json& j, const std::map<std::string, double>& k,
                       const std::string& where) {
    const auto rows = matrix(j, c.n(), c.m(), where);
    ExprArray u({c.n(), c.m()});
    for (std::size_t i = 0; i < c.n(); ++i) {
        for (std::size_t a = 0; a < c.m(); ++a) u(i, a) = parse_expr(rows[i][a], c.all_names(), k);
    }
    return DTensorField(c, potential_slots(), std::move(u));
}

HamiltonSpace load_hamiltonian(const json& j, const JetChart& c, const std::optional<Metric>& h,
                               const std::optional<Metric>& phi, const std::map<std::string, double>& k,
                               const PhysicalConstants& physical) {
    if (!h) throw ConfigError("a Hamiltonian needs temporal_metric");
    if (j.is_string()) {
        return HamiltonSpace(*h, parse_expr(j.get<std::string>(), c.all_names(), k), physical);
    }
    if (!j.is_object()) throw ConfigError("hamiltonian must be a string or a builder object");
    const auto builder = require(j, "builder", "hamiltonian").get<std::string>();
    if (builder == "gravitational" || builder == "autonomous_ed") {
        if (!phi) throw ConfigError("builder '" + builder + "' needs spatial_metric");
        if (builder == "gravitational") return gravitational(*h, *phi, physical);
        return autonomous_ed(*h, *phi, potential(c, require(j, "potential", "hamiltonian"), k, "potential"),
                             physical);
    }
    if (builder == "nonautonomous_ed") {
        const Metric g = Metric::parse(MetricKind::spatiotemporal, c,
                                       matrix(require(j, "g", "hamiltonian"), c.n(), c.n(), "g"), k);
        const auto U = potential(c, require(j, "U", "hamiltonian"), k, "U");
        const Expr F = parse_expr(j.value("F", std::string("0")), c.all_names(), k);
        HamiltonSpace hs = nonautonomous_ed(*h, g, U, F);
        return HamiltonSpace(hs.h(), hs.hamiltonian(), physical);
    }
    throw ConfigError("unknown Hamiltonian builder '" + builder + "'");
}

SampleDomain load_domain(const json& j, const JetChart& c, const Overrides& o) {
    std::size_t count = kDefaultSampleCount;
    std::uint64_t seed = 0;
    std::map<std::string, std::pair<double, double>> custom;
    if (!j.is_null()) {
        if (j.contains("count")) count = get_size(j, "count", "sample_domain");
        if (j.contains("seed")) seed = get_size(j, "seed", "sample_domain");
        if (j.contains("intervals")) {
            for (const auto& [name, range] : j.at("intervals").items()) {
                if (!c.all_names().contains(name)) {
                    throw ConfigError("sample_domain names unknown coordinate '" + name + "'");
                }
                if (!range.is_array() || range.size() != 2) {
                    throw ConfigError("interval for '" + name + "' must be [lo, hi]");
                }
                custom[name] = {range[0].get<double>(), range[1].get<double>()};
            }
        }
    }
    if (o.seed) seed = *o.seed;
    auto intervals = c.default_domain(count, seed).intervals();
    for (auto& iv : intervals) {
        if (const auto it = custom.find(iv.name); it != custom.end()) {
            iv.lo = it->second.first;
            iv.hi = it->second.second;
        }
    }
    return SampleDomain(std::move(intervals), count, seed);
}

}  // namespace

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (const unsigned char ch : bytes) {
        hash ^= ch;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

Manifest load_manifest(const json& j, const Overrides& o) {
    if (!j.is_object()) throw ConfigError("manifest must be a JSON object");
    for (const auto& [key, _] : j.items()) {
        if (!kTopLevelKeys.contains(key)) throw ConfigError("unknown manifest key '" + key + "'");
    }
    if (j.contains("schema") && j.at("schema") != kReportSchema) {
        throw ConfigError("unsupported manifest schema");
    }
    const auto& dims = require(j, "dimensions", "manifest");
    const std::size_t m = get_size(dims, "m", "dimensions");
    const std::size_t n = get_size(dims, "n", "dimensions");
    if (m == 0 || n == 0) throw DimensionError("dimensions must be at least 1");
    const JetChart chart(m, n);

    std::map<std::string, double> constants;
    if (j.contains("constants")) {
        for (const auto& [name, value] : j.at("constants").items()) {
            if (!value.is_number()) throw ConfigError("constant '" + name + "' must be a number");
            constants[name] = value.get<double>();
        }
    }
    PhysicalConstants physical;
    if (j.contains("constants")) {
        const auto& k = j.at("constants");
        physical.mass = get_positive(k, "m_c", 1.0, "constants");
        physical.light_speed = get_positive(k, "c", 1.0, "constants");
        physical.charge = get_positive(k, "e", 1.0, "constants");
    }

    Tolerances tol;
    if (j.contains("tolerances")) {
        const auto& t = j.at("tolerances");
        tol.equiv = get_positive(t, "equiv", tol.equiv, "tolerances");
        tol.law = get_positive(t, "law", tol.law, "tolerances");
        tol.regularity = get_positive(t, "regularity", tol.regularity, "tolerances");
    }
    if (o.tol) {
        if (!(*o.tol > 0)) throw ConfigError("--tol must be positive");
        tol = {*o.tol, *o.tol, *o.tol};
    }

    const SampleDomain domain = load_domain(j.value("sample_domain", json()), chart, o);

    std::optional<Metric> h;
    std::optional<Metric> phi;
    if (j.contains("temporal_metric")) {
        h = Metric::parse(MetricKind::temporal, chart, matrix(j.at("temporal_metric"), m, m, "temporal_metric"),
                          constants);
        h->validate(domain, tol.equiv);
    }
    if (j.contains("spatial_metric")) {
        phi = Metric::parse(MetricKind::spatial, chart, matrix(j.at("spatial_metric"), n, n, "spatial_metric"),
                            constants);
        phi->validate(domain, tol.equiv);
    }

    std::optional<HamiltonSpace> hamiltonian;
    if (j.contains("hamiltonian")) {
        hamiltonian = load_hamiltonian(j.at("hamiltonian"), chart, h, phi, constants, physical);
    }

    std::optional<TransitionMap> transition;
    if (j.contains("transition")) {
        const auto& t = j.at("transition");
        if (t.contains("random_seed")) {
            transition = random_transition(chart, get_size(t, "random_seed", "transition"));
        } else {
            transition = TransitionMap::parse(chart, strings(require(t, "t_forward", "transition"), m, "t_forward"),
                                              strings(require(t, "t_inverse", "transition"), m, "t_inverse"),
                                              strings(require(t, "x_forward", "transition"), n, "x_forward"),
                                              strings(require(t, "x_inverse", "transition"), n, "x_inverse"),
                                              constants);
        }
        transition->validate(domain, tol.equiv);
    }

    std::vector<double> coords = domain.center();
    {
        // center() follows domain.variables(); reorder into chart layout.
        const auto vars = domain.variables();
        std::vector<double> ordered(chart.dim());
        for (std::size_t k = 0; k < chart.dim(); ++k) {
            const auto it = std::find(vars.begin(), vars.end(), chart.names()[k]);
            ordered[k] = coords[static_cast<std::size_t>(it - vars.begin())];
        }
        coords = std::move(ordered);
    }
    if (j.contains("point")) {
        for (const auto& [name, value] : j.at("point").items()) {
            const auto& names = chart.names();
            const auto it = std::find(names.begin(), names.end(), name);
            if (it == names.end()) throw ConfigError("point names unknown coordinate '" + name + "'");
            coords[static_cast<std::size_t>(it - names.begin())] = value.get<double>();
        }
    }

    std::optional<Fault> fault;
    if (j.contains("fault")) {
        const auto& f = j.at("fault");
        if (f.value("block", std::string("N2")) != "N2") throw ConfigError("fault injection supports N2 only");
        const std::size_t a = get_size(f, "a", "fault");
        const std::size_t i = get_size(f, "i", "fault");
        const std::size_t jj = get_size(f, "j", "fault");
        if (a < 1 || a > m || i < 1 || i > n || jj < 1 || jj > n) {
            throw DimensionError("fault indices are 1-based and must lie within (m, n, n)");
        }
        fault = Fault{a - 1, i - 1, jj - 1, require(f, "delta", "fault").get<double>()};
    }

    std::ostringstream digest_input;
    digest_input << j.dump() << "|seed=" << domain.seed() << "|tol=" << tol.equiv << ',' << tol.law << ','
                 << tol.regularity;
    std::ostringstream hex;
    hex << std::hex;
    hex.width(16);
    hex.fill('0');
    hex << fnv1a(digest_input.str());

    return Manifest{chart,
                    std::move(h),
                    std::move(phi),
                    std::move(hamiltonian),
                    std::move(transition),
                    domain,
                    tol,
                    JetPoint(m, n, std::move(coords)),
                    fault,
                    hex.str()};
}

Manifest load_manifest_file(const std::string& path, const Overrides& o) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open manifest '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("manifest '" + path + "' is not valid JSON: " + e.what());
    }
    return load_manifest(j, o);
}

}  // namespace polyjet::cli
