#include <gtest/gtest.h>

#include "polyjet/calculus.hpp"
#include "polyjet/cli.hpp"
#include "polyjet/parser.hpp"

namespace pj = polyjet;
namespace cli = polyjet::cli;
using nlohmann::json;

namespace {

std::string path(const std::string& name) { return std::string(POLYJET_MANIFEST_DIR) + "/" + name; }

cli::Manifest load(const std::string& name, const cli::Overrides& o = {}) {
    return cli::load_manifest_file(path(name), o);
}

const cli::Check& find(const cli::Report& r, const std::string& name) {
    for (const auto& c : r.checks) {
        if (c.result.name == name) return c;
    }
    throw std::runtime_error("no check " + name);
}

json base() {
    return json::parse(R"({
        "dimensions": {"m": 2, "n": 2},
        "temporal_metric": [["1", "0"], ["0", "1"]],
        "spatial_metric": [["1", "0"], ["0", "1"]]
    })");
}

bool all_zero(const json& j) {
    if (j.is_array()) {
        for (const auto& e : j) {
            if (!all_zero(e)) return false;
        }
        return true;
    }
    return j.get<double>() == 0.0;
}

}  // namespace

TEST(Manifest, RejectsUnknownKeysAndBadShapes) {
    auto j = base();
    j["colour"] = "red";
    EXPECT_THROW(cli::load_manifest(j), pj::ConfigError);

    j = base();
    j["temporal_metric"] = json::parse(R"([["1"]])");
    EXPECT_THROW(cli::load_manifest(j), pj::DimensionError);

    j = base();
    j["tolerances"] = {{"law", -1.0}};
    EXPECT_THROW(cli::load_manifest(j), pj::ConfigError);

    j = base();
    j["spatial_metric"] = json::parse(R"([["1", "0"], ["0", "y7"]])");
    EXPECT_THROW(cli::load_manifest(j), pj::UnknownIdentifier);

    j = base();
    j["spatial_metric"] = json::parse(R"([["1", "x1"], ["0", "1"]])");
    EXPECT_THROW(cli::load_manifest(j), pj::ConfigError);

    j = base();
    j["fault"] = {{"a", 3}, {"i", 1}, {"j", 1}, {"delta", 0.1}};
    EXPECT_THROW(cli::load_manifest(j), pj::DimensionError);
}

TEST(Manifest, SingularTransitionIsRejected) {
    auto j = base();
    j["transition"] = json::parse(R"({"t_forward": ["t1", "t2"], "t_inverse": ["t1", "t2"],
                                      "x_forward": ["x1^3", "x2"], "x_inverse": ["x1", "x2"]})");
    EXPECT_THROW(cli::load_manifest(j), pj::Error);
}

TEST(Manifest, OverridesAndDigest) {
    const auto m = load("flat.json");
    EXPECT_EQ(m.domain.seed(), 7u);
    EXPECT_EQ(m.digest, load("flat.json").digest);

    const auto seeded = load("flat.json", {.seed = 99, .tol = {}});
    EXPECT_EQ(seeded.domain.seed(), 99u);
    EXPECT_NE(seeded.digest, m.digest);

    const auto tight = load("flat.json", {.seed = {}, .tol = 1e-3});
    EXPECT_EQ(tight.tol.equiv, 1e-3);
    EXPECT_EQ(tight.tol.law, 1e-3);
    EXPECT_EQ(tight.tol.regularity, 1e-3);
}

TEST(Manifest, PointDefaultsToDomainCenter) {
    auto j = base();
    j["sample_domain"] = {{"intervals", {{"t1", {1.0, 3.0}}}}};
    j["point"] = {{"x2", 0.25}};
    const auto m = cli::load_manifest(j);
    EXPECT_DOUBLE_EQ(m.point.t(0), 2.0);
    EXPECT_DOUBLE_EQ(m.point.x(1), 0.25);
}

TEST(Christoffel, FlatManifestGivesZeroTables) {
    const auto r = cli::cmd_christoffel(load("flat.json"));
    EXPECT_TRUE(r.passed());
    EXPECT_TRUE(all_zero(r.objects["kappa"]["at_point"]));
    EXPECT_TRUE(all_zero(r.objects["gamma"]["at_point"]));
}

TEST(Christoffel, CurvedManifestSpotValues) {
    const auto r = cli::cmd_christoffel(load("curved_h.json"));
    EXPECT_TRUE(r.passed());
    EXPECT_NEAR(r.objects["kappa"]["at_point"][1][0][1].get<double>(), 0.5, 1e-12);
    EXPECT_NEAR(r.objects["kappa"]["at_point"][0][1][1].get<double>(), -1.0, 1e-12);
    EXPECT_NEAR(r.objects["gamma"]["at_point"][0][0][0].get<double>(), 1.0, 1e-12);
    EXPECT_NE(cli::render_table(r).find("kappa[2,1,2] = 0.5"), std::string::npos);
}

TEST(Christoffel, MissingMetricIsConfigError) {
    json j = base();
    j.erase("temporal_metric");
    j.erase("spatial_metric");
    EXPECT_THROW(cli::cmd_christoffel(cli::load_manifest(j)), pj::ConfigError);
}

TEST(Christoffel, ExtractedMetricOfHamiltonian) {
    const auto r = cli::cmd_christoffel(load("gravitational.json"));
    EXPECT_TRUE(r.passed());
    // g = m_c c phi, so Gamma(g) = gamma(phi).
    EXPECT_EQ(r.objects["Gamma_g"]["at_point"], r.objects["gamma"]["at_point"]);
}

TEST(Connection, FlatManifestGivesZero) {
    const auto r = cli::cmd_connection(load("flat.json"));
    EXPECT_TRUE(r.passed());
    EXPECT_TRUE(all_zero(r.objects["N1"]["at_point"]));
    EXPECT_TRUE(all_zero(r.objects["N2"]["at_point"]));
}

TEST(Connection, GravitationalMatchesMinusGammaP) {
    const auto m = load("gravitational.json");
    const auto r = cli::cmd_connection(m);
    EXPECT_TRUE(r.passed());
    // Only gamma^1_11 = 1 is nonzero: N2^(a)_(1)1 = -p_1^a.
    const auto& n2 = r.objects["N2"]["at_point"];
    EXPECT_NEAR(n2[0][0][0].get<double>(), -m.point.p(0, 0), 1e-12);
    EXPECT_NEAR(n2[1][0][0].get<double>(), -m.point.p(0, 1), 1e-12);
    EXPECT_NEAR(n2[0][1][1].get<double>(), 0.0, 1e-12);
}

TEST(Connection, NonRegularHamiltonianExitsNotRegular) {
    const auto r = cli::cmd_connection(load("h_bad.json"));
    EXPECT_FALSE(r.passed());
    EXPECT_EQ(r.exit_code(), cli::exit_code(pj::ErrorCategory::not_regular));
    EXPECT_FALSE(r.objects.contains("N2"));
    EXPECT_GT(r.objects["regularity"]["residual"].get<double>(), 1.0);
}

TEST(Verify, IdentityTransitionGivesZeroResiduals) {
    const auto r = cli::cmd_verify(load("gravitational.json"));
    EXPECT_TRUE(r.passed());
    for (const auto& c : r.checks) {
        if (c.result.name != "kronecker_regularity") EXPECT_EQ(c.result.max_residual, 0.0) << c.result.name;
    }
}

TEST(Verify, NonlinearTransitionPasses) {
    const auto r = cli::cmd_verify(load("nonlinear_transition.json"));
    EXPECT_TRUE(r.passed());
    EXPECT_EQ(r.exit_code(), 0);
    for (const auto* name : {"dtensor_law.liouville", "dtensor_law.polymomentum_liouville",
                             "dtensor_law.normalization", "semispray_law.temporal", "semispray_law.spatial",
                             "connection_law.N0", "adapted_coframe.N0", "connection_law.hamilton",
                             "adapted_coframe.hamilton"}) {
        EXPECT_LE(find(r, name).result.max_residual, 1e-8) << name;
    }
}

TEST(Verify, FaultIsNamed) {
    const auto r = cli::cmd_verify(load("fault.json"));
    EXPECT_FALSE(r.passed());
    EXPECT_EQ(r.exit_code(), cli::exit_code(pj::ErrorCategory::residual_too_large));
    EXPECT_EQ(find(r, "connection_law.N0").result.worst_component, "N2[a=2,i=1,j=2]");
    EXPECT_EQ(find(r, "adapted_coframe.N0").result.worst_component, "N2[a=2,i=1,j=2]");
    EXPECT_TRUE(find(r, "semispray_law.spatial").result.passed);
}

TEST(Verify, ReportIsDeterministic) {
    const auto m = load("nonlinear_transition.json");
    auto a = cli::to_json(cli::run_command("verify", m));
    auto b = cli::to_json(cli::run_command("verify", m));
    a.erase("wall_time_ms");
    b.erase("wall_time_ms");
    EXPECT_EQ(a.dump(), b.dump());
    EXPECT_EQ(a["schema"], 1);
}

TEST(Regularity, ElectrodynamicPotentialRecovered) {
    const auto m = load("electrodynamic.json");
    const auto r = cli::cmd_regularity(m);
    ASSERT_TRUE(r.passed());
    EXPECT_TRUE(r.objects["regular"].get<bool>());
    // U = -(2e / (m_c c^2)) A with e = 0.5, m_c = 2, c = 1.5.
    const double k = -2 * 0.5 / (2.0 * 1.5 * 1.5);
    const auto names = m.chart.all_names();
    const std::vector<std::vector<std::string>> A{{"x2", "sin(x1)"}, {"x1*x2", "1"}};
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t a = 0; a < 2; ++a) {
            const auto U = pj::parse_expr(r.objects["U"]["symbolic"][i][a].get<std::string>(), names);
            EXPECT_TRUE(pj::equiv(U, k * pj::parse_expr(A[i][a], names), m.domain, 1e-10));
        }
    }
    for (const auto* key : {"g", "U", "F", "N1", "N2"}) EXPECT_TRUE(r.objects.contains(key)) << key;
}

TEST(Regularity, BadHamiltonianIsNotRegular) {
    const auto r = cli::cmd_regularity(load("h_bad.json"));
    EXPECT_FALSE(r.objects["regular"].get<bool>());
    EXPECT_EQ(r.exit_code(), cli::exit_code(pj::ErrorCategory::not_regular));
}

TEST(Regularity, SingleTimeNotesPDependence) {
    const auto r = cli::cmd_regularity(load("single_time.json"));
    EXPECT_TRUE(r.passed());
    bool noted = false;
    for (const auto& n : r.notes) noted = noted || n.find("g depends on p") != std::string::npos;
    EXPECT_TRUE(noted);
    EXPECT_FALSE(r.objects.contains("U"));
}

TEST(Regularity, NonautonomousReconstruction) {
    const auto r = cli::cmd_regularity(load("nonautonomous.json"));
    EXPECT_TRUE(r.passed());
    EXPECT_LE(find(r, "reconstruction").result.max_residual, 1e-10);
}

TEST(Report, ExitCodesAreDistinct) {
    std::set<int> codes;
    for (int c = 0; c <= static_cast<int>(pj::ErrorCategory::dimension); ++c) {
        codes.insert(cli::exit_code(static_cast<pj::ErrorCategory>(c)));
    }
    EXPECT_EQ(codes.size(), 10u);
    EXPECT_FALSE(codes.contains(0));
    EXPECT_FALSE(codes.contains(1));
}

TEST(Report, UnknownCommand) {
    EXPECT_THROW(cli::run_command("plot", load("flat.json")), pj::ConfigError);
}
