#include <doctest.h>

#include <string>
#include <vector>

#include "zastava/error.hpp"
#include "zastava/rng.hpp"
#include "zastava/suites.hpp"

namespace
{

using nlohmann::json;
using zastava::Complex;
using zastava::RunConfig;
using zastava::VerificationReport;

// A cheap configuration exercising every suite.
RunConfig small_config()
{
    return zastava::parse_config(json{{"seed", 424242},
                                      {"sample_counts",
                                       {{"elliptic_identities", 5},
                                        {"bracket_antisymmetry", 3},
                                        {"jacobi", 2},
                                        {"pushforward", 2},
                                        {"degenerations", 1},
                                        {"ranks_segre", 3},
                                        {"a2_model", 5},
                                        {"flows", 1},
                                        {"residue_coords", 1}}}});
}

} // namespace

TEST_CASE("suites: per-sample seeds are stable and well separated")
{
    const std::uint64_t a = zastava::derive_seed(1, "jacobi", 0);
    CHECK(a == zastava::derive_seed(1, "jacobi", 0));
    CHECK(a != zastava::derive_seed(1, "jacobi", 1));
    CHECK(a != zastava::derive_seed(1, "flows", 0));
    CHECK(a != zastava::derive_seed(2, "jacobi", 0));
}

TEST_CASE("suites: samplers respect margins and shapes")
{
    const zastava::ModularParam mp = zastava::make_modular_param(Complex(0.5, 1.0));
    zastava::SplitMix64 rng(7);
    for (int i = 0; i < 200; ++i)
        CHECK(zastava::lattice_distance(zastava::sample_cell_point(mp, rng, 0.2), mp) >= 0.2);

    const zastava::Quiver quiver = zastava::named_quiver("A2");
    const zastava::Degree alpha{{2, 3}};
    const zastava::UnreducedChartPoint up =
        zastava::sample_unreduced_point(quiver, alpha, mp, rng, 0.1, 0.5, 2.0);
    REQUIRE(up.w.size() == 2);
    REQUIRE(up.w[0].size() == 2);
    REQUIRE(up.w[1].size() == 3);
    for (const auto& block : up.w)
        for (const Complex& w : block)
            CHECK(zastava::lattice_distance(w, mp) >= 0.1);
    for (const Complex& w0 : up.w[0])
        for (const Complex& w1 : up.w[1])
            CHECK(zastava::lattice_distance(w0 - w1, mp) >= 0.1);
    for (const auto& block : up.fiber)
        for (const Complex& y : block) {
            CHECK(std::abs(y) >= 0.5);
            CHECK(std::abs(y) <= 2.0);
        }

    const zastava::ReducedChartPoint rp =
        zastava::sample_reduced_point(quiver, alpha, mp, rng, 0.1, 0.5, 2.0);
    REQUIRE(rp.w_free[0].size() == 1);
    REQUIRE(rp.w_free[1].size() == 2);
    REQUIRE(rp.ratio[0].size() == 1);
    REQUIRE(rp.ratio[1].size() == 2);
    REQUIRE(rp.sum_constraint.size() == 2);
    // The derived points also keep the margin: check via the stored sums.
    for (int vi = 0; vi < 2; ++vi) {
        Complex derived = rp.sum_constraint[vi];
        for (const Complex& w : rp.w_free[vi])
            derived -= w;
        for (const Complex& other : rp.w_free[1 - vi])
            CHECK(zastava::lattice_distance(derived - other, mp) >= 0.1);
    }
}

TEST_CASE("suites: default run passes and reports are deterministic")
{
    const RunConfig cfg = small_config();
    const VerificationReport first = zastava::run_suites(cfg);
    CHECK(first.all_passed());
    REQUIRE(first.suites.size() == 9);
    for (const auto& suite : first.suites) {
        CHECK(suite.passed);
        CHECK(suite.failures.empty());
        CHECK(suite.samples >= 1);
        CHECK(suite.worst_index >= 0);
        CHECK(suite.worst_sample.rfind("sample ", 0) == 0);
    }

    const VerificationReport second = zastava::run_suites(cfg);
    CHECK(zastava::report_to_json(first, false) == zastava::report_to_json(second, false));

    // Parallel execution merges by sample index: identical document.
    const VerificationReport parallel = zastava::run_suites(cfg, 8);
    CHECK(zastava::report_to_json(first, false) == zastava::report_to_json(parallel, false));

    // Exact suites really are exact.
    for (const auto& suite : first.suites)
        if (suite.name == "bracket_antisymmetry" || suite.name == "ranks_segre" ||
            suite.name == "a2_model")
            CHECK(suite.max_residual == 0.0);
}

TEST_CASE("suites: report document shape and fixpoint")
{
    const RunConfig cfg = small_config();
    const VerificationReport rep = zastava::run_suites(cfg);
    const json doc = zastava::report_to_json(rep);

    CHECK(doc["artifact"]["name"] == "zastava");
    CHECK(doc["status"] == "pass");
    CHECK(doc["seed"] == 424242);
    CHECK(doc["config"] == zastava::config_to_json(cfg));
    CHECK(doc["suites"].size() == 9);
    CHECK(doc["suites"]["jacobi"]["status"] == "pass");
    CHECK(doc["suites"]["jacobi"]["samples"] == 2);
    CHECK(doc["suites"]["jacobi"]["tolerance"] == cfg.tolerances.jacobi_tol);
    CHECK(doc["timing"].contains("total"));

    // Serialization round-trips byte-identically (keys are sorted).
    CHECK(json::parse(doc.dump()) == doc);
    CHECK(json::parse(doc.dump()).dump() == doc.dump());

    const std::string text = zastava::report_to_text(rep);
    CHECK(text.find("[PASS] jacobi") != std::string::npos);
    CHECK(text.find("overall: PASS (9/9 suites)") != std::string::npos);
}

TEST_CASE("suites: forced failure is recorded with replayable samples")
{
    RunConfig cfg = small_config();
    cfg.tolerances.jacobi_tol = 1e-20; // below the double-precision floor
    cfg.suites = {"jacobi"};
    const VerificationReport rep = zastava::run_suites(cfg);
    CHECK_FALSE(rep.all_passed());
    REQUIRE(rep.suites.size() == 1);
    const zastava::SuiteResult& suite = rep.suites[0];
    CHECK_FALSE(suite.passed);
    CHECK(suite.max_residual > 1e-20);
    REQUIRE_FALSE(suite.failures.empty());
    for (const auto& failure : suite.failures) {
        CHECK(failure.message.find("exceeds tolerance") != std::string::npos);
        CHECK(failure.sample.find("seed") != std::string::npos);
        CHECK(failure.sample.find("w_free") != std::string::npos);
    }
    CHECK(zastava::report_to_json(rep)["status"] == "fail");
    CHECK(zastava::report_to_text(rep).find("[FAIL] jacobi") != std::string::npos);
}

TEST_CASE("suites: empty suite selection yields an empty passing report")
{
    RunConfig cfg = small_config();
    cfg.suites.clear();
    const VerificationReport rep = zastava::run_suites(cfg);
    CHECK(rep.all_passed());
    CHECK(rep.suites.empty());
    const json doc = zastava::report_to_json(rep);
    CHECK(doc["status"] == "pass");
    CHECK(doc["suites"] == json::object());
    CHECK(zastava::report_to_text(rep).find("(0/0 suites)") != std::string::npos);
}

TEST_CASE("suites: unknown suite name is a schema error")
{
    const RunConfig cfg = small_config();
    try {
        zastava::run_suite(cfg, "no_such_suite");
        FAIL("expected a zastava::Error");
    } catch (const zastava::Error& e) {
        CHECK(e.code() == zastava::ErrorCode::SchemaError);
    }
}

TEST_CASE("suites: errors inside samples are recorded, not fatal")
{
    // Chart delta 0.45 on a crowded cell: the sampler relaxes its rejection
    // margin below delta, so some bracket builds throw CoincidentPoints.
    // Those samples must land in the failure list while the rest still run.
    const RunConfig cfg = zastava::parse_config(json{{"seed", 1},
                                                     {"alpha", {3, 3}},
                                                     {"tolerances", {{"delta", 0.45}}},
                                                     {"sample_counts",
                                                      {{"bracket_antisymmetry", 5}}}});
    const zastava::SuiteResult suite = zastava::run_suite(cfg, "bracket_antisymmetry");
    CHECK_FALSE(suite.passed);
    CHECK(suite.samples == 5);
    REQUIRE(suite.failures.size() == 3);
    for (const auto& failure : suite.failures)
        CHECK(failure.message.find("CoincidentPoints") != std::string::npos);
    // The surviving samples still produced a residual and a worst sample.
    CHECK(suite.worst_index >= 0);
    CHECK(suite.max_residual == 0.0);
}
