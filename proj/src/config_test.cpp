#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>

#include "zastava/config.hpp"
#include "zastava/error.hpp"

namespace
{

using nlohmann::json;
using zastava::Complex;
using zastava::ErrorCode;
using zastava::RunConfig;

ErrorCode thrown_code(const std::function<void()>& body)
{
    try {
        body();
    } catch (const zastava::Error& e) {
        return e.code();
    }
    FAIL("expected a zastava::Error");
    return ErrorCode::ValidationError;
}

} // namespace

TEST_CASE("config: minimal document fills every default")
{
    const RunConfig cfg = zastava::parse_config(json::object());
    CHECK(cfg.tau == Complex(0.0, 1.0));
    CHECK(cfg.quiver.vertex_count() == 2);
    REQUIRE(cfg.quiver.arrows.size() == 1);
    CHECK(cfg.quiver.vertices[cfg.quiver.arrows[0].source] == "2");
    CHECK(cfg.quiver.vertices[cfg.quiver.arrows[0].target] == "1");
    CHECK(cfg.alpha.counts == std::vector<int>{2, 2});
    CHECK(cfg.seed == 20260814u);
    CHECK(cfg.tolerances.tol == 1e-9);
    CHECK(cfg.tolerances.delta == 1e-3);
    CHECK(cfg.tolerances.jacobi_tol == 1e-8);
    CHECK(cfg.tolerances.push_tol == 1e-9);
    CHECK(cfg.suites == zastava::suite_names());
    CHECK(cfg.sample_counts.at("elliptic_identities") == 100);
    CHECK(cfg.sample_counts.at("jacobi") == 50);
    CHECK(cfg.sample_counts.at("a2_model") == 1000);
    CHECK(cfg.sample_counts.at("degenerations") == 8);
}

TEST_CASE("config: complex literals in all supported forms")
{
    CHECK(zastava::parse_complex(json("i")) == Complex(0.0, 1.0));
    CHECK(zastava::parse_complex(json("2i")) == Complex(0.0, 2.0));
    CHECK(zastava::parse_complex(json("-i")) == Complex(0.0, -1.0));
    CHECK(zastava::parse_complex(json("1/2+i")) == Complex(0.5, 1.0));
    CHECK(zastava::parse_complex(json("0.3-0.7i")) == Complex(0.3, -0.7));
    CHECK(zastava::parse_complex(json("2i + 1/4")) == Complex(0.25, 2.0));
    CHECK(zastava::parse_complex(json("-3/4-1/4i")) == Complex(-0.75, -0.25));
    CHECK(zastava::parse_complex(json(2.5)) == Complex(2.5, 0.0));
    CHECK(zastava::parse_complex(json::array({0.5, 2.0})) == Complex(0.5, 2.0));

    for (const char* bad : {"", "1+2", "i+i", "++1", "abc", "1e", "1/0+i", "1//2"})
        CHECK(thrown_code([&] { zastava::parse_complex(json(bad)); }) == ErrorCode::SchemaError);
    CHECK(thrown_code([] { zastava::parse_complex(json::array({1.0})); }) ==
          ErrorCode::SchemaError);
    CHECK(thrown_code([] { zastava::parse_complex(json::object()); }) == ErrorCode::SchemaError);
}

TEST_CASE("config: tau domain and seed forms")
{
    CHECK(zastava::parse_config(json{{"tau", "1/2+2i"}}).tau == Complex(0.5, 2.0));
    CHECK(thrown_code([] { zastava::parse_config(json{{"tau", "0.05i"}}); }) ==
          ErrorCode::ValidationError); // Im(tau) below the 0.1 floor
    CHECK(thrown_code([] { zastava::parse_config(json{{"tau", 2.0}}); }) ==
          ErrorCode::ValidationError); // real tau

    CHECK(zastava::parse_config(json{{"seed", 7}}).seed == 7u);
    CHECK(zastava::parse_config(json{{"seed", "18446744073709551615"}}).seed ==
          18446744073709551615ull);
    CHECK(thrown_code([] { zastava::parse_config(json{{"seed", -3}}); }) ==
          ErrorCode::SchemaError);
    CHECK(thrown_code([] { zastava::parse_config(json{{"seed", "not-a-number"}}); }) ==
          ErrorCode::SchemaError);
}

TEST_CASE("config: quiver and alpha validation")
{
    const json inline_quiver{
        {"quiver",
         {{"vertices", {"a", "b", "c"}},
          {"arrows", json::array({json::array({"a", "b"}), json::array({"b", "c"})})}}},
        {"alpha", {1, 2, 1}}};
    const RunConfig cfg = zastava::parse_config(inline_quiver);
    CHECK(cfg.quiver.vertex_count() == 3);
    CHECK(cfg.alpha.counts == std::vector<int>{1, 2, 1});

    CHECK(thrown_code([] { zastava::parse_config(json{{"quiver", "Z9"}}); }) ==
          ErrorCode::ValidationError); // not in the named catalog
    CHECK(thrown_code([] { zastava::parse_config(json{{"alpha", {2}}}); }) ==
          ErrorCode::DegreeMismatch); // A2 needs two counts
    CHECK(thrown_code([] { zastava::parse_config(json{{"alpha", {2, 0}}}); }) ==
          ErrorCode::ValidationError); // zero count is not admissible here
    CHECK(thrown_code([] { zastava::parse_config(json{{"alpha", {2, -1}}}); }) ==
          ErrorCode::ValidationError);
}

TEST_CASE("config: unknown fields, suites and sample counts")
{
    CHECK(thrown_code([] { zastava::parse_config(json{{"seeed", 1}}); }) ==
          ErrorCode::SchemaError);
    CHECK(thrown_code([] {
              zastava::parse_config(json{{"tolerances", {{"jacobi", 1e-8}}}});
          }) == ErrorCode::SchemaError);
    CHECK(thrown_code([] {
              zastava::parse_config(json{{"tolerances", {{"jacobi_tol", 0.0}}}});
          }) == ErrorCode::ValidationError);

    CHECK(thrown_code([] { zastava::parse_config(json{{"suites", {"no_such_suite"}}}); }) ==
          ErrorCode::SchemaError);
    CHECK(thrown_code([] {
              zastava::parse_config(json{{"sample_counts", {{"no_such_suite", 3}}}});
          }) == ErrorCode::SchemaError);
    CHECK(thrown_code([] {
              zastava::parse_config(json{{"sample_counts", {{"jacobi", 0}}}});
          }) == ErrorCode::ValidationError);

    // Requested suites come back deduplicated in canonical order.
    const RunConfig cfg = zastava::parse_config(
        json{{"suites", {"jacobi", "elliptic_identities", "jacobi", "a2_model"}}});
    CHECK(cfg.suites ==
          std::vector<std::string>{"elliptic_identities", "jacobi", "a2_model"});
    CHECK(zastava::parse_config(json{{"suites", json::array()}}).suites.empty());

    const RunConfig counted =
        zastava::parse_config(json{{"sample_counts", {{"jacobi", 3}}}});
    CHECK(counted.sample_counts.at("jacobi") == 3);
    CHECK(counted.sample_counts.at("pushforward") == 20);
}

TEST_CASE("config: json echo is a fixpoint of parsing")
{
    const json doc{{"tau", "1/2+i"},
                   {"quiver", "A3"},
                   {"alpha", {1, 2, 1}},
                   {"seed", 99},
                   {"tolerances", {{"jacobi_tol", 1e-7}}},
                   {"suites", {"jacobi", "flows"}}};
    const json echo = zastava::config_to_json(zastava::parse_config(doc));
    CHECK(echo["tau"] == json::array({0.5, 1.0}));
    CHECK(echo["alpha"] == json::array({1, 2, 1}));
    CHECK(echo["seed"] == 99);
    CHECK(echo["tolerances"]["jacobi_tol"] == 1e-7);
    CHECK(echo["suites"] == json::array({"jacobi", "flows"}));
    CHECK(zastava::config_to_json(zastava::parse_config(echo)) == echo);
}

TEST_CASE("config: file loading errors")
{
    CHECK(thrown_code([] { zastava::load_config("/nonexistent/zastava.json"); }) ==
          ErrorCode::IoError);

    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "zastava_config_test";
    fs::create_directories(dir);

    const fs::path bad = dir / "bad.json";
    std::ofstream(bad) << "{ not json";
    CHECK(thrown_code([&] { zastava::load_config(bad.string()); }) == ErrorCode::SchemaError);

    const fs::path good = dir / "good.json";
    std::ofstream(good) << R"({"tau": "2i", "seed": 5})";
    const RunConfig cfg = zastava::load_config(good.string());
    CHECK(cfg.tau == Complex(0.0, 2.0));
    CHECK(cfg.seed == 5u);
    fs::remove_all(dir);
}
