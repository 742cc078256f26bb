#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "zastava/elliptic.hpp"
#include "zastava/quiver.hpp"

namespace zastava
{

struct Tolerances {
    double tol = 1e-9;        // generic identity tolerance (normalized suites)
    double delta = 1e-3;      // chart separation for constructed points
    double jacobi_tol = 1e-8; // absolute Jacobiator residual bound
    double push_tol = 1e-9;   // relative pushforward-vs-closed-form bound
};

// The nine verification suites in canonical execution order.
const std::vector<std::string>& suite_names();
bool is_suite_name(const std::string& name);
int default_sample_count(const std::string& suite);

struct RunConfig {
    Complex tau{0.0, 1.0};
    Quiver quiver;                            // default A2
    Degree alpha;                             // default (2, 2)
    std::uint64_t seed = 20260814;            // overridden by ZASTAVA_SEED / --seed
    Tolerances tolerances;
    std::map<std::string, int> sample_counts; // resolved for every suite
    std::vector<std::string> suites;          // selection, canonical order, deduped
};

// Accepts [re, im] arrays, plain numbers, or strings built from at most one
// real and one imaginary term, each a decimal or a fraction: "i", "2i",
// "1/2+i", "0.3-0.7i", "-1/3". Throws SchemaError on anything else.
Complex parse_complex(const nlohmann::json& value);

// Validated config with defaults filled. SchemaError names the offending
// field; ValidationError reports bound violations (e.g. Im tau < 0.1).
RunConfig parse_config(const nlohmann::json& doc);

// parse_config plus file handling (IoError on unreadable paths).
RunConfig load_config(const std::string& path);

// Fully resolved echo of the config, stable key order.
nlohmann::json config_to_json(const RunConfig& cfg);

} // namespace zastava
