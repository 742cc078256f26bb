#include "zastava/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "zastava/error.hpp"
#include "zastava/rng.hpp"

namespace zastava
{

namespace
{

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& field, const std::string& reason)
{
    throw Error(ErrorCode::SchemaError, "field '" + field + "': " + reason);
}

double parse_decimal_or_fraction(const std::string& text, const std::string& field)
{
    const auto parse_number = [&](const std::string& s) {
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(s, &used);
        } catch (const std::exception&) {
            schema_error(field, "'" + s + "' is not a number");
        }
        if (used != s.size())
            schema_error(field, "'" + s + "' is not a number");
        return value;
    };
    const std::size_t slash = text.find('/');
    if (slash == std::string::npos)
        return parse_number(text);
    if (slash == 0 || slash + 1 >= text.size())
        schema_error(field, "'" + text + "' is not a fraction");
    const double denominator = parse_number(text.substr(slash + 1));
    if (denominator == 0.0)
        schema_error(field, "'" + text + "' divides by zero");
    return parse_number(text.substr(0, slash)) / denominator;
}

Complex parse_complex_string(std::string text, const std::string& field)
{
    text.erase(std::remove_if(text.begin(), text.end(),
                              [](unsigned char c) { return std::isspace(c); }),
               text.end());
    if (text.empty())
        schema_error(field, "empty complex literal");

    double re = 0.0;
    double im = 0.0;
    bool have_re = false;
    bool have_im = false;
    std::size_t pos = 0;
    while (pos < text.size()) {
        double sign = 1.0;
        if (text[pos] == '+' || text[pos] == '-') {
            sign = text[pos] == '-' ? -1.0 : 1.0;
            ++pos;
        }
        std::size_t end = pos;
        while (end < text.size() && text[end] != '+' && text[end] != '-')
            ++end;
        std::string term = text.substr(pos, end - pos);
        if (term.empty())
            schema_error(field, "'" + text + "' has an empty term");
        const bool imaginary = term.back() == 'i';
        if (imaginary)
            term.pop_back();
        const double magnitude = term.empty() && imaginary
                                     ? 1.0
                                     : parse_decimal_or_fraction(term, field);
        if (imaginary) {
            if (have_im)
                schema_error(field, "'" + text + "' has two imaginary terms");
            im = sign * magnitude;
            have_im = true;
        } else {
            if (have_re)
                schema_error(field, "'" + text + "' has two real terms");
            re = sign * magnitude;
            have_re = true;
        }
        pos = end;
    }
    return Complex(re, im);
}

void require_keys(const json& obj, const std::string& where,
                  const std::vector<std::string>& allowed)
{
    for (const auto& item : obj.items())
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
            schema_error(where.empty() ? item.key() : where + "." + item.key(),
                         "unknown field");
}

Quiver parse_quiver(const json& value)
{
    if (value.is_string())
        return named_quiver(value.get<std::string>());
    if (!value.is_object())
        schema_error("quiver", "expected a catalog name or {vertices, arrows}");
    require_keys(value, "quiver", {"vertices", "arrows", "permissive"});
    if (!value.contains("vertices") || !value["vertices"].is_array())
        schema_error("quiver.vertices", "expected an array of vertex ids");
    std::vector<std::string> vertices;
    for (const auto& v : value["vertices"]) {
        if (!v.is_string())
            schema_error("quiver.vertices", "vertex ids must be strings");
        vertices.push_back(v.get<std::string>());
    }
    std::vector<std::pair<std::string, std::string>> arrows;
    if (value.contains("arrows")) {
        if (!value["arrows"].is_array())
            schema_error("quiver.arrows", "expected an array of [source, target] pairs");
        for (const auto& a : value["arrows"]) {
            if (!a.is_array() || a.size() != 2 || !a[0].is_string() || !a[1].is_string())
                schema_error("quiver.arrows", "each arrow is a [source, target] pair of ids");
            arrows.emplace_back(a[0].get<std::string>(), a[1].get<std::string>());
        }
    }
    bool permissive = false;
    if (value.contains("permissive")) {
        if (!value["permissive"].is_boolean())
            schema_error("quiver.permissive", "expected a boolean");
        permissive = value["permissive"].get<bool>();
    }
    return make_quiver(std::move(vertices), std::move(arrows), permissive);
}

Degree parse_alpha(const json& value, const Quiver& quiver)
{
    if (!value.is_array())
        schema_error("alpha", "expected an array of per-color counts");
    Degree alpha;
    for (const auto& entry : value) {
        if (!entry.is_number_integer())
            schema_error("alpha", "counts must be integers");
        alpha.counts.push_back(entry.get<int>());
    }
    validate_degree(quiver, alpha);
    if (!alpha.admissible())
        throw Error(ErrorCode::ValidationError,
                    "alpha must have every count >= 1 for the chart suites");
    return alpha;
}

double parse_positive(const json& value, const std::string& field)
{
    if (!value.is_number())
        schema_error(field, "expected a number");
    const double x = value.get<double>();
    if (!(x > 0.0) || !std::isfinite(x))
        throw Error(ErrorCode::ValidationError, "field '" + field + "' must be positive");
    return x;
}

} // namespace

const std::vector<std::string>& suite_names()
{
    static const std::vector<std::string> names = {
        "elliptic_identities", "bracket_antisymmetry", "jacobi",
        "pushforward",         "degenerations",        "ranks_segre",
        "a2_model",            "flows",                "residue_coords",
    };
    return names;
}

bool is_suite_name(const std::string& name)
{
    const auto& names = suite_names();
    return std::find(names.begin(), names.end(), name) != names.end();
}

int default_sample_count(const std::string& suite)
{
    if (suite == "elliptic_identities")
        return 100;
    if (suite == "bracket_antisymmetry" || suite == "jacobi")
        return 50;
    if (suite == "pushforward")
        return 20;
    if (suite == "a2_model")
        return 1000;
    if (suite == "ranks_segre")
        return 12;
    if (suite == "flows")
        return 4;
    return 8; // degenerations, residue_coords
}

Complex parse_complex(const nlohmann::json& value)
{
    if (value.is_number())
        return Complex(value.get<double>(), 0.0);
    if (value.is_string())
        return parse_complex_string(value.get<std::string>(), "complex");
    if (value.is_array()) {
        if (value.size() != 2 || !value[0].is_number() || !value[1].is_number())
            schema_error("complex", "array form must be [re, im]");
        return Complex(value[0].get<double>(), value[1].get<double>());
    }
    schema_error("complex", "expected [re, im], a number, or a string literal");
}

RunConfig parse_config(const nlohmann::json& doc)
{
    if (!doc.is_object())
        throw Error(ErrorCode::SchemaError, "config document must be a json object");
    require_keys(doc, "",
                 {"tau", "quiver", "alpha", "seed", "tolerances", "sample_counts", "suites"});

    RunConfig cfg;
    cfg.quiver = doc.contains("quiver") ? parse_quiver(doc["quiver"]) : named_quiver("A2");
    cfg.alpha = doc.contains("alpha") ? parse_alpha(doc["alpha"], cfg.quiver)
                                      : Degree{std::vector<int>(cfg.quiver.vertices.size(), 2)};

    if (doc.contains("tau"))
        cfg.tau = parse_complex(doc["tau"]);
    if (cfg.tau.imag() < 0.1)
        throw Error(ErrorCode::ValidationError,
                    "Im(tau) must be >= 0.1, got " + std::to_string(cfg.tau.imag()));

    if (doc.contains("seed")) {
        const json& seed = doc["seed"];
        if (seed.is_number_unsigned())
            cfg.seed = seed.get<std::uint64_t>();
        else if (seed.is_number_integer() && seed.get<std::int64_t>() >= 0)
            cfg.seed = static_cast<std::uint64_t>(seed.get<std::int64_t>());
        else if (seed.is_string())
            try {
                cfg.seed = std::stoull(seed.get<std::string>());
            } catch (const std::exception&) {
                schema_error("seed", "expected a non-negative 64-bit integer");
            }
        else
            schema_error("seed", "expected a non-negative 64-bit integer");
    }

    if (doc.contains("tolerances")) {
        const json& tols = doc["tolerances"];
        if (!tols.is_object())
            schema_error("tolerances", "expected an object");
        require_keys(tols, "tolerances", {"tol", "delta", "jacobi_tol", "push_tol"});
        if (tols.contains("tol"))
            cfg.tolerances.tol = parse_positive(tols["tol"], "tolerances.tol");
        if (tols.contains("delta"))
            cfg.tolerances.delta = parse_positive(tols["delta"], "tolerances.delta");
        if (tols.contains("jacobi_tol"))
            cfg.tolerances.jacobi_tol = parse_positive(tols["jacobi_tol"], "tolerances.jacobi_tol");
        if (tols.contains("push_tol"))
            cfg.tolerances.push_tol = parse_positive(tols["push_tol"], "tolerances.push_tol");
    }

    for (const std::string& name : suite_names())
        cfg.sample_counts[name] = default_sample_count(name);
    if (doc.contains("sample_counts")) {
        const json& counts = doc["sample_counts"];
        if (!counts.is_object())
            schema_error("sample_counts", "expected an object suite -> count");
        for (const auto& item : counts.items()) {
            if (!is_suite_name(item.key()))
                schema_error("sample_counts." + item.key(), "unknown suite");
            if (!item.value().is_number_integer() || item.value().get<int>() < 1)
                throw Error(ErrorCode::ValidationError,
                            "sample_counts." + item.key() + " must be >= 1");
            cfg.sample_counts[item.key()] = item.value().get<int>();
        }
    }

    if (doc.contains("suites")) {
        const json& suites = doc["suites"];
        if (!suites.is_array())
            schema_error("suites", "expected an array of suite names");
        std::vector<std::string> requested;
        for (const auto& entry : suites) {
            if (!entry.is_string() || !is_suite_name(entry.get<std::string>()))
                schema_error("suites",
                             "unknown suite " + entry.dump() + "; known suites: " +
                                 [] {
                                     std::string all;
                                     for (const auto& n : suite_names())
                                         all += (all.empty() ? "" : ", ") + n;
                                     return all;
                                 }());
            requested.push_back(entry.get<std::string>());
        }
        // canonical order, deduplicated, so reports merge deterministically
        for (const std::string& name : suite_names())
            if (std::find(requested.begin(), requested.end(), name) != requested.end())
                cfg.suites.push_back(name);
    } else {
        cfg.suites = suite_names();
    }

    return cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open config file '" + path + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::SchemaError,
                    "config file '" + path + "' is not valid json: " + e.what());
    }
    return parse_config(doc);
}

nlohmann::json config_to_json(const RunConfig& cfg)
{
    nlohmann::json quiver;
    quiver["vertices"] = cfg.quiver.vertices;
    nlohmann::json arrows = nlohmann::json::array();
    for (const Arrow& a : cfg.quiver.arrows)
        arrows.push_back({cfg.quiver.vertices[a.source], cfg.quiver.vertices[a.target]});
    quiver["arrows"] = arrows;
    quiver["permissive"] = cfg.quiver.permissive;

    nlohmann::json out;
    out["tau"] = {cfg.tau.real(), cfg.tau.imag()};
    out["quiver"] = quiver;
    out["alpha"] = cfg.alpha.counts;
    out["seed"] = cfg.seed;
    out["tolerances"] = {{"tol", cfg.tolerances.tol},
                         {"delta", cfg.tolerances.delta},
                         {"jacobi_tol", cfg.tolerances.jacobi_tol},
                         {"push_tol", cfg.tolerances.push_tol}};
    out["sample_counts"] = cfg.sample_counts;
    out["suites"] = cfg.suites;
    return out;
}

} // namespace zastava
