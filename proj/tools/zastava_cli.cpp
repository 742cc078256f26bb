// Command-line driver: verification suites, bracket matrices at user points,
// Hamiltonian flows, and degeneration-limit reports.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "zastava/error.hpp"
#include "zastava/flows.hpp"
#include "zastava/suites.hpp"
#include "zastava/transform.hpp"

namespace
{

using nlohmann::json;
using zastava::BracketFamily;
using zastava::Complex;
using zastava::Error;
using zastava::ErrorCode;
using zastava::RunConfig;

json complex_json(Complex z)
{
    return json::array({z.real(), z.imag()});
}

json blocks_json(const std::vector<std::vector<Complex>>& blocks)
{
    json out = json::array();
    for (const auto& block : blocks) {
        json row = json::array();
        for (const Complex& z : block)
            row.push_back(complex_json(z));
        out.push_back(row);
    }
    return out;
}

std::vector<std::vector<Complex>> parse_blocks(const json& value, const std::string& field)
{
    if (!value.is_array())
        throw Error(ErrorCode::SchemaError,
                    "field '" + field + "': expected an array of per-color arrays");
    std::vector<std::vector<Complex>> blocks;
    for (const auto& block : value) {
        if (!block.is_array())
            throw Error(ErrorCode::SchemaError,
                        "field '" + field + "': expected an array of per-color arrays");
        std::vector<Complex> row;
        for (const auto& entry : block)
            row.push_back(zastava::parse_complex(entry));
        blocks.push_back(std::move(row));
    }
    return blocks;
}

BracketFamily parse_family(const std::string& name)
{
    if (name == "rational")
        return BracketFamily::Rational;
    if (name == "coulomb")
        return BracketFamily::Coulomb;
    if (name == "coulomb_reduced")
        return BracketFamily::CoulombReduced;
    if (name == "fo_reduced")
        return BracketFamily::FoReduced;
    throw Error(ErrorCode::SchemaError,
                "unknown family '" + name +
                    "'; expected rational, coulomb, coulomb_reduced or fo_reduced");
}

bool family_is_reduced(BracketFamily family)
{
    return family == BracketFamily::CoulombReduced || family == BracketFamily::FoReduced;
}

std::uint64_t resolve_seed(const RunConfig& cfg, const std::optional<std::uint64_t>& cli_seed)
{
    if (cli_seed)
        return *cli_seed;
    if (const char* env = std::getenv("ZASTAVA_SEED")) {
        try {
            std::size_t used = 0;
            const std::uint64_t value = std::stoull(env, &used);
            if (used == std::string(env).size())
                return value;
        } catch (const std::exception&) {
        }
        throw Error(ErrorCode::SchemaError,
                    "ZASTAVA_SEED must be a non-negative 64-bit integer, got '" +
                        std::string(env) + "'");
    }
    return cfg.seed;
}

void write_document(const std::string& text, const std::string& out_path)
{
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out)
        throw Error(ErrorCode::IoError, "cannot open '" + out_path + "' for writing");
    out << text;
    out.flush();
    if (!out)
        throw Error(ErrorCode::IoError, "failed while writing '" + out_path + "'");
}

// --- verify -----------------------------------------------------------------

struct VerifyArgs {
    std::string config_path;
    std::vector<std::string> suites;
    std::optional<std::uint64_t> seed;
    std::string format = "text";
    std::string out_path;
    int parallel = 1;
};

int run_verify(const VerifyArgs& args)
{
    RunConfig cfg = zastava::load_config(args.config_path);
    cfg.seed = resolve_seed(cfg, args.seed);
    if (!args.suites.empty()) {
        for (const std::string& name : args.suites)
            if (!zastava::is_suite_name(name))
                throw Error(ErrorCode::SchemaError, "unknown suite '" + name + "'");
        cfg.suites.clear();
        for (const std::string& name : zastava::suite_names())
            if (std::find(args.suites.begin(), args.suites.end(), name) != args.suites.end())
                cfg.suites.push_back(name);
    }

    const zastava::VerificationReport report = zastava::run_suites(cfg, args.parallel);
    if (args.format == "json")
        write_document(zastava::report_to_json(report).dump(2) + "\n", args.out_path);
    else
        write_document(zastava::report_to_text(report), args.out_path);
    return report.all_passed() ? 0 : 1;
}

// --- brackets ---------------------------------------------------------------

json bracket_document(const std::string& family_name, const zastava::BracketMatrix& bm)
{
    json matrix = json::array();
    for (Eigen::Index row = 0; row < bm.m.rows(); ++row) {
        json cols = json::array();
        for (Eigen::Index col = 0; col < bm.m.cols(); ++col)
            cols.push_back(complex_json(bm.m(row, col)));
        matrix.push_back(cols);
    }
    json out;
    out["family"] = family_name;
    out["labels"] = bm.labels;
    out["matrix"] = matrix;
    out["antisymmetry_defect"] = zastava::antisymmetry_defect(bm);
    return out;
}

int run_brackets(const std::string& config_path, const std::string& point_path,
                 const std::string& out_path)
{
    const RunConfig cfg = zastava::load_config(config_path);
    std::ifstream in(point_path);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open point file '" + point_path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::SchemaError,
                    "point file '" + point_path + "' is not valid json: " + e.what());
    }
    if (!doc.is_object() || !doc.contains("family") || !doc["family"].is_string())
        throw Error(ErrorCode::SchemaError, "point document needs a string 'family' field");
    const std::string family_name = doc["family"].get<std::string>();
    const BracketFamily family = parse_family(family_name);
    const zastava::ModularParam mp = zastava::make_modular_param(cfg.tau);

    zastava::BracketMatrix bm;
    if (family_is_reduced(family)) {
        for (const char* key : {"w_free", "sum", "ratio"})
            if (!doc.contains(key))
                throw Error(ErrorCode::SchemaError,
                            std::string("reduced point document needs field '") + key + "'");
        zastava::ReducedChartPoint p;
        p.quiver = cfg.quiver;
        p.alpha = cfg.alpha;
        p.delta = cfg.tolerances.delta;
        p.w_free = parse_blocks(doc["w_free"], "w_free");
        if (!doc["sum"].is_array())
            throw Error(ErrorCode::SchemaError, "field 'sum': expected an array per color");
        for (const auto& entry : doc["sum"])
            p.sum_constraint.push_back(zastava::parse_complex(entry));
        p.ratio = parse_blocks(doc["ratio"], "ratio");
        bm = family == BracketFamily::CoulombReduced
                 ? zastava::coulomb_reduced_bracket_matrix(p)
                 : zastava::fo_reduced_bracket_matrix(p, mp);
    } else {
        for (const char* key : {"w", "fiber"})
            if (!doc.contains(key))
                throw Error(ErrorCode::SchemaError,
                            std::string("unreduced point document needs field '") + key + "'");
        zastava::UnreducedChartPoint p;
        p.quiver = cfg.quiver;
        p.alpha = cfg.alpha;
        p.delta = cfg.tolerances.delta;
        p.w = parse_blocks(doc["w"], "w");
        p.fiber = parse_blocks(doc["fiber"], "fiber");
        bm = family == BracketFamily::Rational ? zastava::rational_bracket_matrix(p)
                                               : zastava::coulomb_bracket_matrix(p);
    }
    write_document(bracket_document(family_name, bm).dump(2) + "\n", out_path);
    return 0;
}

// --- flow ---------------------------------------------------------------

zastava::Hamiltonian parse_hamiltonian(const std::string& name, BracketFamily family,
                                       const RunConfig& cfg)
{
    if (name.rfind("moment:", 0) == 0)
        return zastava::Hamiltonian::moment(cfg.quiver.index_of(name.substr(7)));
    const std::vector<std::string> labels =
        zastava::chart_labels(family, cfg.quiver, cfg.alpha);
    std::vector<int> indices;
    std::size_t pos = 0;
    while (pos <= name.size()) {
        const std::size_t next = name.find('+', pos);
        const std::string token =
            name.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
        const auto it = std::find(labels.begin(), labels.end(), token);
        if (it == labels.end()) {
            std::ostringstream known;
            for (const std::string& l : labels)
                known << (known.tellp() > 0 ? ", " : "") << l;
            throw Error(ErrorCode::SchemaError,
                        "unknown coordinate '" + token + "' in hamiltonian; chart labels: " +
                            known.str() + "; or use moment:<vertex>");
        }
        indices.push_back(static_cast<int>(it - labels.begin()));
        if (next == std::string::npos)
            break;
        pos = next + 1;
    }
    return zastava::Hamiltonian::coordinate_sum(std::move(indices));
}

int run_flow(const std::string& config_path, const std::string& family_name,
             const std::string& hamiltonian_name, double t_end, int steps,
             const std::optional<std::uint64_t>& cli_seed, const std::string& out_path)
{
    const RunConfig cfg = zastava::load_config(config_path);
    const std::uint64_t seed = resolve_seed(cfg, cli_seed);
    const BracketFamily family = parse_family(family_name);
    const zastava::Hamiltonian hamiltonian = parse_hamiltonian(hamiltonian_name, family, cfg);
    const zastava::ModularParam mp = zastava::make_modular_param(cfg.tau);

    zastava::SplitMix64 rng(zastava::derive_seed(seed, "flow", 0));
    json point;
    zastava::FlowReport report;
    if (family_is_reduced(family)) {
        // Tame ratio moduli keep short flows inside the chart.
        const zastava::ReducedChartPoint p = zastava::sample_reduced_point(
            cfg.quiver, cfg.alpha, mp, rng, 0.15, 0.5, 2.0, cfg.tolerances.delta);
        point["w_free"] = blocks_json(p.w_free);
        json sums = json::array();
        for (const Complex& s : p.sum_constraint)
            sums.push_back(complex_json(s));
        point["sum"] = sums;
        point["ratio"] = blocks_json(p.ratio);
        report = zastava::flow_integrate(family, p, hamiltonian, t_end, steps, mp);
    } else {
        const zastava::UnreducedChartPoint p = zastava::sample_unreduced_point(
            cfg.quiver, cfg.alpha, mp, rng, 0.1, 0.1, 10.0, cfg.tolerances.delta);
        point["w"] = blocks_json(p.w);
        point["fiber"] = blocks_json(p.fiber);
        report = zastava::flow_integrate(family, p, hamiltonian, t_end, steps);
    }

    json trajectory = json::array();
    for (const zastava::TrajectorySample& s : report.samples) {
        json state = json::array();
        for (Eigen::Index k = 0; k < s.state.size(); ++k)
            state.push_back(complex_json(s.state[k]));
        trajectory.push_back({{"t", s.t}, {"state", state}});
    }
    json out;
    out["family"] = family_name;
    out["hamiltonian"] = hamiltonian_name;
    out["t"] = t_end;
    out["steps"] = steps;
    out["seed"] = seed;
    out["point"] = point;
    out["labels"] = report.labels;
    out["hamiltonian_drift"] = report.hamiltonian_drift;
    out["moment_drift"] = report.moment_drift;
    out["trajectory"] = trajectory;
    write_document(out.dump(2) + "\n", out_path);
    return 0;
}

// --- limits -------------------------------------------------------------

std::vector<double> parse_ladder(const std::string& csv, const std::string& field)
{
    std::vector<double> values;
    std::stringstream in(csv);
    std::string token;
    while (std::getline(in, token, ',')) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(token, &used));
            if (used != token.size())
                throw std::invalid_argument(token);
        } catch (const std::exception&) {
            throw Error(ErrorCode::SchemaError,
                        "field '" + field + "': '" + token + "' is not a number");
        }
    }
    if (values.size() < 2)
        throw Error(ErrorCode::ValidationError,
                    "field '" + field + "' needs at least two ladder values");
    return values;
}

int run_limits(const std::string& config_path, const std::string& ladder_csv,
               const std::string& im_tau_csv, const std::optional<std::uint64_t>& cli_seed,
               const std::string& out_path)
{
    const RunConfig cfg = zastava::load_config(config_path);
    const std::uint64_t seed = resolve_seed(cfg, cli_seed);
    const zastava::ModularParam mp = zastava::make_modular_param(cfg.tau);

    const std::vector<double> epsilons = parse_ladder(ladder_csv, "ladder");
    for (std::size_t i = 0; i < epsilons.size(); ++i)
        if (epsilons[i] <= 0.0 || (i > 0 && epsilons[i] >= epsilons[i - 1]))
            throw Error(ErrorCode::ValidationError,
                        "epsilon ladder must be positive and strictly decreasing");
    const std::vector<double> im_taus = parse_ladder(im_tau_csv, "im-tau-ladder");
    for (std::size_t i = 0; i < im_taus.size(); ++i)
        if (im_taus[i] < 0.1 || (i > 0 && im_taus[i] <= im_taus[i - 1]))
            throw Error(ErrorCode::ValidationError,
                        "Im(tau) ladder must be >= 0.1 and strictly increasing");

    zastava::SplitMix64 rng(zastava::derive_seed(seed, "limits", 0));
    const zastava::FourTermConfig base = zastava::sample_four_term_config(rng);

    const zastava::LimitReport rational = zastava::rational_limit_check(base, epsilons, mp);
    const zastava::LimitReport trig = zastava::trigonometric_limit_check(base, im_taus);

    const auto limit_json = [](const zastava::LimitReport& rep, bool with_orders) {
        json out;
        json parameters = json::array();
        json errors = json::array();
        for (const zastava::LimitSample& s : rep.samples) {
            parameters.push_back(s.parameter);
            errors.push_back(s.abs_error);
        }
        out["parameter"] = parameters;
        out["abs_error"] = errors;
        if (with_orders)
            out["observed_order"] = rep.observed_orders;
        return out;
    };

    json out;
    out["seed"] = seed;
    out["base"] = json::array({complex_json(base.wi_r), complex_json(base.wi_a),
                               complex_json(base.wj_s), complex_json(base.wj_a)});
    out["rational"] = limit_json(rational, true);
    out["trigonometric"] = limit_json(trig, false);
    write_document(out.dump(2) + "\n", out_path);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"numerical checks for elliptic zastava bracket charts"};
    app.require_subcommand(1);

    VerifyArgs verify_args;
    std::optional<std::uint64_t> seed_flag;

    CLI::App* verify = app.add_subcommand("verify", "run verification suites");
    verify->add_option("--config", verify_args.config_path, "configuration file")->required();
    verify->add_option("--suite", verify_args.suites, "suite name (repeatable)");
    verify->add_option("--seed", seed_flag, "override the run seed");
    verify->add_option("--format", verify_args.format, "output format")
        ->check(CLI::IsMember({"json", "text"}));
    verify->add_option("--out", verify_args.out_path, "write the report to this file");
    verify->add_option("--parallel", verify_args.parallel, "worker threads per suite")
        ->check(CLI::Range(1, 64));

    std::string point_path, brackets_out;
    CLI::App* brackets = app.add_subcommand("brackets", "bracket matrix at a chart point");
    brackets->add_option("--config", verify_args.config_path, "configuration file")->required();
    brackets->add_option("--point", point_path, "json chart point with a 'family' field")
        ->required();
    brackets->add_option("--out", brackets_out, "write the document to this file");

    std::string flow_family = "coulomb", hamiltonian_name, flow_out;
    double flow_t = 0.0;
    int flow_steps = 0;
    CLI::App* flow = app.add_subcommand("flow", "integrate a Hamiltonian flow");
    flow->add_option("--config", verify_args.config_path, "configuration file")->required();
    flow->add_option("--hamiltonian", hamiltonian_name,
                     "moment:<vertex>, or chart labels joined with '+'")
        ->required();
    flow->add_option("--t", flow_t, "integration time")->required();
    flow->add_option("--steps", flow_steps, "RK4 step count")->check(CLI::Range(1, 10000000))
        ->required();
    flow->add_option("--family", flow_family,
                     "rational, coulomb, coulomb_reduced or fo_reduced");
    flow->add_option("--seed", seed_flag, "override the run seed");
    flow->add_option("--out", flow_out, "write the document to this file");

    std::string ladder_csv, im_tau_csv = "1.5,2,4", limits_out;
    CLI::App* limits = app.add_subcommand("limits", "degeneration limit reports");
    limits->add_option("--config", verify_args.config_path, "configuration file")->required();
    limits->add_option("--ladder", ladder_csv, "comma-separated epsilon ladder")->required();
    limits->add_option("--im-tau-ladder", im_tau_csv,
                       "comma-separated Im(tau) ladder for the trigonometric limit");
    limits->add_option("--seed", seed_flag, "override the run seed");
    limits->add_option("--out", limits_out, "write the document to this file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (verify->parsed()) {
            verify_args.seed = seed_flag;
            return run_verify(verify_args);
        }
        if (brackets->parsed())
            return run_brackets(verify_args.config_path, point_path, brackets_out);
        if (flow->parsed())
            return run_flow(verify_args.config_path, flow_family, hamiltonian_name, flow_t,
                            flow_steps, seed_flag, flow_out);
        return run_limits(verify_args.config_path, ladder_csv, im_tau_csv, seed_flag,
                          limits_out);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
