#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "zastava/charts.hpp"
#include "zastava/config.hpp"
#include "zastava/rng.hpp"
#include "zastava/transform.hpp"

namespace zastava
{

// One sample that either exceeded the suite tolerance or raised an error;
// `sample` carries the drawn data so the case can be replayed.
struct SampleFailure {
    int index = -1;
    std::string message;
    std::string sample;
};

struct SuiteResult {
    std::string name;
    bool passed = false;
    int samples = 0;
    // Raw residual for single-tolerance suites (antisymmetry, jacobi,
    // pushforward, flows, and the exact suites with tolerance 0); a ratio of
    // defect over per-check tolerance for composite suites (tolerance 1).
    double max_residual = 0.0;
    double tolerance = 0.0;
    int worst_index = -1;
    std::string worst_sample;
    std::vector<SampleFailure> failures;
    double seconds = 0.0;
};

struct VerificationReport {
    std::string artifact = "zastava";
    std::string version = "1.0.0";
    nlohmann::json config_echo;
    std::uint64_t seed = 0;
    std::vector<SuiteResult> suites;

    bool all_passed() const;
};

// Runs one suite over its seeded samples. Module errors inside a sample are
// recorded as failures and the suite continues. `parallel` distributes samples
// across that many workers; per-sample seeds make the result identical to the
// sequential run.
SuiteResult run_suite(const RunConfig& cfg, const std::string& suite, int parallel = 1);

// Runs cfg.suites in canonical order.
VerificationReport run_suites(const RunConfig& cfg, int parallel = 1);

// Stable-ordered serialization; wall-clock times live under the separate
// "timing" key so reports are byte-identical across runs when it is dropped.
nlohmann::json report_to_json(const VerificationReport& report, bool include_timing = true);
std::string report_to_text(const VerificationReport& report);

// Seeded chart samples shared by the suites, the CLI and the acceptance gate.
// Marked points are uniform in the fundamental parallelogram of (1, tau),
// rejection-sampled until distinct colors stay `margin` apart modulo the
// lattice; fibers and ratios are log-uniform in modulus over [mod_lo, mod_hi]
// with uniform phase.
UnreducedChartPoint sample_unreduced_point(const Quiver& quiver, const Degree& alpha,
                                           const ModularParam& mp, SplitMix64& rng, double margin,
                                           double mod_lo = 0.1, double mod_hi = 10.0,
                                           double delta = 1e-3);
ReducedChartPoint sample_reduced_point(const Quiver& quiver, const Degree& alpha,
                                       const ModularParam& mp, SplitMix64& rng, double margin,
                                       double mod_lo = 0.1, double mod_hi = 10.0,
                                       double delta = 1e-3);

// One marked point at least `lattice_margin` from every lattice point.
Complex sample_cell_point(const ModularParam& mp, SplitMix64& rng, double lattice_margin);

// A real four-point configuration for the degeneration checks: pairwise gaps
// at least 0.06, and the cubic and sine four-term combinations bounded away
// from zero so the leading-order error laws are measurable.
FourTermConfig sample_four_term_config(SplitMix64& rng);

} // namespace zastava
