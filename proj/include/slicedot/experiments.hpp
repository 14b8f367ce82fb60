#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "slicedot/geometry.hpp"

namespace slicedot {

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

// Least squares on (log x, log y); inputs must be positive.
SlopeFit fit_loglog_slope(std::span<const double> xs, std::span<const double> ys);

struct CurvePoint {
    double x = 0.0;
    double mean = 0.0;
    double band_low = 0.0;
    double band_high = 0.0;
};

// One experiment curve: mean per grid point with bootstrap bands
// (10%/90% quantiles of 20 bootstrapped means, clamped to bracket the
// mean so band_low <= mean <= band_high always holds).
struct CurveResult {
    std::string name;  // output file stem
    std::vector<CurvePoint> points;
    std::size_t runs = 0;

    // Columns: x, mean, band_low, band_high.
    std::string to_csv() const;
};

struct ExperimentOutput {
    std::vector<CurveResult> curves;
    nlohmann::json manifest;
};

// Experiment drivers. Each takes a JSON config (unknown keys are a
// ParseError naming the offenders), fills in desk-scale defaults, and
// returns curves plus a manifest. Randomness is fully determined by
// (config, seed); the worker count never changes results.
ExperimentOutput run_mc_complexity(const nlohmann::json& config, std::uint64_t seed,
                                   int workers);
ExperimentOutput run_sample_complexity(const nlohmann::json& config, std::uint64_t seed,
                                       int workers);
ExperimentOutput run_rates(const nlohmann::json& config, std::uint64_t seed, int workers);
ExperimentOutput run_msw_bench(const nlohmann::json& config, std::uint64_t seed, int workers);
ExperimentOutput run_robust_experiment(const nlohmann::json& config, std::uint64_t seed,
                                       int workers);

// Dispatches by name ("mc-complexity", "sample-complexity", "rates",
// "msw-bench", "robust"), writes one CSV per curve plus
// <name>_manifest.json under out_dir, and returns the manifest.
nlohmann::json run_experiment(const std::string& name, const nlohmann::json& config,
                              const std::string& out_dir, std::uint64_t seed, int workers);

}  // namespace slicedot
