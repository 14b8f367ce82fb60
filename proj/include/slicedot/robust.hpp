#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "slicedot/distributions.hpp"
#include "slicedot/geometry.hpp"

namespace slicedot {

// Weighted mean and leading covariance eigenpair by power iteration
// (relative tolerance 1e-6, at most 500 iterations; the estimate after
// the cap is still returned with converged = false).
struct WeightedMoments {
    Vector mean;
    double top_eigenvalue = 0.0;
    Vector top_eigenvector;
    bool converged = false;
    std::size_t iterations = 0;
};

WeightedMoments weighted_moments(const PointCloud& cloud, std::span<const double> weights);

// Result of spectral filtering. Weights sum to 1; removed_mass is the
// fraction of the uniform measure deleted (kept per-point fractions
// start at 1 and only shrink, so w_i <= 1/((1 - 3 eps) n) whenever
// removed_mass <= 3 eps).
struct FilterWeights {
    std::vector<double> weights;
    double removed_mass = 0.0;
    std::size_t iterations = 0;
    double top_eigenvalue = 0.0;  // at termination
    bool threshold_met = false;
    enum class Stop { threshold, mass_budget, iteration_cap };
    Stop stop_reason = Stop::threshold;
    bool outside_guarantee = false;  // eps > 1/12
    double epsilon = 0.0;
    double sigma2 = 0.0;
    double threshold = 0.0;

    nlohmann::json to_json() const;
    // Lines of "index,weight".
    void write_csv(std::ostream& out) const;
};

// Iterative spectral reweighting: downweight points by their squared
// projection onto the top covariance eigenvector until the operator
// norm certificate top_eigenvalue <= threshold_mult * sigma2 holds, the
// removed mass would exceed 3 eps, or 10 n iterations pass.
FilterWeights spectral_filter(const PointCloud& cloud, double eps, double sigma2,
                              double threshold_mult = 9.0);

struct AscentResult {
    Direction direction;
    double value = 0.0;  // certified lower bound on MSW_1
};

// Projected supergradient ascent on theta -> W_1 of the projections of
// two weighted clouds, initialized at the mean-gap direction plus
// `restarts` random restarts. Every evaluated direction is feasible, so
// the returned value lower-bounds MSW_1. step_scale <= 0 picks
// 1 / lipschitz_upper_bound.
AscentResult msw1_weighted_ascent(const PointCloud& X, const PointCloud& Y,
                                  std::size_t iterations, double step_scale, std::uint64_t seed,
                                  int restarts = 2);

// W_1-style cost where mass shared at `anchor` (atoms within 1e-9) is
// cancelled first and only the residual atoms are transported, via the
// exact small-instance solver. Residual atom counts above 2000 per side
// are an error directing the caller to subsample.
double restricted_w1(const PointCloud& X, const PointCloud& Y, const Vector& anchor);

struct ResilienceReport {
    double mean_gap = 0.0;
    double msw1_lower = 0.0;
    double ratio = 0.0;

    nlohmann::json to_json() const;
};

// Compares the reweighted cloud against a clean reference: l2 gap of
// means, and the MSW_1 lower bound from the weighted ascent (mean-gap
// initialization guarantees msw1_lower >= mean_gap up to tolerance).
ResilienceReport resilience_report(const ContaminatedSample& full, const FilterWeights& w,
                                   const PointCloud& reference, std::size_t iterations,
                                   std::uint64_t seed);

}  // namespace slicedot
