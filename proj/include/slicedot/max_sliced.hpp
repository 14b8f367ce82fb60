#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "slicedot/geometry.hpp"

namespace slicedot {

// Configuration of the projected subgradient method. Steps are
// alpha_t = step_scale / sqrt(t + 1); step_scale <= 0 selects the
// default 1 / rho_hat with rho_hat = 2 max_ij ||X_i - Y_j||^2 estimated
// from a subsample of at most 10^4 pairs.
struct SubgradConfig {
    std::size_t iterations = 1000;  // T
    double step_scale = 0.0;
    enum class Init { mean_gap, random, given };
    Init init = Init::mean_gap;
    Vector init_direction;  // used when init == given
    std::uint64_t seed = 0;
    // Extra random-init runs beyond the configured one; best result wins.
    int restarts = 0;
    bool keep_iterates = true;
};

struct IterateRecord {
    double objective;  // the minimized surrogate at theta_t (ball point)
    double step;       // alpha_t
    double norm;       // ||theta_t||
    double distance;   // projected distance at theta_t / ||theta_t||
};

// Trace of one subgradient run. `sampled` is the iterate drawn with
// probability alpha_t / sum alpha, `best` the iterate with the largest
// sphere-normalized projected distance; best_point is stored normalized
// with its sign flipped toward the mean gap when that is nonzero.
struct OptimizerTrace {
    std::vector<IterateRecord> iterates;
    Vector sampled_point;
    double value_at_sampled = 0.0;
    std::size_t sampled_index = 0;
    Vector best_point;
    double value_at_best = 0.0;
    std::size_t best_index = 0;
    double step_scale_used = 0.0;
    bool heuristic = false;  // p != 2: no stationarity guarantee claimed

    nlohmann::json to_json() const;
    // Columns: t, objective, step, norm.
    void write_csv(std::ostream& out) const;
};

// w_p(theta) = W_p between the projections; the evaluation primitive
// shared by every optimizer. Supports weighted clouds.
double projected_distance(const PointCloud& X, const PointCloud& Y, const Direction& theta,
                          double p);

// One element of the subdifferential of the minimized surrogate at
// theta (any point of the unit ball), together with the rank-matching
// pairing: pairing[i] is the Y row matched to X row i. Uniform clouds
// of equal size only.
struct Subgradient {
    Vector xi;
    std::vector<std::size_t> pairing;
};
Subgradient subgradient(const PointCloud& X, const PointCloud& Y, const Vector& theta, double p);

// Projected subgradient descent on the ball relaxation; returns the full
// trace with both the sampled iterate and the best-observed iterate.
OptimizerTrace subgrad_descent(const PointCloud& X, const PointCloud& Y, double p,
                               const SubgradConfig& cfg);

// Certified upper bound on the Lipschitz constant of w_p on the sphere:
// (mean ||X_i||^p)^{1/p} + (mean ||Y_i||^p)^{1/p} (weighted means for
// weighted clouds).
double lipschitz_upper_bound(const PointCloud& X, const PointCloud& Y, double p);

// Candidate acceptance rule: evaluate only if
// min_i { values[i] + L * distances[i] } >= max_i values[i].
bool lipo_rule_accepts(const std::vector<double>& values, const std::vector<double>& distances,
                       double lipschitz_bound);

struct LipoState {
    std::vector<Vector> points;
    std::vector<double> values;
    double lipschitz_bound = 0.0;
    std::size_t budget = 0;
    std::size_t proposals_tried = 0;
};

struct LipoResult {
    Direction best;
    double value = 0.0;
    LipoState state;
};

// Global maximization of w_p over the sphere by Lipschitz-gated random
// evaluation. Stops after `budget` evaluations or after
// proposal_cap_factor * budget rejected proposals.
LipoResult lipo_maximize(const PointCloud& X, const PointCloud& Y, double p, std::size_t budget,
                         std::uint64_t seed, std::size_t proposal_cap_factor = 50);

struct GridResult {
    Direction best;
    double value = 0.0;
};

// Exhaustive angular grid search; ground truth for d <= 3.
// d=2 evaluates `resolution` angles, d=3 a resolution^2 sphere grid.
GridResult dense_grid_oracle(const PointCloud& X, const PointCloud& Y, double p, int resolution);

}  // namespace slicedot
