#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "slicedot/geometry.hpp"
#include "slicedot/rng.hpp"

namespace slicedot {

// One Gaussian component: x = mean + factor * z with z standard normal.
// The factor may be rectangular (d x k), covering low-rank covariances.
struct GaussianComponent {
    Vector mean;
    Matrix factor;
};

// Seeded synthetic sampler description. Supported kinds:
//   gaussian              mean + covariance factor
//   gaussian-mixture      categorical over GaussianComponents
//   uniform-cube          iid coordinates on [low, high]
//   fragmented-hypercube  uniform cube pushed through the sign shift on
//                         the first k_star coordinates
//   point-ring            uniform on the radius-r sphere
//   point-mass            all mass at a single point
//   product-noise         iid coordinates, each low or high with equal
//                         probability
struct ModelSpec {
    enum class Kind {
        gaussian,
        gaussian_mixture,
        uniform_cube,
        fragmented_hypercube,
        point_ring,
        point_mass,
        product_noise,
    };

    Kind kind = Kind::gaussian;
    int dim = 1;

    std::vector<GaussianComponent> components;  // gaussian / gaussian-mixture
    std::vector<double> mixture_weights;        // gaussian-mixture
    double low = -1.0, high = 1.0;              // uniform-cube / product-noise
    int k_star = 1;                             // fragmented-hypercube
    double radius = 1.0;                        // point-ring
    double mass_at_center = 0.0;                // point-ring: atom share at 0
    Vector center;                              // point-mass

    static ModelSpec gaussian(Vector mean, const Matrix& covariance);
    static ModelSpec gaussian_factor(Vector mean, Matrix factor);
    static ModelSpec gaussian_mixture(std::vector<double> weights,
                                      std::vector<GaussianComponent> components);
    static ModelSpec uniform_cube(int d, double low = -1.0, double high = 1.0);
    static ModelSpec fragmented_hypercube_spec(int d, int k_star);
    static ModelSpec point_ring(int d, double radius, double mass_at_center = 0.0);
    static ModelSpec point_mass(Vector center);
    static ModelSpec product_noise(int d, double low = 0.0, double high = 6.0);

    nlohmann::json to_json() const;
    static ModelSpec from_json(const nlohmann::json& j);

    static std::string kind_name(Kind k);
    static Kind kind_from_name(const std::string& name);
};

// n i.i.d. draws from the model, one point per row.
PointCloud sample(const ModelSpec& spec, std::size_t n, Rng& rng);

// Independent samples from Unif([-1,1]^d) and its pushforward under
// T(x) = x + sum_{i<k_star} sign(x_i) e_i.
std::pair<PointCloud, PointCloud> fragmented_hypercube(int d, int k_star, std::size_t n,
                                                       Rng& rng);

// An epsilon-contaminated sample: ceil((1-eps) n) clean draws, the rest
// noise, rows shuffled by a seed-derived permutation.
struct ContaminatedSample {
    PointCloud points;
    std::vector<bool> clean_mask;
    double epsilon = 0.0;

    std::size_t clean_count() const;
    PointCloud clean_subset() const;
};

ContaminatedSample contaminate(const ModelSpec& clean, const ModelSpec& noise, double eps,
                               std::size_t n, Rng& rng);

// The (mu, nu) pairs of the benchmark models. Model 3 has random mixture
// parameters; they are frozen deterministically from `seed`.
std::pair<ModelSpec, ModelSpec> experiment_model_pair(int model, int d, std::uint64_t seed);

}  // namespace slicedot
