#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "slicedot/geometry.hpp"

namespace slicedot {

struct EstimateMeta {
    std::size_t n = 0;    // rows of X
    std::size_t n_y = 0;  // rows of Y
    std::size_t m = 0;    // Monte Carlo directions
    int d = 0;
    double p = 2.0;
    std::uint64_t seed = 0;
};

// Monte Carlo estimate of SW_p^p between two empirical measures.
// value_pow is the mean of per_projection; value its p-th root;
// std_error the i.i.d. standard error over projections (Monte Carlo
// error only, not the empirical approximation term).
struct EstimateReport {
    double value_pow = 0.0;
    double value = 0.0;
    double std_error = 0.0;
    std::vector<double> per_projection;
    EstimateMeta meta;

    nlohmann::json to_json(bool include_projections = false) const;
    // One per-projection value per line.
    void write_projection_csv(std::ostream& out) const;
};

// Averages W_p^p between the projections of X and Y over m directions
// drawn from seed-derived substreams (direction j from substream j).
// The report is identical for any worker count.
EstimateReport estimate_swp(const PointCloud& X, const PointCloud& Y, double p, std::size_t m,
                            std::uint64_t seed, int workers = 1);

// The two rate factors of the Monte Carlo error bound, without
// constants: (1/sqrt(m d), (log n)^{1{p=2}} / n^{(p ^ 2)/2}).
// Diagnostics for slope fits only, never an error certificate.
std::pair<double, double> theoretical_rate_terms(double p, double m, double n, double d);

}  // namespace slicedot
