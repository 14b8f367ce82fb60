#pragma once

#include <cstddef>
#include <vector>

#include "slicedot/geometry.hpp"

namespace slicedot::detail {

// Reusable buffers for the per-direction projection kernel, so the
// Monte Carlo and optimizer loops do not allocate per direction.
struct ProjectionWorkspace {
    std::vector<double> px, py;
    std::vector<double> wx, wy;
    std::vector<std::size_t> order_x, order_y;

    void bind(const PointCloud& X, const PointCloud& Y);
};

// W_p^p between the projections of X and Y onto theta (theta need not
// be normalized here; callers own that convention).
double wp_pow_projected(const PointCloud& X, const PointCloud& Y, const Vector& theta, double p,
                        ProjectionWorkspace& ws);

}  // namespace slicedot::detail
