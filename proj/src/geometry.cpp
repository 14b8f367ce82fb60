#include "slicedot/geometry.hpp"

#include <cmath>

#include "slicedot/errors.hpp"

namespace slicedot {

namespace {
constexpr double kUnitNormTolerance = 1e-12;
}

Direction::Direction(Vector coords) : coords_(std::move(coords)) {
    if (coords_.size() < 1) throw InvalidArgument("Direction: dimension must be >= 1");
    const double norm = coords_.norm();
    if (std::fabs(norm - 1.0) > kUnitNormTolerance)
        throw InvalidArgument("Direction: norm " + std::to_string(norm) + " is not 1");
}

Direction Direction::normalized(const Vector& v) {
    const double norm = v.norm();
    if (!(norm > 0.0) || !std::isfinite(norm))
        throw InvalidArgument("Direction::normalized: vector has no direction");
    return Direction(Vector(v / norm));
}

PointCloud::PointCloud(Matrix points) : points_(std::move(points)) {
    if (points_.rows() < 1) throw InvalidArgument("PointCloud: need at least one point");
    if (points_.cols() < 1) throw InvalidArgument("PointCloud: dimension must be >= 1");
    if (!points_.allFinite()) throw InvalidArgument("PointCloud: non-finite coordinate");
}

PointCloud::PointCloud(Matrix points, std::vector<double> weights)
    : PointCloud(std::move(points)) {
    if (weights.empty()) return;
    if (weights.size() != size()) throw InvalidArgument("PointCloud: weight count mismatch");
    double sum = 0.0;
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0) throw InvalidArgument("PointCloud: invalid weight");
        sum += w;
    }
    if (std::fabs(sum - 1.0) > 1e-9)
        throw InvalidArgument("PointCloud: weights sum to " + std::to_string(sum));
    for (double& w : weights) w /= sum;
    weights_ = std::move(weights);
}

Vector PointCloud::mean() const {
    if (uniform()) return points_.colwise().mean();
    Vector m = Vector::Zero(dim());
    for (std::size_t i = 0; i < size(); ++i)
        m += weights_[i] * points_.row(static_cast<Eigen::Index>(i)).transpose();
    return m;
}

Direction sample_sphere(Eigen::Index d, Rng& rng) {
    if (d < 1) throw InvalidArgument("sample_sphere: dimension must be >= 1");
    Vector v(d);
    double norm = 0.0;
    do {
        v = rng.normal_vector(d);
        norm = v.norm();
    } while (!(norm > 1e-12));
    return Direction(Vector(v / norm));
}

Sample1D project(const PointCloud& cloud, const Direction& theta) {
    if (cloud.dim() != theta.dim())
        throw InvalidArgument("project: cloud dimension " + std::to_string(cloud.dim()) +
                              " vs direction dimension " + std::to_string(theta.dim()));
    Vector projected = cloud.points() * theta.coords();
    std::vector<double> values(projected.data(), projected.data() + projected.size());
    if (cloud.uniform()) return Sample1D(std::move(values));
    return Sample1D(std::move(values), cloud.weights());
}

Vector project_ball(const Vector& v) {
    const double norm = v.norm();
    if (norm <= 1.0) return v;
    return v / norm;
}

double sphere_abs_moment(double p, int d) {
    if (!(p >= 1.0)) throw InvalidArgument("sphere_abs_moment: p must be >= 1");
    if (d < 1) throw InvalidArgument("sphere_abs_moment: d must be >= 1");
    // Log-gamma form to stay finite at large d.
    const double dd = static_cast<double>(d);
    const double log_moment = std::lgamma(dd / 2.0) + std::lgamma((p + 1.0) / 2.0) -
                              0.5 * std::log(M_PI) - std::lgamma((p + dd) / 2.0);
    return std::exp(log_moment);
}

}  // namespace slicedot
