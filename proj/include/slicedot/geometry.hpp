#pragma once

#include <vector>

#include <Eigen/Core>

#include "slicedot/rng.hpp"
#include "slicedot/sample1d.hpp"

namespace slicedot {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// A unit vector on the (d-1)-sphere; the projection parameter.
class Direction {
public:
    // Requires the argument to already have unit norm within 1e-12.
    explicit Direction(Vector coords);

    // Normalizes an arbitrary nonzero vector onto the sphere.
    static Direction normalized(const Vector& v);

    const Vector& coords() const { return coords_; }
    Eigen::Index dim() const { return coords_.size(); }

private:
    Vector coords_;
};

// n points in R^d (one row per point) with optional explicit weights.
// An empty weight vector means uniform 1/n.
class PointCloud {
public:
    explicit PointCloud(Matrix points);
    PointCloud(Matrix points, std::vector<double> weights);

    std::size_t size() const { return static_cast<std::size_t>(points_.rows()); }
    Eigen::Index dim() const { return points_.cols(); }
    bool uniform() const { return weights_.empty(); }

    const Matrix& points() const { return points_; }
    // Empty when uniform.
    const std::vector<double>& weights() const { return weights_; }
    double weight(std::size_t i) const {
        return weights_.empty() ? 1.0 / static_cast<double>(size()) : weights_[i];
    }

    Vector mean() const;

private:
    Matrix points_;
    std::vector<double> weights_;
};

// Uniform direction on the unit sphere (normalized Gaussian vector).
Direction sample_sphere(Eigen::Index d, Rng& rng);

// Projects each point onto theta; weights carry through unchanged.
Sample1D project(const PointCloud& cloud, const Direction& theta);

// Euclidean projection onto the closed unit ball.
Vector project_ball(const Vector& v);

// E|Theta_1|^p for Theta uniform on the (d-1)-sphere:
// Gamma(d/2) Gamma((p+1)/2) / (sqrt(pi) Gamma((p+d)/2)).
double sphere_abs_moment(double p, int d);

}  // namespace slicedot
