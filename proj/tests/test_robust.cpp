#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "slicedot/distributions.hpp"
#include "slicedot/errors.hpp"
#include "slicedot/exact_transport.hpp"
#include "slicedot/max_sliced.hpp"
#include "slicedot/robust.hpp"

using namespace slicedot;

namespace {

std::vector<double> uniform_weights(std::size_t n) {
    return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

}  // namespace

TEST_CASE("weighted moments on degenerate clouds") {
    Matrix pts(4, 3);
    for (Eigen::Index i = 0; i < 4; ++i) pts.row(i) << 1.0, 2.0, 3.0;
    PointCloud cloud(pts);
    WeightedMoments m = weighted_moments(cloud, uniform_weights(4));
    CHECK(m.top_eigenvalue == doctest::Approx(0.0));
    CHECK(m.mean[1] == doctest::Approx(2.0));
}

TEST_CASE("weighted moments on the two-point cloud") {
    Matrix pts(2, 2);
    pts << 1.0, 0.0, -1.0, 0.0;
    PointCloud cloud(pts);
    WeightedMoments m = weighted_moments(cloud, uniform_weights(2));
    CHECK(m.mean.norm() == doctest::Approx(0.0));
    CHECK(m.top_eigenvalue == doctest::Approx(1.0));
    CHECK(std::fabs(m.top_eigenvector[0]) == doctest::Approx(1.0));
}

TEST_CASE("weighted moments match a dense eigensolver") {
    Rng rng(3);
    const int d = 5;
    const std::size_t n = 50;
    PointCloud cloud = sample(ModelSpec::gaussian_factor(Vector::Zero(d),
                                                         Matrix::Identity(d, d)),
                              n, rng);
    std::vector<double> w(n);
    double sum = 0.0;
    for (auto& v : w) {
        v = rng.uniform01() + 0.1;
        sum += v;
    }
    for (auto& v : w) v /= sum;
    WeightedMoments m = weighted_moments(cloud, w);

    Vector mean = Vector::Zero(d);
    for (std::size_t i = 0; i < n; ++i)
        mean += w[i] * cloud.points().row(static_cast<Eigen::Index>(i)).transpose();
    Matrix cov = Matrix::Zero(d, d);
    for (std::size_t i = 0; i < n; ++i) {
        Vector c = cloud.points().row(static_cast<Eigen::Index>(i)).transpose() - mean;
        cov += w[i] * c * c.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
    const double top = eig.eigenvalues().maxCoeff();
    CHECK(m.top_eigenvalue == doctest::Approx(top).epsilon(1e-4));
    CHECK((m.mean - mean).norm() <= 1e-12);
    Vector v = eig.eigenvectors().col(d - 1);
    CHECK(std::fabs(v.dot(m.top_eigenvector)) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK_THROWS_AS(weighted_moments(cloud, std::vector<double>(n, 0.0)), InvalidArgument);
}

TEST_CASE("filter leaves clean data untouched") {
    Rng rng(4);
    PointCloud cloud = sample(ModelSpec::gaussian_factor(Vector::Zero(4),
                                                         Matrix::Identity(4, 4)),
                              2000, rng);
    FilterWeights fw = spectral_filter(cloud, 0.1, 1.0, 9.0);
    CHECK(fw.threshold_met);
    CHECK(fw.iterations == 0);
    CHECK(fw.removed_mass == doctest::Approx(0.0));
    for (double w : fw.weights) CHECK(w == doctest::Approx(1.0 / 2000.0).epsilon(1e-12));
}

TEST_CASE("filter kills an isolated outlier") {
    Matrix pts = Matrix::Zero(100, 3);
    pts(99, 0) = 100.0;
    PointCloud cloud(pts);
    FilterWeights fw = spectral_filter(cloud, 0.02, 1.0, 9.0);
    CHECK(fw.threshold_met);
    CHECK(fw.weights[99] <= 1e-6 / 100.0);
    Vector mean = Vector::Zero(3);
    for (std::size_t i = 0; i < 100; ++i)
        mean += fw.weights[i] * cloud.points().row(static_cast<Eigen::Index>(i)).transpose();
    CHECK(mean.norm() <= 0.05);
}

TEST_CASE("filter respects the deletion budget and weight cap") {
    Rng rng(5);
    const double eps = 0.1;
    const std::size_t n = 2000;
    ContaminatedSample cs =
        contaminate(ModelSpec::gaussian_factor(Vector::Zero(20), Matrix::Identity(20, 20)),
                    ModelSpec::product_noise(20), eps, n, rng);
    FilterWeights fw = spectral_filter(cs.points, eps, 1.0, 9.0);
    double sum = 0.0;
    const double cap = 1.0 / ((1.0 - 3.0 * eps) * static_cast<double>(n)) * (1.0 + 1e-9);
    for (double w : fw.weights) {
        CHECK(w >= 0.0);
        CHECK(w <= cap);
        sum += w;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(fw.removed_mass <= 3.0 * eps + 1e-9);
    CHECK(fw.top_eigenvalue <= 9.0);
    CHECK(fw.threshold_met);

    // Filtering should recover the clean mean.
    Vector mean = Vector::Zero(20);
    for (std::size_t i = 0; i < n; ++i)
        mean += fw.weights[i] * cs.points.points().row(static_cast<Eigen::Index>(i)).transpose();
    Vector raw_mean = cs.points.mean();
    CHECK(mean.norm() <= 0.5 * raw_mean.norm());
}

TEST_CASE("filter soundness on clean gaussians") {
    const int d = 5;
    const std::size_t n = 1000 * d;
    int untouched = 0;
    const int runs = 20;
    for (int r = 0; r < runs; ++r) {
        Rng rng(100 + r);
        PointCloud cloud = sample(
            ModelSpec::gaussian_factor(Vector::Zero(d), Matrix::Identity(d, d)), n, rng);
        FilterWeights fw = spectral_filter(cloud, 0.0, 1.0, 9.0);
        if (fw.threshold_met && fw.iterations == 0) ++untouched;
    }
    CHECK(untouched >= 19);  // >= 95% of runs
}

TEST_CASE("filter validation") {
    Matrix pts = Matrix::Zero(3, 2);
    PointCloud cloud(pts);
    CHECK_THROWS_AS(spectral_filter(cloud, 0.4, 1.0, 9.0), InvalidArgument);
    CHECK_THROWS_AS(spectral_filter(cloud, 0.1, 0.0, 9.0), InvalidArgument);
    FilterWeights fw = spectral_filter(cloud, 0.2, 1.0, 9.0);
    CHECK(fw.outside_guarantee);
}

TEST_CASE("weighted ascent on identical clouds is zero") {
    Rng rng(6);
    PointCloud x = sample(ModelSpec::uniform_cube(3), 20, rng);
    AscentResult res = msw1_weighted_ascent(x, x, 40, 0.0, 1);
    CHECK(res.value == doctest::Approx(0.0));
}

TEST_CASE("weighted ascent recovers the point mass gap") {
    Vector y(4);
    y << 1.0, -1.0, 2.0, 0.5;
    Matrix xp = Matrix::Zero(3, 4);
    Matrix yp(2, 4);
    yp.row(0) = y.transpose();
    yp.row(1) = y.transpose();
    AscentResult res = msw1_weighted_ascent(PointCloud(xp), PointCloud(yp), 60, 0.0, 2);
    CHECK(res.value == doctest::Approx(y.norm()).epsilon(1e-6));
    CHECK(std::fabs(res.direction.coords().dot(y) / y.norm()) == doctest::Approx(1.0));
}

TEST_CASE("weighted ascent matches the planar grid oracle") {
    Rng rng(7);
    Matrix pts(6, 2);
    for (Eigen::Index i = 0; i < 6; ++i) pts.row(i) << rng.normal(), rng.normal();
    PointCloud x(pts, {0.3, 0.2, 0.1, 0.15, 0.15, 0.1});
    PointCloud y = sample(ModelSpec::uniform_cube(2), 9, rng);
    AscentResult res = msw1_weighted_ascent(x, y, 300, 0.0, 3, 4);
    GridResult grid = dense_grid_oracle(x, y, 1.0, 20000);
    CHECK(res.value <= grid.value + 1e-9);
    CHECK(res.value >= 0.98 * grid.value);
}

TEST_CASE("restricted W1 hand instance") {
    const double eps = 0.2, r = 5.0;
    Matrix xp = Matrix::Zero(1, 3);
    Matrix yp(3, 3);
    yp.row(0).setZero();
    yp << 0.0, 0.0, 0.0, r, 0.0, 0.0, 0.0, r, 0.0;
    PointCloud X(xp);
    PointCloud Y(yp, {1.0 - eps, eps / 2.0, eps / 2.0});
    CHECK(restricted_w1(X, Y, Vector::Zero(3)) == doctest::Approx(eps * r).epsilon(1e-12));
    CHECK(restricted_w1(X, X, Vector::Zero(3)) == doctest::Approx(0.0));
}

TEST_CASE("restricted W1 equals exact transport when no anchor mass") {
    Rng rng(8);
    Matrix a(5, 2), b(7, 2);
    for (Eigen::Index i = 0; i < 5; ++i) a.row(i) << rng.normal() + 4.0, rng.normal();
    for (Eigen::Index i = 0; i < 7; ++i) b.row(i) << rng.normal() + 4.0, rng.normal();
    PointCloud X(a), Y(b);
    const double via_restricted = restricted_w1(X, Y, Vector::Zero(2));
    const double direct = exact_transport_cost(a, std::vector<double>(5, 0.2), b,
                                               std::vector<double>(7, 1.0 / 7.0));
    CHECK(via_restricted == doctest::Approx(direct).epsilon(1e-10));
    // Symmetry.
    CHECK(restricted_w1(Y, X, Vector::Zero(2)) == doctest::Approx(via_restricted));
}

TEST_CASE("restricted W1 rejects oversized residuals") {
    Rng rng(9);
    PointCloud big = sample(ModelSpec::point_ring(2, 1.0), 2500, rng);
    CHECK_THROWS_AS(restricted_w1(big, big, Vector::Zero(2)), NumericError);
}

TEST_CASE("resilience report lower bound chain") {
    Rng rng(10);
    const double eps = 0.1;
    const std::size_t n = 600;
    ContaminatedSample cs =
        contaminate(ModelSpec::gaussian_factor(Vector::Zero(2), Matrix::Identity(2, 2)),
                    ModelSpec::product_noise(2), eps, n, rng);
    FilterWeights fw = spectral_filter(cs.points, eps, 1.0, 9.0);
    PointCloud reference = cs.clean_subset();
    ResilienceReport rep = resilience_report(cs, fw, reference, 200, 11);
    CHECK(rep.msw1_lower >= rep.mean_gap - 1e-9);
    CHECK(rep.ratio >= 1.0 - 1e-9);
    // The ascent value never exceeds the true MSW1 (planar grid bound).
    PointCloud weighted(cs.points.points(), fw.weights);
    GridResult grid = dense_grid_oracle(weighted, reference, 1.0, 20000);
    CHECK(rep.msw1_lower <= grid.value + 1e-9);
}

TEST_CASE("resilience report on exact clean weights") {
    Rng rng(12);
    const std::size_t n = 200;
    ContaminatedSample cs =
        contaminate(ModelSpec::gaussian_factor(Vector::Zero(3), Matrix::Identity(3, 3)),
                    ModelSpec::product_noise(3), 0.1, n, rng);
    // Uniform weights on exactly the clean rows.
    FilterWeights fw;
    fw.weights.assign(n, 0.0);
    const std::size_t clean = cs.clean_count();
    for (std::size_t i = 0; i < n; ++i)
        if (cs.clean_mask[i]) fw.weights[i] = 1.0 / static_cast<double>(clean);
    ResilienceReport rep = resilience_report(cs, fw, cs.clean_subset(), 50, 13);
    CHECK(rep.mean_gap <= 1e-9);
    CHECK(rep.msw1_lower <= 1e-9);
}
