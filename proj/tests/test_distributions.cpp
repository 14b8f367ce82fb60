#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "slicedot/distributions.hpp"
#include "slicedot/errors.hpp"

using namespace slicedot;

TEST_CASE("point mass sampling") {
    Rng rng(1);
    PointCloud c = sample(ModelSpec::point_mass(Vector::Zero(4)), 5, rng);
    CHECK(c.size() == 5);
    CHECK(c.points().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gaussian sampling matches its moments") {
    Rng rng(2);
    const int d = 3;
    PointCloud c = sample(ModelSpec::gaussian_factor(Vector::Zero(d), Matrix::Identity(d, d)),
                          100000, rng);
    Vector mean = c.mean();
    for (int i = 0; i < d; ++i) CHECK(std::fabs(mean[i]) <= 4.0 / std::sqrt(100000.0));
    Matrix centered = c.points().rowwise() - mean.transpose();
    Matrix cov = centered.transpose() * centered / static_cast<double>(c.size());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(cov - Matrix::Identity(d, d));
    CHECK(eig.eigenvalues().cwiseAbs().maxCoeff() <= 0.05);
}

TEST_CASE("gaussian covariance factor reproduces the target covariance") {
    Rng rng(3);
    Matrix cov(2, 2);
    cov << 2.0, 0.6, 0.6, 1.0;
    PointCloud c = sample(ModelSpec::gaussian(Vector::Zero(2), cov), 200000, rng);
    Matrix centered = c.points().rowwise() - c.mean().transpose();
    Matrix sample_cov = centered.transpose() * centered / static_cast<double>(c.size());
    CHECK((sample_cov - cov).cwiseAbs().maxCoeff() <= 0.05);
    Matrix not_psd(2, 2);
    not_psd << 1.0, 2.0, 2.0, 1.0;
    CHECK_THROWS_AS(ModelSpec::gaussian(Vector::Zero(2), not_psd), InvalidArgument);
}

TEST_CASE("point ring radii are exact") {
    Rng rng(4);
    PointCloud c = sample(ModelSpec::point_ring(2, 2.0), 10000, rng);
    for (std::size_t i = 0; i < c.size(); ++i)
        CHECK(std::fabs(c.points().row(static_cast<Eigen::Index>(i)).norm() - 2.0) <= 1e-12);
}

TEST_CASE("point ring with central atom") {
    Rng rng(5);
    ModelSpec spec = ModelSpec::point_ring(3, 5.0, 0.9);
    PointCloud c = sample(spec, 20000, rng);
    std::size_t zeros = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double norm = c.points().row(static_cast<Eigen::Index>(i)).norm();
        if (norm == 0.0)
            ++zeros;
        else
            CHECK(std::fabs(norm - 5.0) <= 1e-12);
    }
    CHECK(zeros > 17500);
    CHECK(zeros < 18500);
}

TEST_CASE("product noise takes only the two levels") {
    Rng rng(6);
    PointCloud c = sample(ModelSpec::product_noise(4, 0.0, 6.0), 500, rng);
    std::size_t highs = 0;
    for (Eigen::Index i = 0; i < c.points().rows(); ++i)
        for (Eigen::Index j = 0; j < c.points().cols(); ++j) {
            const double v = c.points()(i, j);
            CHECK((v == 0.0 || v == 6.0));
            if (v == 6.0) ++highs;
        }
    CHECK(highs > 800);
    CHECK(highs < 1200);
}

TEST_CASE("fragmented hypercube structure") {
    Rng rng(7);
    auto [mu, nu] = fragmented_hypercube(2, 1, 4000, rng);
    CHECK(mu.size() == 4000);
    for (std::size_t i = 0; i < nu.size(); ++i) {
        const double first = nu.points()(static_cast<Eigen::Index>(i), 0);
        const double second = nu.points()(static_cast<Eigen::Index>(i), 1);
        CHECK(std::fabs(first) >= 1.0);
        CHECK(std::fabs(first) <= 2.0);
        CHECK(std::fabs(second) <= 1.0);
    }
    // Sign symmetry keeps the mean near zero.
    CHECK(nu.mean().norm() <= 0.1);
    CHECK_THROWS_AS(fragmented_hypercube(2, 3, 10, rng), InvalidArgument);
}

TEST_CASE("fragmented hypercube shift bound") {
    Rng rng(8);
    const int d = 6, ks = 4;
    ModelSpec spec = ModelSpec::fragmented_hypercube_spec(d, ks);
    PointCloud nu = sample(spec, 500, rng);
    for (int trial = 0; trial < 5; ++trial) {
        Direction theta = sample_sphere(d, rng);
        for (std::size_t i = 0; i < nu.size(); ++i) {
            Vector y = nu.points().row(static_cast<Eigen::Index>(i)).transpose();
            Vector x = y;
            for (int k = 0; k < ks; ++k) x[k] -= (y[k] > 0.0 ? 1.0 : (y[k] < 0.0 ? -1.0 : 0.0));
            const double lhs = std::fabs(theta.coords().dot(y));
            const double rhs = std::fabs(theta.coords().dot(x)) + std::sqrt(double(ks));
            CHECK(lhs <= rhs + 1e-12);
        }
    }
}

TEST_CASE("contaminate splits exactly and is deterministic") {
    const ModelSpec clean = ModelSpec::gaussian_factor(Vector::Zero(3), Matrix::Identity(3, 3));
    const ModelSpec noise = ModelSpec::product_noise(3);
    {
        Rng rng(9);
        ContaminatedSample cs = contaminate(clean, noise, 0.0, 50, rng);
        CHECK(cs.clean_count() == 50);
    }
    {
        Rng a(10), b(10);
        ContaminatedSample s1 = contaminate(clean, noise, 0.1, 100, a);
        ContaminatedSample s2 = contaminate(clean, noise, 0.1, 100, b);
        CHECK(s1.clean_count() == 90);
        CHECK(s1.points.points() == s2.points.points());
        CHECK(s1.clean_mask == s2.clean_mask);
        CHECK(s1.clean_subset().size() == 90);
    }
    {
        // Null contamination still records the split.
        Rng rng(11);
        ContaminatedSample cs = contaminate(clean, clean, 0.1, 100, rng);
        CHECK(cs.clean_count() == 90);
    }
    Rng rng(12);
    CHECK_THROWS_AS(contaminate(clean, noise, 0.6, 10, rng), InvalidArgument);
}

TEST_CASE("model spec JSON round trip") {
    auto [mu1, nu1] = experiment_model_pair(1, 4, 77);
    auto [mu3, nu3] = experiment_model_pair(3, 4, 77);
    for (const ModelSpec& spec :
         {mu1, nu1, mu3, nu3, ModelSpec::point_ring(5, 2.5, 0.9), ModelSpec::uniform_cube(3),
          ModelSpec::fragmented_hypercube_spec(6, 3), ModelSpec::product_noise(2),
          ModelSpec::point_mass(Vector::Ones(2))}) {
        ModelSpec back = ModelSpec::from_json(spec.to_json());
        Rng a(5), b(5);
        PointCloud ca = sample(spec, 50, a);
        PointCloud cb = sample(back, 50, b);
        CHECK(ca.points() == cb.points());
    }
}

TEST_CASE("experiment model pairs have the documented moments") {
    Rng rng(13);
    auto [mu, nu] = experiment_model_pair(2, 6, 0);
    PointCloud from_nu = sample(nu, 20000, rng);
    for (int i = 0; i < 6; ++i) CHECK(from_nu.mean()[i] == doctest::Approx(2.0).epsilon(0.05));
    // Model 3 parameters are frozen by seed.
    auto [a1, b1] = experiment_model_pair(3, 5, 42);
    auto [a2, b2] = experiment_model_pair(3, 5, 42);
    CHECK(a1.components[0].mean == a2.components[0].mean);
    CHECK(b1.components[9].factor == b2.components[9].factor);
    auto [a3, b3] = experiment_model_pair(3, 5, 43);
    CHECK(a1.components[0].mean != a3.components[0].mean);
    CHECK_THROWS_AS(experiment_model_pair(4, 5, 0), InvalidArgument);
}

TEST_CASE("model spec json rejects malformed input") {
    CHECK_THROWS_AS(ModelSpec::from_json(nlohmann::json{{"kind", "nope"}, {"d", 2}}),
                    ParseError);
    CHECK_THROWS_AS(ModelSpec::from_json(nlohmann::json{{"d", 2}}), ParseError);
}
