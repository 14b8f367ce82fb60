#include <doctest.h>

#include <cmath>

#include "slicedot/errors.hpp"
#include "slicedot/geometry.hpp"

using namespace slicedot;

TEST_CASE("direction validation") {
    Vector v(2);
    v << 0.6, 0.8;
    CHECK_NOTHROW(Direction{v});
    v << 1.0, 1.0;
    CHECK_THROWS_AS(Direction{v}, InvalidArgument);
    CHECK(Direction::normalized(v).coords().norm() == doctest::Approx(1.0).epsilon(1e-14));
    Vector zero = Vector::Zero(3);
    CHECK_THROWS_AS(Direction::normalized(zero), InvalidArgument);
}

TEST_CASE("sample_sphere basics") {
    Rng rng(5);
    CHECK_THROWS_AS(sample_sphere(0, rng), InvalidArgument);
    int plus = 0;
    for (int i = 0; i < 2000; ++i) {
        Direction t = sample_sphere(1, rng);
        CHECK(std::fabs(std::fabs(t.coords()[0]) - 1.0) <= 1e-12);
        if (t.coords()[0] > 0) ++plus;
    }
    CHECK(plus > 800);
    CHECK(plus < 1200);
    for (int i = 0; i < 200; ++i) {
        Direction t = sample_sphere(7, rng);
        CHECK(std::fabs(t.coords().norm() - 1.0) <= 1e-12);
    }
    // Reproducible under the same seed.
    Rng a(42), b(42);
    CHECK(sample_sphere(3, a).coords() == sample_sphere(3, b).coords());
}

TEST_CASE("first coordinate second moment is 1/d") {
    Rng rng(11);
    const int d = 10;
    double acc = 0.0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        Direction t = sample_sphere(d, rng);
        acc += t.coords()[0] * t.coords()[0];
    }
    CHECK(acc / draws == doctest::Approx(0.1).epsilon(0.1));
}

TEST_CASE("project carries weights and respects linearity") {
    Matrix pts(2, 2);
    pts << 1.0, 0.0, 0.0, 1.0;
    PointCloud cloud(pts);
    Vector e1(2);
    e1 << 1.0, 0.0;
    Sample1D s = project(cloud, Direction(e1));
    CHECK(s.values() == std::vector<double>{0.0, 1.0});

    PointCloud weighted(pts, {0.25, 0.75});
    Sample1D sw = project(weighted, Direction(e1));
    CHECK(sw.values() == std::vector<double>{0.0, 1.0});
    CHECK(sw.weights() == std::vector<double>{0.75, 0.25});

    PointCloud scaled(Matrix(3.0 * pts));
    Sample1D ss = project(scaled, Direction(e1));
    CHECK(ss.values() == std::vector<double>{0.0, 3.0});

    Vector e3(3);
    e3 << 1.0, 0.0, 0.0;
    CHECK_THROWS_AS(project(cloud, Direction(e3)), InvalidArgument);
}

TEST_CASE("project_ball") {
    Vector inside(2);
    inside << 0.3, 0.4;
    CHECK(project_ball(inside) == inside);
    Vector outside(2);
    outside << 3.0, 4.0;
    Vector projected = project_ball(outside);
    CHECK(projected[0] == doctest::Approx(0.6));
    CHECK(projected[1] == doctest::Approx(0.8));
    Vector zero = Vector::Zero(4);
    CHECK(project_ball(zero) == zero);
}

TEST_CASE("sphere_abs_moment closed forms") {
    for (int d : {1, 2, 3, 10, 50}) CHECK(sphere_abs_moment(2.0, d) == doctest::Approx(1.0 / d));
    for (double p : {1.0, 2.5, 6.0}) CHECK(sphere_abs_moment(p, 1) == doctest::Approx(1.0));
    CHECK(sphere_abs_moment(4.0, 2) == doctest::Approx(3.0 / 8.0));
    // Large d stays finite thanks to the log-gamma evaluation.
    CHECK(std::isfinite(sphere_abs_moment(6.0, 100000)));
    CHECK_THROWS_AS(sphere_abs_moment(0.5, 3), InvalidArgument);
    CHECK_THROWS_AS(sphere_abs_moment(2.0, 0), InvalidArgument);
}

TEST_CASE("sphere_abs_moment monotone in d and p") {
    for (double p : {1.0, 1.5, 2.0, 3.0, 4.5, 6.0}) {
        for (int d = 1; d < 100; ++d) {
            CHECK(sphere_abs_moment(p, d + 1) <= sphere_abs_moment(p, d) + 1e-15);
        }
    }
    for (int d : {1, 2, 5, 20, 100}) {
        double prev = 0.0;
        for (double p = 1.0; p <= 6.0; p += 0.5) {
            const double root = std::pow(sphere_abs_moment(p, d), 1.0 / p);
            CHECK(root >= prev - 1e-12);
            prev = root;
        }
    }
}

TEST_CASE("sphere_abs_moment matches Monte Carlo") {
    Rng rng(2718);
    const int draws = 1000000;
    for (auto [p, d] : {std::pair<double, int>{1.0, 3}, {3.0, 5}, {4.0, 2}}) {
        double acc = 0.0, acc_sq = 0.0;
        for (int i = 0; i < draws; ++i) {
            Direction t = sample_sphere(d, rng);
            const double v = std::pow(std::fabs(t.coords()[0]), p);
            acc += v;
            acc_sq += v * v;
        }
        const double mean = acc / draws;
        const double var = acc_sq / draws - mean * mean;
        const double se = std::sqrt(var / draws);
        CHECK(std::fabs(mean - sphere_abs_moment(p, d)) <= 4.0 * se);
    }
}

TEST_CASE("point cloud validation") {
    Matrix pts(2, 2);
    pts << 0.0, 1.0, 2.0, 3.0;
    CHECK_NOTHROW(PointCloud{pts});
    CHECK_THROWS_AS(PointCloud(pts, {0.5, 0.6}), InvalidArgument);
    CHECK_THROWS_AS(PointCloud(pts, {1.2, -0.2}), InvalidArgument);
    Matrix bad(1, 1);
    bad(0, 0) = std::nan("");
    CHECK_THROWS_AS(PointCloud{bad}, InvalidArgument);
    PointCloud weighted(pts, {0.25, 0.75});
    Vector mean = weighted.mean();
    CHECK(mean[0] == doctest::Approx(1.5));
    CHECK(mean[1] == doctest::Approx(2.5));
}
