#include <doctest.h>

#include <cmath>
#include <vector>

#include "slicedot/errors.hpp"
#include "slicedot/rng.hpp"
#include "slicedot/sample1d.hpp"

using namespace slicedot;

namespace {

Sample1D random_uniform_sample(std::size_t n, Rng& rng, double scale = 5.0) {
    std::vector<double> values(n);
    for (auto& v : values) v = scale * (rng.uniform01() - 0.5);
    return Sample1D(std::move(values));
}

Sample1D random_weighted_sample(std::size_t n, Rng& rng) {
    std::vector<double> values(n), weights(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        values[i] = 4.0 * (rng.uniform01() - 0.5);
        weights[i] = rng.uniform01() + 0.01;
        sum += weights[i];
    }
    for (auto& w : weights) w /= sum;
    return Sample1D(std::move(values), std::move(weights));
}

}  // namespace

TEST_CASE("canonicalization sorts values and permutes weights") {
    Sample1D s({3.0, 1.0, 2.0}, {0.5, 0.2, 0.3});
    CHECK(s.values() == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(s.weights() == std::vector<double>{0.2, 0.3, 0.5});
    CHECK(s.order() == std::vector<std::size_t>{1, 2, 0});
}

TEST_CASE("weight validation") {
    CHECK_THROWS_AS(Sample1D({1.0}, {0.9}), InvalidArgument);
    CHECK_THROWS_AS(Sample1D({1.0, 2.0}, {-0.1, 1.1}), InvalidArgument);
    CHECK_THROWS_AS(Sample1D({}), InvalidArgument);
    // A sum within 1e-9 of 1 is renormalized.
    Sample1D ok({1.0, 2.0}, {0.5 + 2e-10, 0.5});
    double sum = 0.0;
    for (double w : ok.weights()) sum += w;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("wp_pow_equal hand values") {
    CHECK(wp_pow_equal(Sample1D({0.0}), Sample1D({1.0}), 1.0) == doctest::Approx(1.0));
    Sample1D same({0.3, -1.2, 4.0});
    CHECK(wp_pow_equal(same, same, 2.0) == 0.0);
    // Sorted pairing 0<->1, 2<->3.
    CHECK(wp_pow_equal(Sample1D({0.0, 2.0}), Sample1D({3.0, 1.0}), 2.0) ==
          doctest::Approx(1.0));
}

TEST_CASE("wp_pow_equal errors") {
    CHECK_THROWS_AS(wp_pow_equal(Sample1D({0.0, 1.0}), Sample1D({0.0}), 2.0), InvalidArgument);
    CHECK_THROWS_AS(wp_pow_equal(Sample1D({0.0}), Sample1D({0.0}), 0.5), InvalidArgument);
}

TEST_CASE("wp_pow_weighted hand values") {
    // Quantile functions differ by 2 on tau in (0.5, 1].
    Sample1D x({0.0}, {1.0});
    Sample1D y({0.0, 2.0}, {0.5, 0.5});
    CHECK(wp_pow_weighted(x, y, 1.0) == doctest::Approx(1.0));
    Sample1D both({0.5, 1.5}, {0.25, 0.75});
    CHECK(wp_pow_weighted(both, both, 2.0) == 0.0);
    CHECK(wp_pow_weighted(Sample1D({0.0, 1.0}), Sample1D({0.0, 1.0}), 2.0) == 0.0);
}

TEST_CASE("w1_cdf hand values") {
    CHECK(w1_cdf(Sample1D({0.0}), Sample1D({3.0})) == doctest::Approx(3.0));
    // CDFs differ by 0.5 over two unit intervals.
    CHECK(w1_cdf(Sample1D({-1.0, 1.0}), Sample1D({0.0})) == doctest::Approx(1.0));
    Sample1D s({2.0, -1.0});
    CHECK(w1_cdf(s, s) == 0.0);
}

TEST_CASE("brute force oracle basics") {
    CHECK(brute_force_wp_pow(Sample1D({0.0, 2.0}), Sample1D({3.0, 1.0}), 2.0) ==
          doctest::Approx(1.0));
    CHECK(brute_force_wp_pow(Sample1D({2.0}), Sample1D({-1.0}), 3.0) == doctest::Approx(27.0));
    CHECK(brute_force_wp_pow(Sample1D({1.0, 2.0, 3.0}), Sample1D({1.0, 2.0, 3.0}), 1.0) == 0.0);
    std::vector<double> big(9, 0.0);
    CHECK_THROWS_AS(brute_force_wp_pow(Sample1D(big), Sample1D(big), 1.0), InvalidArgument);
}

TEST_CASE("order statistics formula equals permutation brute force") {
    Rng rng(71);
    const double ps[] = {1.0, 1.5, 2.0, 3.0};
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.uniform_index(7);
        Sample1D xs = random_uniform_sample(n, rng);
        Sample1D ys = random_uniform_sample(n, rng);
        const double p = ps[rng.uniform_index(4)];
        const double fast = wp_pow_equal(xs, ys, p);
        const double slow = brute_force_wp_pow(xs, ys, p);
        CHECK(std::fabs(fast - slow) <= 1e-10 * std::max(1.0, slow));
    }
}

TEST_CASE("metric axioms") {
    Rng rng(1234);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + rng.uniform_index(6);
        Sample1D a = random_uniform_sample(n, rng);
        Sample1D b = random_uniform_sample(n, rng);
        Sample1D c = random_uniform_sample(n, rng);
        const double p = trial % 2 == 0 ? 2.0 : 1.5;
        CHECK(wp_pow_equal(a, b, p) == doctest::Approx(wp_pow_equal(b, a, p)));
        CHECK(wp_pow_equal(a, a, p) == 0.0);
        const double dab = std::pow(wp_pow_equal(a, b, p), 1.0 / p);
        const double dbc = std::pow(wp_pow_equal(b, c, p), 1.0 / p);
        const double dac = std::pow(wp_pow_equal(a, c, p), 1.0 / p);
        CHECK(dac <= dab + dbc + 1e-9);
    }
}

TEST_CASE("translation behavior") {
    Rng rng(99);
    Sample1D a = random_uniform_sample(6, rng);
    Sample1D b = random_uniform_sample(6, rng);
    const double c = 2.75;
    auto shift = [&](const Sample1D& s) {
        std::vector<double> v = s.values();
        for (double& x : v) x += c;
        return Sample1D(std::move(v));
    };
    CHECK(wp_pow_equal(shift(a), shift(b), 2.0) ==
          doctest::Approx(wp_pow_equal(a, b, 2.0)).epsilon(1e-12));
    const double before = w1_cdf(a, b);
    const double after = w1_cdf(shift(a), b);
    CHECK(std::fabs(after - before) <= std::fabs(c) + 1e-12);
}

TEST_CASE("weighted merge agrees with uniform kernel and w1_cdf") {
    Rng rng(2024);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 1 + rng.uniform_index(8);
        Sample1D a = random_uniform_sample(n, rng);
        Sample1D b = random_uniform_sample(n, rng);
        // Re-wrap with explicit uniform weights.
        std::vector<double> uw(n, 1.0 / static_cast<double>(n));
        Sample1D aw(a.values(), uw);
        Sample1D bw(b.values(), uw);
        for (double p : {1.0, 2.0, 2.5}) {
            CHECK(std::fabs(wp_pow_weighted(aw, bw, p) - wp_pow_equal(a, b, p)) <= 1e-12);
        }
        Sample1D wa = random_weighted_sample(1 + rng.uniform_index(8), rng);
        Sample1D wb = random_weighted_sample(1 + rng.uniform_index(8), rng);
        CHECK(std::fabs(wp_pow_weighted(wa, wb, 1.0) - w1_cdf(wa, wb)) <= 1e-10);
    }
}

TEST_CASE("duplicated atoms match their weighted collapse") {
    // {a, a, b} uniform is the same measure as {a, b} with weights {2/3, 1/3}.
    Sample1D expanded({1.0, 1.0, 4.0});
    Sample1D collapsed({1.0, 4.0}, {2.0 / 3.0, 1.0 / 3.0});
    Sample1D other({0.0, 2.0, 5.0});
    for (double p : {1.0, 2.0}) {
        CHECK(wp_pow_weighted(collapsed, other, p) ==
              doctest::Approx(wp_pow_equal(expanded, other, p)).epsilon(1e-12));
    }
}
