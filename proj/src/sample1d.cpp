#include "slicedot/sample1d.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "slicedot/errors.hpp"

namespace slicedot {

namespace {

constexpr double kWeightSumTolerance = 1e-9;

double abs_pow(double diff, double p) {
    const double a = std::fabs(diff);
    if (p == 1.0) return a;
    if (p == 2.0) return a * a;
    return std::pow(a, p);
}

void check_finite(const std::vector<double>& values) {
    for (double v : values) {
        if (!std::isfinite(v)) throw InvalidArgument("Sample1D: non-finite value");
    }
}

void check_p(double p) {
    if (!(p >= 1.0)) throw InvalidArgument("order p must satisfy p >= 1");
}

}  // namespace

Sample1D::Sample1D(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw InvalidArgument("Sample1D: empty sample");
    check_finite(values_);
    order_.resize(values_.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t a, std::size_t b) { return values_[a] < values_[b]; });
    std::vector<double> sorted(values_.size());
    for (std::size_t k = 0; k < order_.size(); ++k) sorted[k] = values_[order_[k]];
    values_ = std::move(sorted);
    weights_.assign(values_.size(), 1.0 / static_cast<double>(values_.size()));
    uniform_ = true;
}

Sample1D::Sample1D(std::vector<double> values, std::vector<double> weights)
    : values_(std::move(values)), weights_(std::move(weights)) {
    if (values_.empty()) throw InvalidArgument("Sample1D: empty sample");
    if (values_.size() != weights_.size())
        throw InvalidArgument("Sample1D: values/weights size mismatch");
    check_finite(values_);
    double sum = 0.0;
    for (double w : weights_) {
        if (!std::isfinite(w) || w < 0.0) throw InvalidArgument("Sample1D: invalid weight");
        sum += w;
    }
    if (std::fabs(sum - 1.0) > kWeightSumTolerance)
        throw InvalidArgument("Sample1D: weights sum to " + std::to_string(sum) +
                              ", expected 1 within 1e-9");
    for (double& w : weights_) w /= sum;
    order_.resize(values_.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t a, std::size_t b) { return values_[a] < values_[b]; });
    std::vector<double> sorted_v(values_.size());
    std::vector<double> sorted_w(values_.size());
    for (std::size_t k = 0; k < order_.size(); ++k) {
        sorted_v[k] = values_[order_[k]];
        sorted_w[k] = weights_[order_[k]];
    }
    values_ = std::move(sorted_v);
    weights_ = std::move(sorted_w);
    uniform_ = false;
}

double wp_pow_sorted_equal(std::span<const double> xs, std::span<const double> ys, double p) {
    double total = 0.0;
    if (p == 2.0) {
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double d = xs[i] - ys[i];
            total += d * d;
        }
    } else if (p == 1.0) {
        for (std::size_t i = 0; i < xs.size(); ++i) total += std::fabs(xs[i] - ys[i]);
    } else {
        for (std::size_t i = 0; i < xs.size(); ++i) total += abs_pow(xs[i] - ys[i], p);
    }
    return total / static_cast<double>(xs.size());
}

double wp_pow_sorted_merge(std::span<const double> xs, std::span<const double> wx,
                           std::span<const double> ys, std::span<const double> wy, double p) {
    double total = 0.0;
    for_each_coupling_atom(wx, wy, [&](std::size_t i, std::size_t j, double mass) {
        total += mass * abs_pow(xs[i] - ys[j], p);
    });
    return total;
}

double wp_pow_equal(const Sample1D& xs, const Sample1D& ys, double p) {
    check_p(p);
    if (!xs.uniform() || !ys.uniform())
        throw InvalidArgument("wp_pow_equal: requires uniform weights on both sides");
    if (xs.size() != ys.size())
        throw InvalidArgument("wp_pow_equal: sample sizes differ (" + std::to_string(xs.size()) +
                              " vs " + std::to_string(ys.size()) + ")");
    return wp_pow_sorted_equal(xs.values(), ys.values(), p);
}

double wp_pow_weighted(const Sample1D& xs, const Sample1D& ys, double p) {
    check_p(p);
    return wp_pow_sorted_merge(xs.values(), xs.weights(), ys.values(), ys.weights(), p);
}

double wp_pow(const Sample1D& xs, const Sample1D& ys, double p) {
    if (xs.uniform() && ys.uniform() && xs.size() == ys.size()) return wp_pow_equal(xs, ys, p);
    return wp_pow_weighted(xs, ys, p);
}

double w1_cdf(const Sample1D& xs, const Sample1D& ys) {
    const auto& xv = xs.values();
    const auto& yv = ys.values();
    const auto& xw = xs.weights();
    const auto& yw = ys.weights();
    std::size_t i = 0, j = 0;
    double fx = 0.0, fy = 0.0;
    double total = 0.0;
    double prev = 0.0;
    bool have_prev = false;
    while (i < xv.size() || j < yv.size()) {
        double t;
        if (j >= yv.size() || (i < xv.size() && xv[i] <= yv[j])) {
            t = xv[i];
        } else {
            t = yv[j];
        }
        if (have_prev && t > prev) total += std::fabs(fx - fy) * (t - prev);
        while (i < xv.size() && xv[i] == t) fx += xw[i++];
        while (j < yv.size() && yv[j] == t) fy += yw[j++];
        prev = t;
        have_prev = true;
    }
    return total;
}

double brute_force_wp_pow(const Sample1D& xs, const Sample1D& ys, double p) {
    check_p(p);
    if (!xs.uniform() || !ys.uniform())
        throw InvalidArgument("brute_force_wp_pow: requires uniform weights");
    if (xs.size() != ys.size()) throw InvalidArgument("brute_force_wp_pow: sizes differ");
    const std::size_t n = xs.size();
    if (n > 8) throw InvalidArgument("brute_force_wp_pow: n > 8 would enumerate > 8! pairings");
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    double best = std::numeric_limits<double>::infinity();
    do {
        double cost = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            cost += abs_pow(xs.values()[i] - ys.values()[perm[i]], p);
        best = std::min(best, cost / static_cast<double>(n));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

}  // namespace slicedot
