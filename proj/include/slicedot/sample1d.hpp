#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace slicedot {

// A weighted empirical distribution on the real line. Construction
// canonicalizes: values are stable-sorted nondecreasing with weights
// permuted consistently, and weights must be nonnegative and sum to 1
// (sums within 1e-9 of 1 are renormalized, anything further off is
// rejected).
class Sample1D {
public:
    // Uniform weights 1/n.
    explicit Sample1D(std::vector<double> values);
    Sample1D(std::vector<double> values, std::vector<double> weights);

    std::size_t size() const { return values_.size(); }
    bool uniform() const { return uniform_; }

    // Sorted nondecreasing.
    const std::vector<double>& values() const { return values_; }
    // Aligned with values(); uniform samples report 1/n entries.
    const std::vector<double>& weights() const { return weights_; }
    // order()[k] = index of the k-th sorted atom in the constructor input.
    const std::vector<std::size_t>& order() const { return order_; }

private:
    std::vector<double> values_;
    std::vector<double> weights_;
    std::vector<std::size_t> order_;
    bool uniform_ = true;
};

// W_p^p between equal-size uniform empirical measures: the mean p-th
// power gap between order statistics.
double wp_pow_equal(const Sample1D& xs, const Sample1D& ys, double p);

// W_p^p between arbitrary weighted empirical measures via the exact
// quantile coupling (merge of cumulative-weight breakpoints).
double wp_pow_weighted(const Sample1D& xs, const Sample1D& ys, double p);

// Dispatches to the order-statistics kernel when both sides are uniform
// with equal size, otherwise to the quantile merge.
double wp_pow(const Sample1D& xs, const Sample1D& ys, double p);

// W_1 as the integral of |F_xs - F_ys| over the merged support.
double w1_cdf(const Sample1D& xs, const Sample1D& ys);

// Testing oracle: minimum of the mean p-th power cost over all
// pairings of two equal-size uniform samples. Guarded at n <= 8.
double brute_force_wp_pow(const Sample1D& xs, const Sample1D& ys, double p);

// Low-level kernels on pre-sorted data; used by the projection loops to
// avoid re-canonicalizing per direction.

// Mean |xs[i] - ys[i]|^p over sorted equal-length spans.
double wp_pow_sorted_equal(std::span<const double> xs, std::span<const double> ys, double p);

// Quantile-coupling integral over sorted values with aligned weights
// (each side's weights summing to 1).
double wp_pow_sorted_merge(std::span<const double> xs, std::span<const double> wx,
                           std::span<const double> ys, std::span<const double> wy, double p);

// Visits the atoms (i, j, mass) of the 1D quantile coupling between two
// sorted weighted samples, in quantile order. Indices refer to the
// sorted sequences.
template <class Visitor>
void for_each_coupling_atom(std::span<const double> wx, std::span<const double> wy,
                            Visitor&& visit) {
    const std::size_t nx = wx.size();
    const std::size_t ny = wy.size();
    std::size_t i = 0, j = 0;
    double ra = nx > 0 ? wx[0] : 0.0;
    double rb = ny > 0 ? wy[0] : 0.0;
    while (i < nx && j < ny) {
        if (ra <= 0.0) {
            if (++i >= nx) break;
            ra = wx[i];
            continue;
        }
        if (rb <= 0.0) {
            if (++j >= ny) break;
            rb = wy[j];
            continue;
        }
        const double delta = ra < rb ? ra : rb;
        visit(i, j, delta);
        ra -= delta;
        rb -= delta;
    }
}

}  // namespace slicedot
