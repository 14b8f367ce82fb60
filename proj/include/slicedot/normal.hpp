#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace slicedot {

// Standard normal density, CDF, and quantile (Acklam's rational
// approximation with one Halley refinement; accurate to ~1e-15).
double normal_pdf(double z);
double normal_cdf(double z);
double normal_quantile(double tau);

// Exact W_2^2 between the empirical distribution of `sorted` (ascending,
// uniform weights) and N(mean, sd^2), via the closed-form integral of
// the squared quantile gap.
double w2_sq_empirical_vs_normal(std::span<const double> sorted, double mean, double sd);

// W_2^2 between two normal laws: (m1 - m2)^2 + (s1 - s2)^2.
double w2_sq_normal_vs_normal(double m1, double s1, double m2, double s2);

// pdf(Phi^{-1}(i/n)) for i = 0..n (zero at both ends); shared across
// directions when slicing against the standard normal.
std::vector<double> normal_pdf_grid(std::size_t n);

// Same distance as w2_sq_empirical_vs_normal(sorted, 0, 1) but using a
// precomputed pdf grid of size sorted.size() + 1.
double w2_sq_empirical_vs_std_normal(std::span<const double> sorted,
                                     std::span<const double> pdf_grid);

}  // namespace slicedot
