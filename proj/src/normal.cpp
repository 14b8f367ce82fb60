#include "slicedot/normal.hpp"

#include <cmath>

#include "slicedot/errors.hpp"

namespace slicedot {

double normal_pdf(double z) {
    static const double inv_sqrt_2pi = 0.3989422804014326779;
    return inv_sqrt_2pi * std::exp(-0.5 * z * z);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z * M_SQRT1_2); }

double normal_quantile(double tau) {
    if (!(tau >= 0.0 && tau <= 1.0)) throw InvalidArgument("normal_quantile: tau outside [0, 1]");
    if (tau == 0.0) return -INFINITY;
    if (tau == 1.0) return INFINITY;

    // Acklam's piecewise rational initializer.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double e[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (tau < plow) {
        const double q = std::sqrt(-2.0 * std::log(tau));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((e[0] * q + e[1]) * q + e[2]) * q + e[3]) * q + 1.0);
    } else if (tau <= 1.0 - plow) {
        const double q = tau - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - tau));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((e[0] * q + e[1]) * q + e[2]) * q + e[3]) * q + 1.0);
    }
    // One Halley step against the exact CDF.
    const double err = normal_cdf(x) - tau;
    const double u = err * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    x = x - u / (1.0 + 0.5 * x * u);
    return x;
}

double w2_sq_empirical_vs_normal(std::span<const double> sorted, double mean, double sd) {
    if (sorted.empty()) throw InvalidArgument("w2_sq_empirical_vs_normal: empty sample");
    if (!(sd > 0.0)) throw InvalidArgument("w2_sq_empirical_vs_normal: sd must be positive");
    const std::size_t n = sorted.size();
    // W_2^2 = (1/n) sum x_i^2 - 2 sum x_(i) int_{(i-1)/n}^{i/n} Q(t) dt + (mean^2 + sd^2)
    // with Q the N(mean, sd^2) quantile function and
    // int Q = mean (b - a) - sd (pdf(q_b) - pdf(q_a)) on (a, b).
    double sum_sq = 0.0;
    double cross = 0.0;
    double pdf_prev = 0.0;  // pdf at quantile of 0
    for (std::size_t i = 0; i < n; ++i) {
        const double x = sorted[i];
        sum_sq += x * x;
        const double hi = static_cast<double>(i + 1) / static_cast<double>(n);
        const double pdf_hi = (i + 1 == n) ? 0.0 : normal_pdf(normal_quantile(hi));
        const double seg = mean / static_cast<double>(n) - sd * (pdf_hi - pdf_prev);
        cross += x * seg;
        pdf_prev = pdf_hi;
    }
    const double value =
        sum_sq / static_cast<double>(n) - 2.0 * cross + mean * mean + sd * sd;
    return value > 0.0 ? value : 0.0;
}

double w2_sq_normal_vs_normal(double m1, double s1, double m2, double s2) {
    const double dm = m1 - m2;
    const double ds = s1 - s2;
    return dm * dm + ds * ds;
}

std::vector<double> normal_pdf_grid(std::size_t n) {
    if (n == 0) throw InvalidArgument("normal_pdf_grid: n must be >= 1");
    std::vector<double> grid(n + 1, 0.0);
    for (std::size_t i = 1; i < n; ++i)
        grid[i] = normal_pdf(
            normal_quantile(static_cast<double>(i) / static_cast<double>(n)));
    return grid;
}

double w2_sq_empirical_vs_std_normal(std::span<const double> sorted,
                                     std::span<const double> pdf_grid) {
    const std::size_t n = sorted.size();
    if (pdf_grid.size() != n + 1)
        throw InvalidArgument("w2_sq_empirical_vs_std_normal: grid size mismatch");
    double sum_sq = 0.0;
    double cross = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sum_sq += sorted[i] * sorted[i];
        cross += sorted[i] * (pdf_grid[i] - pdf_grid[i + 1]);
    }
    const double value = sum_sq / static_cast<double>(n) - 2.0 * cross + 1.0;
    return value > 0.0 ? value : 0.0;
}

}  // namespace slicedot
