#include "slicedot/sliced.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <nlohmann/json.hpp>

#include "slicedot/errors.hpp"
#include "slicedot/io.hpp"
#include "slicedot/parallel.hpp"
#include "slicedot/projection_kernel.hpp"
#include "slicedot/sample1d.hpp"

namespace slicedot {

using nlohmann::json;

namespace detail {

void ProjectionWorkspace::bind(const PointCloud& X, const PointCloud& Y) {
    px.resize(X.size());
    py.resize(Y.size());
    if (!X.uniform()) {
        order_x.resize(X.size());
        wx.resize(X.size());
    }
    if (!Y.uniform()) {
        order_y.resize(Y.size());
        wy.resize(Y.size());
    }
}

namespace {

// Sorts `proj` in place for uniform clouds; for weighted clouds sorts an
// index array and gathers values/weights.
void sort_projection(const PointCloud& cloud, std::vector<double>& proj,
                     std::vector<std::size_t>& order, std::vector<double>& weights) {
    if (cloud.uniform()) {
        std::sort(proj.begin(), proj.end());
        return;
    }
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return proj[a] < proj[b]; });
    weights.resize(order.size());
    std::vector<double> sorted(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        sorted[k] = proj[order[k]];
        weights[k] = cloud.weights()[order[k]];
    }
    proj = std::move(sorted);
}

}  // namespace

double wp_pow_projected(const PointCloud& X, const PointCloud& Y, const Vector& theta, double p,
                        ProjectionWorkspace& ws) {
    Eigen::Map<Eigen::VectorXd>(ws.px.data(), static_cast<Eigen::Index>(ws.px.size())) =
        X.points() * theta;
    Eigen::Map<Eigen::VectorXd>(ws.py.data(), static_cast<Eigen::Index>(ws.py.size())) =
        Y.points() * theta;
    sort_projection(X, ws.px, ws.order_x, ws.wx);
    sort_projection(Y, ws.py, ws.order_y, ws.wy);
    if (X.uniform() && Y.uniform() && X.size() == Y.size())
        return wp_pow_sorted_equal(ws.px, ws.py, p);
    if (X.uniform()) ws.wx.assign(X.size(), 1.0 / static_cast<double>(X.size()));
    if (Y.uniform()) ws.wy.assign(Y.size(), 1.0 / static_cast<double>(Y.size()));
    return wp_pow_sorted_merge(ws.px, ws.wx, ws.py, ws.wy, p);
}

}  // namespace detail

EstimateReport estimate_swp(const PointCloud& X, const PointCloud& Y, double p, std::size_t m,
                            std::uint64_t seed, int workers) {
    if (X.dim() != Y.dim())
        throw InvalidArgument("estimate_swp: dimension mismatch (" + std::to_string(X.dim()) +
                              " vs " + std::to_string(Y.dim()) + ")");
    if (!(p >= 1.0)) throw InvalidArgument("estimate_swp: p must be >= 1");
    if (m < 1) throw InvalidArgument("estimate_swp: m must be >= 1");

    EstimateReport report;
    report.per_projection.resize(m);
    const Eigen::Index d = X.dim();

    parallel_for(m, workers, [&, d](std::size_t j) {
        thread_local detail::ProjectionWorkspace ws;
        ws.bind(X, Y);
        Rng rng = Rng::substream(seed, j);
        const Direction theta = sample_sphere(d, rng);
        report.per_projection[j] = detail::wp_pow_projected(X, Y, theta.coords(), p, ws);
    });

    // Index-ordered reduction: identical for any worker count.
    double sum = 0.0;
    for (double v : report.per_projection) sum += v;
    report.value_pow = sum / static_cast<double>(m);
    report.value = std::pow(report.value_pow, 1.0 / p);
    if (m > 1) {
        double ss = 0.0;
        for (double v : report.per_projection) {
            const double c = v - report.value_pow;
            ss += c * c;
        }
        report.std_error = std::sqrt(ss / static_cast<double>(m - 1) / static_cast<double>(m));
    }
    report.meta = EstimateMeta{X.size(), Y.size(), m, static_cast<int>(d), p, seed};
    return report;
}

json EstimateReport::to_json(bool include_projections) const {
    json j{{"value_pow", value_pow},
           {"value", value},
           {"std_error", std_error},
           {"meta",
            {{"n", meta.n},
             {"n_y", meta.n_y},
             {"m", meta.m},
             {"d", meta.d},
             {"p", meta.p},
             {"seed", meta.seed}}}};
    if (include_projections) j["per_projection"] = per_projection;
    return j;
}

void EstimateReport::write_projection_csv(std::ostream& out) const {
    for (double v : per_projection) out << format_double(v) << '\n';
}

std::pair<double, double> theoretical_rate_terms(double p, double m, double n, double d) {
    if (!(p >= 1.0) || !(m > 0.0) || !(n > 0.0) || !(d > 0.0))
        throw InvalidArgument("theoretical_rate_terms: all arguments must be positive, p >= 1");
    const double mc_term = 1.0 / std::sqrt(m * d);
    const double log_factor = (p == 2.0) ? std::log(n) : 1.0;
    const double emp_term = log_factor / std::pow(n, std::min(p, 2.0) / 2.0);
    return {mc_term, emp_term};
}

}  // namespace slicedot
