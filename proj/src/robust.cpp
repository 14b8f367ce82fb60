#include "slicedot/robust.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <nlohmann/json.hpp>

#include "slicedot/errors.hpp"
#include "slicedot/exact_transport.hpp"
#include "slicedot/io.hpp"
#include "slicedot/max_sliced.hpp"
#include "slicedot/sample1d.hpp"

namespace slicedot {

using nlohmann::json;

namespace {

constexpr double kPowerIterTol = 1e-6;
constexpr std::size_t kPowerIterMax = 500;

// Canonical sign: largest-magnitude coordinate positive.
void canonicalize_sign(Vector& v) {
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0.0) v = -v;
}

}  // namespace

WeightedMoments weighted_moments(const PointCloud& cloud, std::span<const double> weights) {
    const std::size_t n = cloud.size();
    if (weights.size() != n) throw InvalidArgument("weighted_moments: weight count mismatch");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw InvalidArgument("weighted_moments: negative weight");
        total += w;
    }
    if (!(total > 0.0)) throw InvalidArgument("weighted_moments: zero total weight");

    WeightedMoments out;
    const Eigen::Index d = cloud.dim();
    Eigen::Map<const Eigen::VectorXd> w(weights.data(), static_cast<Eigen::Index>(n));
    out.mean = cloud.points().transpose() * (w / total);

    // Power iteration on v -> sum_i w_i (x_i - mean) <x_i - mean, v>,
    // evaluated without forming the covariance. Deterministic start.
    Rng rng(0x9d2c5680u);
    Vector v = rng.normal_vector(d);
    v.normalize();
    Vector centered_dot(n);
    double lambda = 0.0;
    for (std::size_t it = 1; it <= kPowerIterMax; ++it) {
        out.iterations = it;
        centered_dot = cloud.points() * v - Vector::Constant(n, out.mean.dot(v));
        Vector av = cloud.points().transpose() * (w.cwiseProduct(centered_dot) / total) -
                    out.mean * (w.dot(centered_dot) / total);
        lambda = v.dot(av);
        const double residual = (av - lambda * v).norm();
        if (!std::isfinite(lambda) || !av.allFinite())
            throw NumericError("weighted_moments: power iteration diverged");
        const double norm = av.norm();
        if (norm <= 1e-300) {
            // Covariance annihilates v; all mass concentrated.
            out.top_eigenvalue = 0.0;
            out.top_eigenvector = v;
            out.converged = true;
            return out;
        }
        v = av / norm;
        if (residual <= kPowerIterTol * std::max(std::fabs(lambda), 1e-300)) {
            out.converged = true;
            break;
        }
    }
    out.top_eigenvalue = std::max(lambda, 0.0);
    canonicalize_sign(v);
    out.top_eigenvector = v;
    return out;
}

FilterWeights spectral_filter(const PointCloud& cloud, double eps, double sigma2,
                              double threshold_mult) {
    if (!(eps >= 0.0 && eps < 1.0 / 3.0))
        throw InvalidArgument("spectral_filter: eps must be in [0, 1/3)");
    if (!(sigma2 > 0.0)) throw InvalidArgument("spectral_filter: sigma2 must be positive");
    if (!(threshold_mult > 0.0))
        throw InvalidArgument("spectral_filter: threshold_mult must be positive");

    const std::size_t n = cloud.size();
    FilterWeights out;
    out.epsilon = eps;
    out.sigma2 = sigma2;
    out.threshold = threshold_mult * sigma2;
    out.outside_guarantee = eps > 1.0 / 12.0;

    // kept[i] is the fraction of point i retained; weights are the
    // normalization kept / sum(kept).
    std::vector<double> kept(n, 1.0);
    std::vector<double> normalized(n, 1.0 / static_cast<double>(n));
    const double mass_budget = 3.0 * eps;
    const std::size_t iteration_cap = 10 * n;
    double kept_mean = 1.0;

    for (std::size_t it = 0;; ++it) {
        WeightedMoments moments = weighted_moments(cloud, normalized);
        out.top_eigenvalue = moments.top_eigenvalue;
        if (moments.top_eigenvalue <= out.threshold) {
            out.threshold_met = true;
            out.stop_reason = FilterWeights::Stop::threshold;
            break;
        }
        if (it >= iteration_cap) {
            out.stop_reason = FilterWeights::Stop::iteration_cap;
            break;
        }
        // Scores: squared projection of the centered points on the top
        // eigenvector; downweight proportionally to tau / tau_max.
        Vector centered_dot =
            cloud.points() * moments.top_eigenvector -
            Vector::Constant(n, moments.mean.dot(moments.top_eigenvector));
        double tau_max = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            tau_max = std::max(tau_max, centered_dot[static_cast<Eigen::Index>(i)] *
                                            centered_dot[static_cast<Eigen::Index>(i)]);
        if (!(tau_max > 0.0)) {
            out.stop_reason = FilterWeights::Stop::threshold;
            out.threshold_met = true;
            break;
        }
        double new_mean = 0.0;
        std::vector<double> candidate(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double tau = centered_dot[static_cast<Eigen::Index>(i)] *
                               centered_dot[static_cast<Eigen::Index>(i)];
            candidate[i] = kept[i] * (1.0 - tau / tau_max);
            new_mean += candidate[i];
        }
        new_mean /= static_cast<double>(n);
        if (1.0 - new_mean > mass_budget) {
            // Applying the step would delete more than 3 eps of mass.
            out.stop_reason = FilterWeights::Stop::mass_budget;
            break;
        }
        kept = std::move(candidate);
        kept_mean = new_mean;
        const double kept_total = kept_mean * static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) normalized[i] = kept[i] / kept_total;
        out.iterations = it + 1;
    }
    out.removed_mass = 1.0 - kept_mean;
    out.weights = std::move(normalized);
    return out;
}

namespace {

struct AscentEval {
    double value = 0.0;
    Vector gradient;
};

struct AscentWorkspace {
    std::vector<double> px, py, wx, wy;
    std::vector<std::size_t> ox, oy;
    Vector sx, sy;
};

// W_1 of the projections and one supergradient, from the weighted
// quantile coupling of the projected samples.
AscentEval eval_w1_supergradient(const PointCloud& X, const PointCloud& Y, const Vector& theta,
                                 AscentWorkspace& ws) {
    const std::size_t nx = X.size(), ny = Y.size();
    ws.px.resize(nx);
    ws.py.resize(ny);
    Eigen::Map<Eigen::VectorXd>(ws.px.data(), static_cast<Eigen::Index>(nx)) =
        X.points() * theta;
    Eigen::Map<Eigen::VectorXd>(ws.py.data(), static_cast<Eigen::Index>(ny)) =
        Y.points() * theta;
    ws.ox.resize(nx);
    ws.oy.resize(ny);
    std::iota(ws.ox.begin(), ws.ox.end(), std::size_t{0});
    std::iota(ws.oy.begin(), ws.oy.end(), std::size_t{0});
    std::stable_sort(ws.ox.begin(), ws.ox.end(),
                     [&](std::size_t a, std::size_t b) { return ws.px[a] < ws.px[b]; });
    std::stable_sort(ws.oy.begin(), ws.oy.end(),
                     [&](std::size_t a, std::size_t b) { return ws.py[a] < ws.py[b]; });
    ws.wx.resize(nx);
    ws.wy.resize(ny);
    for (std::size_t k = 0; k < nx; ++k) ws.wx[k] = X.weight(ws.ox[k]);
    for (std::size_t k = 0; k < ny; ++k) ws.wy[k] = Y.weight(ws.oy[k]);
    ws.sx = Vector::Zero(static_cast<Eigen::Index>(nx));
    ws.sy = Vector::Zero(static_cast<Eigen::Index>(ny));
    double value = 0.0;
    for_each_coupling_atom(ws.wx, ws.wy, [&](std::size_t a, std::size_t b, double mass) {
        const double diff = ws.px[ws.ox[a]] - ws.py[ws.oy[b]];
        const double s = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
        value += mass * std::fabs(diff);
        ws.sx[static_cast<Eigen::Index>(ws.ox[a])] += mass * s;
        ws.sy[static_cast<Eigen::Index>(ws.oy[b])] += mass * s;
    });
    AscentEval ev;
    ev.value = value;
    ev.gradient = X.points().transpose() * ws.sx - Y.points().transpose() * ws.sy;
    return ev;
}

}  // namespace

AscentResult msw1_weighted_ascent(const PointCloud& X, const PointCloud& Y,
                                  std::size_t iterations, double step_scale, std::uint64_t seed,
                                  int restarts) {
    if (X.dim() != Y.dim()) throw InvalidArgument("msw1_weighted_ascent: dimension mismatch");
    if (iterations < 1) throw InvalidArgument("msw1_weighted_ascent: iterations must be >= 1");
    if (restarts < 0) throw InvalidArgument("msw1_weighted_ascent: negative restarts");

    const Eigen::Index d = X.dim();
    if (step_scale <= 0.0) {
        const double lip = lipschitz_upper_bound(X, Y, 1.0);
        step_scale = lip > 1e-300 ? 1.0 / lip : 1.0;
    }

    const Vector gap = X.mean() - Y.mean();
    std::vector<Vector> inits;
    if (gap.norm() > 1e-12) inits.push_back(gap / gap.norm());
    for (int r = 0; r < restarts || inits.empty(); ++r) {
        Rng rng = Rng::substream(seed, 0xa5ce + static_cast<std::uint64_t>(r));
        inits.push_back(sample_sphere(d, rng).coords());
        if (inits.size() > static_cast<std::size_t>(restarts) + 1) break;
    }

    AscentWorkspace ws;
    Vector best_theta = inits.front();
    double best_value = -1.0;
    for (const Vector& init : inits) {
        Vector theta = init;
        for (std::size_t t = 0; t < iterations; ++t) {
            AscentEval ev = eval_w1_supergradient(X, Y, theta, ws);
            const double norm = theta.norm();
            if (norm > 1e-12) {
                const double value = ev.value / norm;  // homogeneity: w(t/|t|) = w(t)/|t|
                if (value > best_value) {
                    best_value = value;
                    best_theta = theta / norm;
                }
            }
            theta = project_ball(theta + step_scale / std::sqrt(static_cast<double>(t + 1)) *
                                             ev.gradient);
        }
        AscentEval last = eval_w1_supergradient(X, Y, theta, ws);
        const double norm = theta.norm();
        if (norm > 1e-12 && last.value / norm > best_value) {
            best_value = last.value / norm;
            best_theta = theta / norm;
        }
    }
    if (best_value < 0.0) {
        best_value = 0.0;
        best_theta = inits.front();
    }
    // Orient the reported direction from X toward Y.
    if (gap.norm() > 1e-12 && best_theta.dot(gap) > 0.0) best_theta = -best_theta;
    return AscentResult{Direction::normalized(best_theta), best_value};
}

double restricted_w1(const PointCloud& X, const PointCloud& Y, const Vector& anchor) {
    if (X.dim() != Y.dim() || anchor.size() != X.dim())
        throw InvalidArgument("restricted_w1: dimension mismatch");

    auto split = [&](const PointCloud& cloud) {
        std::vector<Eigen::Index> residual_rows;
        double anchor_mass = 0.0;
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            const double dist =
                (cloud.points().row(static_cast<Eigen::Index>(i)).transpose() - anchor).norm();
            if (dist <= 1e-9)
                anchor_mass += cloud.weight(i);
            else
                residual_rows.push_back(static_cast<Eigen::Index>(i));
        }
        return std::make_pair(anchor_mass, std::move(residual_rows));
    };
    auto [ax, rows_x] = split(X);
    auto [ay, rows_y] = split(Y);
    const double shared = std::min(ax, ay);
    const double leftover_x = ax - shared;
    const double leftover_y = ay - shared;

    const std::size_t mx = rows_x.size() + (leftover_x > 1e-15 ? 1 : 0);
    const std::size_t my = rows_y.size() + (leftover_y > 1e-15 ? 1 : 0);
    if (mx == 0 && my == 0) return 0.0;
    if (mx > 2000 || my > 2000)
        throw NumericError("restricted_w1: residual has more than 2000 atoms; subsample inputs");
    if (mx == 0 || my == 0) {
        // One side is pure anchor mass; totals match, so the other
        // residual must carry (numerically) zero mass as well.
        return 0.0;
    }

    auto build = [&](const PointCloud& cloud, const std::vector<Eigen::Index>& rows,
                     double leftover) {
        const std::size_t count = rows.size() + (leftover > 1e-15 ? 1 : 0);
        Matrix pts(count, cloud.dim());
        std::vector<double> mass(count);
        for (std::size_t k = 0; k < rows.size(); ++k) {
            pts.row(static_cast<Eigen::Index>(k)) = cloud.points().row(rows[k]);
            mass[k] = cloud.weight(static_cast<std::size_t>(rows[k]));
        }
        if (leftover > 1e-15) {
            pts.row(static_cast<Eigen::Index>(rows.size())) = anchor.transpose();
            mass[rows.size()] = leftover;
        }
        return std::make_pair(std::move(pts), std::move(mass));
    };
    auto [pts_x, mass_x] = build(X, rows_x, leftover_x);
    auto [pts_y, mass_y] = build(Y, rows_y, leftover_y);
    return exact_transport_cost(pts_x, mass_x, pts_y, mass_y);
}

ResilienceReport resilience_report(const ContaminatedSample& full, const FilterWeights& w,
                                   const PointCloud& reference, std::size_t iterations,
                                   std::uint64_t seed) {
    if (reference.size() == 0) throw InvalidArgument("resilience_report: empty reference");
    if (w.weights.size() != full.points.size())
        throw InvalidArgument("resilience_report: weight count mismatch");
    PointCloud weighted(full.points.points(), w.weights);
    ResilienceReport report;
    report.mean_gap = (weighted.mean() - reference.mean()).norm();
    report.msw1_lower =
        msw1_weighted_ascent(weighted, reference, iterations, 0.0, seed, 2).value;
    report.ratio = report.msw1_lower / std::max(report.mean_gap, 1e-300);
    return report;
}

json FilterWeights::to_json() const {
    const char* reason = "threshold";
    if (stop_reason == Stop::mass_budget) reason = "mass-budget";
    if (stop_reason == Stop::iteration_cap) reason = "iteration-cap";
    return json{{"n", weights.size()},
                {"removed_mass", removed_mass},
                {"iterations", iterations},
                {"top_eigenvalue", top_eigenvalue},
                {"threshold", threshold},
                {"threshold_met", threshold_met},
                {"stop_reason", reason},
                {"outside_guarantee", outside_guarantee},
                {"epsilon", epsilon},
                {"sigma2", sigma2}};
}

void FilterWeights::write_csv(std::ostream& out) const {
    out << "index,weight\n";
    for (std::size_t i = 0; i < weights.size(); ++i)
        out << i << ',' << format_double(weights[i]) << '\n';
}

json ResilienceReport::to_json() const {
    return json{{"mean_gap", mean_gap}, {"msw1_lower", msw1_lower}, {"ratio", ratio}};
}

}  // namespace slicedot
