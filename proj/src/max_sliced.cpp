#include "slicedot/max_sliced.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <nlohmann/json.hpp>

#include "slicedot/errors.hpp"
#include "slicedot/io.hpp"
#include "slicedot/projection_kernel.hpp"
#include "slicedot/sample1d.hpp"

namespace slicedot {

using nlohmann::json;

namespace {

void check_same_dim(const PointCloud& X, const PointCloud& Y, const char* where) {
    if (X.dim() != Y.dim())
        throw InvalidArgument(std::string(where) + ": dimension mismatch (" +
                              std::to_string(X.dim()) + " vs " + std::to_string(Y.dim()) + ")");
}

void check_uniform_equal(const PointCloud& X, const PointCloud& Y, const char* where) {
    if (!X.uniform() || !Y.uniform())
        throw InvalidArgument(std::string(where) +
                              ": defined for uniform empirical measures only");
    if (X.size() != Y.size())
        throw InvalidArgument(std::string(where) + ": sample sizes differ");
}

double signed_pow(double g, double p) {
    if (g == 0.0) return 0.0;
    const double s = g > 0.0 ? 1.0 : -1.0;
    if (p == 2.0) return g;
    if (p == 1.0) return s;
    return s * std::pow(std::fabs(g), p - 1.0);
}

// Objective value and one subgradient of the minimized surrogate at
// theta, sharing a single pair of sorts.
struct StepEval {
    double wp_pow_raw;  // W_p^p of the raw (unnormalized) projections
    Vector xi;
};

struct SubgradWorkspace {
    std::vector<double> px, py;
    std::vector<std::size_t> ox, oy;
    Vector ax, ay;
};

StepEval eval_with_subgradient(const PointCloud& X, const PointCloud& Y, const Vector& theta,
                               double p, SubgradWorkspace& ws) {
    const std::size_t n = X.size();
    ws.px.resize(n);
    ws.py.resize(n);
    Eigen::Map<Eigen::VectorXd>(ws.px.data(), static_cast<Eigen::Index>(n)) =
        X.points() * theta;
    Eigen::Map<Eigen::VectorXd>(ws.py.data(), static_cast<Eigen::Index>(n)) =
        Y.points() * theta;
    ws.ox.resize(n);
    ws.oy.resize(n);
    std::iota(ws.ox.begin(), ws.ox.end(), std::size_t{0});
    std::iota(ws.oy.begin(), ws.oy.end(), std::size_t{0});
    // Stable sort by value then original index pins the pairing on ties.
    std::stable_sort(ws.ox.begin(), ws.ox.end(),
                     [&](std::size_t a, std::size_t b) { return ws.px[a] < ws.px[b]; });
    std::stable_sort(ws.oy.begin(), ws.oy.end(),
                     [&](std::size_t a, std::size_t b) { return ws.py[a] < ws.py[b]; });
    ws.ax = Vector::Zero(static_cast<Eigen::Index>(n));
    ws.ay = Vector::Zero(static_cast<Eigen::Index>(n));
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double g = ws.px[ws.ox[k]] - ws.py[ws.oy[k]];
        total += p == 2.0 ? g * g : (p == 1.0 ? std::fabs(g) : std::pow(std::fabs(g), p));
        const double c = signed_pow(g, p);
        ws.ax[static_cast<Eigen::Index>(ws.ox[k])] += c;
        ws.ay[static_cast<Eigen::Index>(ws.oy[k])] += c;
    }
    const double scale = -p / static_cast<double>(n);
    StepEval ev;
    ev.wp_pow_raw = total / static_cast<double>(n);
    ev.xi = scale * (X.points().transpose() * ws.ax - Y.points().transpose() * ws.ay);
    return ev;
}

// Default step scale: the weak-convexity scale 2 max ||X_i - Y_j||^2,
// estimated over at most 10^4 sampled pairs.
double default_step_scale(const PointCloud& X, const PointCloud& Y, std::uint64_t seed) {
    const std::size_t nx = X.size(), ny = Y.size();
    double max_sq = 0.0;
    if (nx * ny <= 10000) {
        for (std::size_t i = 0; i < nx; ++i)
            for (std::size_t j = 0; j < ny; ++j) {
                const double d2 = (X.points().row(static_cast<Eigen::Index>(i)) -
                                   Y.points().row(static_cast<Eigen::Index>(j)))
                                      .squaredNorm();
                max_sq = std::max(max_sq, d2);
            }
    } else {
        Rng rng = Rng::substream(seed, 0x57e9);
        for (int k = 0; k < 10000; ++k) {
            const auto i = static_cast<Eigen::Index>(rng.uniform_index(nx));
            const auto j = static_cast<Eigen::Index>(rng.uniform_index(ny));
            max_sq = std::max(max_sq, (X.points().row(i) - Y.points().row(j)).squaredNorm());
        }
    }
    const double rho = 2.0 * max_sq;
    return rho > 1e-300 ? 1.0 / rho : 1.0;
}

}  // namespace

double projected_distance(const PointCloud& X, const PointCloud& Y, const Direction& theta,
                          double p) {
    check_same_dim(X, Y, "projected_distance");
    if (!(p >= 1.0)) throw InvalidArgument("projected_distance: p must be >= 1");
    thread_local detail::ProjectionWorkspace ws;
    ws.bind(X, Y);
    return std::pow(detail::wp_pow_projected(X, Y, theta.coords(), p, ws), 1.0 / p);
}

Subgradient subgradient(const PointCloud& X, const PointCloud& Y, const Vector& theta, double p) {
    check_same_dim(X, Y, "subgradient");
    check_uniform_equal(X, Y, "subgradient");
    if (theta.size() != X.dim()) throw InvalidArgument("subgradient: theta dimension mismatch");
    if (theta.norm() > 1.0 + 1e-9)
        throw InvalidArgument("subgradient: theta must lie in the unit ball");
    if (!(p >= 1.0)) throw InvalidArgument("subgradient: p must be >= 1");
    SubgradWorkspace ws;
    StepEval ev = eval_with_subgradient(X, Y, theta, p, ws);
    Subgradient out;
    out.xi = std::move(ev.xi);
    out.pairing.resize(X.size());
    for (std::size_t k = 0; k < X.size(); ++k) out.pairing[ws.ox[k]] = ws.oy[k];
    return out;
}

OptimizerTrace subgrad_descent(const PointCloud& X, const PointCloud& Y, double p,
                               const SubgradConfig& cfg) {
    check_same_dim(X, Y, "subgrad_descent");
    check_uniform_equal(X, Y, "subgrad_descent");
    if (cfg.iterations < 1) throw InvalidArgument("subgrad_descent: T must be >= 1");
    if (!(p >= 1.0)) throw InvalidArgument("subgrad_descent: p must be >= 1");
    if (cfg.restarts < 0) throw InvalidArgument("subgrad_descent: negative restarts");

    const double step_scale =
        cfg.step_scale > 0.0 ? cfg.step_scale : default_step_scale(X, Y, cfg.seed);
    const Vector gap = X.mean() - Y.mean();
    const bool have_gap = gap.norm() > 1e-12;
    // Directions are defined up to sign; report the best point oriented
    // from X toward Y.
    const Vector orientation = -gap;

    auto initial_point = [&](int run) -> Vector {
        if (run == 0) {
            switch (cfg.init) {
                case SubgradConfig::Init::given:
                    if (cfg.init_direction.size() != X.dim())
                        throw InvalidArgument("subgrad_descent: init direction dimension");
                    return project_ball(cfg.init_direction);
                case SubgradConfig::Init::mean_gap:
                    if (have_gap) return gap / gap.norm();
                    break;  // degenerate gap: fall through to random
                case SubgradConfig::Init::random:
                    break;
            }
        }
        Rng rng = Rng::substream(cfg.seed, 0x1417 + static_cast<std::uint64_t>(run));
        return sample_sphere(X.dim(), rng).coords();
    };

    OptimizerTrace best_trace;
    bool first = true;
    SubgradWorkspace ws;
    const std::size_t T = cfg.iterations;
    std::vector<Vector> thetas(T + 1);

    for (int run = 0; run <= cfg.restarts; ++run) {
        OptimizerTrace trace;
        trace.step_scale_used = step_scale;
        trace.heuristic = (p != 2.0);
        trace.iterates.reserve(T + 1);
        Vector theta = initial_point(run);
        double best_distance = -1.0;
        std::size_t best_index = 0;
        double alpha_sum = 0.0;
        for (std::size_t t = 0; t <= T; ++t) {
            const double alpha = step_scale / std::sqrt(static_cast<double>(t + 1));
            StepEval ev = eval_with_subgradient(X, Y, theta, p, ws);
            const double norm = theta.norm();
            const double distance =
                norm > 1e-12 ? std::pow(ev.wp_pow_raw, 1.0 / p) / norm : 0.0;
            trace.iterates.push_back(IterateRecord{-ev.wp_pow_raw, alpha, norm, distance});
            thetas[t] = theta;
            if (distance > best_distance) {
                best_distance = distance;
                best_index = t;
            }
            alpha_sum += alpha;
            if (t < T) theta = project_ball(theta - alpha * ev.xi);
        }
        // Sample t* with probability alpha_t / sum alpha (Algorithm 1).
        Rng pick = Rng::substream(cfg.seed, 0x7a11 + static_cast<std::uint64_t>(run));
        const double u = pick.uniform01() * alpha_sum;
        double acc = 0.0;
        std::size_t t_star = T;
        for (std::size_t t = 0; t <= T; ++t) {
            acc += trace.iterates[t].step;
            if (u < acc) {
                t_star = t;
                break;
            }
        }
        trace.sampled_index = t_star;
        trace.sampled_point = thetas[t_star];
        trace.value_at_sampled = trace.iterates[t_star].distance;
        trace.best_index = best_index;
        const Vector& raw_best = thetas[best_index];
        Vector unit_best = raw_best.norm() > 1e-12
                               ? Vector(raw_best / raw_best.norm())
                               : initial_point(run);
        if (have_gap && unit_best.dot(orientation) < 0.0) unit_best = -unit_best;
        trace.best_point = std::move(unit_best);
        trace.value_at_best = best_distance;
        if (!cfg.keep_iterates) trace.iterates.clear();
        if (first || trace.value_at_best > best_trace.value_at_best) {
            best_trace = std::move(trace);
            first = false;
        }
    }
    return best_trace;
}

double lipschitz_upper_bound(const PointCloud& X, const PointCloud& Y, double p) {
    if (!(p >= 1.0)) throw InvalidArgument("lipschitz_upper_bound: p must be >= 1");
    auto moment = [&](const PointCloud& cloud) {
        double acc = 0.0;
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            const double norm = cloud.points().row(static_cast<Eigen::Index>(i)).norm();
            acc += cloud.weight(i) * std::pow(norm, p);
        }
        return std::pow(acc, 1.0 / p);
    };
    return moment(X) + moment(Y);
}

bool lipo_rule_accepts(const std::vector<double>& values, const std::vector<double>& distances,
                       double lipschitz_bound) {
    if (values.size() != distances.size())
        throw InvalidArgument("lipo_rule_accepts: size mismatch");
    if (values.empty()) return true;  // first point is always evaluated
    const double incumbent = *std::max_element(values.begin(), values.end());
    double min_bound = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < values.size(); ++i)
        min_bound = std::min(min_bound, values[i] + lipschitz_bound * distances[i]);
    return min_bound >= incumbent;
}

LipoResult lipo_maximize(const PointCloud& X, const PointCloud& Y, double p, std::size_t budget,
                         std::uint64_t seed, std::size_t proposal_cap_factor) {
    check_same_dim(X, Y, "lipo_maximize");
    if (budget < 1) throw InvalidArgument("lipo_maximize: budget must be >= 1");
    if (!(p >= 1.0)) throw InvalidArgument("lipo_maximize: p must be >= 1");

    LipoState state;
    state.budget = budget;
    state.lipschitz_bound = lipschitz_upper_bound(X, Y, p);
    Rng rng = Rng::substream(seed, 0x11b0);
    thread_local detail::ProjectionWorkspace ws;
    ws.bind(X, Y);

    const std::size_t proposal_cap = proposal_cap_factor * budget;
    std::size_t best = 0;
    std::vector<double> dists;
    while (state.values.size() < budget && state.proposals_tried < proposal_cap) {
        const Direction candidate = sample_sphere(X.dim(), rng);
        ++state.proposals_tried;
        bool accept = true;
        if (!state.values.empty()) {
            dists.resize(state.points.size());
            for (std::size_t i = 0; i < state.points.size(); ++i)
                dists[i] = (candidate.coords() - state.points[i]).norm();
            accept = lipo_rule_accepts(state.values, dists, state.lipschitz_bound);
        }
        if (!accept) continue;
        const double value =
            std::pow(detail::wp_pow_projected(X, Y, candidate.coords(), p, ws), 1.0 / p);
        state.points.push_back(candidate.coords());
        state.values.push_back(value);
        if (value > state.values[best]) best = state.values.size() - 1;
    }
    return LipoResult{Direction(state.points[best]), state.values[best], std::move(state)};
}

GridResult dense_grid_oracle(const PointCloud& X, const PointCloud& Y, double p, int resolution) {
    check_same_dim(X, Y, "dense_grid_oracle");
    if (X.dim() > 3) throw InvalidArgument("dense_grid_oracle: supported for d <= 3 only");
    if (resolution < 8) throw InvalidArgument("dense_grid_oracle: resolution must be >= 8");
    if (!(p >= 1.0)) throw InvalidArgument("dense_grid_oracle: p must be >= 1");

    thread_local detail::ProjectionWorkspace ws;
    ws.bind(X, Y);
    Vector best_theta;
    double best_value = -1.0;
    auto consider = [&](const Vector& theta) {
        const double v = std::pow(detail::wp_pow_projected(X, Y, theta, p, ws), 1.0 / p);
        if (v > best_value) {
            best_value = v;
            best_theta = theta;
        }
    };

    const Eigen::Index d = X.dim();
    if (d == 1) {
        Vector t(1);
        t[0] = 1.0;
        consider(t);
        t[0] = -1.0;
        consider(t);
    } else if (d == 2) {
        Vector t(2);
        for (int k = 0; k < resolution; ++k) {
            const double phi = 2.0 * M_PI * (k + 0.5) / resolution;
            t[0] = std::cos(phi);
            t[1] = std::sin(phi);
            consider(t);
        }
    } else {
        Vector t(3);
        for (int i = 0; i < resolution; ++i) {
            const double z = -1.0 + 2.0 * (i + 0.5) / resolution;
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            for (int j = 0; j < resolution; ++j) {
                const double phi = 2.0 * M_PI * (j + 0.5) / resolution;
                t[0] = r * std::cos(phi);
                t[1] = r * std::sin(phi);
                t[2] = z;
                consider(t);
            }
        }
    }
    return GridResult{Direction::normalized(best_theta), best_value};
}

json OptimizerTrace::to_json() const {
    json j{{"value", value_at_best},
           {"best_index", best_index},
           {"value_at_sampled", value_at_sampled},
           {"sampled_index", sampled_index},
           {"step_scale", step_scale_used},
           {"heuristic", heuristic}};
    json theta = json::array();
    for (Eigen::Index i = 0; i < best_point.size(); ++i) theta.push_back(best_point[i]);
    j["theta"] = std::move(theta);
    json sampled = json::array();
    for (Eigen::Index i = 0; i < sampled_point.size(); ++i) sampled.push_back(sampled_point[i]);
    j["theta_sampled"] = std::move(sampled);
    j["iterations"] = iterates.empty() ? 0 : iterates.size() - 1;
    return j;
}

void OptimizerTrace::write_csv(std::ostream& out) const {
    out << "t,objective,step,norm\n";
    for (std::size_t t = 0; t < iterates.size(); ++t) {
        out << t << ',' << format_double(iterates[t].objective) << ','
            << format_double(iterates[t].step) << ',' << format_double(iterates[t].norm) << '\n';
    }
}

}  // namespace slicedot
