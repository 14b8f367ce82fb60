#include "slicedot/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "slicedot/distributions.hpp"
#include "slicedot/errors.hpp"
#include "slicedot/io.hpp"
#include "slicedot/max_sliced.hpp"
#include "slicedot/normal.hpp"
#include "slicedot/parallel.hpp"
#include "slicedot/projection_kernel.hpp"
#include "slicedot/robust.hpp"
#include "slicedot/sliced.hpp"

namespace slicedot {

using nlohmann::json;

namespace {

void validate_keys(const json& config, std::initializer_list<const char*> allowed,
                   const std::string& experiment) {
    if (config.is_null()) return;
    if (!config.is_object()) throw ParseError(experiment + ": config must be a JSON object");
    std::vector<std::string> offending;
    for (auto it = config.begin(); it != config.end(); ++it) {
        bool ok = false;
        for (const char* key : allowed)
            if (it.key() == key) {
                ok = true;
                break;
            }
        if (!ok) offending.push_back(it.key());
    }
    if (!offending.empty()) {
        std::string msg = experiment + ": unknown config keys:";
        for (const auto& k : offending) msg += " " + k;
        throw ParseError(msg);
    }
}

template <class T>
T config_value(const json& config, const char* key, T fallback) {
    if (config.is_null() || !config.contains(key)) return fallback;
    try {
        return config.at(key).get<T>();
    } catch (const json::exception&) {
        throw ParseError(std::string("config key '") + key + "' has the wrong type");
    }
}

std::vector<int> config_grid(const json& config, const char* key, std::vector<int> fallback) {
    auto grid = config_value<std::vector<int>>(config, key, std::move(fallback));
    if (grid.empty()) throw ParseError(std::string("config key '") + key + "' must be non-empty");
    return grid;
}

// Stable per-task seeds: mix the experiment seed with coordinates.
std::uint64_t task_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return Rng::derive_seed(Rng::derive_seed(Rng::derive_seed(seed, a), b), c);
}

struct Band {
    double low, high;
};

// 10%/90% quantiles of 20 bootstrapped means of the run-level values.
Band bootstrap_band(std::span<const double> values, Rng& rng) {
    constexpr int B = 20;
    std::vector<double> means(B);
    for (int b = 0; b < B; ++b) {
        double acc = 0.0;
        for (std::size_t k = 0; k < values.size(); ++k)
            acc += values[rng.uniform_index(values.size())];
        means[b] = acc / static_cast<double>(values.size());
    }
    std::sort(means.begin(), means.end());
    auto quantile = [&](double q) {
        const double pos = q * (B - 1);
        const int lo = static_cast<int>(pos);
        const double frac = pos - lo;
        return lo + 1 < B ? means[lo] + frac * (means[lo + 1] - means[lo]) : means[lo];
    };
    return Band{quantile(0.1), quantile(0.9)};
}

double mean_of(std::span<const double> values) {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc / static_cast<double>(values.size());
}

// Builds a curve from per-grid-point run values; bands clamp to the
// mean so band_low <= mean <= band_high holds by construction.
CurveResult make_curve(std::string name, std::span<const double> xs,
                       const std::vector<std::vector<double>>& run_values, std::uint64_t seed) {
    CurveResult curve;
    curve.name = std::move(name);
    curve.runs = run_values.empty() ? 0 : run_values.front().size();
    Rng rng = Rng::substream(seed, 0xb007);
    for (std::size_t g = 0; g < xs.size(); ++g) {
        const double mean = mean_of(run_values[g]);
        Band band = bootstrap_band(run_values[g], rng);
        curve.points.push_back(CurvePoint{xs[g], mean, std::min(band.low, mean),
                                          std::max(band.high, mean)});
    }
    return curve;
}

json curve_summary(const CurveResult& curve) {
    json xs = json::array(), means = json::array();
    for (const auto& p : curve.points) {
        xs.push_back(p.x);
        means.push_back(p.mean);
    }
    return json{{"x", std::move(xs)}, {"mean", std::move(means)}};
}

SlopeFit curve_slope(const CurveResult& curve) {
    std::vector<double> xs, ys;
    for (const auto& p : curve.points) {
        xs.push_back(p.x);
        ys.push_back(p.mean);
    }
    return fit_loglog_slope(xs, ys);
}

json slope_json(const SlopeFit& fit) {
    return json{{"slope", fit.slope}, {"intercept", fit.intercept}, {"r2", fit.r2}};
}

// Prefix means of the per-projection values at the requested m values.
std::vector<double> prefix_estimates(const std::vector<double>& per_projection,
                                     const std::vector<int>& m_grid) {
    std::vector<double> out;
    out.reserve(m_grid.size());
    double acc = 0.0;
    std::size_t consumed = 0;
    for (int m : m_grid) {
        while (consumed < static_cast<std::size_t>(m)) acc += per_projection[consumed++];
        out.push_back(acc / static_cast<double>(m));
    }
    return out;
}

// I.i.d. categorical resample of a weighted cloud into K uniform atoms.
PointCloud resample_cloud(const PointCloud& cloud, std::size_t K, Rng& rng) {
    std::vector<double> cumulative(cloud.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        acc += cloud.weight(i);
        cumulative[i] = acc;
    }
    Matrix rows(K, cloud.dim());
    for (std::size_t k = 0; k < K; ++k) {
        const double u = rng.uniform01() * acc;
        const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), u);
        const std::size_t idx = std::min<std::size_t>(
            static_cast<std::size_t>(it - cumulative.begin()), cloud.size() - 1);
        rows.row(static_cast<Eigen::Index>(k)) =
            cloud.points().row(static_cast<Eigen::Index>(idx));
    }
    return PointCloud(std::move(rows));
}

json base_manifest(const char* name, const json& resolved, std::uint64_t seed) {
    return json{{"experiment", name},
                {"config", resolved},
                {"seed", seed},
                {"content_hash", content_hash(resolved.dump() + ":" + std::to_string(seed))}};
}

}  // namespace

SlopeFit fit_loglog_slope(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw InvalidArgument("fit_loglog_slope: size mismatch");
    if (xs.size() < 3) throw InvalidArgument("fit_loglog_slope: need at least 3 points");
    const std::size_t n = xs.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
            throw InvalidArgument("fit_loglog_slope: inputs must be positive");
        const double lx = std::log(xs[i]);
        const double ly = std::log(ys[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        syy += ly * ly;
    }
    const double nn = static_cast<double>(n);
    const double var_x = sxx - sx * sx / nn;
    const double cov = sxy - sx * sy / nn;
    const double var_y = syy - sy * sy / nn;
    if (!(var_x > 0.0)) throw InvalidArgument("fit_loglog_slope: degenerate x grid");
    SlopeFit fit;
    fit.slope = cov / var_x;
    fit.intercept = (sy - fit.slope * sx) / nn;
    fit.r2 = var_y > 0.0 ? (cov * cov) / (var_x * var_y) : 1.0;
    return fit;
}

std::string CurveResult::to_csv() const {
    std::ostringstream out;
    out << "x,mean,band_low,band_high\n";
    for (const auto& p : points) {
        out << format_double(p.x) << ',' << format_double(p.mean) << ','
            << format_double(p.band_low) << ',' << format_double(p.band_high) << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// mc-complexity: error of the Monte Carlo estimate versus the number of
// projections. Two error notions per (model, d):
//   - absolute error against a cached high-budget population reference
//     (the Figure-1 style curve, used for cross-d comparisons);
//   - Monte Carlo integration error against a high-budget direction
//     average on the same sample pair (isolates the 1/sqrt(md) term;
//     the projection-rate slope is fit on this curve).
// ---------------------------------------------------------------------------
ExperimentOutput run_mc_complexity(const json& config, std::uint64_t seed, int workers) {
    validate_keys(config, {"model", "d_grid", "n", "m_grid", "runs", "ref_n", "ref_m"},
                  "mc-complexity");
    const int model = config_value(config, "model", 1);
    const auto d_grid = config_grid(config, "d_grid", {10});
    const int n = config_value(config, "n", 5000);
    const auto m_grid = config_grid(config, "m_grid", {10, 30, 100, 300, 1000});
    const int runs = config_value(config, "runs", 50);
    const int ref_n = config_value(config, "ref_n", 5000);
    const int ref_m = config_value(config, "ref_m", 2000);
    if (runs < 2) throw ParseError("mc-complexity: runs must be >= 2");
    for (std::size_t i = 1; i < m_grid.size(); ++i)
        if (m_grid[i] <= m_grid[i - 1]) throw ParseError("mc-complexity: m_grid must increase");

    json resolved{{"model", model}, {"d_grid", d_grid},   {"n", n},
                  {"m_grid", m_grid}, {"runs", runs},     {"ref_n", ref_n},
                  {"ref_m", ref_m}};

    const std::size_t m_max = static_cast<std::size_t>(m_grid.back());
    ExperimentOutput out;
    out.manifest = base_manifest("mc-complexity", resolved, seed);
    json summary = json::object();

    for (std::size_t di = 0; di < d_grid.size(); ++di) {
        const int d = d_grid[di];
        auto [mu, nu] = experiment_model_pair(model, d, seed);

        // Population reference, computed once per (model, d, seed).
        Rng ref_rng_x(task_seed(seed, 0x4ef0, di, 0));
        Rng ref_rng_y(task_seed(seed, 0x4ef0, di, 1));
        const PointCloud ref_x = sample(mu, ref_n, ref_rng_x);
        const PointCloud ref_y = sample(nu, ref_n, ref_rng_y);
        const EstimateReport ref_report =
            estimate_swp(ref_x, ref_y, 2.0, ref_m, task_seed(seed, 0x4ef0, di, 2), workers);
        const double reference = ref_report.value_pow;

        std::vector<std::vector<double>> abs_err(m_grid.size(),
                                                 std::vector<double>(runs, 0.0));
        std::vector<std::vector<double>> mc_err(m_grid.size(), std::vector<double>(runs, 0.0));
        parallel_for(static_cast<std::size_t>(runs), workers, [&](std::size_t r) {
            Rng rng_x(task_seed(seed, di, r, 0));
            Rng rng_y(task_seed(seed, di, r, 1));
            const PointCloud X = sample(mu, n, rng_x);
            const PointCloud Y = sample(nu, n, rng_y);
            const EstimateReport est =
                estimate_swp(X, Y, 2.0, m_max, task_seed(seed, di, r, 2), 1);
            const EstimateReport own_ref =
                estimate_swp(X, Y, 2.0, ref_m, task_seed(seed, di, r, 3), 1);
            const auto estimates = prefix_estimates(est.per_projection, m_grid);
            for (std::size_t mi = 0; mi < m_grid.size(); ++mi) {
                abs_err[mi][r] = std::fabs(estimates[mi] - reference);
                mc_err[mi][r] = std::fabs(estimates[mi] - own_ref.value_pow);
            }
        });

        std::vector<double> xs(m_grid.begin(), m_grid.end());
        CurveResult abs_curve = make_curve(
            "mc_complexity_model" + std::to_string(model) + "_d" + std::to_string(d), xs,
            abs_err, task_seed(seed, 0xab50, di, 0));
        CurveResult mc_curve = make_curve(
            "mc_integration_model" + std::to_string(model) + "_d" + std::to_string(d), xs,
            mc_err, task_seed(seed, 0x3c00, di, 0));
        json dj{{"reference", reference},
                {"reference_std_error", ref_report.std_error},
                {"abs_error", curve_summary(abs_curve)},
                {"mc_error", curve_summary(mc_curve)}};
        if (m_grid.size() >= 3) {
            dj["abs_error_slope"] = slope_json(curve_slope(abs_curve));
            dj["mc_error_slope"] = slope_json(curve_slope(mc_curve));
        }
        summary["d" + std::to_string(d)] = std::move(dj);
        out.curves.push_back(std::move(abs_curve));
        out.curves.push_back(std::move(mc_curve));
    }
    out.manifest["summary"] = std::move(summary);
    return out;
}

// ---------------------------------------------------------------------------
// sample-complexity: absolute error against the population reference
// versus the per-run sample size, at fixed m.
// ---------------------------------------------------------------------------
ExperimentOutput run_sample_complexity(const json& config, std::uint64_t seed, int workers) {
    validate_keys(config, {"model", "d_grid", "m", "n_grid", "runs", "ref_n", "ref_m"},
                  "sample-complexity");
    const int model = config_value(config, "model", 1);
    const auto d_grid = config_grid(config, "d_grid", {10});
    const int m = config_value(config, "m", 100);
    const auto n_grid = config_grid(config, "n_grid", {250, 500, 1000, 2000, 4000});
    const int runs = config_value(config, "runs", 50);
    const int ref_n = config_value(config, "ref_n", 5000);
    const int ref_m = config_value(config, "ref_m", 2000);
    if (runs < 2) throw ParseError("sample-complexity: runs must be >= 2");

    json resolved{{"model", model}, {"d_grid", d_grid},   {"m", m},
                  {"n_grid", n_grid}, {"runs", runs},     {"ref_n", ref_n},
                  {"ref_m", ref_m}};
    ExperimentOutput out;
    out.manifest = base_manifest("sample-complexity", resolved, seed);
    json summary = json::object();

    for (std::size_t di = 0; di < d_grid.size(); ++di) {
        const int d = d_grid[di];
        auto [mu, nu] = experiment_model_pair(model, d, seed);
        Rng ref_rng_x(task_seed(seed, 0x4ef0, di, 0));
        Rng ref_rng_y(task_seed(seed, 0x4ef0, di, 1));
        const PointCloud ref_x = sample(mu, ref_n, ref_rng_x);
        const PointCloud ref_y = sample(nu, ref_n, ref_rng_y);
        const double reference =
            estimate_swp(ref_x, ref_y, 2.0, ref_m, task_seed(seed, 0x4ef0, di, 2), workers)
                .value_pow;

        std::vector<std::vector<double>> abs_err(n_grid.size(),
                                                 std::vector<double>(runs, 0.0));
        const std::size_t tasks = n_grid.size() * static_cast<std::size_t>(runs);
        parallel_for(tasks, workers, [&](std::size_t t) {
            const std::size_t ni = t / runs;
            const std::size_t r = t % runs;
            Rng rng_x(task_seed(seed, di * 1000 + ni, r, 0));
            Rng rng_y(task_seed(seed, di * 1000 + ni, r, 1));
            const PointCloud X = sample(mu, n_grid[ni], rng_x);
            const PointCloud Y = sample(nu, n_grid[ni], rng_y);
            const double est =
                estimate_swp(X, Y, 2.0, m, task_seed(seed, di * 1000 + ni, r, 2), 1).value_pow;
            abs_err[ni][r] = std::fabs(est - reference);
        });

        std::vector<double> xs(n_grid.begin(), n_grid.end());
        CurveResult curve = make_curve(
            "sample_complexity_model" + std::to_string(model) + "_d" + std::to_string(d), xs,
            abs_err, task_seed(seed, 0xab50, di, 0));
        json dj{{"reference", reference}, {"abs_error", curve_summary(curve)}};
        if (n_grid.size() >= 3) dj["abs_error_slope"] = slope_json(curve_slope(curve));
        summary["d" + std::to_string(d)] = std::move(dj);
        out.curves.push_back(std::move(curve));
    }
    out.manifest["summary"] = std::move(summary);
    return out;
}

// ---------------------------------------------------------------------------
// rates: one-sample empirical convergence E[SW_2^2(mu_hat_n, mu)] versus n
// for the standard Gaussian. The default path evaluates the
// per-direction distance against the exact N(0,1) projection law in
// closed form; "two-sample" slices against an independent 20n-point
// reference sample instead.
// ---------------------------------------------------------------------------
ExperimentOutput run_rates(const json& config, std::uint64_t seed, int workers) {
    validate_keys(config, {"d_grid", "n_grid", "m", "runs", "path"}, "rates");
    const auto d_grid = config_grid(config, "d_grid", {5});
    const auto n_grid = config_grid(config, "n_grid", {250, 1000, 4000, 8000});
    const int m = config_value(config, "m", 500);
    const int runs = config_value(config, "runs", 50);
    const std::string path =
        config_value<std::string>(config, "path", "gaussian-closed-form");
    if (path != "gaussian-closed-form" && path != "two-sample")
        throw ParseError("rates: path must be 'gaussian-closed-form' or 'two-sample'");
    if (runs < 2) throw ParseError("rates: runs must be >= 2");

    json resolved{
        {"d_grid", d_grid}, {"n_grid", n_grid}, {"m", m}, {"runs", runs}, {"path", path}};
    ExperimentOutput out;
    out.manifest = base_manifest("rates", resolved, seed);
    json summary = json::object();

    // pdf(Phi^{-1}(i/n)) grids are shared across directions and runs.
    std::vector<std::vector<double>> pdf_grids(n_grid.size());
    if (path == "gaussian-closed-form")
        for (std::size_t ni = 0; ni < n_grid.size(); ++ni)
            pdf_grids[ni] = normal_pdf_grid(static_cast<std::size_t>(n_grid[ni]));

    for (std::size_t di = 0; di < d_grid.size(); ++di) {
        const int d = d_grid[di];
        const ModelSpec mu = ModelSpec::gaussian_factor(Vector::Zero(d), Matrix::Identity(d, d));
        std::vector<std::vector<double>> values(n_grid.size(), std::vector<double>(runs, 0.0));
        const std::size_t tasks = n_grid.size() * static_cast<std::size_t>(runs);
        parallel_for(tasks, workers, [&](std::size_t t) {
            const std::size_t ni = t / runs;
            const std::size_t r = t % runs;
            const int n = n_grid[ni];
            Rng rng_x(task_seed(seed, di * 1000 + ni, r, 0));
            const PointCloud X = sample(mu, n, rng_x);
            if (path == "gaussian-closed-form") {
                std::vector<double> proj(X.size());
                double acc = 0.0;
                const std::uint64_t dir_seed = task_seed(seed, di * 1000 + ni, r, 2);
                for (int j = 0; j < m; ++j) {
                    Rng dir_rng = Rng::substream(dir_seed, j);
                    const Direction theta = sample_sphere(d, dir_rng);
                    Eigen::Map<Eigen::VectorXd>(proj.data(),
                                                static_cast<Eigen::Index>(proj.size())) =
                        X.points() * theta.coords();
                    std::sort(proj.begin(), proj.end());
                    acc += w2_sq_empirical_vs_std_normal(proj, pdf_grids[ni]);
                }
                values[ni][r] = acc / static_cast<double>(m);
            } else {
                Rng rng_ref(task_seed(seed, di * 1000 + ni, r, 1));
                const PointCloud ref = sample(mu, 20 * static_cast<std::size_t>(n), rng_ref);
                values[ni][r] =
                    estimate_swp(X, ref, 2.0, m, task_seed(seed, di * 1000 + ni, r, 2), 1)
                        .value_pow;
            }
        });
        std::vector<double> xs(n_grid.begin(), n_grid.end());
        CurveResult curve = make_curve("rates_gaussian_d" + std::to_string(d), xs, values,
                                       task_seed(seed, 0xab50, di, 0));
        json dj{{"mean_sw2_sq", curve_summary(curve)}};
        if (n_grid.size() >= 3) dj["slope"] = slope_json(curve_slope(curve));
        summary["d" + std::to_string(d)] = std::move(dj);
        out.curves.push_back(std::move(curve));
    }
    out.manifest["summary"] = std::move(summary);
    return out;
}

// ---------------------------------------------------------------------------
// msw-bench: subgradient method and LIPO on the fragmented hypercube,
// with the dense grid oracle as ground truth at d <= 3. Wall-clock
// timings go to stderr so file outputs stay byte-reproducible.
// ---------------------------------------------------------------------------
ExperimentOutput run_msw_bench(const json& config, std::uint64_t seed, int workers) {
    validate_keys(config,
                  {"d_grid", "n", "k_star", "T", "budget", "runs", "grid_resolution",
                   "grid_resolution_3d", "step_scale"},
                  "msw-bench");
    const auto d_grid = config_grid(config, "d_grid", {10, 20});
    const int n = config_value(config, "n", 500);
    const int k_star = config_value(config, "k_star", 10);
    const int T = config_value(config, "T", 2000);
    const int budget = config_value(config, "budget", 600);
    const int runs = config_value(config, "runs", 5);
    const int grid_resolution = config_value(config, "grid_resolution", 10000);
    const int grid_resolution_3d = config_value(config, "grid_resolution_3d", 300);
    const double step_scale = config_value(config, "step_scale", 0.0);
    if (runs < 2) throw ParseError("msw-bench: runs must be >= 2");

    json resolved{{"d_grid", d_grid},
                  {"n", n},
                  {"k_star", k_star},
                  {"T", T},
                  {"budget", budget},
                  {"runs", runs},
                  {"grid_resolution", grid_resolution},
                  {"grid_resolution_3d", grid_resolution_3d},
                  {"step_scale", step_scale}};
    ExperimentOutput out;
    out.manifest = base_manifest("msw-bench", resolved, seed);
    json summary = json::object();

    // Thin the iterate axis to at most 200 checkpoints.
    const int stride = std::max(1, (T + 1) / 200);
    std::vector<double> checkpoints;
    for (int t = 0; t <= T; t += stride) checkpoints.push_back(t);

    for (std::size_t di = 0; di < d_grid.size(); ++di) {
        const int d = d_grid[di];
        const int ks = std::min(k_star, d);
        std::vector<std::vector<double>> envelope_err(checkpoints.size(),
                                                      std::vector<double>(runs, 0.0));
        std::vector<double> subgrad_values(runs), sampled_values(runs), lipo_values(runs),
            grid_values(runs, 0.0), lipo_evals(runs), subgrad_secs(runs), lipo_secs(runs);

        parallel_for(static_cast<std::size_t>(runs), workers, [&](std::size_t r) {
            Rng rng(task_seed(seed, di, r, 0));
            auto [X, Y] = fragmented_hypercube(d, ks, n, rng);

            SubgradConfig cfg;
            cfg.iterations = static_cast<std::size_t>(T);
            cfg.step_scale = step_scale;
            cfg.init = SubgradConfig::Init::mean_gap;
            cfg.seed = task_seed(seed, di, r, 1);
            cfg.restarts = 0;
            const auto t0 = std::chrono::steady_clock::now();
            OptimizerTrace trace = subgrad_descent(X, Y, 2.0, cfg);
            const auto t1 = std::chrono::steady_clock::now();
            LipoResult lipo =
                lipo_maximize(X, Y, 2.0, static_cast<std::size_t>(budget),
                              task_seed(seed, di, r, 2));
            const auto t2 = std::chrono::steady_clock::now();
            subgrad_secs[r] = std::chrono::duration<double>(t1 - t0).count();
            lipo_secs[r] = std::chrono::duration<double>(t2 - t1).count();

            double best_known = std::max(trace.value_at_best, lipo.value);
            if (d <= 3) {
                GridResult grid = dense_grid_oracle(
                    X, Y, 2.0, d == 3 ? grid_resolution_3d : grid_resolution);
                grid_values[r] = grid.value;
                best_known = std::max(best_known, grid.value);
            }
            double envelope = 0.0;
            std::size_t ci = 0;
            for (int t = 0; t <= T; ++t) {
                envelope = std::max(envelope, trace.iterates[t].distance);
                if (t == static_cast<int>(checkpoints[ci])) {
                    envelope_err[ci][r] = best_known - envelope;
                    ++ci;
                    if (ci >= checkpoints.size()) break;
                }
            }
            subgrad_values[r] = trace.value_at_best;
            sampled_values[r] = trace.value_at_sampled;
            lipo_values[r] = lipo.value;
            lipo_evals[r] = static_cast<double>(lipo.state.values.size());
        });

        CurveResult err_curve =
            make_curve("msw_bench_subgrad_error_d" + std::to_string(d), checkpoints,
                       envelope_err, task_seed(seed, 0xab50, di, 0));
        json dj{{"subgrad_best_mean", mean_of(subgrad_values)},
                {"subgrad_sampled_mean", mean_of(sampled_values)},
                {"lipo_value_mean", mean_of(lipo_values)},
                {"lipo_evaluations_mean", mean_of(lipo_evals)}};
        if (d <= 3) dj["grid_value_mean"] = mean_of(grid_values);
        summary["d" + std::to_string(d)] = std::move(dj);
        out.curves.push_back(std::move(err_curve));
        std::cerr << "[msw-bench] d=" << d
                  << " mean optimizer seconds: subgradient=" << mean_of(subgrad_secs)
                  << " lipo=" << mean_of(lipo_secs) << "\n";
    }
    out.manifest["summary"] = std::move(summary);
    return out;
}

// ---------------------------------------------------------------------------
// robust: (left) contaminated Gaussian -> spectral filter -> resilience
// report against the clean subsample; (right) the atom-plus-ring model
// with null contamination, comparing the restricted W1 cost against the
// MSW1 lower bound, versus dimension.
// ---------------------------------------------------------------------------
ExperimentOutput run_robust_experiment(const json& config, std::uint64_t seed, int workers) {
    validate_keys(config,
                  {"panel", "d_grid", "epsilon", "sigma2", "threshold_mult", "runs",
                   "ascent_iters", "ascent_restarts", "noise_low", "noise_high", "subsample",
                   "n"},
                  "robust");
    const std::string panel = config_value<std::string>(config, "panel", "both");
    if (panel != "both" && panel != "left" && panel != "right")
        throw ParseError("robust: panel must be 'left', 'right', or 'both'");
    const auto d_grid = config_grid(config, "d_grid", {10, 20, 50});
    const double eps = config_value(config, "epsilon", 0.1);
    const double sigma2 = config_value(config, "sigma2", 1.0);
    const double threshold_mult = config_value(config, "threshold_mult", 9.0);
    const int runs = config_value(config, "runs", 3);
    const int ascent_iters = config_value(config, "ascent_iters", 300);
    const int ascent_restarts = config_value(config, "ascent_restarts", 2);
    const double noise_low = config_value(config, "noise_low", 0.0);
    const double noise_high = config_value(config, "noise_high", 6.0);
    const int subsample = config_value(config, "subsample", 800);
    const int n_override = config_value(config, "n", 0);
    if (!(eps > 0.0 && eps < 1.0 / 3.0)) throw ParseError("robust: epsilon must be in (0, 1/3)");
    if (runs < 2) throw ParseError("robust: runs must be >= 2");

    json resolved{{"panel", panel},
                  {"d_grid", d_grid},
                  {"epsilon", eps},
                  {"sigma2", sigma2},
                  {"threshold_mult", threshold_mult},
                  {"runs", runs},
                  {"ascent_iters", ascent_iters},
                  {"ascent_restarts", ascent_restarts},
                  {"noise_low", noise_low},
                  {"noise_high", noise_high},
                  {"subsample", subsample},
                  {"n", n_override}};
    ExperimentOutput out;
    out.manifest = base_manifest("robust", resolved, seed);
    json summary = json::object();

    auto sample_size = [&](int d) {
        return n_override > 0
                   ? static_cast<std::size_t>(n_override)
                   : static_cast<std::size_t>(std::llround(10.0 * d / (eps * eps)));
    };

    if (panel == "left" || panel == "both") {
        std::vector<std::vector<double>> gaps(d_grid.size(), std::vector<double>(runs, 0.0));
        std::vector<std::vector<double>> msw1(d_grid.size(), std::vector<double>(runs, 0.0));
        std::vector<std::vector<double>> ratios(d_grid.size(), std::vector<double>(runs, 0.0));
        const std::size_t tasks = d_grid.size() * static_cast<std::size_t>(runs);
        parallel_for(tasks, workers, [&](std::size_t t) {
            const std::size_t di = t / runs;
            const std::size_t r = t % runs;
            const int d = d_grid[di];
            const std::size_t n = sample_size(d);
            Rng rng(task_seed(seed, 0x1e57, di * 1000 + r, 0));
            const ModelSpec clean =
                ModelSpec::gaussian_factor(Vector::Zero(d), Matrix::Identity(d, d));
            const ModelSpec noise = ModelSpec::product_noise(d, noise_low, noise_high);
            ContaminatedSample cs = contaminate(clean, noise, eps, n, rng);
            FilterWeights fw = spectral_filter(cs.points, eps, sigma2, threshold_mult);
            PointCloud reference = cs.clean_subset();
            ResilienceReport rep =
                resilience_report(cs, fw, reference, ascent_iters,
                                  task_seed(seed, 0x1e57, di * 1000 + r, 1));
            gaps[di][r] = rep.mean_gap;
            msw1[di][r] = rep.msw1_lower;
            ratios[di][r] = rep.ratio;
        });
        std::vector<double> xs(d_grid.begin(), d_grid.end());
        CurveResult gap_curve =
            make_curve("robust_left_mean_gap", xs, gaps, task_seed(seed, 0xab50, 0, 0));
        CurveResult msw_curve =
            make_curve("robust_left_msw1", xs, msw1, task_seed(seed, 0xab50, 0, 1));
        CurveResult ratio_curve =
            make_curve("robust_left_ratio", xs, ratios, task_seed(seed, 0xab50, 0, 2));
        double max_ratio = 0.0;
        std::size_t violations = 0;
        for (std::size_t di = 0; di < d_grid.size(); ++di)
            for (int r = 0; r < runs; ++r) {
                max_ratio = std::max(max_ratio, ratios[di][r]);
                if (msw1[di][r] < gaps[di][r] - 1e-9) ++violations;
            }
        summary["left"] = json{{"mean_gap", curve_summary(gap_curve)},
                               {"msw1_lower", curve_summary(msw_curve)},
                               {"ratio", curve_summary(ratio_curve)},
                               {"max_ratio", max_ratio},
                               {"lower_bound_violations", violations}};
        out.curves.push_back(std::move(gap_curve));
        out.curves.push_back(std::move(msw_curve));
        out.curves.push_back(std::move(ratio_curve));
    }

    if (panel == "right" || panel == "both") {
        std::vector<std::vector<double>> w1_vals(d_grid.size(), std::vector<double>(runs, 0.0));
        std::vector<std::vector<double>> msw1(d_grid.size(), std::vector<double>(runs, 0.0));
        std::vector<std::vector<double>> ratios(d_grid.size(), std::vector<double>(runs, 0.0));
        // Large-d tasks hold several O(n d) clouds; keep them sequential
        // to bound peak memory. Results do not depend on this choice.
        for (std::size_t di = 0; di < d_grid.size(); ++di) {
            const int d = d_grid[di];
            const int local_workers = d >= 100 ? 1 : workers;
            parallel_for(static_cast<std::size_t>(runs), local_workers, [&](std::size_t r) {
                const std::size_t n = sample_size(d);
                Rng rng(task_seed(seed, 0x0197, di * 1000 + r, 0));
                ModelSpec ring = ModelSpec::point_ring(d, std::sqrt(d / eps));
                ring.mass_at_center = 1.0 - eps;
                // Null contamination: both halves drawn from the same law.
                ContaminatedSample cs = contaminate(ring, ring, eps, n, rng);
                FilterWeights fw = spectral_filter(cs.points, eps, sigma2, threshold_mult);
                PointCloud weighted(cs.points.points(), fw.weights);
                PointCloud reference = cs.clean_subset();
                Rng sub_rng(task_seed(seed, 0x0197, di * 1000 + r, 1));
                PointCloud sub_x = resample_cloud(weighted, subsample, sub_rng);
                PointCloud sub_y = resample_cloud(reference, subsample, sub_rng);
                const double w1 = restricted_w1(sub_x, sub_y, Vector::Zero(d));
                const double lower =
                    msw1_weighted_ascent(weighted, reference, ascent_iters, 0.0,
                                         task_seed(seed, 0x0197, di * 1000 + r, 2),
                                         ascent_restarts)
                        .value;
                w1_vals[di][r] = w1;
                msw1[di][r] = lower;
                ratios[di][r] = w1 / std::max(lower, 1e-300);
            });
        }
        std::vector<double> xs(d_grid.begin(), d_grid.end());
        CurveResult w1_curve =
            make_curve("robust_right_w1", xs, w1_vals, task_seed(seed, 0xab50, 1, 0));
        CurveResult msw_curve =
            make_curve("robust_right_msw1", xs, msw1, task_seed(seed, 0xab50, 1, 1));
        CurveResult ratio_curve =
            make_curve("robust_right_ratio", xs, ratios, task_seed(seed, 0xab50, 1, 2));
        json right{{"w1", curve_summary(w1_curve)},
                   {"msw1_lower", curve_summary(msw_curve)},
                   {"ratio", curve_summary(ratio_curve)}};
        if (d_grid.size() >= 3) right["ratio_slope"] = slope_json(curve_slope(ratio_curve));
        summary["right"] = std::move(right);
        out.curves.push_back(std::move(w1_curve));
        out.curves.push_back(std::move(msw_curve));
        out.curves.push_back(std::move(ratio_curve));
    }
    out.manifest["summary"] = std::move(summary);
    return out;
}

json run_experiment(const std::string& name, const json& config, const std::string& out_dir,
                    std::uint64_t seed, int workers) {
    ExperimentOutput result;
    if (name == "mc-complexity")
        result = run_mc_complexity(config, seed, workers);
    else if (name == "sample-complexity")
        result = run_sample_complexity(config, seed, workers);
    else if (name == "rates")
        result = run_rates(config, seed, workers);
    else if (name == "msw-bench")
        result = run_msw_bench(config, seed, workers);
    else if (name == "robust")
        result = run_robust_experiment(config, seed, workers);
    else
        throw InvalidArgument(
            "unknown experiment '" + name +
            "' (expected mc-complexity, sample-complexity, rates, msw-bench, or robust)");

    json files = json::array();
    for (const auto& curve : result.curves) {
        const std::string filename = curve.name + ".csv";
        write_text_file(out_dir + "/" + filename, curve.to_csv());
        files.push_back(filename);
    }
    result.manifest["files"] = std::move(files);
    write_text_file(out_dir + "/" + name + "_manifest.json", result.manifest.dump(2) + "\n");
    return result.manifest;
}

}  // namespace slicedot
