#include "slicedot/slicedot.h"

#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "slicedot/errors.hpp"
#include "slicedot/experiments.hpp"
#include "slicedot/io.hpp"
#include "slicedot/max_sliced.hpp"
#include "slicedot/robust.hpp"
#include "slicedot/sliced.hpp"

using nlohmann::json;

struct sot_cloud {
    slicedot::PointCloud cloud;
};

struct sot_result {
    json document;
    std::string text;
};

namespace {

thread_local std::string g_last_error = "no error";

sot_status fail(sot_status status, const std::string& message) {
    g_last_error = message;
    return status;
}

template <class Fn>
sot_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const slicedot::ParseError& e) {
        return fail(SOT_ERR_PARSE, e.what());
    } catch (const slicedot::IoError& e) {
        return fail(SOT_ERR_IO, e.what());
    } catch (const slicedot::NumericError& e) {
        return fail(SOT_ERR_NUMERIC, e.what());
    } catch (const slicedot::InvalidArgument& e) {
        return fail(SOT_ERR_INVALID_ARGUMENT, e.what());
    } catch (const json::exception& e) {
        return fail(SOT_ERR_PARSE, e.what());
    } catch (const std::exception& e) {
        return fail(SOT_ERR_INTERNAL, e.what());
    }
}

sot_result* make_result(json document) {
    auto* result = new sot_result;
    result->document = std::move(document);
    result->text = result->document.dump(2) + "\n";
    return result;
}

}  // namespace

const char* sot_version(void) { return "0.1.0"; }

const char* sot_status_name(sot_status status) {
    switch (status) {
        case SOT_OK: return "ok";
        case SOT_ERR_INVALID_ARGUMENT: return "invalid-argument";
        case SOT_ERR_PARSE: return "parse-error";
        case SOT_ERR_IO: return "io-error";
        case SOT_ERR_NUMERIC: return "numeric-error";
        case SOT_ERR_INTERNAL: return "internal-error";
    }
    return "unknown";
}

const char* sot_last_error(void) { return g_last_error.c_str(); }

sot_status sot_cloud_create(const double* data, int64_t n, int64_t d, const double* weights,
                            sot_cloud** out) {
    if (!data || !out) return fail(SOT_ERR_INVALID_ARGUMENT, "null pointer argument");
    return guarded([&] {
        if (n < 1 || d < 1)
            throw slicedot::InvalidArgument("cloud_create: n and d must be >= 1");
        slicedot::Matrix points(n, d);
        for (int64_t r = 0; r < n; ++r)
            for (int64_t c = 0; c < d; ++c)
                points(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    data[r * d + c];
        std::vector<double> w;
        if (weights) w.assign(weights, weights + n);
        *out = new sot_cloud{slicedot::PointCloud(std::move(points), std::move(w))};
        return SOT_OK;
    });
}

sot_status sot_cloud_load_csv(const char* path, int has_weight_column, sot_cloud** out) {
    if (!path || !out) return fail(SOT_ERR_INVALID_ARGUMENT, "null pointer argument");
    return guarded([&] {
        *out = new sot_cloud{slicedot::read_cloud_csv(path, has_weight_column != 0)};
        return SOT_OK;
    });
}

int64_t sot_cloud_size(const sot_cloud* cloud) {
    return cloud ? static_cast<int64_t>(cloud->cloud.size()) : 0;
}

int64_t sot_cloud_dim(const sot_cloud* cloud) {
    return cloud ? static_cast<int64_t>(cloud->cloud.dim()) : 0;
}

void sot_cloud_free(sot_cloud* cloud) { delete cloud; }

const char* sot_result_json(const sot_result* result) {
    return result ? result->text.c_str() : "";
}

sot_status sot_result_number(const sot_result* result, const char* json_pointer, double* out) {
    if (!result || !json_pointer || !out)
        return fail(SOT_ERR_INVALID_ARGUMENT, "null pointer argument");
    return guarded([&] {
        const json& value = result->document.at(json::json_pointer(json_pointer));
        if (!value.is_number())
            throw slicedot::InvalidArgument(std::string("not a number at '") + json_pointer +
                                            "'");
        *out = value.get<double>();
        return SOT_OK;
    });
}

void sot_result_free(sot_result* result) { delete result; }

sot_status sot_sliced_wasserstein(const sot_cloud* x, const sot_cloud* y, double p,
                                  int64_t num_projections, uint64_t seed, int workers,
                                  const char* projections_csv_path, sot_result** out) {
    if (!x || !y || !out) return fail(SOT_ERR_INVALID_ARGUMENT, "null pointer argument");
    return guarded([&] {
        if (num_projections < 1)
            throw slicedot::InvalidArgument("sliced_wasserstein: m must be >= 1");
        slicedot::EstimateReport report = slicedot::estimate_swp(
            x->cloud, y->cloud, p, static_cast<std::size_t>(num_projections), seed, workers);
        if (projections_csv_path) {
            std::ostringstream csv;
            report.write_projection_csv(csv);
            slicedot::write_text_file(projections_csv_path, csv.str());
        }
        *out = make_result(report.to_json());
        return SOT_OK;
    });
}

sot_status sot_max_sliced(const sot_cloud* x, const sot_cloud* y, double p,
                          sot_msw_method method, int64_t budget_or_iterations,
                          double step_scale, uint64_t seed, const char* trace_csv_path,
                          sot_result** out) {
    if (!x || !y || !out) return fail(SOT_ERR_INVALID_ARGUMENT, "null pointer argument");
    return guarded([&] {
        if (budget_or_iterations < 1)
            throw slicedot::InvalidArgument("max_sliced: budget/iterations must be >= 1");
        json document;
        switch (method) {
            case SOT_MSW_SUBGRADIENT: {
                slicedot::SubgradConfig cfg;
                cfg.iterations = static_cast<std::size_t>(budget_or_iterations);
                cfg.step_scale = step_scale;
                cfg.seed = seed;
                slicedot::OptimizerTrace trace =
                    slicedot::subgrad_descent(x->cloud, y->cloud, p, cfg);
                if (trace_csv_path) {
                    std::ostringstream csv;
                    trace.write_csv(csv);
                    slicedot::write_text_file(trace_csv_path, csv.str());
                }
                document = trace.to_json();
                document["method"] = "subgrad";
                break;
            }
            case SOT_MSW_LIPO: {
                slicedot::LipoResult lipo = slicedot::lipo_maximize(
                    x->cloud, y->cloud, p, static_cast<std::size_t>(budget_or_iterations), seed);
                json theta = json::array();
                for (Eigen::Index i = 0; i < lipo.best.coords().size(); ++i)
                    theta.push_back(lipo.best.coords()[i]);
                document = json{{"method", "lipo"},
                                {"value", lipo.value},
                                {"theta", std::move(theta)},
                                {"evaluations", lipo.state.values.size()},
                                {"proposals_tried", lipo.state.proposals_tried},
                                {"lipschitz_bound", lipo.state.lipschitz_bound}};
                break;
            }
            case SOT_MSW_GRID: {
                slicedot::GridResult grid = slicedot::dense_grid_oracle(
                    x->cloud, y->cloud, p, static_cast<int>(budget_or_iterations));
                json theta = json::array();
                for (Eigen::Index i = 0; i < grid.best.coords().size(); ++i)
                    theta.push_back(grid.best.coords()[i]);
                document = json{{"method", "grid"},
                                {"value", grid.value},
                                {"theta", std::move(theta)}};
                break;
            }
            default:
                throw slicedot::InvalidArgument("max_sliced: unknown method");
        }
        document["p"] = p;
        document["seed"] = seed;
        *out = make_result(std::move(document));
        return SOT_OK;
    });
}

sot_status sot_robust_filter(const sot_cloud* cloud, double epsilon, double sigma2,
                             double threshold_mult, const char* weights_csv_path,
                             sot_result** out) {
    if (!cloud || !out) return fail(SOT_ERR_INVALID_ARGUMENT, "null pointer argument");
    return guarded([&] {
        slicedot::FilterWeights fw =
            slicedot::spectral_filter(cloud->cloud, epsilon, sigma2, threshold_mult);
        if (weights_csv_path) {
            std::ostringstream csv;
            fw.write_csv(csv);
            slicedot::write_text_file(weights_csv_path, csv.str());
        }
        *out = make_result(fw.to_json());
        return SOT_OK;
    });
}

sot_status sot_experiment(const char* name, const char* config_json, const char* out_dir,
                          uint64_t seed, int workers, sot_result** out) {
    if (!name || !out_dir || !out) return fail(SOT_ERR_INVALID_ARGUMENT, "null pointer argument");
    return guarded([&] {
        json config;
        if (config_json && std::strlen(config_json) > 0) {
            config = json::parse(config_json, nullptr, false);
            if (config.is_discarded())
                throw slicedot::ParseError("experiment config is not valid JSON");
        }
        json manifest = slicedot::run_experiment(name, config, out_dir, seed, workers);
        *out = make_result(std::move(manifest));
        return SOT_OK;
    });
}
