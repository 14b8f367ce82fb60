// slicedot command-line harness. All computation goes through the C API
// of the shared library; this file only parses flags, moves bytes, and
// maps status codes to exit codes (0 ok, 2 usage/validation, 3 numeric).

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "slicedot/slicedot.h"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

int exit_code_for(sot_status status) {
    switch (status) {
        case SOT_OK: return 0;
        case SOT_ERR_INVALID_ARGUMENT:
        case SOT_ERR_PARSE:
        case SOT_ERR_IO: return kExitUsage;
        case SOT_ERR_NUMERIC:
        case SOT_ERR_INTERNAL: return kExitNumeric;
    }
    return kExitNumeric;
}

int report_failure(sot_status status) {
    std::cerr << "error (" << sot_status_name(status) << "): " << sot_last_error() << "\n";
    return exit_code_for(status);
}

struct CloudHandle {
    sot_cloud* ptr = nullptr;
    ~CloudHandle() { sot_cloud_free(ptr); }
};

struct ResultHandle {
    sot_result* ptr = nullptr;
    ~ResultHandle() { sot_result_free(ptr); }
};

bool write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    out << content;
    return static_cast<bool>(out);
}

int emit_result(const ResultHandle& result, const std::string& out_dir,
                const std::string& report_name) {
    const std::string text = sot_result_json(result.ptr);
    if (!out_dir.empty()) {
        if (!write_file(out_dir + "/" + report_name, text)) {
            std::cerr << "error: cannot write report under '" << out_dir << "'\n";
            return kExitUsage;
        }
    }
    std::fputs(text.c_str(), stdout);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sliced and max-sliced Wasserstein distances, robust filtering, and "
                 "experiment reproduction"};
    app.require_subcommand(1);

    // Shared option storage.
    std::string file_x, file_y, out_dir, config_path, method = "subgrad", experiment_name;
    double p = 2.0, eps = 0.1, sigma2 = 1.0;
    std::int64_t m = 1000, iterations = 1000, budget = 500;
    std::uint64_t seed = 0;
    int workers = 1;
    bool weighted = false, force = false;
    int model_override = 0, d_override = 0;
    std::int64_t n_override = 0;

    auto add_workers = [&](CLI::App* cmd) {
        cmd->add_option("--workers", workers, "worker thread count")
            ->envname("SLICED_OT_WORKERS")
            ->check(CLI::PositiveNumber);
    };

    CLI::App* sw = app.add_subcommand("sw", "Monte Carlo sliced Wasserstein distance");
    sw->add_option("x", file_x, "first point-cloud CSV")->required();
    sw->add_option("y", file_y, "second point-cloud CSV")->required();
    sw->add_option("--p", p, "order of the distance (>= 1)");
    sw->add_option("--m", m, "number of Monte Carlo projections");
    sw->add_option("--seed", seed, "random seed")->required();
    sw->add_flag("--weighted", weighted, "inputs carry a trailing weight column");
    sw->add_option("--out", out_dir, "directory for report JSON and projection CSV");
    add_workers(sw);

    CLI::App* msw = app.add_subcommand("msw", "max-sliced Wasserstein distance");
    msw->add_option("x", file_x, "first point-cloud CSV")->required();
    msw->add_option("y", file_y, "second point-cloud CSV")->required();
    msw->add_option("--p", p, "order of the distance (>= 1)");
    msw->add_option("--method", method, "subgrad, lipo, or grid")
        ->check(CLI::IsMember({"subgrad", "lipo", "grid"}));
    msw->add_option("--T", iterations, "subgradient iteration count");
    msw->add_option("--budget", budget, "LIPO evaluation budget / grid resolution");
    msw->add_option("--seed", seed, "random seed")->required();
    msw->add_flag("--weighted", weighted, "inputs carry a trailing weight column");
    msw->add_option("--out", out_dir, "directory for report JSON and trace CSV");

    CLI::App* robust = app.add_subcommand("robust", "spectral outlier filtering");
    robust->add_option("input", file_x, "point-cloud CSV")->required();
    robust->add_option("--eps", eps, "contamination fraction");
    robust->add_option("--sigma2", sigma2, "clean covariance operator-norm bound");
    robust->add_option("--seed", seed, "random seed (unused; filtering is deterministic)");
    robust->add_flag("--force", force, "allow eps outside (0, 1/12]");
    robust->add_flag("--weighted", weighted, "input carries a trailing weight column");
    robust->add_option("--out", out_dir, "directory for report JSON and weights CSV");

    CLI::App* experiment = app.add_subcommand("experiment", "run a scripted experiment");
    experiment->add_option("name", experiment_name,
                           "mc-complexity, sample-complexity, rates, msw-bench, or robust")
        ->required();
    experiment->add_option("config", config_path, "JSON config path (optional)");
    experiment->add_option("--seed", seed, "random seed")->required();
    experiment->add_option("--out", out_dir, "output directory (default .)");
    experiment->add_option("--model", model_override, "override config model (1, 2, or 3)");
    experiment->add_option("--d", d_override, "override config d_grid with a single dimension");
    experiment->add_option("--n", n_override, "override config sample size");
    add_workers(experiment);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    }

    if (sw->parsed() || msw->parsed()) {
        CloudHandle x, y;
        sot_status status = sot_cloud_load_csv(file_x.c_str(), weighted ? 1 : 0, &x.ptr);
        if (status != SOT_OK) return report_failure(status);
        status = sot_cloud_load_csv(file_y.c_str(), weighted ? 1 : 0, &y.ptr);
        if (status != SOT_OK) return report_failure(status);

        ResultHandle result;
        if (sw->parsed()) {
            const std::string proj_path =
                out_dir.empty() ? std::string() : out_dir + "/sw_projections.csv";
            status = sot_sliced_wasserstein(x.ptr, y.ptr, p, m, seed, workers,
                                            proj_path.empty() ? nullptr : proj_path.c_str(),
                                            &result.ptr);
            if (status != SOT_OK) return report_failure(status);
            return emit_result(result, out_dir, "sw_report.json");
        }
        sot_msw_method msw_method = SOT_MSW_SUBGRADIENT;
        std::int64_t effort = iterations;
        if (method == "lipo") {
            msw_method = SOT_MSW_LIPO;
            effort = budget;
        } else if (method == "grid") {
            msw_method = SOT_MSW_GRID;
            effort = budget;
        }
        const std::string trace_path =
            (out_dir.empty() || msw_method != SOT_MSW_SUBGRADIENT)
                ? std::string()
                : out_dir + "/msw_trace.csv";
        status = sot_max_sliced(x.ptr, y.ptr, p, msw_method, effort, 0.0, seed,
                                trace_path.empty() ? nullptr : trace_path.c_str(), &result.ptr);
        if (status != SOT_OK) return report_failure(status);
        return emit_result(result, out_dir, "msw_report.json");
    }

    if (robust->parsed()) {
        if (!force && !(eps > 0.0 && eps <= 1.0 / 12.0)) {
            std::cerr << "error: --eps must lie in (0, 1/12]; pass --force to override\n";
            return kExitUsage;
        }
        CloudHandle cloud;
        sot_status status = sot_cloud_load_csv(file_x.c_str(), weighted ? 1 : 0, &cloud.ptr);
        if (status != SOT_OK) return report_failure(status);
        ResultHandle result;
        const std::string weights_path =
            out_dir.empty() ? std::string() : out_dir + "/robust_weights.csv";
        status = sot_robust_filter(cloud.ptr, eps, sigma2, 9.0,
                                   weights_path.empty() ? nullptr : weights_path.c_str(),
                                   &result.ptr);
        if (status != SOT_OK) return report_failure(status);
        return emit_result(result, out_dir, "robust_report.json");
    }

    // experiment
    std::string config_text;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "error: cannot open config '" << config_path << "'\n";
            return kExitUsage;
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        config_text = ss.str();
    }
    if (model_override != 0 || d_override != 0 || n_override != 0) {
        nlohmann::json config = config_text.empty()
                                    ? nlohmann::json::object()
                                    : nlohmann::json::parse(config_text, nullptr, false);
        if (config.is_discarded()) {
            std::cerr << "error: config '" << config_path << "' is not valid JSON\n";
            return kExitUsage;
        }
        if (model_override != 0) config["model"] = model_override;
        if (d_override != 0) config["d_grid"] = {d_override};
        if (n_override != 0) config["n"] = n_override;
        config_text = config.dump();
    }
    ResultHandle result;
    const std::string dir = out_dir.empty() ? "." : out_dir;
    sot_status status = sot_experiment(experiment_name.c_str(),
                                       config_text.empty() ? nullptr : config_text.c_str(),
                                       dir.c_str(), seed, workers, &result.ptr);
    if (status != SOT_OK) return report_failure(status);
    std::fputs(sot_result_json(result.ptr), stdout);
    return 0;
}
