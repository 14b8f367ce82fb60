#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "slicedot/errors.hpp"
#include "slicedot/experiments.hpp"

using namespace slicedot;
using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& name)
        : path(std::filesystem::temp_directory_path() / name) {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("loglog slope fits") {
    std::vector<double> xs = {1.0, 2.0, 4.0, 8.0};
    std::vector<double> inv = {1.0, 0.5, 0.25, 0.125};
    SlopeFit fit = fit_loglog_slope(xs, inv);
    CHECK(fit.slope == doctest::Approx(-1.0));
    CHECK(fit.r2 == doctest::Approx(1.0));
    std::vector<double> sqrt_like;
    for (double x : xs) sqrt_like.push_back(3.0 * std::sqrt(x));
    CHECK(fit_loglog_slope(xs, sqrt_like).slope == doctest::Approx(0.5));
    std::vector<double> flat = {2.0, 2.0, 2.0, 2.0};
    CHECK(fit_loglog_slope(xs, flat).slope == doctest::Approx(0.0));
    std::vector<double> bad = {1.0, -1.0, 2.0, 1.0};
    CHECK_THROWS_AS(fit_loglog_slope(xs, bad), InvalidArgument);
    std::vector<double> two = {1.0, 2.0};
    CHECK_THROWS_AS(fit_loglog_slope(two, two), InvalidArgument);
}

TEST_CASE("unknown config keys are rejected with names") {
    try {
        run_rates(json{{"bogus_key", 1}, {"m", 10}}, 1, 1);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("bogus_key") != std::string::npos);
    }
}

TEST_CASE("rates experiment: bands bracket means and slope is emitted") {
    json config{{"d_grid", {2}}, {"n_grid", {50, 100, 200}}, {"m", 20}, {"runs", 8}};
    ExperimentOutput out = run_rates(config, 42, 2);
    REQUIRE(out.curves.size() == 1);
    for (const auto& p : out.curves[0].points) {
        CHECK(p.band_low <= p.mean);
        CHECK(p.mean <= p.band_high);
        CHECK(p.mean > 0.0);
    }
    CHECK(out.manifest["summary"]["d2"].contains("slope"));
    // Larger n gives a smaller mean distance.
    CHECK(out.curves[0].points.front().mean > out.curves[0].points.back().mean);
}

TEST_CASE("band widths shrink with more runs") {
    json small{{"d_grid", {2}}, {"n_grid", {60, 120, 240}}, {"m", 15}, {"runs", 8}};
    json large = small;
    large["runs"] = 40;
    ExperimentOutput a = run_rates(small, 7, 2);
    ExperimentOutput b = run_rates(large, 7, 2);
    double width_small = 0.0, width_large = 0.0;
    for (std::size_t i = 0; i < a.curves[0].points.size(); ++i) {
        width_small += a.curves[0].points[i].band_high - a.curves[0].points[i].band_low;
        width_large += b.curves[0].points[i].band_high - b.curves[0].points[i].band_low;
    }
    CHECK(width_large < width_small);
}

TEST_CASE("experiments are deterministic and worker independent") {
    json config{{"model", 2}, {"d_grid", {3}},      {"n", 200},
                {"m_grid", {5, 20, 60}}, {"runs", 6}, {"ref_n", 300},
                {"ref_m", 80}};
    ExperimentOutput a = run_mc_complexity(config, 9, 1);
    ExperimentOutput b = run_mc_complexity(config, 9, 4);
    CHECK(a.manifest.dump() == b.manifest.dump());
    REQUIRE(a.curves.size() == b.curves.size());
    for (std::size_t c = 0; c < a.curves.size(); ++c)
        CHECK(a.curves[c].to_csv() == b.curves[c].to_csv());
}

TEST_CASE("population reference is stable across seeds") {
    json config{{"model", 2}, {"d_grid", {5}},       {"n", 200},
                {"m_grid", {5, 10, 20}}, {"runs", 2}, {"ref_n", 2000},
                {"ref_m", 100}};
    ExperimentOutput a = run_mc_complexity(config, 100, 2);
    ExperimentOutput b = run_mc_complexity(config, 200, 2);
    const double ref_a = a.manifest["summary"]["d5"]["reference"].get<double>();
    const double ref_b = b.manifest["summary"]["d5"]["reference"].get<double>();
    const double se_a = a.manifest["summary"]["d5"]["reference_std_error"].get<double>();
    const double se_b = b.manifest["summary"]["d5"]["reference_std_error"].get<double>();
    CHECK(std::fabs(ref_a - ref_b) <= 3.0 * (se_a + se_b));
}

TEST_CASE("sample complexity error shrinks with n") {
    json config{{"model", 2}, {"d_grid", {3}},  {"m", 40},
                {"n_grid", {30, 100, 300, 1000}}, {"runs", 12}, {"ref_n", 4000},
                {"ref_m", 300}};
    ExperimentOutput out = run_sample_complexity(config, 5, 2);
    REQUIRE(out.curves.size() == 1);
    const auto& pts = out.curves[0].points;
    CHECK(pts.front().mean > pts.back().mean);
}

TEST_CASE("msw bench smoke") {
    json config{{"d_grid", {2}}, {"n", 60},   {"k_star", 10},        {"T", 50},
                {"budget", 30},  {"runs", 2}, {"grid_resolution", 400}};
    ExperimentOutput out = run_msw_bench(config, 3, 2);
    REQUIRE(out.curves.size() == 1);
    for (const auto& p : out.curves[0].points) CHECK(p.mean >= -1e-12);
    const auto& summary = out.manifest["summary"]["d2"];
    CHECK(summary["grid_value_mean"].get<double>() > 0.0);
    // The oracle dominates both optimizers up to grid slack.
    CHECK(summary["subgrad_best_mean"].get<double>() <=
          summary["grid_value_mean"].get<double>() * 1.05 + 0.05);
}

TEST_CASE("robust experiment smoke") {
    json config{{"d_grid", {4, 8}}, {"runs", 2},       {"n", 500},
                {"ascent_iters", 60}, {"subsample", 200}, {"ascent_restarts", 1}};
    ExperimentOutput out = run_robust_experiment(config, 11, 2);
    // Both panels: three curves each.
    REQUIRE(out.curves.size() == 6);
    const auto& left = out.manifest["summary"]["left"];
    CHECK(left["lower_bound_violations"].get<int>() == 0);
    for (const auto& curve : out.curves)
        for (const auto& p : curve.points) CHECK(std::isfinite(p.mean));
}

TEST_CASE("run_experiment writes reproducible files") {
    TempDir dir_a("slicedot_test_exp_a");
    TempDir dir_b("slicedot_test_exp_b");
    json config{{"d_grid", {2}}, {"n_grid", {40, 80, 160}}, {"m", 10}, {"runs", 4}};
    json manifest_a = run_experiment("rates", config, dir_a.path.string(), 21, 1);
    json manifest_b = run_experiment("rates", config, dir_b.path.string(), 21, 4);
    CHECK(manifest_a.contains("content_hash"));
    CHECK(manifest_a["files"].size() == 1);
    const std::string csv_a = read_file(dir_a.path / "rates_gaussian_d2.csv");
    const std::string csv_b = read_file(dir_b.path / "rates_gaussian_d2.csv");
    CHECK(csv_a == csv_b);
    CHECK(csv_a.rfind("x,mean,band_low,band_high\n", 0) == 0);
    const std::string man_a = read_file(dir_a.path / "rates_manifest.json");
    const std::string man_b = read_file(dir_b.path / "rates_manifest.json");
    CHECK(man_a == man_b);
    CHECK_THROWS_AS(run_experiment("nope", config, dir_a.path.string(), 1, 1),
                    InvalidArgument);
}
