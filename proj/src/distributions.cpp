#include "slicedot/distributions.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <nlohmann/json.hpp>

#include "slicedot/errors.hpp"

namespace slicedot {

using nlohmann::json;

namespace {

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw ParseError("expected a non-empty array of rows");
    const std::size_t rows = j.size();
    const std::size_t cols = j[0].size();
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (j[r].size() != cols) throw ParseError("ragged matrix rows");
        for (std::size_t c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    }
    return m;
}

json vector_to_json(const Vector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Vector vector_from_json(const json& j) {
    Vector v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    return v;
}

double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

void sample_gaussian_rows(const GaussianComponent& g, Matrix& out, std::size_t row_begin,
                          std::size_t row_end, Rng& rng) {
    const Eigen::Index k = g.factor.cols();
    Vector z(k);
    for (std::size_t r = row_begin; r < row_end; ++r) {
        for (Eigen::Index i = 0; i < k; ++i) z[i] = rng.normal();
        out.row(static_cast<Eigen::Index>(r)) = (g.mean + g.factor * z).transpose();
    }
}

}  // namespace

ModelSpec ModelSpec::gaussian(Vector mean, const Matrix& covariance) {
    if (covariance.rows() != covariance.cols() || covariance.rows() != mean.size())
        throw InvalidArgument("gaussian: covariance/mean shape mismatch");
    Eigen::LLT<Matrix> llt(covariance);
    if (llt.info() != Eigen::Success)
        throw InvalidArgument("gaussian: covariance is not positive semidefinite");
    return gaussian_factor(std::move(mean), llt.matrixL());
}

ModelSpec ModelSpec::gaussian_factor(Vector mean, Matrix factor) {
    if (factor.rows() != mean.size()) throw InvalidArgument("gaussian: factor rows != dim");
    ModelSpec spec;
    spec.kind = Kind::gaussian;
    spec.dim = static_cast<int>(mean.size());
    spec.components.push_back({std::move(mean), std::move(factor)});
    return spec;
}

ModelSpec ModelSpec::gaussian_mixture(std::vector<double> weights,
                                      std::vector<GaussianComponent> components) {
    if (weights.size() != components.size() || components.empty())
        throw InvalidArgument("gaussian_mixture: weights/components mismatch");
    double sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw InvalidArgument("gaussian_mixture: negative weight");
        sum += w;
    }
    if (std::fabs(sum - 1.0) > 1e-9)
        throw InvalidArgument("gaussian_mixture: weights must sum to 1");
    const Eigen::Index d = components.front().mean.size();
    for (const auto& c : components) {
        if (c.mean.size() != d || c.factor.rows() != d)
            throw InvalidArgument("gaussian_mixture: component dimension mismatch");
    }
    ModelSpec spec;
    spec.kind = Kind::gaussian_mixture;
    spec.dim = static_cast<int>(d);
    spec.mixture_weights = std::move(weights);
    spec.components = std::move(components);
    return spec;
}

ModelSpec ModelSpec::uniform_cube(int d, double low, double high) {
    if (d < 1) throw InvalidArgument("uniform_cube: d must be >= 1");
    if (!(low < high)) throw InvalidArgument("uniform_cube: low must be < high");
    ModelSpec spec;
    spec.kind = Kind::uniform_cube;
    spec.dim = d;
    spec.low = low;
    spec.high = high;
    return spec;
}

ModelSpec ModelSpec::fragmented_hypercube_spec(int d, int k_star) {
    if (d < 2) throw InvalidArgument("fragmented_hypercube: d must be >= 2");
    if (k_star < 1 || k_star > d)
        throw InvalidArgument("fragmented_hypercube: k_star must be in [1, d]");
    ModelSpec spec;
    spec.kind = Kind::fragmented_hypercube;
    spec.dim = d;
    spec.k_star = k_star;
    return spec;
}

ModelSpec ModelSpec::point_ring(int d, double radius, double mass_at_center) {
    if (d < 1) throw InvalidArgument("point_ring: d must be >= 1");
    if (!(radius > 0.0)) throw InvalidArgument("point_ring: radius must be positive");
    if (!(mass_at_center >= 0.0 && mass_at_center < 1.0))
        throw InvalidArgument("point_ring: mass_at_center must be in [0, 1)");
    ModelSpec spec;
    spec.kind = Kind::point_ring;
    spec.dim = d;
    spec.radius = radius;
    spec.mass_at_center = mass_at_center;
    return spec;
}

ModelSpec ModelSpec::point_mass(Vector center) {
    if (center.size() < 1) throw InvalidArgument("point_mass: empty center");
    ModelSpec spec;
    spec.kind = Kind::point_mass;
    spec.dim = static_cast<int>(center.size());
    spec.center = std::move(center);
    return spec;
}

ModelSpec ModelSpec::product_noise(int d, double low, double high) {
    if (d < 1) throw InvalidArgument("product_noise: d must be >= 1");
    ModelSpec spec;
    spec.kind = Kind::product_noise;
    spec.dim = d;
    spec.low = low;
    spec.high = high;
    return spec;
}

std::string ModelSpec::kind_name(Kind k) {
    switch (k) {
        case Kind::gaussian: return "gaussian";
        case Kind::gaussian_mixture: return "gaussian-mixture";
        case Kind::uniform_cube: return "uniform-cube";
        case Kind::fragmented_hypercube: return "fragmented-hypercube";
        case Kind::point_ring: return "point-ring";
        case Kind::point_mass: return "point-mass";
        case Kind::product_noise: return "product-noise";
    }
    throw InvalidArgument("unknown model kind");
}

ModelSpec::Kind ModelSpec::kind_from_name(const std::string& name) {
    if (name == "gaussian") return Kind::gaussian;
    if (name == "gaussian-mixture") return Kind::gaussian_mixture;
    if (name == "uniform-cube") return Kind::uniform_cube;
    if (name == "fragmented-hypercube") return Kind::fragmented_hypercube;
    if (name == "point-ring") return Kind::point_ring;
    if (name == "point-mass") return Kind::point_mass;
    if (name == "product-noise") return Kind::product_noise;
    throw ParseError("unknown model kind '" + name + "'");
}

json ModelSpec::to_json() const {
    json params;
    switch (kind) {
        case Kind::gaussian:
            params["mean"] = vector_to_json(components[0].mean);
            params["cov_factor"] = matrix_to_json(components[0].factor);
            break;
        case Kind::gaussian_mixture: {
            params["weights"] = mixture_weights;
            json comps = json::array();
            for (const auto& c : components) {
                comps.push_back({{"mean", vector_to_json(c.mean)},
                                 {"cov_factor", matrix_to_json(c.factor)}});
            }
            params["components"] = std::move(comps);
            break;
        }
        case Kind::uniform_cube:
        case Kind::product_noise:
            params["low"] = low;
            params["high"] = high;
            break;
        case Kind::fragmented_hypercube:
            params["k_star"] = k_star;
            break;
        case Kind::point_ring:
            params["radius"] = radius;
            params["mass_at_center"] = mass_at_center;
            break;
        case Kind::point_mass:
            params["center"] = vector_to_json(center);
            break;
    }
    return json{{"kind", kind_name(kind)}, {"d", dim}, {"parameters", std::move(params)}};
}

ModelSpec ModelSpec::from_json(const json& j) {
    if (!j.is_object()) throw ParseError("model spec: expected an object");
    if (!j.contains("kind")) throw ParseError("model spec: missing 'kind'");
    if (!j.contains("d")) throw ParseError("model spec: missing 'd'");
    const Kind kind = kind_from_name(j.at("kind").get<std::string>());
    const int d = j.at("d").get<int>();
    const json params = j.value("parameters", json::object());
    try {
        switch (kind) {
            case Kind::gaussian: {
                Vector mean = params.contains("mean") ? vector_from_json(params.at("mean"))
                                                      : Vector::Zero(d).eval();
                if (params.contains("cov_factor"))
                    return gaussian_factor(std::move(mean),
                                           matrix_from_json(params.at("cov_factor")));
                if (params.contains("covariance"))
                    return gaussian(std::move(mean), matrix_from_json(params.at("covariance")));
                return gaussian_factor(std::move(mean), Matrix::Identity(d, d));
            }
            case Kind::gaussian_mixture: {
                std::vector<GaussianComponent> comps;
                for (const auto& c : params.at("components")) {
                    comps.push_back({vector_from_json(c.at("mean")),
                                     matrix_from_json(c.at("cov_factor"))});
                }
                return gaussian_mixture(params.at("weights").get<std::vector<double>>(),
                                        std::move(comps));
            }
            case Kind::uniform_cube:
                return uniform_cube(d, params.value("low", -1.0), params.value("high", 1.0));
            case Kind::fragmented_hypercube:
                return fragmented_hypercube_spec(d, params.value("k_star", std::min(10, d)));
            case Kind::point_ring:
                return point_ring(d, params.at("radius").get<double>(),
                                  params.value("mass_at_center", 0.0));
            case Kind::point_mass: {
                Vector c = params.contains("center") ? vector_from_json(params.at("center"))
                                                     : Vector::Zero(d).eval();
                return point_mass(std::move(c));
            }
            case Kind::product_noise:
                return product_noise(d, params.value("low", 0.0), params.value("high", 6.0));
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("model spec: ") + e.what());
    }
    throw ParseError("model spec: unhandled kind");
}

PointCloud sample(const ModelSpec& spec, std::size_t n, Rng& rng) {
    if (n < 1) throw InvalidArgument("sample: n must be >= 1");
    const Eigen::Index d = spec.dim;
    Matrix out(n, d);
    switch (spec.kind) {
        case ModelSpec::Kind::gaussian:
            sample_gaussian_rows(spec.components[0], out, 0, n, rng);
            break;
        case ModelSpec::Kind::gaussian_mixture: {
            for (std::size_t r = 0; r < n; ++r) {
                double u = rng.uniform01();
                std::size_t pick = spec.components.size() - 1;
                double acc = 0.0;
                for (std::size_t c = 0; c < spec.mixture_weights.size(); ++c) {
                    acc += spec.mixture_weights[c];
                    if (u < acc) {
                        pick = c;
                        break;
                    }
                }
                sample_gaussian_rows(spec.components[pick], out, r, r + 1, rng);
            }
            break;
        }
        case ModelSpec::Kind::uniform_cube:
            for (std::size_t r = 0; r < n; ++r)
                for (Eigen::Index c = 0; c < d; ++c)
                    out(static_cast<Eigen::Index>(r), c) = rng.uniform(spec.low, spec.high);
            break;
        case ModelSpec::Kind::fragmented_hypercube:
            for (std::size_t r = 0; r < n; ++r) {
                for (Eigen::Index c = 0; c < d; ++c) {
                    double x = rng.uniform(-1.0, 1.0);
                    if (c < spec.k_star) x += sign_of(x);
                    out(static_cast<Eigen::Index>(r), c) = x;
                }
            }
            break;
        case ModelSpec::Kind::point_ring:
            for (std::size_t r = 0; r < n; ++r) {
                if (spec.mass_at_center > 0.0 && rng.uniform01() < spec.mass_at_center) {
                    out.row(static_cast<Eigen::Index>(r)).setZero();
                } else {
                    Direction u = sample_sphere(d, rng);
                    out.row(static_cast<Eigen::Index>(r)) = spec.radius * u.coords().transpose();
                }
            }
            break;
        case ModelSpec::Kind::point_mass:
            for (std::size_t r = 0; r < n; ++r)
                out.row(static_cast<Eigen::Index>(r)) = spec.center.transpose();
            break;
        case ModelSpec::Kind::product_noise:
            for (std::size_t r = 0; r < n; ++r)
                for (Eigen::Index c = 0; c < d; ++c)
                    out(static_cast<Eigen::Index>(r), c) =
                        rng.uniform01() < 0.5 ? spec.low : spec.high;
            break;
    }
    return PointCloud(std::move(out));
}

std::pair<PointCloud, PointCloud> fragmented_hypercube(int d, int k_star, std::size_t n,
                                                       Rng& rng) {
    ModelSpec nu = ModelSpec::fragmented_hypercube_spec(d, k_star);
    ModelSpec mu = ModelSpec::uniform_cube(d);
    PointCloud from_mu = sample(mu, n, rng);
    PointCloud from_nu = sample(nu, n, rng);
    return {std::move(from_mu), std::move(from_nu)};
}

std::size_t ContaminatedSample::clean_count() const {
    std::size_t c = 0;
    for (bool b : clean_mask) c += b ? 1 : 0;
    return c;
}

PointCloud ContaminatedSample::clean_subset() const {
    const std::size_t c = clean_count();
    if (c == 0) throw InvalidArgument("clean_subset: no clean rows");
    Matrix sub(c, points.dim());
    std::size_t r = 0;
    for (std::size_t i = 0; i < clean_mask.size(); ++i) {
        if (clean_mask[i]) sub.row(static_cast<Eigen::Index>(r++)) =
            points.points().row(static_cast<Eigen::Index>(i));
    }
    return PointCloud(std::move(sub));
}

ContaminatedSample contaminate(const ModelSpec& clean, const ModelSpec& noise, double eps,
                               std::size_t n, Rng& rng) {
    if (!(eps >= 0.0 && eps < 0.5)) throw InvalidArgument("contaminate: eps must be in [0, 1/2)");
    if (n < 1) throw InvalidArgument("contaminate: n must be >= 1");
    if (clean.dim != noise.dim) throw InvalidArgument("contaminate: dimension mismatch");
    const std::size_t n_clean =
        static_cast<std::size_t>(std::ceil((1.0 - eps) * static_cast<double>(n)));
    const std::size_t n_noise = n - n_clean;
    Matrix rows(n, clean.dim);
    rows.topRows(static_cast<Eigen::Index>(n_clean)) =
        sample(clean, n_clean, rng).points();
    if (n_noise > 0)
        rows.bottomRows(static_cast<Eigen::Index>(n_noise)) = sample(noise, n_noise, rng).points();
    // Seed-derived shuffle so downstream code cannot exploit row order.
    std::vector<std::size_t> perm = rng.permutation(n);
    Matrix shuffled(n, clean.dim);
    std::vector<bool> mask(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        shuffled.row(static_cast<Eigen::Index>(i)) =
            rows.row(static_cast<Eigen::Index>(perm[i]));
        mask[i] = perm[i] < n_clean;
    }
    return ContaminatedSample{PointCloud(std::move(shuffled)), std::move(mask), eps};
}

std::pair<ModelSpec, ModelSpec> experiment_model_pair(int model, int d, std::uint64_t seed) {
    if (d < 1) throw InvalidArgument("experiment_model_pair: d must be >= 1");
    const Vector zero = Vector::Zero(d);
    const Matrix eye = Matrix::Identity(d, d);
    switch (model) {
        case 1: {
            ModelSpec mu = ModelSpec::gaussian_factor(zero, eye);
            Matrix bumped = eye + 0.5 * Matrix::Ones(d, d) / static_cast<double>(d);
            std::vector<GaussianComponent> comps;
            comps.push_back({zero, eye});
            Eigen::LLT<Matrix> llt(bumped);
            comps.push_back({zero, Matrix(llt.matrixL())});
            ModelSpec nu = ModelSpec::gaussian_mixture({0.5, 0.5}, std::move(comps));
            return {std::move(mu), std::move(nu)};
        }
        case 2: {
            ModelSpec mu = ModelSpec::gaussian_factor(zero, eye);
            ModelSpec nu = ModelSpec::gaussian_factor(2.0 * Vector::Ones(d), eye);
            return {std::move(mu), std::move(nu)};
        }
        case 3: {
            // Ten-component mixtures with parameters frozen from `seed`.
            Rng rng = Rng::substream(seed, 0x30d3);
            auto draw_side = [&](double mean_shift) {
                std::vector<GaussianComponent> comps;
                std::vector<double> weights(10, 0.1);
                for (int c = 0; c < 10; ++c) {
                    Vector mean = mean_shift * Vector::Ones(d) + rng.normal_vector(d);
                    const int k = static_cast<int>(rng.uniform_index(d)) + 1;
                    Matrix x(k, d);
                    for (int r = 0; r < k; ++r)
                        for (int cc = 0; cc < d; ++cc) x(r, cc) = rng.normal();
                    Matrix factor = x.transpose() / std::sqrt(static_cast<double>(k));
                    comps.push_back({std::move(mean), std::move(factor)});
                }
                return ModelSpec::gaussian_mixture(std::move(weights), std::move(comps));
            };
            ModelSpec mu = draw_side(1.0);
            ModelSpec nu = draw_side(3.0);
            return {std::move(mu), std::move(nu)};
        }
        default:
            throw InvalidArgument("experiment_model_pair: model must be 1, 2, or 3");
    }
}

}  // namespace slicedot
