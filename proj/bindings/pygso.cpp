#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gso/campaign.hpp"
#include "gso/config.hpp"
#include "gso/safe_set.hpp"

namespace py = pybind11;

namespace {

gso::KernelSpec make_kernel(const std::string& family, const Eigen::VectorXd& lengthscales,
                            double output_scale) {
    gso::KernelSpec spec;
    if (family == "se")
        spec.family = gso::KernelFamily::SquaredExponential;
    else if (family == "matern32")
        spec.family = gso::KernelFamily::Matern32;
    else
        throw std::invalid_argument("kernel family must be 'se' or 'matern32'");
    spec.lengthscales = lengthscales;
    spec.output_scale = output_scale;
    return spec;
}

std::vector<Eigen::VectorXd> rows_of(const Eigen::MatrixXd& X) {
    std::vector<Eigen::VectorXd> rows;
    rows.reserve(static_cast<size_t>(X.rows()));
    for (Eigen::Index i = 0; i < X.rows(); ++i) rows.push_back(X.row(i).transpose());
    return rows;
}

py::dict record_dict(const gso::RunRecord& rec) {
    py::dict d;
    d["iter"] = rec.iter;
    d["stage"] = rec.stage == gso::Stage::Lse ? "lse" : "ge";
    d["param_index"] = rec.param_index;
    d["measurements"] = rec.measurements;
    d["triggered"] = rec.triggered;
    d["safe"] = rec.safe;
    d["recommended_index"] = rec.recommended_index;
    d["best_lower_bound"] = rec.best_lower_bound;
    d["episode_min_gbar"] = rec.episode_min_gbar;
    return d;
}

}  // namespace

PYBIND11_MODULE(pygso, m) {
    m.doc() = "Safe policy optimization core (grid, GP, safe sets, engine)";

    py::class_<gso::ParamGrid>(m, "ParamGrid")
        .def_property_readonly("dim", [](const gso::ParamGrid& g) { return g.dim; })
        .def_property_readonly("shape", [](const gso::ParamGrid& g) { return g.shape; })
        .def("__len__", [](const gso::ParamGrid& g) { return g.size(); })
        .def("points", [](const gso::ParamGrid& g) {
            Eigen::MatrixXd out(g.size(), g.dim);
            for (size_t i = 0; i < g.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = g.points[i].transpose();
            return out;
        });

    m.def("make_uniform_grid", &gso::make_uniform_grid, py::arg("lo"), py::arg("hi"),
          py::arg("counts"));
    m.def("nearest_grid_index", &gso::nearest_grid_index, py::arg("grid"), py::arg("x"));
    m.def("grid_components", &gso::grid_components, py::arg("grid"), py::arg("mask"));

    m.def(
        "kernel_eval",
        [](const std::string& family, const Eigen::VectorXd& ls, double scale,
           const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
            return gso::kernel_eval(make_kernel(family, ls, scale), a, b);
        },
        py::arg("family"), py::arg("lengthscales"), py::arg("output_scale"), py::arg("a"),
        py::arg("b"));
    m.def(
        "distance_from_covariance",
        [](const std::string& family, const Eigen::VectorXd& ls, double scale, double kappa) {
            return gso::distance_from_covariance(make_kernel(family, ls, scale), kappa);
        },
        py::arg("family"), py::arg("lengthscales"), py::arg("output_scale"), py::arg("kappa"));

    py::class_<gso::GpModel>(m, "GpModel")
        .def("__len__", [](const gso::GpModel& gp) { return gp.size(); });
    m.def(
        "gp_fit",
        [](const std::string& family, const Eigen::VectorXd& ls, double scale,
           const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double noise_std) {
            return gso::gp_fit(make_kernel(family, ls, scale), noise_std, rows_of(X), y);
        },
        py::arg("family"), py::arg("lengthscales"), py::arg("output_scale"), py::arg("X"),
        py::arg("y"), py::arg("noise_std"));
    m.def("gp_add", &gso::gp_add, py::arg("model"), py::arg("x"), py::arg("y"));
    m.def(
        "gp_predict",
        [](const gso::GpModel& model, const Eigen::MatrixXd& X) {
            Eigen::VectorXd mean(X.rows()), var(X.rows());
            for (Eigen::Index i = 0; i < X.rows(); ++i) {
                gso::Posterior p = gso::gp_predict(model, X.row(i).transpose());
                mean[i] = p.mean;
                var[i] = p.variance;
            }
            return py::make_tuple(mean, var);
        },
        py::arg("model"), py::arg("X"));

    m.def(
        "reachability_closure",
        [](const gso::ParamGrid& grid, const Eigen::MatrixXd& true_g,
           const std::vector<int>& seed, double eps, double lipschitz_a) {
            return gso::reachability_closure(grid, true_g, seed, eps, lipschitz_a);
        },
        py::arg("grid"), py::arg("true_g"), py::arg("seed"), py::arg("epsilon"),
        py::arg("lipschitz_a"));

    m.def(
        "oracle_table",
        [](const std::string& config_text) {
            gso::RunConfig config = gso::parse_config(config_text);
            std::unique_ptr<gso::Env> env = gso::make_env(config);
            gso::ParamGrid grid = gso::make_grid(config);
            int repeats = config.oracle_repeats > 0 ? config.oracle_repeats
                                                    : (env->stochastic() ? 16 : 1);
            return gso::oracle_truth(*env, grid, repeats);
        },
        py::arg("config_json"),
        "Ground-truth grid table for the configured environment (col 0 objective)");

    m.def(
        "check_config",
        [](const std::string& config_text) {
            gso::RunConfig config = gso::parse_config(config_text);
            py::dict d;
            d["env"] = config.env_name;
            d["algorithm"] = config.algorithm;
            d["seeds"] = config.seeds;
            d["budget"] = config.budget;
            return d;
        },
        py::arg("config_json"));

    m.def(
        "run_seed",
        [](const std::string& config_text, uint64_t seed) {
            gso::RunConfig config = gso::parse_config(config_text);
            std::unique_ptr<gso::Env> env = gso::make_env(config);
            gso::ParamGrid grid = gso::make_grid(config);
            gso::EngineOptions opts = gso::engine_options(config, *env, grid);
            if (config.normalize_objective) {
                int repeats = config.oracle_repeats > 0 ? config.oracle_repeats
                                                        : (env->stochastic() ? 16 : 1);
                Eigen::MatrixXd oracle = gso::oracle_truth(*env, grid, repeats);
                opts.obj_shift = oracle.col(0).minCoeff();
                opts.obj_scale = std::max(oracle.col(0).maxCoeff() - opts.obj_shift, 1e-12);
            }
            gso::SeedRun run = gso::run_single(*env, grid, opts, seed);
            py::list records;
            for (const gso::RunRecord& rec : run.records) records.append(record_dict(rec));
            py::dict d;
            d["seed"] = run.seed;
            d["records"] = records;
            d["episode_min_gbar"] = run.episode_min_gbar;
            d["final_safe"] = run.final_safe;
            d["recommended_index"] = run.recommended_index;
            return d;
        },
        py::arg("config_json"), py::arg("seed"),
        "One engine run under the given JSON config; returns records and the final safe set");
}
