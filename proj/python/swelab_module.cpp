#include "swelab/covariance.hpp"
#include "swelab/gaussian.hpp"
#include "swelab/lil.hpp"
#include "swelab/sampler.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace swelab;

namespace {

GridSpec make_grid(std::vector<double> taus, std::vector<double> lambdas,
                   std::optional<std::pair<double, double>> band) {
    GridSpec g;
    g.tau_values = std::move(taus);
    g.lambda_values = std::move(lambdas);
    if (band) g.band = TimeBand(band->first, band->second);
    g.validate();
    return g;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Exact covariance calculus and sampling for the stochastic wave "
              "equation with Riesz-kernel noise";

    py::class_<ModelParams>(m, "ModelParams")
        .def_readonly("beta", &ModelParams::beta)
        .def_readonly("c_beta", &ModelParams::c_beta)
        .def_readonly("k_beta", &ModelParams::k_beta)
        .def("__repr__", [](const ModelParams& p) {
            return "ModelParams(beta=" + std::to_string(p.beta) + ")";
        });
    m.def("make_params", &make_params, py::arg("beta"));

    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init(&make_grid), py::arg("tau_values"), py::arg("lambda_values"),
             py::arg("band") = std::nullopt)
        .def_readonly("tau_values", &GridSpec::tau_values)
        .def_readonly("lambda_values", &GridSpec::lambda_values)
        .def("size", &GridSpec::size);

    py::class_<FieldSample>(m, "FieldSample")
        .def_readonly("values", &FieldSample::values)
        .def_readonly("seed", &FieldSample::seed)
        .def_readonly("replication_id", &FieldSample::replication_id);

    m.def(
        "segment_cross_energy",
        [](const ModelParams& p, double a, double b, double c, double d) {
            return segment_cross_energy(p, Segment(a, b), Segment(c, d));
        },
        py::arg("params"), py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"));
    m.def("utilde_covariance",
          [](const ModelParams& p, double t1, double l1, double t2, double l2) {
              return utilde_covariance(p, t1, l1, t2, l2);
          });
    m.def("increment_variance", &increment_variance);
    m.def("rectangle_increment_variance", &rectangle_increment_variance);
    m.def("dyadic_increment_correlation", &dyadic_increment_correlation);
    m.def("v1_crosssection_covariance", &v1_crosssection_covariance);
    m.def("v1_fbm_scale_constant", &v1_fbm_scale_constant);
    m.def("shift_invariance_residual", &shift_invariance_residual);
    m.def("canonical_metric", &canonical_metric);

    m.def(
        "sample_field",
        [](const ModelParams& p, const GridSpec& grid, std::uint64_t seed,
           std::size_t n_reps) {
            CovMatrix cov = assemble_covariance(p, grid);
            factorize(cov, 1e-6);
            return sample(cov, grid, seed, n_reps);
        },
        py::arg("params"), py::arg("grid"), py::arg("seed"), py::arg("n_reps") = 1);
    m.def("sample_fbm_crosssection",
          [](const ModelParams& p, double tau0, const std::vector<double>& lambdas,
             std::uint64_t seed, std::size_t n_reps) {
              return sample_fbm_crosssection(p, tau0, lambdas, seed, n_reps);
          },
          py::arg("params"), py::arg("tau0"), py::arg("lambdas"), py::arg("seed"),
          py::arg("n_reps") = 1);

    m.def("gaussian_survival", &gaussian_survival);
    m.def("bivariate_upper_orthant", &bivariate_upper_orthant);
    m.def("orthant_zero_closed_form", &orthant_zero_closed_form);
    m.def("slepian_identity_check", [](double g1, double g2, double r) {
        const auto rep = slepian_identity_check(g1, g2, r);
        py::dict d;
        d["p_r"] = rep.p_r;
        d["p_zero"] = rep.p_zero;
        d["dp_dr_fd"] = rep.dp_dr_fd;
        d["density_at_r"] = rep.density_at_r;
        d["fd_deviation"] = rep.fd_deviation;
        d["r_star"] = rep.r_star;
        d["residual"] = rep.residual;
        d["bracket_found"] = rep.bracket_found;
        return d;
    });

    m.def("oscillation_scan",
          [](const FieldSample& s, const ModelParams& p, double tau, double lambda,
             double q, int n_min, int n_max) {
              py::list out;
              for (const auto& r : oscillation_scan(s, p, tau, lambda, q, n_min, n_max)) {
                  py::dict d;
                  d["scale_index"] = r.scale_index;
                  d["h"] = r.h;
                  d["raw_increment"] = r.raw_increment;
                  d["lil_statistic"] = r.lil_statistic;
                  d["mod_statistic"] = r.mod_statistic;
                  out.append(d);
              }
              return out;
          });
    m.def("oscillation_lambda_grid", &oscillation_lambda_grid);
    m.def("lil_constant_estimate", &lil_constant_estimate);
}
