#include "latnet/covariance.hpp"
#include "latnet/estimator.hpp"
#include "latnet/ingest.hpp"
#include "latnet/postprocess.hpp"
#include "latnet/simulation.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace latnet;

namespace {

NetworkSeries series_from_slices(const std::vector<Eigen::MatrixXd>& slices) {
    NetworkSeries series;
    series.values = slices;
    validate(series);
    return series;
}

py::dict result_to_dict(const EstimationResult& result) {
    py::dict d;
    d["model"] = result.model == ModelKind::Symmetric ? "sym" : "asym";
    d["loadings_row"] = result.loadings_row.values;
    d["loadings_col"] = result.loadings_col.values;
    d["eigenvalues"] = result.eigenvalues;
    d["factors"] = result.factors.values;
    d["residuals"] = result.residuals.values;
    d["h0"] = result.h0;
    d["r"] = result.r;
    d["rank_exceeds_numerical"] = result.rank_exceeds_numerical;
    return d;
}

} // namespace

PYBIND11_MODULE(_latnet, m) {
    m.doc() = "Latent dynamic network estimation from matrix time series";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);

    m.def(
        "build_m",
        [](const std::vector<Eigen::MatrixXd>& slices, int h0, const std::string& kind) {
            const MKind mk = kind == "col"   ? MKind::Col
                             : kind == "row" ? MKind::Row
                                             : MKind::Combined;
            return build_M_fast(center(series_from_slices(slices)), h0, mk).values;
        },
        py::arg("slices"), py::arg("h0") = 1, py::arg("kind") = "combined",
        "Aggregate lag-covariance matrix of a centered series");

    m.def(
        "fit_symmetric",
        [](const std::vector<Eigen::MatrixXd>& slices, int r, int h0) {
            return result_to_dict(fit_symmetric(series_from_slices(slices), r, h0));
        },
        py::arg("slices"), py::arg("r"), py::arg("h0") = 1);

    m.def(
        "fit_asymmetric",
        [](const std::vector<Eigen::MatrixXd>& slices, int r_row, int r_col, int h0) {
            return result_to_dict(
                fit_asymmetric(series_from_slices(slices), r_row, r_col, h0));
        },
        py::arg("slices"), py::arg("r_row"), py::arg("r_col"), py::arg("h0") = 1);

    m.def(
        "select_rank",
        [](const Eigen::VectorXd& eigenvalues, int r_max) {
            return select_rank(eigenvalues, r_max);
        },
        py::arg("eigenvalues"), py::arg("r_max"));

    m.def(
        "estimate_rank",
        [](const std::vector<Eigen::MatrixXd>& slices, int h0, int r_max) {
            const NetworkSeries series = series_from_slices(slices);
            const EigenSystem sys =
                eigen_sym(build_M_fast(center(series), h0, MKind::Combined));
            const int rm = r_max > 0 ? r_max : default_r_max(series.n());
            return select_rank(sys.eigenvalues, rm);
        },
        py::arg("slices"), py::arg("h0") = 1, py::arg("r_max") = 0);

    m.def("space_distance", &space_distance, py::arg("a"), py::arg("b"));

    m.def(
        "varimax",
        [](const Eigen::MatrixXd& loading) {
            const VarimaxResult res = varimax(LoadingMatrix{loading, LoadingMode::Raw});
            return py::make_tuple(res.rotated.values, res.rotation);
        },
        py::arg("loading"));

    m.def(
        "simplify_loadings",
        [](const Eigen::MatrixXd& loading) {
            const SimplifiedLoading simp =
                simplify_loadings(LoadingMatrix{loading, LoadingMode::Raw});
            return py::make_tuple(simp.values, simp.dropped_rows);
        },
        py::arg("loading"));

    m.def(
        "cluster_entities",
        [](const Eigen::MatrixXd& loading, int k) {
            const Dendrogram dendro = cluster_entities(
                LoadingMatrix{loading, LoadingMode::Raw}, {});
            return dendro.cut(k);
        },
        py::arg("loading"), py::arg("k"));

    m.def(
        "generate",
        [](int n, int T, int r, double delta, std::uint64_t seed, double noise_scale) {
            SimulationConfig config;
            config.n = n;
            config.T = T;
            config.r = r;
            config.delta = delta;
            config.seed = seed;
            config.noise_scale = noise_scale;
            if (r != 3) config.phi_diag.assign(static_cast<std::size_t>(r) * r, 0.8);
            const GeneratedData data = generate(config);
            py::dict d;
            d["series"] = data.series.values;
            d["loading"] = data.loading.values;
            d["factors"] = data.factors.values;
            return d;
        },
        py::arg("n"), py::arg("T"), py::arg("r") = 3, py::arg("delta") = 0.0,
        py::arg("seed") = 0, py::arg("noise_scale") = 1.0);
}
