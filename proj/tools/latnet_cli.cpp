// Command-line front end: simulation, Monte Carlo tables, estimation and the
// rolling-window application pipeline.

#include "latnet/covariance.hpp"
#include "latnet/estimator.hpp"
#include "latnet/ingest.hpp"
#include "latnet/postprocess.hpp"
#include "latnet/simulation.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace latnet;

std::ostream& open_output(const std::string& path, std::ofstream& file) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path);
    if (!file) throw DataError("cannot open output file '" + path + "'");
    return file;
}

// Synthetic series get DOTS-style monthly labels so their CSV round-trips
// through the ingestion path.
std::vector<std::string> monthly_labels(int T, int start_year = 1981) {
    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) {
        const int year = start_year + t / 12;
        const int month = t % 12 + 1;
        std::ostringstream os;
        os << year << "-" << (month < 10 ? "0" : "") << month;
        labels.push_back(os.str());
    }
    return labels;
}

NetworkSeries load_series(const std::string& input, bool apply_log_diff,
                          const std::string& diag_mode, ModelKind model, int r, int h0) {
    NetworkSeries series = parse_long_csv_file(input);
    if (apply_log_diff) series = log_diff(series);
    if (series.diag_missing) {
        if (diag_mode == "zero") {
            series.diag_missing = false;
            for (auto& X : series.values) X.diagonal().setZero();
        } else {
            series = impute_diagonal(series, model, r, h0).series;
        }
    }
    return series;
}

std::vector<GridCell> make_grid(const std::vector<double>& deltas,
                                const std::vector<int>& sizes,
                                const std::vector<double>& tmults) {
    std::vector<GridCell> grid;
    for (double delta : deltas) {
        for (int n : sizes) {
            for (double m : tmults) grid.push_back({delta, n, m});
        }
    }
    return grid;
}

void write_json_matrix(std::ostream& os, const Eigen::MatrixXd& A) {
    os << "[";
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        os << "[";
        for (Eigen::Index j = 0; j < A.cols(); ++j) {
            os << A(i, j) << (j + 1 < A.cols() ? ", " : "");
        }
        os << "]" << (i + 1 < A.rows() ? ", " : "");
    }
    os << "]";
}

void write_result_json(std::ostream& os, const EstimationResult& result,
                       const std::vector<std::string>& entities) {
    os << "{\n  \"model\": \""
       << (result.model == ModelKind::Symmetric ? "sym" : "asym") << "\",\n";
    os << "  \"r\": " << result.r << ",\n  \"h0\": " << result.h0 << ",\n";
    os << "  \"rank_exceeds_numerical\": "
       << (result.rank_exceeds_numerical ? "true" : "false") << ",\n";
    os << "  \"entities\": [";
    for (std::size_t i = 0; i < entities.size(); ++i) {
        os << "\"" << entities[i] << "\"" << (i + 1 < entities.size() ? ", " : "");
    }
    os << "],\n  \"eigenvalues\": [";
    for (Eigen::Index i = 0; i < result.eigenvalues.size(); ++i) {
        os << result.eigenvalues(i) << (i + 1 < result.eigenvalues.size() ? ", " : "");
    }
    os << "],\n  \"loadings_row\": ";
    write_json_matrix(os, result.loadings_row.values);
    os << ",\n  \"loadings_col\": ";
    write_json_matrix(os, result.loadings_col.values);
    os << ",\n  \"mean_factor\": ";
    Eigen::MatrixXd mean =
        Eigen::MatrixXd::Zero(result.factors.r_row(), result.factors.r_col());
    for (const auto& F : result.factors.values) mean += F;
    if (!result.factors.values.empty()) {
        mean /= static_cast<double>(result.factors.values.size());
    }
    write_json_matrix(os, mean);
    const auto diag = residual_diagnostics(result);
    os << ",\n  \"variance_share\": " << diag.variance_share << "\n}\n";
}

// fit -> varimax -> column normalization -> clip -> (renormalize for display)
struct PresentationLoading {
    Eigen::MatrixXd values; // nonnegative, columns sum to 1
    FactorSeries factors;   // compensated so fitted values are preserved
};

PresentationLoading presentation_pipeline(const LoadingMatrix& loading,
                                          const FactorSeries& factors) {
    const VarimaxResult rotated = varimax(loading);
    FactorSeries rotated_factors;
    rotated_factors.values.reserve(factors.values.size());
    const auto& R = rotated.rotation;
    for (const auto& F : factors.values) {
        rotated_factors.values.push_back(R.transpose() * F * R);
    }
    auto [normalized, adjusted] = normalize_columns(rotated.rotated, rotated_factors);
    const ClipReport clipped = clip_negatives(normalized);
    PresentationLoading out;
    out.values = clipped.clipped.values;
    for (Eigen::Index k = 0; k < out.values.cols(); ++k) {
        const double sum = out.values.col(k).sum();
        if (sum > 0.0) out.values.col(k) /= sum;
    }
    out.factors = std::move(adjusted);
    return out;
}

int run(int argc, char** argv) {
    CLI::App app{"Latent dynamic network estimation via eigenanalysis of "
                 "auto-cross-covariance aggregates"};
    app.require_subcommand(1);
    app.set_config("--config");

    std::string input, output, format = "csv", model_name = "sym", diag_mode = "impute";
    int r = 3, h0 = 1, r_max = 0, window = 60, step = 12, reps = 200, k_groups = 6;
    int sim_n = 20, sim_T = 400;
    double sim_delta = 0.0;
    std::uint64_t seed = 0;
    bool use_log_diff = false;
    std::vector<double> deltas = {0.0};
    std::vector<int> sizes = {20, 40};
    std::vector<double> tmults = {0.5, 1.0, 1.5, 2.0};
    std::vector<std::string> anchors;

    auto add_common = [&](CLI::App* cmd, bool with_input) {
        if (with_input) {
            cmd->add_option("--input", input, "long-format CSV input")->required();
            cmd->add_flag("--log-diff", use_log_diff, "analyze log-differenced growth");
            cmd->add_option("--diag", diag_mode, "masked-diagonal handling")
                ->check(CLI::IsMember({"impute", "zero"}));
        }
        cmd->add_option("--h0", h0, "lag window")->check(CLI::Range(1, 5));
        cmd->add_option("--output", output, "output file ('-' for stdout)");
    };

    auto* simulate = app.add_subcommand("simulate", "draw one synthetic series");
    simulate->add_option("--n", sim_n, "entity count");
    simulate->add_option("--T", sim_T, "series length");
    simulate->add_option("--r", r, "latent dimension");
    simulate->add_option("--delta", sim_delta, "factor strength exponent");
    simulate->add_option("--seed", seed, "RNG seed");
    simulate->add_option("--output", output, "output file ('-' for stdout)");

    auto* table1 = app.add_subcommand("table1", "loading-space accuracy study");
    auto* table2 = app.add_subcommand("table2", "rank-recovery study");
    for (auto* cmd : {table1, table2}) {
        cmd->add_option("--reps", reps, "Monte Carlo repetitions");
        cmd->add_option("--seed", seed, "RNG seed");
        cmd->add_option("--delta", deltas, "factor strengths");
        cmd->add_option("--n", sizes, "entity counts");
        cmd->add_option("--tmult", tmults, "T as multiples of n^2");
        add_common(cmd, false);
        cmd->add_option("--format", format, "csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
    }
    table2->add_option("--rmax", r_max, "rank search bound (0 = n/2)");

    auto* estimate = app.add_subcommand("estimate", "fit the factor model");
    auto* rank = app.add_subcommand("rank", "eigenvalue-ratio rank selection");
    auto* rolling = app.add_subcommand("rolling", "rolling-window fits");
    auto* heatmap = app.add_subcommand("export-heatmap", "aligned loading heatmap data");
    auto* graph = app.add_subcommand("export-graph", "latent network graph file");
    auto* cluster = app.add_subcommand("cluster", "hierarchical clustering of entities");

    for (auto* cmd : {estimate, rolling, heatmap, graph, cluster}) {
        add_common(cmd, true);
        cmd->add_option("--model", model_name, "sym or asym")
            ->check(CLI::IsMember({"sym", "asym"}));
        cmd->add_option("--r", r, "latent dimension");
    }
    add_common(rank, true);
    rank->add_option("--rmax", r_max, "rank search bound (0 = n/2)");
    for (auto* cmd : {rolling, heatmap}) {
        cmd->add_option("--window", window, "window length in periods");
        cmd->add_option("--step", step, "window step in periods");
    }
    heatmap->add_option("--anchor", anchors, "anchor entity labels, in slot order");
    heatmap->add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    graph->add_option("--format", format, "dot or json")
        ->check(CLI::IsMember({"dot", "json"}));
    cluster->add_option("--k", k_groups, "number of groups");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e); // prints usage/help text
        return code == 0 ? 0 : 1;
    }

    std::ofstream file;
    const ModelKind model = model_name == "asym" ? ModelKind::Asymmetric : ModelKind::Symmetric;

    if (simulate->parsed()) {
        SimulationConfig config;
        config.n = sim_n;
        config.T = sim_T;
        config.r = r;
        config.delta = sim_delta;
        config.seed = seed;
        if (r != 3) config.phi_diag.assign(static_cast<std::size_t>(r) * r, 0.8);
        GeneratedData data = generate(config);
        data.series.time_labels = monthly_labels(config.T);
        write_long_csv(data.series, open_output(output, file));
        return 0;
    }
    if (table1->parsed() || table2->parsed()) {
        const auto grid = make_grid(deltas, sizes, tmults);
        const MonteCarloReport report =
            table1->parsed() ? run_table1(grid, reps, h0, seed)
                             : run_table2(grid, reps, h0, r_max, seed);
        std::ostream& os = open_output(output, file);
        if (format == "json") {
            report.write_json(os);
        } else {
            report.write_csv(os);
        }
        return 0;
    }

    if (rank->parsed()) {
        NetworkSeries series = load_series(input, use_log_diff, diag_mode, model, r, h0);
        const MMatrix M = build_M_fast(center(series), h0, MKind::Combined);
        const EigenSystem sys = eigen_sym(M);
        const int rm = r_max > 0 ? r_max : default_r_max(series.n());
        open_output(output, file) << select_rank(sys.eigenvalues, rm) << "\n";
        return 0;
    }
    if (estimate->parsed()) {
        NetworkSeries series = load_series(input, use_log_diff, diag_mode, model, r, h0);
        const EstimationResult result = model == ModelKind::Symmetric
                                            ? fit_symmetric(series, r, h0)
                                            : fit_asymmetric(series, r, r, h0);
        write_result_json(open_output(output, file), result, series.entity_labels);
        return 0;
    }
    if (rolling->parsed()) {
        NetworkSeries series = load_series(input, use_log_diff, diag_mode, model, r, h0);
        const auto windows = rolling_fit(series, {window, step}, model, r, h0);
        std::ostream& os = open_output(output, file);
        os << "[\n";
        for (std::size_t w = 0; w < windows.size(); ++w) {
            os << "{\"window\": \"" << windows[w].first << "\", \"result\": ";
            write_result_json(os, windows[w].second, series.entity_labels);
            os << "}" << (w + 1 < windows.size() ? "," : "") << "\n";
        }
        os << "]\n";
        return 0;
    }
    if (heatmap->parsed()) {
        NetworkSeries series = load_series(input, use_log_diff, diag_mode, model, r, h0);
        const auto windows = rolling_fit(series, {window, step}, model, r, h0);
        std::vector<LoadingMatrix> presented;
        std::vector<std::string> labels;
        for (const auto& [label, fit] : windows) {
            presented.push_back(LoadingMatrix{
                presentation_pipeline(fit.loadings_row, fit.factors).values,
                LoadingMode::ColumnSumOne});
            labels.push_back(label);
        }
        std::vector<int> anchor_ids;
        for (const auto& name : anchors) {
            const auto it = std::find(series.entity_labels.begin(),
                                      series.entity_labels.end(), name);
            if (it == series.entity_labels.end()) {
                throw DataError("unknown anchor entity '" + name + "'");
            }
            anchor_ids.push_back(
                static_cast<int>(it - series.entity_labels.begin()));
        }
        const auto plans = align_windows(presented, anchor_ids);
        std::vector<Eigen::MatrixXd> aligned;
        for (std::size_t w = 0; w < presented.size(); ++w) {
            aligned.push_back(apply_plan(presented[w].values, plans[w]));
        }
        export_heatmap(aligned, series.entity_labels, labels, open_output(output, file),
                       format == "json" ? TableFormat::Json : TableFormat::Csv);
        return 0;
    }
    if (graph->parsed()) {
        NetworkSeries series = load_series(input, use_log_diff, diag_mode, model, r, h0);
        const EstimationResult result = model == ModelKind::Symmetric
                                            ? fit_symmetric(series, r, h0)
                                            : fit_asymmetric(series, r, r, h0);
        EstimationResult presented = result;
        if (model == ModelKind::Asymmetric) {
            // rotate each side by its own Varimax, compensate the factors with both
            const VarimaxResult v1 = varimax(result.loadings_row);
            const VarimaxResult v2 = varimax(result.loadings_col);
            FactorSeries rotated;
            rotated.values.reserve(result.factors.values.size());
            for (const auto& F : result.factors.values) {
                rotated.values.push_back(v1.rotation.transpose() * F * v2.rotation);
            }
            const NormalizedPair norm =
                normalize_columns(v1.rotated, v2.rotated, rotated);
            auto display = [](const LoadingMatrix& L) {
                Eigen::MatrixXd values = clip_negatives(L).clipped.values;
                for (Eigen::Index k = 0; k < values.cols(); ++k) {
                    const double sum = values.col(k).sum();
                    if (sum > 0.0) values.col(k) /= sum;
                }
                return values;
            };
            const SimplifiedLoading simp_import = simplify_loadings(
                LoadingMatrix{display(norm.loadings_row), LoadingMode::ColumnSumOne});
            const SimplifiedLoading simp_export = simplify_loadings(
                LoadingMatrix{display(norm.loadings_col), LoadingMode::ColumnSumOne});
            presented.factors = norm.factors;
            export_graph(presented, simp_import, series.entity_labels,
                         open_output(output, file),
                         format == "json" ? GraphFormat::Json : GraphFormat::Dot,
                         &simp_export);
        } else {
            const PresentationLoading rows =
                presentation_pipeline(result.loadings_row, result.factors);
            const SimplifiedLoading simplified =
                simplify_loadings(LoadingMatrix{rows.values, LoadingMode::ColumnSumOne});
            presented.factors = rows.factors;
            export_graph(presented, simplified, series.entity_labels,
                         open_output(output, file),
                         format == "json" ? GraphFormat::Json : GraphFormat::Dot);
        }
        return 0;
    }
    if (cluster->parsed()) {
        NetworkSeries series = load_series(input, use_log_diff, diag_mode, model, r, h0);
        const EstimationResult result = model == ModelKind::Symmetric
                                            ? fit_symmetric(series, r, h0)
                                            : fit_asymmetric(series, r, r, h0);
        const PresentationLoading rows =
            presentation_pipeline(result.loadings_row, result.factors);
        const Dendrogram dendro = cluster_entities(
            LoadingMatrix{rows.values, LoadingMode::ColumnSumOne}, series.entity_labels);
        const auto labels = dendro.cut(k_groups);
        std::ostream& os = open_output(output, file);
        os << "{\n  \"k\": " << k_groups << ",\n  \"groups\": {";
        for (std::size_t i = 0; i < labels.size(); ++i) {
            os << "\"" << series.entity_labels[i] << "\": " << labels[i]
               << (i + 1 < labels.size() ? ", " : "");
        }
        os << "},\n  \"merges\": [";
        for (std::size_t m = 0; m < dendro.merges.size(); ++m) {
            const auto& merge = dendro.merges[m];
            os << "[" << merge.left << ", " << merge.right << ", " << merge.height << "]"
               << (m + 1 < dendro.merges.size() ? ", " : "");
        }
        os << "]\n}\n";
        return 0;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const latnet::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const latnet::ValidationError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
