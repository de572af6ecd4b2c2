#include "latnet/ingest.hpp"

#include "latnet/covariance.hpp"
#include "latnet/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace latnet {

namespace {

bool looks_like_year_month(const std::string& label) {
    if (label.size() != 7 || label[4] != '-') return false;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u}) {
        if (!std::isdigit(static_cast<unsigned char>(label[i]))) return false;
    }
    const int month = (label[5] - '0') * 10 + (label[6] - '0');
    return month >= 1 && month <= 12;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

} // namespace

NetworkSeries parse_long_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty input");
    if (strip_cr(line) != "period,importer,exporter,value") {
        throw DataError("expected header 'period,importer,exporter,value', got '" + line +
                        "'");
    }

    struct Record {
        std::string period, importer, exporter;
        double value;
    };
    std::vector<Record> records;
    std::set<std::string> periods;
    std::set<std::string> entities;
    std::set<std::string> seen_keys;

    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 4) {
            throw DataError("line " + std::to_string(line_no) + ": expected 4 fields, got " +
                            std::to_string(fields.size()));
        }
        Record rec;
        rec.period = fields[0];
        rec.importer = fields[1];
        rec.exporter = fields[2];
        if (!looks_like_year_month(rec.period)) {
            throw DataError("line " + std::to_string(line_no) + ": period '" + rec.period +
                            "' is not in YYYY-MM form");
        }
        try {
            std::size_t pos = 0;
            rec.value = std::stod(fields[3], &pos);
            if (pos != fields[3].size()) throw std::invalid_argument("trailing garbage");
        } catch (const std::exception&) {
            throw DataError("line " + std::to_string(line_no) + ": bad value '" + fields[3] +
                            "'");
        }
        if (!std::isfinite(rec.value)) {
            throw DataError("line " + std::to_string(line_no) + ": non-finite value");
        }
        const std::string key = rec.period + "|" + rec.importer + "|" + rec.exporter;
        if (!seen_keys.insert(key).second) {
            throw DataError("duplicate record (" + rec.period + ", " + rec.importer + ", " +
                            rec.exporter + ")");
        }
        periods.insert(rec.period);
        entities.insert(rec.importer);
        entities.insert(rec.exporter);
        records.push_back(std::move(rec));
    }

    const std::vector<std::string> entity_list(entities.begin(), entities.end());
    const std::vector<std::string> period_list(periods.begin(), periods.end());
    const int n = static_cast<int>(entity_list.size());
    const int T = static_cast<int>(period_list.size());
    if (n < 2 || T < 2) throw DataError("panel too small: need >= 2 entities and periods");

    std::map<std::string, int> entity_index;
    for (int i = 0; i < n; ++i) entity_index[entity_list[static_cast<std::size_t>(i)]] = i;
    std::map<std::string, int> period_index;
    for (int t = 0; t < T; ++t) period_index[period_list[static_cast<std::size_t>(t)]] = t;

    NetworkSeries series;
    series.entity_labels = entity_list;
    series.time_labels = period_list;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    series.values.assign(static_cast<std::size_t>(T),
                         Eigen::MatrixXd::Constant(n, n, nan));

    std::size_t diag_count = 0;
    for (const auto& rec : records) {
        const int t = period_index[rec.period];
        const int i = entity_index[rec.importer]; // importer = row
        const int j = entity_index[rec.exporter];
        series.values[static_cast<std::size_t>(t)](i, j) = rec.value;
        if (i == j) ++diag_count;
    }

    // completeness check off the diagonal
    std::vector<std::string> missing;
    for (int t = 0; t < T && missing.size() < 5; ++t) {
        const auto& X = series.values[static_cast<std::size_t>(t)];
        for (int i = 0; i < n && missing.size() < 5; ++i) {
            for (int j = 0; j < n && missing.size() < 5; ++j) {
                if (i == j) continue;
                if (std::isnan(X(i, j))) {
                    missing.push_back("(" + period_list[static_cast<std::size_t>(t)] + ", " +
                                      entity_list[static_cast<std::size_t>(i)] + ", " +
                                      entity_list[static_cast<std::size_t>(j)] + ")");
                }
            }
        }
    }
    if (!missing.empty()) {
        std::string msg = "incomplete panel; missing entries include:";
        for (const auto& m : missing) msg += " " + m;
        throw DataError(msg);
    }

    const std::size_t full_diag = static_cast<std::size_t>(n) * static_cast<std::size_t>(T);
    if (diag_count == 0) {
        series.diag_missing = true;
    } else if (diag_count == full_diag) {
        series.diag_missing = false;
    } else {
        throw DataError("diagonal must be fully present or fully absent; got " +
                        std::to_string(diag_count) + " of " + std::to_string(full_diag));
    }
    return series;
}

NetworkSeries parse_long_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    return parse_long_csv(in);
}

void write_long_csv(const NetworkSeries& series, std::ostream& out) {
    out << "period,importer,exporter,value\n";
    out << std::setprecision(17);
    const int n = series.n();
    for (int t = 0; t < series.T(); ++t) {
        const auto& X = series.values[static_cast<std::size_t>(t)];
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i == j && series.diag_missing) continue;
                out << series.time_labels[static_cast<std::size_t>(t)] << ","
                    << series.entity_labels[static_cast<std::size_t>(i)] << ","
                    << series.entity_labels[static_cast<std::size_t>(j)] << "," << X(i, j)
                    << "\n";
            }
        }
    }
}

NetworkSeries log_diff(const NetworkSeries& series) {
    validate(series);
    const int n = series.n();
    const int T = series.T();
    for (int t = 0; t < T; ++t) {
        const auto& X = series.values[static_cast<std::size_t>(t)];
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i == j && series.diag_missing) continue;
                if (!(X(i, j) > 0.0)) {
                    std::ostringstream os;
                    os << "log_diff: nonpositive entry at (t=" << t << ", i=" << i
                       << ", j=" << j << ")";
                    throw ValidationError(os.str());
                }
            }
        }
    }
    NetworkSeries out;
    out.diag_missing = series.diag_missing;
    out.entity_labels = series.entity_labels;
    out.time_labels.assign(series.time_labels.begin() + 1, series.time_labels.end());
    out.values.reserve(static_cast<std::size_t>(T - 1));
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (int t = 0; t + 1 < T; ++t) {
        Eigen::MatrixXd D = (series.values[static_cast<std::size_t>(t + 1)].array().log() -
                             series.values[static_cast<std::size_t>(t)].array().log())
                                .matrix();
        if (series.diag_missing) D.diagonal().setConstant(nan);
        out.values.push_back(std::move(D));
    }
    return out;
}

ImputeResult impute_diagonal(const NetworkSeries& series, ModelKind model, int r, int h0,
                             double tol, int max_iter) {
    validate(series);
    if (!series.diag_missing) {
        throw ValidationError("impute_diagonal: series diagonal is not masked");
    }
    ImputeResult out;
    out.series = series;
    out.series.diag_missing = false;
    for (auto& X : out.series.values) X.diagonal().setZero();

    const int n = series.n();
    const int T = series.T();
    out.converged = false;
    for (int iter = 1; iter <= max_iter; ++iter) {
        out.iterations = iter;
        const EstimationResult fit = model == ModelKind::Symmetric
                                         ? fit_symmetric(out.series, r, h0)
                                         : fit_asymmetric(out.series, r, r, h0);
        Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(n, n);
        for (const auto& X : out.series.values) mean += X;
        mean /= static_cast<double>(T);

        const auto& A1 = fit.loadings_row.values;
        const auto& A2 = fit.loadings_col.values;
        // project the mean through the loading spaces too; adding the raw mean
        // diagonal back would make any time-constant diagonal error a fixed
        // point of the iteration
        const Eigen::VectorXd mean_diag =
            (A1 * (A1.transpose() * mean * A2) * A2.transpose()).diagonal();
        double max_change = 0.0;
        double scale = 0.0;
        for (int t = 0; t < T; ++t) {
            const Eigen::VectorXd fitted_diag =
                (A1 * fit.factors.values[static_cast<std::size_t>(t)] * A2.transpose())
                    .diagonal() +
                mean_diag;
            auto diag = out.series.values[static_cast<std::size_t>(t)].diagonal();
            max_change = std::max(max_change, (diag - fitted_diag).cwiseAbs().maxCoeff());
            scale = std::max(scale, fitted_diag.cwiseAbs().maxCoeff());
            diag = fitted_diag;
        }
        if (max_change <= tol * std::max(scale, 1.0)) {
            out.converged = true;
            break;
        }
    }
    return out;
}

std::string window_index_label(const std::vector<std::string>& time_labels, int offset,
                               int window) {
    const int mid = offset + (window + 1) / 2 - 1;
    const std::string& label = time_labels[static_cast<std::size_t>(mid)];
    if (looks_like_year_month(label)) return label.substr(0, 4);
    return label;
}

std::vector<std::pair<std::string, EstimationResult>> rolling_fit(
    const NetworkSeries& series, const RollingSpec& spec, ModelKind model, int r, int h0) {
    validate(series);
    if (spec.window < 3 || spec.window > series.T()) {
        throw ValidationError("rolling_fit: window must lie in [3, T]");
    }
    if (spec.step < 1) throw ValidationError("rolling_fit: step must be >= 1");
    if (series.diag_missing) {
        throw ValidationError("rolling_fit: impute or zero the diagonal first");
    }
    std::vector<std::pair<std::string, EstimationResult>> results;
    for (int offset = 0; offset + spec.window <= series.T(); offset += spec.step) {
        NetworkSeries window;
        window.diag_missing = false;
        window.entity_labels = series.entity_labels;
        window.values.assign(series.values.begin() + offset,
                             series.values.begin() + offset + spec.window);
        window.time_labels.assign(series.time_labels.begin() + offset,
                                  series.time_labels.begin() + offset + spec.window);
        EstimationResult fit = model == ModelKind::Symmetric
                                   ? fit_symmetric(window, r, h0)
                                   : fit_asymmetric(window, r, r, h0);
        results.emplace_back(window_index_label(series.time_labels, offset, spec.window),
                             std::move(fit));
    }
    return results;
}

void export_heatmap(const std::vector<Eigen::MatrixXd>& aligned_loadings,
                    const std::vector<std::string>& entities,
                    const std::vector<std::string>& window_labels, std::ostream& out,
                    TableFormat format) {
    if (aligned_loadings.empty()) throw ValidationError("export_heatmap: no windows");
    const Eigen::Index n = aligned_loadings.front().rows();
    const Eigen::Index r = aligned_loadings.front().cols();
    for (const auto& L : aligned_loadings) {
        if (L.rows() != n || L.cols() != r) {
            throw ValidationError("export_heatmap: inconsistent loading shapes");
        }
    }
    if (static_cast<Eigen::Index>(entities.size()) != n ||
        aligned_loadings.size() != window_labels.size()) {
        throw ValidationError("export_heatmap: label count mismatch");
    }
    out << std::setprecision(12);
    if (format == TableFormat::Csv) {
        out << "factor,entity";
        for (const auto& w : window_labels) out << "," << w;
        out << "\n";
        for (Eigen::Index k = 0; k < r; ++k) {
            for (Eigen::Index i = 0; i < n; ++i) {
                out << (k + 1) << "," << entities[static_cast<std::size_t>(i)];
                for (const auto& L : aligned_loadings) out << "," << L(i, k);
                out << "\n";
            }
        }
    } else {
        out << "[\n";
        for (Eigen::Index k = 0; k < r; ++k) {
            out << "  {\"factor_slot\": " << (k + 1) << ", \"entities\": [";
            for (Eigen::Index i = 0; i < n; ++i) {
                out << "\"" << entities[static_cast<std::size_t>(i)] << "\""
                    << (i + 1 < n ? ", " : "");
            }
            out << "], \"windows\": [";
            for (std::size_t w = 0; w < window_labels.size(); ++w) {
                out << "\"" << window_labels[w] << "\""
                    << (w + 1 < window_labels.size() ? ", " : "");
            }
            out << "], \"values\": [";
            for (Eigen::Index i = 0; i < n; ++i) {
                out << "[";
                for (std::size_t w = 0; w < aligned_loadings.size(); ++w) {
                    out << aligned_loadings[w](i, k)
                        << (w + 1 < aligned_loadings.size() ? ", " : "");
                }
                out << "]" << (i + 1 < n ? ", " : "");
            }
            out << "]}" << (k + 1 < r ? "," : "") << "\n";
        }
        out << "]\n";
    }
}

namespace {

const char* kPalette[] = {"red",    "green",  "blue",   "orange", "purple",
                          "brown",  "cyan",   "magenta"};

std::string dim_color(int i) { return kPalette[i % 8]; }

} // namespace

void export_graph(const EstimationResult& result, const SimplifiedLoading& simplified,
                  const std::vector<std::string>& entities, std::ostream& out,
                  GraphFormat format, const SimplifiedLoading* simplified_export) {
    const bool asym = result.model == ModelKind::Asymmetric;
    const int r_row = result.factors.r_row();
    const int r_col = result.factors.r_col();
    Eigen::MatrixXd mean_factor = Eigen::MatrixXd::Zero(r_row, r_col);
    for (const auto& F : result.factors.values) mean_factor += F;
    if (!result.factors.values.empty()) {
        mean_factor /= static_cast<double>(result.factors.values.size());
    }
    const double edge_scale = std::max(mean_factor.cwiseAbs().maxCoeff(), 1e-300);

    auto row_node = [&](int i) {
        return asym ? "Im" + std::to_string(i + 1) : "F" + std::to_string(i + 1);
    };
    auto col_node = [&](int j) {
        return asym ? "Ex" + std::to_string(j + 1) : "F" + std::to_string(j + 1);
    };

    out << std::setprecision(12);
    if (format == GraphFormat::Dot) {
        out << "digraph latent {\n";
        out << "  // edge widths scaled to fit each individual plot (scale="
            << edge_scale << ")\n";
        for (int i = 0; i < r_row; ++i) {
            out << "  " << row_node(i) << " [shape=circle, color=" << dim_color(i)
                << ", width=" << mean_factor(i, std::min(i, r_col - 1)) << "];\n";
        }
        if (asym) {
            for (int j = 0; j < r_col; ++j) {
                out << "  " << col_node(j) << " [shape=circle, color="
                    << dim_color(r_row + j) << ", width="
                    << mean_factor(std::min(j, r_row - 1), j) << "];\n";
            }
        }
        for (int i = 0; i < r_row; ++i) {
            for (int j = 0; j < r_col; ++j) {
                if (!asym && i == j && r_row > 1) continue;
                // flow from the exporting dimension into the importing one;
                // edge color keyed to the importing dimension
                out << "  " << col_node(j) << " -> " << row_node(i) << " [width="
                    << mean_factor(i, j) << ", color=" << dim_color(i) << "];\n";
            }
        }
        auto dotted_edges = [&](const SimplifiedLoading& simp, bool to_rows) {
            for (Eigen::Index e = 0; e < simp.values.rows(); ++e) {
                for (Eigen::Index k = 0; k < simp.values.cols(); ++k) {
                    const double w = simp.values(e, k);
                    if (w <= 0.0) continue;
                    out << "  \"" << entities[static_cast<std::size_t>(e)] << "\" -> "
                        << (to_rows ? row_node(static_cast<int>(k))
                                    : col_node(static_cast<int>(k)))
                        << " [style=dotted, width=" << w << "];\n";
                }
            }
        };
        dotted_edges(simplified, /*to_rows=*/true);
        if (asym && simplified_export != nullptr) {
            dotted_edges(*simplified_export, /*to_rows=*/false);
        }
        out << "}\n";
    } else {
        out << "{\n  \"scaling_note\": \"edge widths scaled to fit each individual plot\",\n";
        out << "  \"edge_scale\": " << edge_scale << ",\n  \"nodes\": [";
        bool first = true;
        for (int i = 0; i < r_row; ++i) {
            out << (first ? "" : ", ") << "{\"id\": \"" << row_node(i) << "\", \"size\": "
                << mean_factor(i, std::min(i, r_col - 1)) << ", \"color\": \""
                << dim_color(i) << "\"}";
            first = false;
        }
        if (asym) {
            for (int j = 0; j < r_col; ++j) {
                out << ", {\"id\": \"" << col_node(j) << "\", \"size\": "
                    << mean_factor(std::min(j, r_row - 1), j) << ", \"color\": \""
                    << dim_color(r_row + j) << "\"}";
            }
        }
        out << "],\n  \"edges\": [";
        first = true;
        for (int i = 0; i < r_row; ++i) {
            for (int j = 0; j < r_col; ++j) {
                if (!asym && i == j && r_row > 1) continue;
                out << (first ? "" : ", ") << "{\"from\": \"" << col_node(j)
                    << "\", \"to\": \"" << row_node(i) << "\", \"width\": "
                    << mean_factor(i, j) << ", \"color\": \"" << dim_color(i) << "\"}";
                first = false;
            }
        }
        out << "],\n  \"entity_edges\": [";
        first = true;
        auto dotted_json = [&](const SimplifiedLoading& simp, bool to_rows) {
            for (Eigen::Index e = 0; e < simp.values.rows(); ++e) {
                for (Eigen::Index k = 0; k < simp.values.cols(); ++k) {
                    const double w = simp.values(e, k);
                    if (w <= 0.0) continue;
                    out << (first ? "" : ", ") << "{\"entity\": \""
                        << entities[static_cast<std::size_t>(e)] << "\", \"dimension\": \""
                        << (to_rows ? row_node(static_cast<int>(k))
                                    : col_node(static_cast<int>(k)))
                        << "\", \"width\": " << w << ", \"style\": \"dotted\"}";
                    first = false;
                }
            }
        };
        dotted_json(simplified, true);
        if (asym && simplified_export != nullptr) dotted_json(*simplified_export, false);
        out << "]\n}\n";
    }
}

} // namespace latnet
