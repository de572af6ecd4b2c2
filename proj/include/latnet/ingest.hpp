#pragma once

#include "latnet/postprocess.hpp"
#include "latnet/types.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace latnet {

/// Rolling-window description: window length and step in periods, result
/// indexed by the mid-period label (its year component for YYYY-MM labels).
struct RollingSpec {
    int window = 60;
    int step = 12;
};

/// Reads a long-format panel CSV (header `period,importer,exporter,value`)
/// into a dense series. Entities sorted lexicographically; periods must sort
/// lexicographically into chronological YYYY-MM order. The panel must be
/// complete off the diagonal; the diagonal is either fully absent (masked) or
/// fully present.
NetworkSeries parse_long_csv(std::istream& in);
NetworkSeries parse_long_csv_file(const std::string& path);

/// Inverse of parse_long_csv (off-diagonal cells, plus the diagonal when it is
/// not masked).
void write_long_csv(const NetworkSeries& series, std::ostream& out);

/// First differences of logs: T-1 slices of log(x_{t+1}) - log(x_t). Every
/// unmasked entry must be strictly positive.
NetworkSeries log_diff(const NetworkSeries& series);

struct ImputeResult {
    NetworkSeries series; // diagonal filled in, diag_missing cleared
    int iterations = 0;
    bool converged = true;
};

/// Fills a masked diagonal by alternating model fits with replacement of the
/// diagonal by its fitted values (communality-style iteration). Starts from a
/// zero diagonal; stops when the largest diagonal change falls below
/// tol (relative to the diagonal scale) or after max_iter passes.
ImputeResult impute_diagonal(const NetworkSeries& series, ModelKind model, int r, int h0,
                             double tol = 1e-6, int max_iter = 50);

/// One fit per rolling window; count = floor((T - window)/step) + 1.
std::vector<std::pair<std::string, EstimationResult>> rolling_fit(
    const NetworkSeries& series, const RollingSpec& spec, ModelKind model, int r, int h0);

/// Label a window is indexed by: period ceil(window/2) within the window
/// (the year component when the label looks like YYYY-MM).
std::string window_index_label(const std::vector<std::string>& time_labels, int offset,
                               int window);

enum class TableFormat { Csv, Json };

/// Writes one matrix per factor slot (rows = entities, columns = windows) from
/// a sequence of aligned, normalized per-window loadings.
void export_heatmap(const std::vector<Eigen::MatrixXd>& aligned_loadings,
                    const std::vector<std::string>& entities,
                    const std::vector<std::string>& window_labels, std::ostream& out,
                    TableFormat format);

enum class GraphFormat { Dot, Json };

/// Writes the latent network of a fit: one node per latent dimension (Im/Ex
/// prefixed pairs for the asymmetric model), directed edges weighted by the
/// time-averaged factor matrix, and dotted entity-dimension edges from a
/// simplified loading.
/// `simplified` connects entities to the (import) dimension nodes; for the
/// asymmetric model an optional second simplified loading connects entities to
/// the export dimensions.
void export_graph(const EstimationResult& result, const SimplifiedLoading& simplified,
                  const std::vector<std::string>& entities, std::ostream& out,
                  GraphFormat format,
                  const SimplifiedLoading* simplified_export = nullptr);

} // namespace latnet
