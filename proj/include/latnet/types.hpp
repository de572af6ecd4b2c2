#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace latnet {

/// Error raised when an input violates a structural invariant
/// (shapes, finiteness, panel completeness, ...).
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Error raised by file ingestion (malformed rows, duplicates, incomplete panels).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Ordered sequence of T square n-by-n relational matrices.
///
/// The diagonal may be marked as undefined (diag_missing); in that state the
/// diagonal entries are allowed to be non-finite and every consumer that needs
/// a complete matrix must impute or zero them first.
struct NetworkSeries {
    std::vector<Eigen::MatrixXd> values;   // T slices, each n x n
    std::vector<std::string> entity_labels; // size n
    std::vector<std::string> time_labels;   // size T
    bool diag_missing = false;

    int n() const { return values.empty() ? 0 : static_cast<int>(values.front().rows()); }
    int T() const { return static_cast<int>(values.size()); }
};

enum class LoadingMode { Orthonormal, ColumnSumOne, Raw };

/// n-by-r loading matrix with an explicit normalization convention.
struct LoadingMatrix {
    Eigen::MatrixXd values; // n x r
    LoadingMode mode = LoadingMode::Raw;

    int n() const { return static_cast<int>(values.rows()); }
    int r() const { return static_cast<int>(values.cols()); }
};

/// Sequence of T latent network matrices (r_row x r_col each).
struct FactorSeries {
    std::vector<Eigen::MatrixXd> values; // T slices

    int T() const { return static_cast<int>(values.size()); }
    int r_row() const { return values.empty() ? 0 : static_cast<int>(values.front().rows()); }
    int r_col() const { return values.empty() ? 0 : static_cast<int>(values.front().cols()); }
};

enum class ModelKind { Symmetric, Asymmetric };

/// Output of a model fit: loadings, spectrum of the aggregate matrix,
/// factor series and residual series.
struct EstimationResult {
    ModelKind model = ModelKind::Symmetric;
    LoadingMatrix loadings_row; // A1 (identical to loadings_col for the symmetric model)
    LoadingMatrix loadings_col; // A2
    Eigen::VectorXd eigenvalues; // descending, clamped nonnegative
    FactorSeries factors;
    NetworkSeries residuals;    // same labels as the (centered) input
    int h0 = 1;
    int r = 0;
    bool rank_exceeds_numerical = false;
};

/// Full description of the synthetic data-generating process.
struct SimulationConfig {
    int n = 20;
    int T = 200;
    int r = 3;
    double delta = 0.0;
    std::vector<double> phi_diag =
        {0.86, 0.93, 0.81, 0.73, 0.62, 0.61, 0.53, 0.75, 0.78}; // length r*r
    double noise_offdiag = 0.2;
    double noise_scale = 1.0; // 0 gives a noiseless series (testing hook)
    int burn_in = 200;
    std::uint64_t seed = 0;
};

/// Checks every NetworkSeries invariant; throws ValidationError on the first
/// violation, naming the offending slice/entry.
void validate(const NetworkSeries& series);

/// Checks the mode claim of a loading matrix (orthonormality or unit column
/// sums within 1e-10). Raw loadings always pass.
void validate(const LoadingMatrix& loading);

void validate(const SimulationConfig& config);

/// Eigenvalues of the aggregate matrix below this fraction of the largest one
/// are reported as exact zeros.
inline constexpr double kEigenvalueClampRel = 1e-12;

} // namespace latnet
