#pragma once

#include "latnet/covariance.hpp"
#include "latnet/types.hpp"

namespace latnet {

/// Full spectral decomposition of a symmetric matrix, eigenvalues descending,
/// eigenvector signs fixed so the largest-magnitude entry of each column is
/// positive.
struct EigenSystem {
    Eigen::VectorXd eigenvalues;  // descending
    Eigen::MatrixXd eigenvectors; // columns match eigenvalue order
};

EigenSystem eigen_sym(const MMatrix& M);

/// Eigenvalue-ratio rank selector: argmin_{1<=j<=r_max} lambda_{j+1}/lambda_j.
/// Ratios with a zero denominator count as +inf; trailing zero eigenvalues
/// shrink the effective r_max. Ties go to the smallest index.
int select_rank(const Eigen::VectorXd& eigenvalues, int r_max);

/// Default search bound for select_rank.
inline int default_r_max(int n) { return std::max(1, n / 2); }

/// Fits the single-loading model X_t = Q Z_t Q' + E_t. Centers internally when
/// needed. Loadings are the r leading eigenvectors of the combined aggregate
/// matrix; Z_t = Q' X_t Q and E_t = X_t - Q Z_t Q'.
EstimationResult fit_symmetric(const NetworkSeries& series, int r, int h0);

/// Fits the two-loading model X_t = A1 Z_t A2' + E_t: A1 from the column
/// aggregate, A2 from the row aggregate.
EstimationResult fit_asymmetric(const NetworkSeries& series, int r_row, int r_col, int h0);

struct ResidualDiagnostics {
    std::vector<double> residual_norms; // Frobenius norm of E_t per t
    std::vector<double> fitted_norms;   // Frobenius norm of the fitted part per t
    double variance_share = 0.0;        // fitted energy / total energy, in [0,1]
};

ResidualDiagnostics residual_diagnostics(const EstimationResult& result);

} // namespace latnet
