#pragma once

#include "latnet/types.hpp"

namespace latnet {

enum class MKind { Col, Row, Combined };

/// Symmetric nonnegative-definite aggregate of lagged auto-cross-covariances.
struct MMatrix {
    Eigen::MatrixXd values; // n x n
    MKind kind = MKind::Combined;
    int h0 = 1;
};

/// Removes the temporal mean of every cell. Masked diagonal entries are left
/// untouched. Idempotent.
NetworkSeries center(const NetworkSeries& series);

/// True when every cell already has temporal mean zero (within 1e-12 of the
/// largest magnitude present).
bool is_centered(const NetworkSeries& series);

/// Lag-h sample auto-cross-covariance between column i and column j:
///   (1/(T-h)) sum_t X_{t,.i} X_{t+h,.j}'
/// Indices i, j are zero-based. The series must be centered.
Eigen::MatrixXd omega_col(const NetworkSeries& series, int h, int i, int j);

/// Row-vector analogue of omega_col, built from X_{t,i.} and X_{t+h,j.}.
Eigen::MatrixXd omega_row(const NetworkSeries& series, int h, int i, int j);

/// Reference construction of the aggregate matrix
///   M = sum_{h<=h0} sum_{i,j} Omega_ij(h) Omega_ij(h)'
/// by direct evaluation of the defining sums (h outer, then i, then j).
/// Quartic in n; serves as the correctness oracle for build_M_fast.
MMatrix build_M(const NetworkSeries& series, int h0, MKind kind);

/// Blocked construction of the same aggregate: materializes the n^2 x n^2 lag
/// covariance S(h) whose (i,j) blocks are the Omega_ij(h), then accumulates
/// block-row Gram products. Agrees with build_M within 1e-10 relative
/// Frobenius norm.
MMatrix build_M_fast(const NetworkSeries& series, int h0, MKind kind);

} // namespace latnet
