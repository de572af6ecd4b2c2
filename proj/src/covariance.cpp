#include "latnet/covariance.hpp"

#include <cmath>
#include <string>

namespace latnet {

namespace {

void check_lag(const NetworkSeries& series, int h) {
    if (h < 1 || h > series.T() - 2) {
        throw ValidationError("lag h=" + std::to_string(h) + " outside [1, T-2] for T=" +
                              std::to_string(series.T()));
    }
}

void check_complete(const NetworkSeries& series) {
    if (series.diag_missing) {
        throw ValidationError(
            "series has an undefined diagonal; impute or zero it before covariance work");
    }
}

// Column-major vectorization of every slice: column t of the result is vec(X_t).
Eigen::MatrixXd vec_stack(const NetworkSeries& series, bool transpose_slices) {
    const int n = series.n();
    const int T = series.T();
    Eigen::MatrixXd V(n * n, T);
    for (int t = 0; t < T; ++t) {
        const auto& X = series.values[static_cast<std::size_t>(t)];
        if (transpose_slices) {
            Eigen::MatrixXd Xt = X.transpose();
            V.col(t) = Eigen::Map<const Eigen::VectorXd>(Xt.data(), n * n);
        } else {
            V.col(t) = Eigen::Map<const Eigen::VectorXd>(X.data(), n * n);
        }
    }
    return V;
}

Eigen::MatrixXd one_sided_M_reference(const NetworkSeries& series, int h0, bool rows) {
    const int n = series.n();
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    for (int h = 1; h <= h0; ++h) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                Eigen::MatrixXd omega =
                    rows ? omega_row(series, h, i, j) : omega_col(series, h, i, j);
                M.noalias() += omega * omega.transpose();
            }
        }
    }
    return M;
}

Eigen::MatrixXd one_sided_M_fast(const NetworkSeries& series, int h0, bool rows) {
    const int n = series.n();
    const int T = series.T();
    const Eigen::MatrixXd V = vec_stack(series, rows);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd S(n * n, n * n);
    for (int h = 1; h <= h0; ++h) {
        const int span = T - h;
        S.noalias() = V.leftCols(span) * V.middleCols(h, span).transpose();
        S /= static_cast<double>(span);
        for (int i = 0; i < n; ++i) {
            const auto block_row = S.middleRows(static_cast<Eigen::Index>(i) * n, n);
            M.noalias() += block_row * block_row.transpose();
        }
    }
    return M;
}

} // namespace

NetworkSeries center(const NetworkSeries& series) {
    validate(series);
    const int n = series.n();
    const int T = series.T();
    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(n, n);
    for (const auto& X : series.values) mean += X;
    mean /= static_cast<double>(T);
    NetworkSeries out = series;
    for (int t = 0; t < T; ++t) {
        auto& X = out.values[static_cast<std::size_t>(t)];
        X -= mean;
        if (series.diag_missing) {
            // masked diagonal entries stay exactly as given
            X.diagonal() = series.values[static_cast<std::size_t>(t)].diagonal();
        }
    }
    return out;
}

bool is_centered(const NetworkSeries& series) {
    const int n = series.n();
    const int T = series.T();
    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(n, n);
    double scale = 0.0;
    for (const auto& X : series.values) {
        mean += X;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i == j && series.diag_missing) continue;
                scale = std::max(scale, std::abs(X(i, j)));
            }
        }
    }
    mean /= static_cast<double>(T);
    if (series.diag_missing) mean.diagonal().setZero();
    const double tol = 1e-12 * std::max(scale, 1.0);
    return mean.cwiseAbs().maxCoeff() <= tol;
}

Eigen::MatrixXd omega_col(const NetworkSeries& series, int h, int i, int j) {
    check_lag(series, h);
    check_complete(series);
    const int n = series.n();
    const int T = series.T();
    if (i < 0 || i >= n || j < 0 || j >= n) {
        throw ValidationError("omega_col: index out of range");
    }
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(n, n);
    for (int t = 0; t + h < T; ++t) {
        omega.noalias() += series.values[static_cast<std::size_t>(t)].col(i) *
                           series.values[static_cast<std::size_t>(t + h)].col(j).transpose();
    }
    omega /= static_cast<double>(T - h);
    return omega;
}

Eigen::MatrixXd omega_row(const NetworkSeries& series, int h, int i, int j) {
    check_lag(series, h);
    check_complete(series);
    const int n = series.n();
    const int T = series.T();
    if (i < 0 || i >= n || j < 0 || j >= n) {
        throw ValidationError("omega_row: index out of range");
    }
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(n, n);
    for (int t = 0; t + h < T; ++t) {
        omega.noalias() +=
            series.values[static_cast<std::size_t>(t)].row(i).transpose() *
            series.values[static_cast<std::size_t>(t + h)].row(j);
    }
    omega /= static_cast<double>(T - h);
    return omega;
}

MMatrix build_M(const NetworkSeries& series, int h0, MKind kind) {
    check_lag(series, h0);
    check_complete(series);
    MMatrix out;
    out.kind = kind;
    out.h0 = h0;
    switch (kind) {
        case MKind::Col:
            out.values = one_sided_M_reference(series, h0, /*rows=*/false);
            break;
        case MKind::Row:
            out.values = one_sided_M_reference(series, h0, /*rows=*/true);
            break;
        case MKind::Combined:
            out.values = one_sided_M_reference(series, h0, false) +
                         one_sided_M_reference(series, h0, true);
            break;
    }
    return out;
}

MMatrix build_M_fast(const NetworkSeries& series, int h0, MKind kind) {
    check_lag(series, h0);
    check_complete(series);
    MMatrix out;
    out.kind = kind;
    out.h0 = h0;
    switch (kind) {
        case MKind::Col:
            out.values = one_sided_M_fast(series, h0, /*rows=*/false);
            break;
        case MKind::Row:
            out.values = one_sided_M_fast(series, h0, /*rows=*/true);
            break;
        case MKind::Combined:
            out.values =
                one_sided_M_fast(series, h0, false) + one_sided_M_fast(series, h0, true);
            break;
    }
    return out;
}

} // namespace latnet
