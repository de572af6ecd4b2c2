#include "latnet/estimator.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace latnet {

namespace {

// Eigenvalues below kEigenvalueClampRel * lambda_1 are reported as 0.
Eigen::VectorXd clamp_spectrum(Eigen::VectorXd lambda) {
    if (lambda.size() == 0) return lambda;
    const double cutoff = kEigenvalueClampRel * std::max(lambda(0), 0.0);
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        if (lambda(i) < cutoff) lambda(i) = 0.0;
    }
    return lambda;
}

int numerical_rank(const Eigen::VectorXd& lambda) {
    int count = 0;
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        if (lambda(i) > 0.0) ++count;
    }
    return count;
}

NetworkSeries ensure_centered(const NetworkSeries& series) {
    validate(series);
    if (series.diag_missing) {
        throw ValidationError(
            "series has an undefined diagonal; impute or zero it before fitting");
    }
    return is_centered(series) ? series : center(series);
}

} // namespace

EigenSystem eigen_sym(const MMatrix& M) {
    const auto& A = M.values;
    if (A.rows() != A.cols()) {
        throw ValidationError("eigen_sym: matrix not square");
    }
    const double scale = A.cwiseAbs().maxCoeff();
    if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-8 * std::max(scale, 1.0)) {
        throw ValidationError("eigen_sym: matrix not symmetric within tolerance");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        0.5 * (A + A.transpose()));
    if (solver.info() != Eigen::Success) {
        throw ValidationError("eigen_sym: eigendecomposition failed");
    }
    const Eigen::Index n = A.rows();
    EigenSystem sys;
    sys.eigenvalues.resize(n);
    sys.eigenvectors.resize(n, n);
    // Eigen returns ascending order; reverse to descending.
    for (Eigen::Index k = 0; k < n; ++k) {
        sys.eigenvalues(k) = solver.eigenvalues()(n - 1 - k);
        sys.eigenvectors.col(k) = solver.eigenvectors().col(n - 1 - k);
    }
    sys.eigenvalues = clamp_spectrum(sys.eigenvalues);
    // Sign convention: largest-absolute entry positive, lowest index on ties.
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index best = 0;
        double best_abs = -1.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double a = std::abs(sys.eigenvectors(i, k));
            if (a > best_abs) {
                best_abs = a;
                best = i;
            }
        }
        if (sys.eigenvectors(best, k) < 0.0) sys.eigenvectors.col(k) *= -1.0;
    }
    return sys;
}

int select_rank(const Eigen::VectorXd& eigenvalues, int r_max) {
    const int m = static_cast<int>(eigenvalues.size());
    if (r_max < 1 || m <= r_max) {
        throw ValidationError("select_rank: need eigenvalue count > r_max >= 1");
    }
    for (int j = 1; j < m; ++j) {
        if (eigenvalues(j) > eigenvalues(j - 1) + 1e-12 * std::abs(eigenvalues(0))) {
            throw ValidationError("select_rank: eigenvalues not descending");
        }
    }
    if (eigenvalues(0) <= 0.0) {
        throw ValidationError("select_rank: all-zero spectrum");
    }
    const double cutoff = kEigenvalueClampRel * eigenvalues(0);
    int positive = 0;
    for (int j = 0; j < m; ++j) {
        if (eigenvalues(j) > cutoff) ++positive;
    }
    const int effective_max = std::max(1, std::min(r_max, positive - 1));
    int best = 1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int j = 1; j <= effective_max; ++j) {
        const double denom = eigenvalues(j - 1);
        const double ratio = denom > 0.0 ? eigenvalues(j) / denom
                                         : std::numeric_limits<double>::infinity();
        if (ratio < best_ratio) {
            best_ratio = ratio;
            best = j;
        }
    }
    return best;
}

EstimationResult fit_symmetric(const NetworkSeries& series, int r, int h0) {
    NetworkSeries centered = ensure_centered(series);
    const int n = centered.n();
    if (r < 1 || r > n - 1) {
        throw ValidationError("fit_symmetric: need 1 <= r <= n-1");
    }
    const MMatrix M = build_M_fast(centered, h0, MKind::Combined);
    const EigenSystem sys = eigen_sym(M);

    EstimationResult result;
    result.model = ModelKind::Symmetric;
    result.h0 = h0;
    result.r = r;
    result.eigenvalues = sys.eigenvalues;
    result.rank_exceeds_numerical = r > numerical_rank(sys.eigenvalues);

    const Eigen::MatrixXd Q = sys.eigenvectors.leftCols(r);
    result.loadings_row = LoadingMatrix{Q, LoadingMode::Orthonormal};
    result.loadings_col = result.loadings_row;

    result.factors.values.reserve(static_cast<std::size_t>(centered.T()));
    result.residuals = centered;
    for (int t = 0; t < centered.T(); ++t) {
        const auto& X = centered.values[static_cast<std::size_t>(t)];
        Eigen::MatrixXd Z = Q.transpose() * X * Q;
        result.residuals.values[static_cast<std::size_t>(t)] = X - Q * Z * Q.transpose();
        result.factors.values.push_back(std::move(Z));
    }
    return result;
}

EstimationResult fit_asymmetric(const NetworkSeries& series, int r_row, int r_col, int h0) {
    NetworkSeries centered = ensure_centered(series);
    const int n = centered.n();
    if (r_row < 1 || r_row > n - 1 || r_col < 1 || r_col > n - 1) {
        throw ValidationError("fit_asymmetric: need 1 <= r <= n-1 for both ranks");
    }
    const EigenSystem col_sys = eigen_sym(build_M_fast(centered, h0, MKind::Col));
    const EigenSystem row_sys = eigen_sym(build_M_fast(centered, h0, MKind::Row));

    EstimationResult result;
    result.model = ModelKind::Asymmetric;
    result.h0 = h0;
    result.r = r_row;
    // column vectors of X_t live in the span of A1, row vectors in the span of A2
    result.eigenvalues = col_sys.eigenvalues;
    result.rank_exceeds_numerical = r_row > numerical_rank(col_sys.eigenvalues) ||
                                    r_col > numerical_rank(row_sys.eigenvalues);

    const Eigen::MatrixXd A1 = col_sys.eigenvectors.leftCols(r_row);
    const Eigen::MatrixXd A2 = row_sys.eigenvectors.leftCols(r_col);
    result.loadings_row = LoadingMatrix{A1, LoadingMode::Orthonormal};
    result.loadings_col = LoadingMatrix{A2, LoadingMode::Orthonormal};

    result.factors.values.reserve(static_cast<std::size_t>(centered.T()));
    result.residuals = centered;
    for (int t = 0; t < centered.T(); ++t) {
        const auto& X = centered.values[static_cast<std::size_t>(t)];
        Eigen::MatrixXd Z = A1.transpose() * X * A2;
        result.residuals.values[static_cast<std::size_t>(t)] = X - A1 * Z * A2.transpose();
        result.factors.values.push_back(std::move(Z));
    }
    return result;
}

ResidualDiagnostics residual_diagnostics(const EstimationResult& result) {
    ResidualDiagnostics diag;
    const auto& A1 = result.loadings_row.values;
    const auto& A2 = result.loadings_col.values;
    double fitted_energy = 0.0;
    double total_energy = 0.0;
    for (int t = 0; t < result.factors.T(); ++t) {
        const Eigen::MatrixXd fitted =
            A1 * result.factors.values[static_cast<std::size_t>(t)] * A2.transpose();
        const auto& resid = result.residuals.values[static_cast<std::size_t>(t)];
        const double fn = fitted.norm();
        const double rn = resid.norm();
        diag.fitted_norms.push_back(fn);
        diag.residual_norms.push_back(rn);
        fitted_energy += fn * fn;
        total_energy += (fitted + resid).squaredNorm();
    }
    diag.variance_share = total_energy > 0.0 ? fitted_energy / total_energy : 0.0;
    if (diag.variance_share > 1.0) diag.variance_share = 1.0;
    if (diag.variance_share < 0.0) diag.variance_share = 0.0;
    return diag;
}

} // namespace latnet
