#include "latnet/types.hpp"

#include <cmath>
#include <sstream>

namespace latnet {

void validate(const NetworkSeries& series) {
    const int T = series.T();
    if (T < 2) {
        throw ValidationError("NetworkSeries: need at least 2 time points, got " +
                              std::to_string(T));
    }
    const int n = series.n();
    if (n < 2) {
        throw ValidationError("NetworkSeries: need at least 2 entities, got " +
                              std::to_string(n));
    }
    for (int t = 0; t < T; ++t) {
        const auto& X = series.values[static_cast<std::size_t>(t)];
        if (X.rows() != n || X.cols() != n) {
            std::ostringstream os;
            os << "NetworkSeries: slice " << t << " is " << X.rows() << "x" << X.cols()
               << ", expected " << n << "x" << n;
            throw ValidationError(os.str());
        }
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i == j && series.diag_missing) continue;
                if (!std::isfinite(X(i, j))) {
                    std::ostringstream os;
                    os << "NetworkSeries: non-finite entry at (t=" << t << ", i=" << i
                       << ", j=" << j << ")";
                    throw ValidationError(os.str());
                }
            }
        }
    }
    if (!series.entity_labels.empty() &&
        static_cast<int>(series.entity_labels.size()) != n) {
        throw ValidationError("NetworkSeries: entity label count mismatch");
    }
    if (!series.time_labels.empty() &&
        static_cast<int>(series.time_labels.size()) != T) {
        throw ValidationError("NetworkSeries: time label count mismatch");
    }
}

void validate(const LoadingMatrix& loading) {
    const auto& A = loading.values;
    if (!A.allFinite()) {
        throw ValidationError("LoadingMatrix: non-finite entry");
    }
    switch (loading.mode) {
        case LoadingMode::Orthonormal: {
            Eigen::MatrixXd G = A.transpose() * A;
            G.diagonal().array() -= 1.0;
            if (G.cwiseAbs().maxCoeff() > 1e-10) {
                throw ValidationError("LoadingMatrix: columns not orthonormal");
            }
            break;
        }
        case LoadingMode::ColumnSumOne: {
            Eigen::VectorXd sums = A.colwise().sum();
            if ((sums.array() - 1.0).abs().maxCoeff() > 1e-10) {
                throw ValidationError("LoadingMatrix: column sums differ from 1");
            }
            break;
        }
        case LoadingMode::Raw:
            break;
    }
}

void validate(const SimulationConfig& config) {
    if (config.n < 2) throw ValidationError("SimulationConfig: n must be >= 2");
    if (config.T < 2) throw ValidationError("SimulationConfig: T must be >= 2");
    if (config.r < 1 || config.r >= config.n) {
        throw ValidationError("SimulationConfig: need 1 <= r < n");
    }
    if (static_cast<int>(config.phi_diag.size()) != config.r * config.r) {
        throw ValidationError("SimulationConfig: phi_diag must have r*r entries");
    }
    for (double phi : config.phi_diag) {
        if (!(std::abs(phi) < 1.0)) {
            throw ValidationError("SimulationConfig: AR coefficients must satisfy |phi| < 1");
        }
    }
    if (!(config.noise_offdiag > -1.0 && config.noise_offdiag < 1.0)) {
        throw ValidationError("SimulationConfig: noise correlation must lie in (-1, 1)");
    }
    if (config.delta < 0.0) throw ValidationError("SimulationConfig: delta must be >= 0");
    if (config.burn_in < 0) throw ValidationError("SimulationConfig: burn_in must be >= 0");
    if (config.noise_scale < 0.0) {
        throw ValidationError("SimulationConfig: noise_scale must be >= 0");
    }
}

} // namespace latnet
