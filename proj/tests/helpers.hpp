#pragma once

#include "latnet/simulation.hpp"
#include "latnet/types.hpp"

#include <string>
#include <vector>

namespace latnet::testing {

inline NetworkSeries make_series(std::vector<Eigen::MatrixXd> slices) {
    NetworkSeries series;
    series.values = std::move(slices);
    return series;
}

inline NetworkSeries random_series(int n, int T, std::uint64_t seed) {
    SplitMix64 rng(seed);
    NetworkSeries series;
    series.values.reserve(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) {
        Eigen::MatrixXd X(n, n);
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) X(i, j) = rng.normal();
        }
        series.values.push_back(std::move(X));
    }
    return series;
}

inline Eigen::MatrixXd random_orthonormal(int n, int r, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Eigen::MatrixXd A(n, r);
    for (int j = 0; j < r; ++j) {
        for (int i = 0; i < n; ++i) A(i, j) = rng.normal();
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
    return qr.householderQ() * Eigen::MatrixXd::Identity(n, r);
}

// Noiseless rank-r series X_t = Q Z_t Q' with persistent AR(1) factors.
inline NetworkSeries noiseless_series(const Eigen::MatrixXd& Q, int T, std::uint64_t seed,
                                      double phi = 0.8) {
    SplitMix64 rng(seed);
    const int r = static_cast<int>(Q.cols());
    Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(r, r);
    NetworkSeries series;
    for (int t = 0; t < T + 50; ++t) {
        for (int j = 0; j < r; ++j) {
            for (int i = 0; i < r; ++i) Z(i, j) = phi * Z(i, j) + rng.normal();
        }
        if (t >= 50) series.values.push_back(Q * Z * Q.transpose());
    }
    return series;
}

// Independent loop oracle for the lag-h column auto-cross-covariance.
inline Eigen::MatrixXd omega_col_oracle(const NetworkSeries& series, int h, int i, int j) {
    const int n = series.n();
    const int T = series.T();
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(n, n);
    for (int t = 0; t + h < T; ++t) {
        for (int a = 0; a < n; ++a) {
            for (int c = 0; c < n; ++c) {
                omega(a, c) += series.values[static_cast<std::size_t>(t)](a, i) *
                               series.values[static_cast<std::size_t>(t + h)](c, j);
            }
        }
    }
    return omega / static_cast<double>(T - h);
}

inline Eigen::MatrixXd omega_row_oracle(const NetworkSeries& series, int h, int i, int j) {
    const int n = series.n();
    const int T = series.T();
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(n, n);
    for (int t = 0; t + h < T; ++t) {
        for (int a = 0; a < n; ++a) {
            for (int c = 0; c < n; ++c) {
                omega(a, c) += series.values[static_cast<std::size_t>(t)](i, a) *
                               series.values[static_cast<std::size_t>(t + h)](j, c);
            }
        }
    }
    return omega / static_cast<double>(T - h);
}

} // namespace latnet::testing
