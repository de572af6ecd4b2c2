#include "latnet/simulation.hpp"

#include "latnet/estimator.hpp"
#include "latnet/postprocess.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace latnet;
using namespace latnet::testing;

TEST_CASE("SplitMix64 substreams are distinct and reproducible") {
    SplitMix64 a(42, 1), b(42, 1), c(42, 2);
    for (int k = 0; k < 100; ++k) {
        const auto va = a();
        CHECK(va == b());
        CHECK(va != c());
    }
    SplitMix64 u(7);
    double mean = 0.0;
    for (int k = 0; k < 10000; ++k) {
        const double x = u.uniform();
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
        mean += x;
    }
    CHECK(mean / 10000 == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("loading entries respect the signal-strength bound") {
    SimulationConfig config;
    config.n = 30;
    config.T = 10;
    config.burn_in = 5;
    config.seed = 1;

    SUBCASE("delta = 0 gives entries in (-1, 1)") {
        const GeneratedData data = generate(config);
        CHECK(data.loading.values.cwiseAbs().maxCoeff() < 1.0);
        CHECK(data.loading.values.minCoeff() < 0.0); // both signs occur
        CHECK(data.loading.values.maxCoeff() > 0.0);
    }
    SUBCASE("delta = 1 shrinks the range to n^{-1/2}") {
        config.delta = 1.0;
        const GeneratedData data = generate(config);
        const double bound = std::pow(30.0, -0.5);
        CHECK(data.loading.values.cwiseAbs().maxCoeff() < bound);
    }
}

TEST_CASE("factor process matches its transition coefficients") {
    SimulationConfig config;
    config.n = 4;
    config.r = 3;
    config.T = 30000;
    config.seed = 2;
    const GeneratedData data = generate(config);
    REQUIRE(data.factors.T() == 30000);
    // lag-1 autocorrelation of each vec(F) coordinate
    for (int j = 0; j < 3; ++j) {
        for (int i = 0; i < 3; ++i) {
            double s0 = 0.0, s1 = 0.0, m = 0.0;
            for (int t = 0; t < config.T; ++t) m += data.factors.values[t](i, j);
            m /= config.T;
            for (int t = 0; t + 1 < config.T; ++t) {
                const double a = data.factors.values[t](i, j) - m;
                const double b = data.factors.values[t + 1](i, j) - m;
                s1 += a * b;
                s0 += a * a;
            }
            const double phi = config.phi_diag[static_cast<std::size_t>(3 * j + i)];
            CHECK(s1 / s0 == doctest::Approx(phi).epsilon(0.03));
        }
    }
}

TEST_CASE("noise covariance has the Kronecker equicorrelation structure") {
    SimulationConfig config;
    config.n = 4;
    config.r = 1;
    config.phi_diag = {0.5};
    config.T = 20000;
    config.burn_in = 10;
    config.seed = 3;
    // zero loading leaves X_t = E_t
    const GeneratedData data =
        generate_with_loading(config, Eigen::MatrixXd::Zero(4, 1));
    const int n2 = 16;
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n2, n2);
    for (const auto& X : data.series.values) {
        const Eigen::Map<const Eigen::VectorXd> v(X.data(), n2);
        cov += v * v.transpose();
    }
    cov /= static_cast<double>(config.T);
    Eigen::MatrixXd gamma = Eigen::MatrixXd::Constant(4, 4, 0.2);
    gamma.diagonal().setOnes();
    Eigen::MatrixXd expected(n2, n2);
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            expected.block(4 * a, 4 * b, 4, 4) = gamma(a, b) * gamma;
        }
    }
    CHECK((cov - expected).cwiseAbs().maxCoeff() <= 0.05);
}

TEST_CASE("generation is bit-identical for a fixed seed") {
    SimulationConfig config;
    config.n = 8;
    config.T = 40;
    config.seed = 11;
    const GeneratedData a = generate(config);
    const GeneratedData b = generate(config);
    CHECK(a.loading.values == b.loading.values);
    for (int t = 0; t < config.T; ++t) {
        CHECK(a.series.values[t] == b.series.values[t]);
        CHECK(a.factors.values[t] == b.factors.values[t]);
    }
    config.seed = 12;
    const GeneratedData c = generate(config);
    CHECK(a.series.values[0] != c.series.values[0]);
}

TEST_CASE("swapping the loading keeps the factor and noise draws") {
    SimulationConfig config;
    config.n = 6;
    config.T = 30;
    config.seed = 13;
    const GeneratedData base = generate(config);
    const GeneratedData same = generate_with_loading(config, base.loading.values);
    for (int t = 0; t < config.T; ++t) {
        CHECK((base.series.values[t] - same.series.values[t]).cwiseAbs().maxCoeff() <=
              1e-14);
        CHECK(base.factors.values[t] == same.factors.values[t]);
    }
}

TEST_CASE("noiseless draws are recovered to numerical precision") {
    SimulationConfig config;
    config.n = 12;
    config.T = 150;
    config.noise_scale = 0.0;
    config.seed = 14;
    const GeneratedData data = generate(config);
    const EstimationResult fit = fit_symmetric(data.series, 3, 1);
    CHECK(space_distance(fit.loadings_row.values, data.loading.values) <= 1e-6);
}

TEST_CASE("accuracy study improves with the sample size") {
    const std::vector<GridCell> grid = {{0.0, 20, 0.5}, {0.0, 20, 2.0}};
    const MonteCarloReport report = run_table1(grid, 20, 1, 100);
    REQUIRE(report.cells.size() == 2);
    CHECK(report.has_distances);
    CHECK_FALSE(report.has_frequencies);
    CHECK(report.cells[0].cell.T() == 200);
    CHECK(report.cells[1].cell.T() == 800);
    CHECK(report.cells[1].mean_RnC < report.cells[0].mean_RnC);
    for (const CellStats& cell : report.cells) {
        CHECK(cell.mean_RnC > 0.0);
        CHECK(cell.sd_RnC >= 0.0);
        // combined aggregate at least matches the weaker one-sided estimate
        CHECK(cell.mean_RnC <= std::max(cell.mean_R, cell.mean_C) + 0.005);
    }
}

TEST_CASE("rank study recovers the planted rank on an easy cell") {
    const std::vector<GridCell> grid = {{0.0, 20, 2.0}};
    const MonteCarloReport report = run_table2(grid, 10, 1, 0, 200);
    CHECK(report.has_frequencies);
    CHECK(report.cells[0].freq_RnC >= 0.8);
}

TEST_CASE("study runs are deterministic in the seed") {
    const std::vector<GridCell> grid = {{0.0, 20, 0.5}};
    const MonteCarloReport a = run_table1(grid, 4, 1, 9);
    const MonteCarloReport b = run_table1(grid, 4, 1, 9);
    CHECK(a.cells[0].mean_RnC == b.cells[0].mean_RnC);
    CHECK(a.cells[0].sd_R == b.cells[0].sd_R);
}

TEST_CASE("report serialization") {
    MonteCarloReport report;
    report.reps = 2;
    report.has_distances = true;
    CellStats cell;
    cell.cell = {0.5, 20, 1.0};
    cell.mean_R = 0.25;
    cell.mean_C = 0.5;
    cell.mean_RnC = 0.125;
    report.cells = {cell};

    std::ostringstream csv;
    report.write_csv(csv);
    const std::string text = csv.str();
    CHECK(text.find("delta,n,T,metric,estimator,value") == 0);
    CHECK(text.find("0.5,20,400,mean_distance,RnC,0.125") != std::string::npos);

    std::ostringstream json;
    report.write_json(json);
    CHECK(json.str().find("\"n\": 20") != std::string::npos);
}
