#include "latnet/covariance.hpp"

#include "latnet/estimator.hpp"
#include "latnet/postprocess.hpp"

#include "helpers.hpp"

#include <doctest.h>

using namespace latnet;
using namespace latnet::testing;

TEST_CASE("centering removes constants") {
    NetworkSeries series;
    series.values.assign(4, Eigen::MatrixXd::Constant(3, 3, 7.5));
    const NetworkSeries centered = center(series);
    for (const auto& X : centered.values) {
        CHECK(X.cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-15));
    }
    CHECK(is_centered(centered));
}

TEST_CASE("centering is idempotent") {
    NetworkSeries series = center(random_series(4, 9, 11));
    const NetworkSeries twice = center(series);
    for (int t = 0; t < series.T(); ++t) {
        CHECK((series.values[t] - twice.values[t]).cwiseAbs().maxCoeff() <= 1e-15);
    }
}

TEST_CASE("two-point centering") {
    NetworkSeries series;
    series.values = {Eigen::MatrixXd::Constant(2, 2, 1.0),
                     Eigen::MatrixXd::Constant(2, 2, 3.0)};
    const NetworkSeries centered = center(series);
    CHECK(centered.values[0](0, 0) == doctest::Approx(-1.0));
    CHECK(centered.values[1](1, 1) == doctest::Approx(1.0));
}

TEST_CASE("centering leaves a masked diagonal untouched") {
    NetworkSeries series = random_series(3, 5, 12);
    series.diag_missing = true;
    for (auto& X : series.values) X.diagonal().setConstant(99.0);
    const NetworkSeries centered = center(series);
    for (const auto& X : centered.values) {
        CHECK(X(0, 0) == 99.0);
        CHECK(X(2, 2) == 99.0);
    }
}

TEST_CASE("omega on the zero series vanishes") {
    NetworkSeries series;
    series.values.assign(5, Eigen::MatrixXd::Zero(3, 3));
    CHECK(omega_col(series, 1, 0, 2).cwiseAbs().maxCoeff() == 0.0);
    CHECK(omega_row(series, 2, 1, 1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("omega_col matches direct evaluation on a hand-enumerable case") {
    NetworkSeries series;
    Eigen::MatrixXd X0(2, 2), X1(2, 2), X2(2, 2);
    X0 << 1, -1, 0, 2;
    X1 << 0, 1, 1, -1;
    X2 << 2, 0, -1, 1;
    series.values = {X0, X1, X2};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const Eigen::MatrixXd expected = omega_col_oracle(series, 1, i, j);
            CHECK((omega_col(series, 1, i, j) - expected).cwiseAbs().maxCoeff() <= 1e-14);
        }
    }
    // spot value: omega_col(1,0,0)(0,0) = (X0(0,0)X1(0,0) + X1(0,0)X2(0,0)) / 2 = 0
    CHECK(omega_col(series, 1, 0, 0)(0, 0) == doctest::Approx(0.0));
}

TEST_CASE("orthogonal consecutive columns kill the outer-product sum") {
    // column 0 alternates between two orthogonal supports, so every lag-1
    // outer product has a zero factor
    NetworkSeries series = random_series(3, 6, 404);
    for (int t = 0; t < series.T(); ++t) {
        if (t % 2 == 0) series.values[t].col(0).setZero();
    }
    for (int t = 0; t + 1 < series.T(); ++t) {
        CHECK(series.values[t].col(0).dot(series.values[t + 1].col(0)) == 0.0);
    }
    Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(3, 3);
    for (int t = 0; t + 1 < series.T(); ++t) {
        expected += series.values[t].col(0) * series.values[t + 1].col(0).transpose();
    }
    CHECK(expected.cwiseAbs().maxCoeff() == 0.0);
    CHECK(omega_col(series, 1, 0, 0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("omega_row equals omega_col on symmetric slices") {
    NetworkSeries series = random_series(4, 7, 21);
    for (auto& X : series.values) X = (X + X.transpose()).eval();
    for (int h : {1, 2}) {
        CHECK((omega_row(series, h, 1, 3) - omega_col(series, h, 1, 3))
                  .cwiseAbs()
                  .maxCoeff() <= 1e-13);
    }
}

TEST_CASE("omega_row matches its loop oracle") {
    const NetworkSeries series = center(random_series(3, 6, 33));
    for (int h : {1, 2, 3}) {
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                CHECK((omega_row(series, h, i, j) - omega_row_oracle(series, h, i, j))
                          .cwiseAbs()
                          .maxCoeff() <= 1e-13);
            }
        }
    }
}

TEST_CASE("lag range is enforced") {
    NetworkSeries series = random_series(3, 5, 8);
    CHECK_THROWS_AS(omega_col(series, 0, 0, 0), ValidationError);
    CHECK_THROWS_AS(omega_col(series, 4, 0, 0), ValidationError);
    CHECK_THROWS_AS(build_M(series, 5, MKind::Combined), ValidationError);
}

TEST_CASE("M of the zero series is zero with zero spectrum") {
    NetworkSeries series;
    series.values.assign(6, Eigen::MatrixXd::Zero(4, 4));
    const MMatrix M = build_M(series, 2, MKind::Combined);
    CHECK(M.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("noiseless rank-r series: top eigenspace equals span(Q)") {
    const Eigen::MatrixXd Q = random_orthonormal(8, 3, 5);
    const NetworkSeries series = center(noiseless_series(Q, 60, 17));
    const MMatrix M = build_M(series, 1, MKind::Combined);
    const EigenSystem sys = eigen_sym(M);
    // numerical rank r
    CHECK(sys.eigenvalues(2) > 1e-8 * sys.eigenvalues(0));
    CHECK(sys.eigenvalues(3) <= 1e-10 * sys.eigenvalues(0));
    CHECK(space_distance(sys.eigenvectors.leftCols(3), Q) <= 1e-6);
}

TEST_CASE("fast path equals reference on a random instance") {
    const NetworkSeries series = center(random_series(4, 12, 99));
    for (MKind kind : {MKind::Col, MKind::Row, MKind::Combined}) {
        const Eigen::MatrixXd ref = build_M(series, 2, kind).values;
        const Eigen::MatrixXd fast = build_M_fast(series, 2, kind).values;
        CHECK((ref - fast).norm() <= 1e-10 * ref.norm());
    }
}

TEST_CASE("M invariants across random instances") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        SplitMix64 rng(seed, 77);
        const int n = 2 + static_cast<int>(rng() % 7);
        const int T = 5 + static_cast<int>(rng() % 46);
        const int h0 = 1 + static_cast<int>(rng() % std::min(3, T - 2));
        const NetworkSeries series = center(random_series(n, T, seed + 1000));

        const MMatrix col = build_M(series, h0, MKind::Col);
        const MMatrix row = build_M(series, h0, MKind::Row);
        const MMatrix comb = build_M(series, h0, MKind::Combined);

        // symmetry
        const double scale = comb.values.cwiseAbs().maxCoeff();
        CHECK((comb.values - comb.values.transpose()).cwiseAbs().maxCoeff() <=
              1e-10 * scale);
        // additivity, same summation order
        CHECK((comb.values - (col.values + row.values)).cwiseAbs().maxCoeff() == 0.0);
        // PSD up to clamping
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(comb.values);
        CHECK(es.eigenvalues().minCoeff() >= -1e-10 * es.eigenvalues().maxCoeff());
        // fast path equivalence
        const MMatrix fast = build_M_fast(series, h0, MKind::Combined);
        CHECK((fast.values - comb.values).norm() <= 1e-10 * comb.values.norm());
    }
}

TEST_CASE("transpose duality: col of transposed series equals row of original") {
    const NetworkSeries series = center(random_series(5, 14, 123));
    NetworkSeries transposed = series;
    for (auto& X : transposed.values) X.transposeInPlace();
    const Eigen::MatrixXd col_t = build_M(transposed, 2, MKind::Col).values;
    const Eigen::MatrixXd row_o = build_M(series, 2, MKind::Row).values;
    CHECK((col_t - row_o).cwiseAbs().maxCoeff() <= 1e-12 * row_o.cwiseAbs().maxCoeff());
}
