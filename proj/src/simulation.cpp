#include "latnet/simulation.hpp"

#include "latnet/covariance.hpp"
#include "latnet/estimator.hpp"
#include "latnet/postprocess.hpp"

#include <cmath>
#include <ostream>
#include <sstream>
#include <thread>

namespace latnet {

namespace {

std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

SplitMix64::SplitMix64(std::uint64_t seed, std::uint64_t stream) {
    state_ = mix64(seed ^ mix64(stream * 0xd6e8feb86659fd93ULL));
}

SplitMix64::result_type SplitMix64::operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double SplitMix64::uniform() {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double SplitMix64::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

double SplitMix64::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
}

namespace {

Eigen::MatrixXd equicorrelation_cholesky(int n, double rho) {
    Eigen::MatrixXd gamma = Eigen::MatrixXd::Constant(n, n, rho);
    gamma.diagonal().setOnes();
    Eigen::LLT<Eigen::MatrixXd> llt(gamma);
    if (llt.info() != Eigen::Success) {
        throw ValidationError("generate: noise covariance is not positive definite");
    }
    return llt.matrixL();
}

GeneratedData generate_impl(const SimulationConfig& config, const Eigen::MatrixXd* given_A) {
    validate(config);
    const int n = config.n;
    const int T = config.T;
    const int r = config.r;

    GeneratedData out;
    out.loading.mode = LoadingMode::Raw;
    if (given_A != nullptr) {
        if (given_A->rows() != n || given_A->cols() != r) {
            throw ValidationError("generate: supplied loading has wrong shape");
        }
        out.loading.values = *given_A;
    } else {
        SplitMix64 rng_loading(config.seed, 1);
        const double bound = std::pow(static_cast<double>(n), -config.delta / 2.0);
        out.loading.values.resize(n, r);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < r; ++j) {
                out.loading.values(i, j) = rng_loading.uniform(-bound, bound);
            }
        }
    }

    SplitMix64 rng_factor(config.seed, 2);
    Eigen::Map<const Eigen::VectorXd> phi(config.phi_diag.data(), r * r);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(r * r);
    for (int t = 0; t < config.burn_in; ++t) {
        for (int k = 0; k < r * r; ++k) f(k) = phi(k) * f(k) + rng_factor.normal();
    }
    out.factors.values.reserve(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) {
        for (int k = 0; k < r * r; ++k) f(k) = phi(k) * f(k) + rng_factor.normal();
        out.factors.values.push_back(
            Eigen::Map<const Eigen::MatrixXd>(f.data(), r, r));
    }

    SplitMix64 rng_noise(config.seed, 3);
    const Eigen::MatrixXd L = equicorrelation_cholesky(n, config.noise_offdiag);
    out.series.diag_missing = false;
    out.series.values.reserve(static_cast<std::size_t>(T));
    const auto& A = out.loading.values;
    Eigen::MatrixXd W(n, n);
    for (int t = 0; t < T; ++t) {
        Eigen::MatrixXd X =
            A * out.factors.values[static_cast<std::size_t>(t)] * A.transpose();
        // Cov(vec(E)) = Gamma2 (x) Gamma1 with E = L1 W L2'
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) W(i, j) = rng_noise.normal();
        }
        if (config.noise_scale != 0.0) {
            X.noalias() += config.noise_scale * (L * W * L.transpose());
        }
        out.series.values.push_back(std::move(X));
    }
    out.series.entity_labels.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        std::ostringstream os;
        os << "e" << (i < 9 ? "0" : "") << (i + 1);
        out.series.entity_labels.push_back(os.str());
    }
    out.series.time_labels.reserve(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) {
        std::ostringstream os;
        os << "t" << t + 1;
        out.series.time_labels.push_back(os.str());
    }
    return out;
}

struct RepOutcome {
    double d_R = 0.0, d_C = 0.0, d_RnC = 0.0;
    bool ok_R = false, ok_C = false, ok_RnC = false;
};

// One draw plus the three aggregate eigensystems; shared by both table runs.
RepOutcome evaluate_rep(const GridCell& cell, int h0, int r_true, int r_max,
                        std::uint64_t rep_seed, bool want_distance, bool want_rank) {
    SimulationConfig config;
    config.n = cell.n;
    config.T = cell.T();
    config.r = r_true;
    config.delta = cell.delta;
    config.seed = rep_seed;
    const GeneratedData data = generate(config);
    const NetworkSeries centered = center(data.series);

    const MMatrix m_col = build_M_fast(centered, h0, MKind::Col);
    const MMatrix m_row = build_M_fast(centered, h0, MKind::Row);
    MMatrix m_comb;
    m_comb.kind = MKind::Combined;
    m_comb.h0 = h0;
    m_comb.values = m_col.values + m_row.values;

    const EigenSystem sys_col = eigen_sym(m_col);
    const EigenSystem sys_row = eigen_sym(m_row);
    const EigenSystem sys_comb = eigen_sym(m_comb);

    RepOutcome outcome;
    if (want_distance) {
        const auto& A = data.loading.values;
        outcome.d_C = space_distance(sys_col.eigenvectors.leftCols(r_true), A);
        outcome.d_R = space_distance(sys_row.eigenvectors.leftCols(r_true), A);
        outcome.d_RnC = space_distance(sys_comb.eigenvectors.leftCols(r_true), A);
    }
    if (want_rank) {
        const int rm = r_max > 0 ? r_max : default_r_max(cell.n);
        outcome.ok_C = select_rank(sys_col.eigenvalues, rm) == r_true;
        outcome.ok_R = select_rank(sys_row.eigenvalues, rm) == r_true;
        outcome.ok_RnC = select_rank(sys_comb.eigenvalues, rm) == r_true;
    }
    return outcome;
}

MonteCarloReport run_study(const std::vector<GridCell>& grid, int reps, int h0, int r_max,
                           std::uint64_t seed, bool want_distance, bool want_rank) {
    if (reps < 1) throw ValidationError("monte carlo: need reps >= 1");
    MonteCarloReport report;
    report.reps = reps;
    report.h0 = h0;
    report.seed = seed;
    report.has_distances = want_distance;
    report.has_frequencies = want_rank;
    const int r_true = report.r_true;

    const unsigned workers =
        std::max(1u, std::min(std::thread::hardware_concurrency(),
                              static_cast<unsigned>(reps)));
    for (std::size_t ci = 0; ci < grid.size(); ++ci) {
        const GridCell& cell = grid[ci];
        std::vector<RepOutcome> outcomes(static_cast<std::size_t>(reps));
        auto worker = [&](unsigned w) {
            for (int rep = static_cast<int>(w); rep < reps;
                 rep += static_cast<int>(workers)) {
                const std::uint64_t rep_seed =
                    SplitMix64(seed, (static_cast<std::uint64_t>(ci) << 32) |
                                         static_cast<std::uint64_t>(rep))();
                outcomes[static_cast<std::size_t>(rep)] = evaluate_rep(
                    cell, h0, r_true, r_max, rep_seed, want_distance, want_rank);
            }
        };
        if (workers == 1) {
            worker(0);
        } else {
            std::vector<std::thread> pool;
            for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker, w);
            for (auto& th : pool) th.join();
        }

        CellStats stats;
        stats.cell = cell;
        auto accumulate = [&](auto select_d, double& mean, double& sd) {
            double sum = 0.0;
            for (const auto& o : outcomes) sum += select_d(o);
            mean = sum / reps;
            double ss = 0.0;
            for (const auto& o : outcomes) {
                const double d = select_d(o) - mean;
                ss += d * d;
            }
            sd = reps > 1 ? std::sqrt(ss / (reps - 1)) : 0.0;
        };
        if (want_distance) {
            accumulate([](const RepOutcome& o) { return o.d_R; }, stats.mean_R, stats.sd_R);
            accumulate([](const RepOutcome& o) { return o.d_C; }, stats.mean_C, stats.sd_C);
            accumulate([](const RepOutcome& o) { return o.d_RnC; }, stats.mean_RnC,
                       stats.sd_RnC);
        }
        if (want_rank) {
            int cR = 0, cC = 0, cRnC = 0;
            for (const auto& o : outcomes) {
                cR += o.ok_R ? 1 : 0;
                cC += o.ok_C ? 1 : 0;
                cRnC += o.ok_RnC ? 1 : 0;
            }
            stats.freq_R = static_cast<double>(cR) / reps;
            stats.freq_C = static_cast<double>(cC) / reps;
            stats.freq_RnC = static_cast<double>(cRnC) / reps;
        }
        report.cells.push_back(stats);
    }
    return report;
}

} // namespace

GeneratedData generate(const SimulationConfig& config) {
    return generate_impl(config, nullptr);
}

GeneratedData generate_with_loading(const SimulationConfig& config,
                                    const Eigen::MatrixXd& loading) {
    return generate_impl(config, &loading);
}

MonteCarloReport run_table1(const std::vector<GridCell>& grid, int reps, int h0,
                            std::uint64_t seed) {
    if (reps < 2) throw ValidationError("run_table1: need reps >= 2");
    return run_study(grid, reps, h0, 0, seed, /*want_distance=*/true, /*want_rank=*/false);
}

MonteCarloReport run_table2(const std::vector<GridCell>& grid, int reps, int h0,
                            int r_max, std::uint64_t seed) {
    return run_study(grid, reps, h0, r_max, seed, /*want_distance=*/false,
                     /*want_rank=*/true);
}

void MonteCarloReport::write_csv(std::ostream& os) const {
    os << "delta,n,T,metric,estimator,value\n";
    auto row = [&](const CellStats& c, const char* metric, const char* est, double v) {
        os << c.cell.delta << "," << c.cell.n << "," << c.cell.T() << "," << metric << ","
           << est << "," << v << "\n";
    };
    for (const auto& c : cells) {
        if (has_distances) {
            row(c, "mean_distance", "R", c.mean_R);
            row(c, "mean_distance", "C", c.mean_C);
            row(c, "mean_distance", "RnC", c.mean_RnC);
            row(c, "sd_distance", "R", c.sd_R);
            row(c, "sd_distance", "C", c.sd_C);
            row(c, "sd_distance", "RnC", c.sd_RnC);
        }
        if (has_frequencies) {
            row(c, "rank_freq", "R", c.freq_R);
            row(c, "rank_freq", "C", c.freq_C);
            row(c, "rank_freq", "RnC", c.freq_RnC);
        }
    }
}

void MonteCarloReport::write_json(std::ostream& os) const {
    os << "{\n  \"reps\": " << reps << ",\n  \"h0\": " << h0 << ",\n  \"r_true\": " << r_true
       << ",\n  \"seed\": " << seed << ",\n  \"cells\": [\n";
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& c = cells[i];
        os << "    {\"delta\": " << c.cell.delta << ", \"n\": " << c.cell.n
           << ", \"T\": " << c.cell.T();
        if (has_distances) {
            os << ", \"mean_R\": " << c.mean_R << ", \"sd_R\": " << c.sd_R
               << ", \"mean_C\": " << c.mean_C << ", \"sd_C\": " << c.sd_C
               << ", \"mean_RnC\": " << c.mean_RnC << ", \"sd_RnC\": " << c.sd_RnC;
        }
        if (has_frequencies) {
            os << ", \"freq_R\": " << c.freq_R << ", \"freq_C\": " << c.freq_C
               << ", \"freq_RnC\": " << c.freq_RnC;
        }
        os << "}" << (i + 1 < cells.size() ? "," : "") << "\n";
    }
    os << "  ]\n}\n";
}

} // namespace latnet
