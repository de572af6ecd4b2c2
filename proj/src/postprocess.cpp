#include "latnet/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

namespace latnet {

namespace {

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& A) {
    const Eigen::Index r = A.cols();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> rank_check(A);
    if (rank_check.rank() < r) {
        throw ValidationError("space_distance: rank-deficient input");
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
    return qr.householderQ() * Eigen::MatrixXd::Identity(A.rows(), r);
}

double round_half_away(double x) {
    return x >= 0.0 ? std::floor(x + 0.5) : std::ceil(x - 0.5);
}

} // namespace

double space_distance(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    if (A.rows() != B.rows() || A.cols() != B.cols()) {
        throw ValidationError("space_distance: shape mismatch");
    }
    if (A.cols() < 1) throw ValidationError("space_distance: empty input");
    const Eigen::MatrixXd Qa = orthonormal_basis(A);
    const Eigen::MatrixXd Qb = orthonormal_basis(B);
    // tr(P_A P_B) = ||Qa' Qb||_F^2
    const double overlap = (Qa.transpose() * Qb).squaredNorm();
    const double r = static_cast<double>(A.cols());
    return std::sqrt(std::clamp(1.0 - overlap / r, 0.0, 1.0));
}

double varimax_criterion(const Eigen::MatrixXd& A) {
    double crit = 0.0;
    for (Eigen::Index k = 0; k < A.cols(); ++k) {
        const Eigen::ArrayXd sq = A.col(k).array().square();
        const double mean_sq = sq.mean();
        crit += sq.square().mean() - mean_sq * mean_sq;
    }
    return crit;
}

VarimaxResult varimax(const LoadingMatrix& loading) {
    const Eigen::MatrixXd& A0 = loading.values;
    const Eigen::Index n = A0.rows();
    const Eigen::Index r = A0.cols();
    VarimaxResult out;
    out.rotation = Eigen::MatrixXd::Identity(r, r);
    out.rotated = loading;
    if (r < 2) return out;

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> rank_check(A0);
    if (rank_check.rank() < r) {
        throw ValidationError("varimax: loading matrix is rank deficient");
    }

    Eigen::MatrixXd A = A0;
    double crit = varimax_criterion(A);
    for (int sweep = 0; sweep < 100; ++sweep) {
        for (Eigen::Index p = 0; p + 1 < r; ++p) {
            for (Eigen::Index q = p + 1; q < r; ++q) {
                const Eigen::ArrayXd x = A.col(p).array();
                const Eigen::ArrayXd y = A.col(q).array();
                const Eigen::ArrayXd u = x.square() - y.square();
                const Eigen::ArrayXd v = 2.0 * x * y;
                const double su = u.sum();
                const double sv = v.sum();
                const double num = 2.0 * (static_cast<double>(n) * (u * v).sum() - su * sv);
                const double den = static_cast<double>(n) * (u.square() - v.square()).sum() -
                                   (su * su - sv * sv);
                if (num == 0.0 && den == 0.0) continue;
                const double theta = 0.25 * std::atan2(num, den);
                if (std::abs(theta) < 1e-14) continue;
                const double c = std::cos(theta);
                const double s = std::sin(theta);
                const Eigen::VectorXd xp = c * A.col(p) + s * A.col(q);
                const Eigen::VectorXd yq = -s * A.col(p) + c * A.col(q);
                A.col(p) = xp;
                A.col(q) = yq;
                const Eigen::VectorXd rp = c * out.rotation.col(p) + s * out.rotation.col(q);
                const Eigen::VectorXd rq = -s * out.rotation.col(p) + c * out.rotation.col(q);
                out.rotation.col(p) = rp;
                out.rotation.col(q) = rq;
            }
        }
        out.sweeps = sweep + 1;
        const double new_crit = varimax_criterion(A);
        if (new_crit - crit < 1e-10) {
            crit = std::max(crit, new_crit);
            break;
        }
        crit = new_crit;
    }
    out.rotated.values = A;
    out.rotated.mode =
        loading.mode == LoadingMode::Orthonormal ? LoadingMode::Orthonormal : LoadingMode::Raw;
    return out;
}

std::pair<LoadingMatrix, FactorSeries> normalize_columns(const LoadingMatrix& loading,
                                                         const FactorSeries& factors) {
    const Eigen::VectorXd sums = loading.values.colwise().sum();
    for (Eigen::Index k = 0; k < sums.size(); ++k) {
        if (std::abs(sums(k)) <= 1e-8) {
            throw ValidationError("normalize_columns: column " + std::to_string(k) +
                                  " sums to (near) zero");
        }
    }
    LoadingMatrix scaled;
    scaled.values = loading.values * sums.cwiseInverse().asDiagonal();
    scaled.mode = LoadingMode::ColumnSumOne;
    FactorSeries adjusted;
    adjusted.values.reserve(factors.values.size());
    for (const auto& F : factors.values) {
        adjusted.values.push_back(sums.asDiagonal() * F * sums.asDiagonal());
    }
    return {std::move(scaled), std::move(adjusted)};
}

NormalizedPair normalize_columns(const LoadingMatrix& loadings_row,
                                 const LoadingMatrix& loadings_col,
                                 const FactorSeries& factors) {
    const Eigen::VectorXd s1 = loadings_row.values.colwise().sum();
    const Eigen::VectorXd s2 = loadings_col.values.colwise().sum();
    for (Eigen::Index k = 0; k < s1.size(); ++k) {
        if (std::abs(s1(k)) <= 1e-8) {
            throw ValidationError("normalize_columns: row-loading column " +
                                  std::to_string(k) + " sums to (near) zero");
        }
    }
    for (Eigen::Index k = 0; k < s2.size(); ++k) {
        if (std::abs(s2(k)) <= 1e-8) {
            throw ValidationError("normalize_columns: col-loading column " +
                                  std::to_string(k) + " sums to (near) zero");
        }
    }
    NormalizedPair out;
    out.loadings_row.values = loadings_row.values * s1.cwiseInverse().asDiagonal();
    out.loadings_row.mode = LoadingMode::ColumnSumOne;
    out.loadings_col.values = loadings_col.values * s2.cwiseInverse().asDiagonal();
    out.loadings_col.mode = LoadingMode::ColumnSumOne;
    out.factors.values.reserve(factors.values.size());
    for (const auto& F : factors.values) {
        out.factors.values.push_back(s1.asDiagonal() * F * s2.asDiagonal());
    }
    return out;
}

ClipReport clip_negatives(const LoadingMatrix& loading) {
    ClipReport report;
    report.clipped = loading;
    report.clipped.mode = LoadingMode::Raw;
    auto& A = report.clipped.values;
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
        bool any_positive = false;
        for (Eigen::Index i = 0; i < A.rows(); ++i) {
            if (A(i, j) < 0.0) {
                ++report.clipped_count;
                report.clipped_mass += -A(i, j);
                A(i, j) = 0.0;
            } else if (A(i, j) > 0.0) {
                any_positive = true;
            }
        }
        if (!any_positive) report.zeroed_columns.push_back(static_cast<int>(j));
    }
    return report;
}

std::vector<AlignmentPlan> align_windows(const std::vector<LoadingMatrix>& loadings,
                                         const std::vector<int>& anchors) {
    std::vector<AlignmentPlan> plans;
    plans.reserve(loadings.size());
    for (const auto& loading : loadings) {
        const auto& A = loading.values;
        const int r = static_cast<int>(A.cols());
        if (static_cast<int>(anchors.size()) >= r) {
            throw ValidationError("align_windows: need fewer anchors than columns");
        }
        AlignmentPlan plan;
        std::vector<bool> taken(static_cast<std::size_t>(r), false);
        for (std::size_t k = 0; k < anchors.size(); ++k) {
            const int entity = anchors[k];
            if (entity < 0 || entity >= A.rows()) {
                throw ValidationError("align_windows: anchor index out of range");
            }
            int best = -1;
            double best_value = -std::numeric_limits<double>::infinity();
            for (int c = 0; c < r; ++c) {
                if (taken[static_cast<std::size_t>(c)]) continue;
                if (A(entity, c) > best_value) {
                    best_value = A(entity, c);
                    best = c;
                }
            }
            taken[static_cast<std::size_t>(best)] = true;
            plan.perm.push_back(best);
            plan.anchor_slots.emplace_back(static_cast<int>(k), entity);
        }
        for (int c = 0; c < r; ++c) {
            if (!taken[static_cast<std::size_t>(c)]) plan.perm.push_back(c);
        }
        plans.push_back(std::move(plan));
    }
    return plans;
}

Eigen::MatrixXd apply_plan(const Eigen::MatrixXd& loading, const AlignmentPlan& plan) {
    Eigen::MatrixXd out(loading.rows(), loading.cols());
    for (std::size_t slot = 0; slot < plan.perm.size(); ++slot) {
        out.col(static_cast<Eigen::Index>(slot)) =
            loading.col(plan.perm[slot]);
    }
    return out;
}

SimplifiedLoading simplify_loadings(const LoadingMatrix& loading) {
    const auto& A = loading.values;
    if ((A.array() < 0.0).any()) {
        throw ValidationError("simplify_loadings: input must be nonnegative");
    }
    SimplifiedLoading out;
    out.values.resize(A.rows(), A.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        for (Eigen::Index j = 0; j < A.cols(); ++j) {
            out.values(i, j) = round_half_away(10.0 * A(i, j));
        }
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (Eigen::Index i = 0; i < A.rows(); ++i) {
            auto row = out.values.row(i);
            const double mx = row.maxCoeff();
            if (mx <= 0.0) continue;
            // zero non-dominating entries: more than 0.5 below the row maximum
            for (Eigen::Index j = 0; j < row.size(); ++j) {
                if (row(j) > 0.0 && mx - row(j) > 0.5) {
                    row(j) = 0.0;
                    changed = true;
                }
            }
            const double sum = row.sum();
            if (sum > 0.0) row /= sum;
        }
        if (changed) ++out.iterations;
    }
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        if (out.values.row(i).sum() <= 0.0) {
            out.values.row(i).setZero();
            out.dropped_rows.push_back(static_cast<int>(i));
        }
    }
    return out;
}

Dendrogram cluster_entities(const LoadingMatrix& loading,
                            const std::vector<std::string>& labels) {
    const auto& A = loading.values;
    const int n = static_cast<int>(A.rows());
    if (n < 1) throw ValidationError("cluster_entities: empty loading");
    Dendrogram dendro;
    dendro.leaf_labels = labels;
    if (dendro.leaf_labels.empty()) {
        for (int i = 0; i < n; ++i) dendro.leaf_labels.push_back(std::to_string(i));
    }

    struct Cluster {
        int id;
        int min_leaf;
        std::vector<int> members;
    };
    std::vector<Cluster> active;
    for (int i = 0; i < n; ++i) active.push_back({i, i, {i}});

    Eigen::MatrixXd dist(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            dist(i, j) = (A.row(i) - A.row(j)).norm();
        }
    }

    auto complete_linkage = [&](const Cluster& a, const Cluster& b) {
        double d = 0.0;
        for (int i : a.members) {
            for (int j : b.members) d = std::max(d, dist(i, j));
        }
        return d;
    };

    for (int step = 0; step < n - 1; ++step) {
        std::size_t best_a = 0, best_b = 1;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a + 1 < active.size(); ++a) {
            for (std::size_t b = a + 1; b < active.size(); ++b) {
                const double d = complete_linkage(active[a], active[b]);
                const bool better =
                    d < best_d ||
                    (d == best_d &&
                     std::min(active[a].min_leaf, active[b].min_leaf) <
                         std::min(active[best_a].min_leaf, active[best_b].min_leaf));
                if (better) {
                    best_d = d;
                    best_a = a;
                    best_b = b;
                }
            }
        }
        Cluster merged;
        merged.id = n + step;
        merged.min_leaf = std::min(active[best_a].min_leaf, active[best_b].min_leaf);
        merged.members = active[best_a].members;
        merged.members.insert(merged.members.end(), active[best_b].members.begin(),
                              active[best_b].members.end());
        dendro.merges.push_back({active[best_a].id, active[best_b].id, best_d});
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_b));
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_a));
        active.push_back(std::move(merged));
    }
    return dendro;
}

std::vector<int> Dendrogram::cut(int k) const {
    const int n = static_cast<int>(merges.size()) + 1;
    if (k < 1 || k > n) {
        throw ValidationError("Dendrogram::cut: k must lie in [1, n]");
    }
    // union-find over the first n-k merges
    std::vector<int> parent(static_cast<std::size_t>(2 * n - 1));
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            x = parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
        }
        return x;
    };
    for (int step = 0; step < n - k; ++step) {
        const auto& m = merges[static_cast<std::size_t>(step)];
        const int target = n + step;
        parent[static_cast<std::size_t>(find(m.left))] = target;
        parent[static_cast<std::size_t>(find(m.right))] = target;
    }
    std::vector<int> roots(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) roots[static_cast<std::size_t>(i)] = find(i);
    std::vector<int> labels(static_cast<std::size_t>(n), -1);
    int next = 0;
    std::vector<std::pair<int, int>> seen; // (root, label)
    for (int i = 0; i < n; ++i) {
        int label = -1;
        for (const auto& [root, lab] : seen) {
            if (root == roots[static_cast<std::size_t>(i)]) {
                label = lab;
                break;
            }
        }
        if (label < 0) {
            label = next++;
            seen.emplace_back(roots[static_cast<std::size_t>(i)], label);
        }
        labels[static_cast<std::size_t>(i)] = label;
    }
    return labels;
}

} // namespace latnet
