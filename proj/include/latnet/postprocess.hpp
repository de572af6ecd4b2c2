#pragma once

#include "latnet/types.hpp"

#include <utility>

namespace latnet {

/// Normalized distance between the column spaces of two n x r' matrices:
///   D(A, B) = sqrt(1 - tr(P_A P_B) / r')
/// with P the orthogonal projector onto the column space. 0 for equal spaces,
/// 1 for orthogonal ones. Throws on rank-deficient input.
double space_distance(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

/// Varimax criterion: sum over columns of the variance of the squared loadings.
double varimax_criterion(const Eigen::MatrixXd& A);

struct VarimaxResult {
    LoadingMatrix rotated;
    Eigen::MatrixXd rotation; // orthonormal r x r; rotated = A * rotation
    int sweeps = 0;
};

/// Orthogonal Varimax rotation by pairwise planar rotations, swept until the
/// criterion improves by less than 1e-10 or 100 sweeps. r = 1 returns the
/// identity rotation.
VarimaxResult varimax(const LoadingMatrix& loading);

/// Rescales each loading column to sum to one and compensates the factor
/// series so the fitted values are unchanged (F -> D F D for the symmetric
/// model). Throws if a column sum is within 1e-8 of zero.
std::pair<LoadingMatrix, FactorSeries> normalize_columns(const LoadingMatrix& loading,
                                                         const FactorSeries& factors);

/// Two-loading version: A1 -> A1 D1^-1, A2 -> A2 D2^-1, F -> D1 F D2.
struct NormalizedPair {
    LoadingMatrix loadings_row;
    LoadingMatrix loadings_col;
    FactorSeries factors;
};
NormalizedPair normalize_columns(const LoadingMatrix& loadings_row,
                                 const LoadingMatrix& loadings_col,
                                 const FactorSeries& factors);

struct ClipReport {
    LoadingMatrix clipped;
    int clipped_count = 0;
    double clipped_mass = 0.0;          // total absolute value removed
    std::vector<int> zeroed_columns;    // columns that became entirely zero
};

/// Entrywise max(., 0), for presentation outputs only.
ClipReport clip_negatives(const LoadingMatrix& loading);

/// Column permutation for one window: perm[slot] is the source column placed
/// at that slot.
struct AlignmentPlan {
    std::vector<int> perm;
    std::vector<std::pair<int, int>> anchor_slots; // (slot, entity index)
};

/// Greedy per-window alignment: slot k receives the unassigned column on which
/// anchor k loads the most; leftover columns keep their relative order.
std::vector<AlignmentPlan> align_windows(const std::vector<LoadingMatrix>& loadings,
                                         const std::vector<int>& anchors);

Eigen::MatrixXd apply_plan(const Eigen::MatrixXd& loading, const AlignmentPlan& plan);

struct SimplifiedLoading {
    Eigen::MatrixXd values;       // nonnegative, rows sum to 1 or are all zero
    std::vector<int> dropped_rows;
    int iterations = 0;
};

/// Sparsifies a column-sum-one loading for display: round 10*A, zero per-row
/// entries more than 0.5 below the row maximum, renormalize the row, repeat to
/// a fixed point.
SimplifiedLoading simplify_loadings(const LoadingMatrix& loading);

struct Dendrogram {
    struct Merge {
        int left;      // cluster id (leaves are 0..n-1, merge k creates id n+k)
        int right;
        double height;
    };
    std::vector<Merge> merges; // n-1 entries, heights non-decreasing
    std::vector<std::string> leaf_labels;

    /// Group labels (0..k-1) from cutting the tree at k clusters; groups are
    /// numbered by their smallest member index.
    std::vector<int> cut(int k) const;
};

/// Agglomerative clustering of loading rows: Euclidean distance, complete
/// linkage, ties broken by smallest leaf index.
Dendrogram cluster_entities(const LoadingMatrix& loading,
                            const std::vector<std::string>& labels);

} // namespace latnet
