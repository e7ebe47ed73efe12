#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "treecascade/graph.hpp"
#include "treecascade/regression.hpp"

namespace treecascade {

/// Zero-mean Gaussian given by a symmetric positive-definite covariance.
class GaussianSummary {
public:
    /// Throws InvalidInputError if not square or not symmetric, and
    /// SingularityError if the Cholesky factorization fails.
    explicit GaussianSummary(Eigen::MatrixXd covariance);

    std::size_t dimension() const { return static_cast<std::size_t>(covariance_.rows()); }
    const Eigen::MatrixXd& covariance() const { return covariance_; }
    double correlation(Vertex i, Vertex j) const;

private:
    Eigen::MatrixXd covariance_;
};

/// Mutual information of components i and j: -1/2 log(1 - rho_ij^2).
double pairwise_mi_weight(const GaussianSummary& s, Vertex i, Vertex j);

/// Maps a squared correlation w in [0, 1) to -1/2 log(1 - w).
double mi_from_squared_correlation(double w);

/// Maximum spanning tree of pairwise mutual informations.
MstResult chow_liu_tree(const GaussianSummary& s);

struct EdgeWeightPair {
    Edge edge;
    double squared_correlation = 0.0;
    double mutual_information = 0.0;
};

struct CorrespondenceReport {
    MstResult chow_liu;
    FitResult cascade;
    bool trees_equal = false;
    // Pairs listed for the Chow-Liu tree's edges.
    std::vector<EdgeWeightPair> edge_weights;
    // Sorting the listed edges by either weight gives the same order.
    bool monotone = true;
    bool tie_detected() const { return !chow_liu.is_unique || !cascade.tree_unique; }
};

/// Computes both trees from the same covariance and compares them.
CorrespondenceReport correspondence_check(const GaussianSummary& s);

}  // namespace treecascade
