#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "treecascade/cascade_model.hpp"
#include "treecascade/dataset.hpp"
#include "treecascade/graph.hpp"

namespace treecascade {

enum class CorrelationSource { population, empirical };

/// Pairwise correlations E(x_i x_j) of a standardized vector: symmetric, unit
/// diagonal, off-diagonal entries in [-1, 1].
class CorrelationSummary {
public:
    /// Validates symmetry (exact), unit diagonal (exact) and range.
    static CorrelationSummary from_correlation(Eigen::MatrixXd corr,
                                               CorrelationSource source = CorrelationSource::population,
                                               std::size_t sample_count = 0);

    /// Normalizes a covariance matrix: corr_ij = S_ij / sqrt(S_ii S_jj).
    static CorrelationSummary from_covariance(const Eigen::MatrixXd& covariance,
                                              CorrelationSource source = CorrelationSource::population,
                                              std::size_t sample_count = 0);

    /// Pearson correlations of the dataset's columns. Standardizes first if needed.
    static CorrelationSummary from_dataset(const Dataset& data);

    std::size_t dimension() const { return static_cast<std::size_t>(corr_.rows()); }
    double operator()(Vertex i, Vertex j) const {
        return corr_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    const Eigen::MatrixXd& matrix() const { return corr_; }
    CorrelationSource source() const { return source_; }
    std::size_t sample_count() const { return sample_count_; }

    /// W_ij = corr_ij^2.
    WeightedGraph squared_weights() const;

private:
    CorrelationSummary(Eigen::MatrixXd corr, CorrelationSource source, std::size_t n)
        : corr_(std::move(corr)), source_(source), sample_count_(n) {}

    Eigen::MatrixXd corr_;
    CorrelationSource source_;
    std::size_t sample_count_;
};

enum class RootSource { hint, default_vertex };

struct FitResult {
    Tree tree;
    Vertex root = 0;
    RootSource root_source = RootSource::default_vertex;
    // Indexed by vertex; the root slot is 0.
    std::vector<double> coeffs;
    // E||Ax - x||^2 at the fitted coefficients.
    double objective = 0.0;
    // Squared correlations aligned with tree.edges().
    std::vector<double> weights;
    bool tree_unique = true;
    std::vector<std::string> names;
    // Correlation matrix the fit was computed from, when retained.
    std::optional<Eigen::MatrixXd> correlation;

    RootedTree rooted_tree() const { return RootedTree(tree, root); }

    /// The fitted cascade as a unit-variance model (D_ii = 1 - coeff_i^2).
    CascadeModel model() const;

    /// d minus the sum of edge weights.
    double identity_objective() const;
};

/// A*(i, pa(i)) = corr(i, pa(i)); indexed by vertex, root slot 0.
std::vector<double> optimal_coefficients(const RootedTree& rt, const CorrelationSummary& c);

/// E||Ax - x||^2 = E(x_r^2) + sum_{i != r} E(A_i x_pa(i) - x_i)^2 expanded through
/// the correlations. Edge terms are summed in sorted edge order, so the value
/// is bit-identical for every root when the coefficients are optimal.
double objective_value(const RootedTree& rt, const std::vector<double>& coeffs, const CorrelationSummary& c);

/// Maximum spanning tree of squared correlations, rooted at `root_hint`
/// (default vertex 0), with optimal coefficients.
FitResult fit_cascade(const CorrelationSummary& c, std::optional<Vertex> root_hint = std::nullopt);

/// Exhaustive minimizer over all d^(d-2) trees; ties go to the
/// lexicographically smallest sorted edge list. Throws SizeLimitError for d > 8.
FitResult brute_force_fit(const CorrelationSummary& c);

/// Standardizes, forms empirical correlations and fits. The objective is the
/// in-sample risk in units of the sample covariance, i.e. d - sum rho_hat^2.
FitResult empirical_fit(const Dataset& data, std::optional<Vertex> root_hint = std::nullopt);

}  // namespace treecascade
