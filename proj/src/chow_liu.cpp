#include "treecascade/chow_liu.hpp"

#include <cmath>

#include "treecascade/error.hpp"

namespace treecascade {

GaussianSummary::GaussianSummary(Eigen::MatrixXd covariance) : covariance_(std::move(covariance)) {
    if (covariance_.rows() != covariance_.cols() || covariance_.rows() == 0) {
        throw InvalidInputError("covariance must be square and non-empty");
    }
    if (!covariance_.allFinite()) throw InvalidInputError("covariance has non-finite entries");
    if (covariance_ != covariance_.transpose()) throw InvalidInputError("covariance is not symmetric");
    if (Eigen::LLT<Eigen::MatrixXd>(covariance_).info() != Eigen::Success) {
        throw SingularityError("covariance is not positive definite");
    }
}

double GaussianSummary::correlation(Vertex i, Vertex j) const {
    const auto ii = static_cast<Eigen::Index>(i);
    const auto jj = static_cast<Eigen::Index>(j);
    return covariance_(ii, jj) / std::sqrt(covariance_(ii, ii) * covariance_(jj, jj));
}

double mi_from_squared_correlation(double w) {
    if (!(w >= 0.0 && w < 1.0)) throw SingularityError("squared correlation must lie in [0, 1)");
    return -0.5 * std::log1p(-w);
}

double pairwise_mi_weight(const GaussianSummary& s, Vertex i, Vertex j) {
    if (i == j) throw InvalidInputError("mutual information weight needs two distinct components");
    if (i >= s.dimension() || j >= s.dimension()) throw InvalidInputError("component index out of range");
    // Same normalization as CorrelationSummary::from_covariance, so the two
    // weight graphs are exact images of each other.
    const double rho = s.correlation(i, j);
    if (!(std::abs(rho) < 1.0)) {
        throw SingularityError("components " + std::to_string(i) + " and " + std::to_string(j) +
                               " are perfectly correlated");
    }
    return mi_from_squared_correlation(rho * rho);
}

MstResult chow_liu_tree(const GaussianSummary& s) {
    const std::size_t d = s.dimension();
    WeightedGraph g(d);
    for (Vertex i = 0; i < d; ++i) {
        for (Vertex j = i + 1; j < d; ++j) g.set_weight(i, j, pairwise_mi_weight(s, i, j));
    }
    return maximum_spanning_tree(g);
}

CorrespondenceReport correspondence_check(const GaussianSummary& s) {
    CorrespondenceReport report{chow_liu_tree(s), fit_cascade(CorrelationSummary::from_covariance(s.covariance())),
                                false, {}, true};
    report.trees_equal = report.chow_liu.tree == report.cascade.tree;
    for (const Edge& e : report.chow_liu.tree.edges()) {
        const double rho = s.correlation(e.u, e.v);
        report.edge_weights.push_back({e, rho * rho, pairwise_mi_weight(s, e.u, e.v)});
    }
    const auto& pairs = report.edge_weights;
    for (std::size_t a = 0; a < pairs.size(); ++a) {
        for (std::size_t b = 0; b < pairs.size(); ++b) {
            if (pairs[a].squared_correlation < pairs[b].squared_correlation &&
                !(pairs[a].mutual_information < pairs[b].mutual_information)) {
                report.monotone = false;
            }
        }
    }
    return report;
}

}  // namespace treecascade
