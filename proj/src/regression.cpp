#include "treecascade/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "treecascade/data_io.hpp"
#include "treecascade/error.hpp"

namespace treecascade {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

void require_dimension(const RootedTree& rt, const CorrelationSummary& c) {
    if (rt.vertex_count() != c.dimension()) {
        throw InvalidInputError("tree has " + std::to_string(rt.vertex_count()) + " vertices but correlations are " +
                                std::to_string(c.dimension()) + "-dimensional");
    }
}

FitResult fit_on_tree(const CorrelationSummary& c, const Tree& t, Vertex root) {
    FitResult fit;
    fit.tree = t;
    fit.root = root;
    const RootedTree rt(t, root);
    fit.coeffs = optimal_coefficients(rt, c);
    fit.objective = objective_value(rt, fit.coeffs, c);
    fit.weights.reserve(t.edges().size());
    for (const Edge& e : t.edges()) fit.weights.push_back(c(e.u, e.v) * c(e.u, e.v));
    fit.names = default_column_names(c.dimension());
    fit.correlation = c.matrix();
    return fit;
}

}  // namespace

CorrelationSummary CorrelationSummary::from_correlation(Eigen::MatrixXd corr, CorrelationSource source,
                                                        std::size_t sample_count) {
    if (corr.rows() != corr.cols() || corr.rows() == 0) {
        throw InvalidInputError("correlation matrix must be square and non-empty");
    }
    const auto d = static_cast<std::size_t>(corr.rows());
    for (std::size_t i = 0; i < d; ++i) {
        if (corr(idx(i), idx(i)) != 1.0) {
            throw InvalidInputError("correlation diagonal entry " + std::to_string(i) + " is not 1");
        }
        for (std::size_t j = i + 1; j < d; ++j) {
            const double v = corr(idx(i), idx(j));
            if (v != corr(idx(j), idx(i))) {
                throw InvalidInputError("correlation matrix is not symmetric at (" + std::to_string(i) + "," +
                                        std::to_string(j) + ")");
            }
            if (!(v >= -1.0 && v <= 1.0)) {
                throw InvalidInputError("correlation at (" + std::to_string(i) + "," + std::to_string(j) +
                                        ") is outside [-1, 1]");
            }
        }
    }
    return CorrelationSummary(std::move(corr), source, sample_count);
}

CorrelationSummary CorrelationSummary::from_covariance(const Eigen::MatrixXd& covariance, CorrelationSource source,
                                                       std::size_t sample_count) {
    if (covariance.rows() != covariance.cols() || covariance.rows() == 0) {
        throw InvalidInputError("covariance matrix must be square and non-empty");
    }
    const auto d = static_cast<std::size_t>(covariance.rows());
    for (std::size_t i = 0; i < d; ++i) {
        const double v = covariance(idx(i), idx(i));
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw InvalidInputError("variance of component " + std::to_string(i) + " must be positive and finite");
        }
    }
    Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(idx(d), idx(d));
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i + 1; j < d; ++j) {
            const double s = covariance(idx(i), idx(j));
            if (!std::isfinite(s)) throw InvalidInputError("covariance entry is not finite");
            double r = s / std::sqrt(covariance(idx(i), idx(i)) * covariance(idx(j), idx(j)));
            r = std::clamp(r, -1.0, 1.0);
            corr(idx(i), idx(j)) = r;
            corr(idx(j), idx(i)) = r;
        }
    }
    return CorrelationSummary(std::move(corr), source, sample_count);
}

CorrelationSummary CorrelationSummary::from_dataset(const Dataset& data) {
    if (data.rows() < 2) throw InvalidInputError("need at least 2 rows to estimate correlations");
    const Dataset z = data.standardized ? data : standardize(data);
    const Eigen::MatrixXd gram = z.values.transpose() * z.values / static_cast<double>(z.rows() - 1);
    return from_covariance(gram, CorrelationSource::empirical, z.rows());
}

WeightedGraph CorrelationSummary::squared_weights() const {
    const std::size_t d = dimension();
    WeightedGraph g(d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i + 1; j < d; ++j) {
            const double r = (*this)(i, j);
            g.set_weight(i, j, r * r);
        }
    }
    return g;
}

CascadeModel FitResult::model() const {
    const RootedTree rt = rooted_tree();
    return make_unit_variance_model(rt, coeffs);
}

double FitResult::identity_objective() const {
    double total = static_cast<double>(tree.vertex_count());
    for (double w : weights) total -= w;
    return total;
}

std::vector<double> optimal_coefficients(const RootedTree& rt, const CorrelationSummary& c) {
    require_dimension(rt, c);
    std::vector<double> coeffs(rt.vertex_count(), 0.0);
    for (Vertex i = 0; i < rt.vertex_count(); ++i) {
        if (auto p = rt.parent(i)) coeffs[i] = c(i, *p);
    }
    return coeffs;
}

double objective_value(const RootedTree& rt, const std::vector<double>& coeffs, const CorrelationSummary& c) {
    require_dimension(rt, c);
    if (coeffs.size() != rt.vertex_count()) throw InvalidInputError("expected one coefficient slot per vertex");
    if (coeffs[rt.root()] != 0.0) throw InvalidInputError("coefficients do not conform to the tree: root slot is nonzero");
    double total = c(rt.root(), rt.root());
    for (const Edge& e : rt.tree().edges()) {
        const bool u_is_child = rt.parent(e.u) == e.v;
        const Vertex child = u_is_child ? e.u : e.v;
        const Vertex parent = u_is_child ? e.v : e.u;
        const double a = coeffs[child];
        // E(a x_p - x_i)^2 = a^2 E(x_p^2) - 2 a E(x_i x_p) + E(x_i^2)
        total += a * a * c(parent, parent) - 2.0 * a * c(child, parent) + c(child, child);
    }
    return total;
}

FitResult fit_cascade(const CorrelationSummary& c, std::optional<Vertex> root_hint) {
    const std::size_t d = c.dimension();
    if (root_hint && *root_hint >= d) {
        throw InvalidInputError("root hint " + std::to_string(*root_hint) + " out of range for " + std::to_string(d) +
                                " variables");
    }
    const MstResult mst = maximum_spanning_tree(c.squared_weights());
    FitResult fit = fit_on_tree(c, mst.tree, root_hint.value_or(0));
    fit.root_source = root_hint ? RootSource::hint : RootSource::default_vertex;
    fit.tree_unique = mst.is_unique;
    return fit;
}

FitResult brute_force_fit(const CorrelationSummary& c) {
    const std::size_t d = c.dimension();
    if (d > kMaxEnumerationVertices) {
        throw SizeLimitError("brute-force fit is limited to " + std::to_string(kMaxEnumerationVertices) +
                             " variables, got " + std::to_string(d));
    }
    std::optional<Tree> best;
    double best_objective = std::numeric_limits<double>::infinity();
    std::size_t ties = 0;
    for_each_spanning_tree(d, [&](const Tree& t) {
        const RootedTree rt(t, 0);
        const double obj = objective_value(rt, optimal_coefficients(rt, c), c);
        if (!best || obj < best_objective) {
            best = t;
            best_objective = obj;
            ties = 0;
        } else if (obj == best_objective) {
            ++ties;
            if (t.edges() < best->edges()) best = t;
        }
    });
    FitResult fit = fit_on_tree(c, *best, 0);
    fit.tree_unique = ties == 0;
    return fit;
}

FitResult empirical_fit(const Dataset& data, std::optional<Vertex> root_hint) {
    if (root_hint && *root_hint >= data.cols()) {
        throw InvalidInputError("root hint " + std::to_string(*root_hint) + " out of range for " +
                                std::to_string(data.cols()) + " columns");
    }
    FitResult fit = fit_cascade(CorrelationSummary::from_dataset(data), root_hint);
    fit.names = data.names;
    return fit;
}

}  // namespace treecascade
