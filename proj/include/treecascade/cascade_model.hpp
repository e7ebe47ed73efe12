#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "treecascade/dataset.hpp"
#include "treecascade/graph.hpp"

namespace treecascade {

class Rng;

/// Tree linear cascade x = A x + e. The coefficient matrix A is stored per
/// edge: coefficient(i) is A(i, pa(i)) and every other entry of A is zero.
/// error_variance(i) is D(i, i) = var(e_i).
class CascadeModel {
public:
    /// General-variance model. `coeffs` and `error_vars` are indexed by vertex;
    /// the root's coefficient slot must be 0. Error variances must be positive.
    CascadeModel(RootedTree rt, std::vector<double> coeffs, std::vector<double> error_vars);

    const RootedTree& rooted_tree() const { return rt_; }
    std::size_t dimension() const { return rt_.vertex_count(); }
    Vertex root() const { return rt_.root(); }

    /// A(i, pa(i)); throws for the root.
    double coefficient(Vertex i) const;
    double error_variance(Vertex i) const { return error_vars_.at(i); }
    const std::vector<double>& coefficients() const { return coeffs_; }
    const std::vector<double>& error_variances() const { return error_vars_; }

    /// Set only by the unit-variance constructor and by reroot.
    bool unit_variance() const { return unit_variance_; }

    /// Dense d x d materialization of A.
    Eigen::MatrixXd dense_coefficients() const;

    friend bool operator==(const CascadeModel&, const CascadeModel&) = default;

private:
    friend CascadeModel make_unit_variance_model(const RootedTree&, const std::vector<double>&);

    RootedTree rt_;
    std::vector<double> coeffs_;
    std::vector<double> error_vars_;
    bool unit_variance_ = false;
};

/// Model whose induced covariance has unit diagonal: A(i, pa(i)) = rho_i and
/// D(i, i) = 1 - rho_i^2, D(r, r) = 1. Each rho_i must lie in (-1, 1) \ {0};
/// the root entry of `edge_correlations` is ignored.
CascadeModel make_unit_variance_model(const RootedTree& rt, const std::vector<double>& edge_correlations);

/// Uniform random tree, uniform root, edge correlations with magnitude
/// uniform in [min_abs, max_abs] and a random sign.
CascadeModel random_unit_variance_model(std::size_t d, Rng& rng, double min_abs = 0.2, double max_abs = 0.9);

/// B = (I - A)^{-1} from path products: B(i, j) is the product of the
/// coefficients on the directed path j -> i when j is an ancestor of i, and 0
/// otherwise. No matrix inversion is performed.
Eigen::MatrixXd cascade_inverse(const CascadeModel& m);

/// C = B D B^T.
Eigen::MatrixXd population_covariance(const CascadeModel& m);

/// Zero-mean error distributions with a prescribed variance per coordinate.
enum class SamplerKind {
    gaussian,
    laplace,
    uniform,
    rademacher,
    // e_i = s_i * sqrt(D_ii * E) with independent signs s_i and one shared
    // E ~ Exponential(1) per draw: uncorrelated but not independent.
    dependent,
};

class ErrorSampler {
public:
    explicit ErrorSampler(SamplerKind kind) : kind_(kind) {}

    /// Accepts the names listed by available_names(); throws InvalidInputError otherwise.
    static ErrorSampler from_name(std::string_view name);
    static std::vector<std::string> available_names();

    SamplerKind kind() const { return kind_; }
    std::string name() const;

    /// Fills `out` with one error vector whose i-th coordinate has mean 0 and
    /// standard deviation std_devs[i].
    void draw(Rng& rng, const std::vector<double>& std_devs, Eigen::Ref<Eigen::VectorXd> out) const;

private:
    SamplerKind kind_;
};

/// n i.i.d. draws of x = B e, one row per draw, columns in vertex order.
Dataset simulate(const CascadeModel& m, const ErrorSampler& sampler, std::size_t n, std::uint64_t seed);

/// Same undirected tree rooted at `new_root` with identical induced
/// covariance. Requires a unit-variance model.
CascadeModel reroot(const CascadeModel& m, Vertex new_root);

struct LemmaCheck {
    std::string name;
    bool passed = true;
    std::size_t pairs_checked = 0;
    // Largest absolute deviation for identity checks; smallest slack for bound checks.
    double worst = 0.0;
};

struct CovarianceLemmaReport {
    LemmaCheck ancestor_identity;     // C_ij = B_ji when i is an ancestor of j
    LemmaCheck separated_identity;    // C_ij = B_im B_jm, m = lca(i, j)
    LemmaCheck coefficient_bound;     // |A(i, pa(i))| < 1
    LemmaCheck neighbour_bound;       // |C_ij| < min(|C_ik|, |C_kj|)

    bool all_passed() const {
        return ancestor_identity.passed && separated_identity.passed && coefficient_bound.passed &&
               neighbour_bound.passed;
    }
    std::vector<LemmaCheck> checks() const {
        return {ancestor_identity, separated_identity, coefficient_bound, neighbour_bound};
    }
};

inline constexpr double kLemmaTolerance = 1e-12;

/// Checks the covariance identities and bounds of a unit-variance cascade.
/// Failures are reported, not thrown; a non-unit-variance model throws
/// UnsupportedInputError.
CovarianceLemmaReport verify_covariance_lemmas(const CascadeModel& m, double tolerance = kLemmaTolerance);

/// Complete graph weighted by C_ij^2 / (C_ii C_jj).
WeightedGraph squared_correlation_graph(const Eigen::MatrixXd& covariance);

}  // namespace treecascade
