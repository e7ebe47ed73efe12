#include "treecascade/cascade_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "treecascade/error.hpp"
#include "treecascade/random.hpp"

namespace treecascade {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kSqrt3 = 1.7320508075688772;

}  // namespace

CascadeModel::CascadeModel(RootedTree rt, std::vector<double> coeffs, std::vector<double> error_vars)
    : rt_(std::move(rt)), coeffs_(std::move(coeffs)), error_vars_(std::move(error_vars)) {
    const std::size_t d = rt_.vertex_count();
    if (coeffs_.size() != d || error_vars_.size() != d) {
        throw InvalidInputError("model on " + std::to_string(d) + " vertices needs " + std::to_string(d) +
                                " coefficient and error-variance slots");
    }
    if (coeffs_[rt_.root()] != 0.0) throw InvalidInputError("the root has no parent, its coefficient must be 0");
    for (std::size_t i = 0; i < d; ++i) {
        if (!std::isfinite(coeffs_[i])) throw InvalidInputError("coefficient at vertex " + std::to_string(i) + " is not finite");
        if (!(error_vars_[i] > 0.0) || !std::isfinite(error_vars_[i])) {
            throw InvalidInputError("error variance at vertex " + std::to_string(i) + " must be positive and finite");
        }
    }
}

double CascadeModel::coefficient(Vertex i) const {
    if (i == rt_.root()) throw InvalidInputError("the root has no coefficient");
    return coeffs_.at(i);
}

Eigen::MatrixXd CascadeModel::dense_coefficients() const {
    const std::size_t d = dimension();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(idx(d), idx(d));
    for (Vertex i = 0; i < d; ++i) {
        if (auto p = rt_.parent(i)) a(idx(i), idx(*p)) = coeffs_[i];
    }
    return a;
}

CascadeModel make_unit_variance_model(const RootedTree& rt, const std::vector<double>& edge_correlations) {
    const std::size_t d = rt.vertex_count();
    if (edge_correlations.size() != d) {
        throw InvalidInputError("expected " + std::to_string(d) + " edge correlations (root slot ignored)");
    }
    std::vector<double> coeffs(d, 0.0);
    std::vector<double> error_vars(d, 1.0);
    for (Vertex i = 0; i < d; ++i) {
        if (i == rt.root()) continue;
        const double rho = edge_correlations[i];
        if (!(rho > -1.0 && rho < 1.0) || rho == 0.0) {
            throw InvalidInputError("edge correlation at vertex " + std::to_string(i) +
                                    " must lie in (-1, 1) and be nonzero, got " + std::to_string(rho));
        }
        coeffs[i] = rho;
        error_vars[i] = 1.0 - rho * rho;
    }
    CascadeModel m(rt, std::move(coeffs), std::move(error_vars));
    m.unit_variance_ = true;
    return m;
}

CascadeModel random_unit_variance_model(std::size_t d, Rng& rng, double min_abs, double max_abs) {
    if (!(0.0 < min_abs && min_abs <= max_abs && max_abs < 1.0)) {
        throw InvalidInputError("edge correlation magnitudes must satisfy 0 < min <= max < 1");
    }
    Tree t = random_tree(d, rng);
    const Vertex root = rng.uniform_index(d);
    std::vector<double> rho(d, 0.0);
    for (Vertex i = 0; i < d; ++i) {
        if (i == root) continue;
        rho[i] = rng.sign() * rng.uniform(min_abs, max_abs);
    }
    return make_unit_variance_model(RootedTree(std::move(t), root), rho);
}

Eigen::MatrixXd cascade_inverse(const CascadeModel& m) {
    const std::size_t d = m.dimension();
    const RootedTree& rt = m.rooted_tree();
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(idx(d), idx(d));
    // Parents precede children, so row pa(i) is complete before row i:
    // B(i, j) = B(pa(i), j) * A(i, pa(i)) for every proper ancestor j.
    for (Vertex i : rt.topological_order()) {
        b(idx(i), idx(i)) = 1.0;
        if (auto p = rt.parent(i)) {
            const double a = m.coefficients()[i];
            for (Vertex j : rt.ancestors(*p)) b(idx(i), idx(j)) = b(idx(*p), idx(j)) * a;
        }
    }
    return b;
}

Eigen::MatrixXd population_covariance(const CascadeModel& m) {
    const Eigen::MatrixXd b = cascade_inverse(m);
    const Eigen::VectorXd dvec = Eigen::Map<const Eigen::VectorXd>(m.error_variances().data(), idx(m.dimension()));
    Eigen::MatrixXd c = b * dvec.asDiagonal() * b.transpose();
    // Exact symmetry; the two triangles can differ in the last bit.
    return (0.5 * (c + c.transpose())).eval();
}

ErrorSampler ErrorSampler::from_name(std::string_view name) {
    if (name == "gaussian") return ErrorSampler(SamplerKind::gaussian);
    if (name == "laplace") return ErrorSampler(SamplerKind::laplace);
    if (name == "uniform") return ErrorSampler(SamplerKind::uniform);
    if (name == "rademacher") return ErrorSampler(SamplerKind::rademacher);
    if (name == "dependent") return ErrorSampler(SamplerKind::dependent);
    std::string known;
    for (const auto& n : available_names()) known += (known.empty() ? "" : ", ") + n;
    throw InvalidInputError("unknown sampler '" + std::string(name) + "'; available samplers: " + known);
}

std::vector<std::string> ErrorSampler::available_names() {
    return {"gaussian", "laplace", "uniform", "rademacher", "dependent"};
}

std::string ErrorSampler::name() const {
    switch (kind_) {
        case SamplerKind::gaussian: return "gaussian";
        case SamplerKind::laplace: return "laplace";
        case SamplerKind::uniform: return "uniform";
        case SamplerKind::rademacher: return "rademacher";
        case SamplerKind::dependent: return "dependent";
    }
    return "unknown";
}

void ErrorSampler::draw(Rng& rng, const std::vector<double>& std_devs, Eigen::Ref<Eigen::VectorXd> out) const {
    const std::size_t d = std_devs.size();
    switch (kind_) {
        case SamplerKind::gaussian:
            for (std::size_t i = 0; i < d; ++i) out(idx(i)) = std_devs[i] * rng.normal();
            break;
        case SamplerKind::laplace:
            // Scale b = sd / sqrt(2); inverse CDF from one uniform.
            for (std::size_t i = 0; i < d; ++i) {
                const double u = rng.uniform_open01() - 0.5;
                const double mag = -std::log1p(-2.0 * std::abs(u));
                out(idx(i)) = (u < 0.0 ? -1.0 : 1.0) * (std_devs[i] / kSqrt2) * mag;
            }
            break;
        case SamplerKind::uniform:
            for (std::size_t i = 0; i < d; ++i) out(idx(i)) = std_devs[i] * kSqrt3 * rng.uniform(-1.0, 1.0);
            break;
        case SamplerKind::rademacher:
            for (std::size_t i = 0; i < d; ++i) out(idx(i)) = std_devs[i] * rng.sign();
            break;
        case SamplerKind::dependent: {
            const double magnitude = std::sqrt(rng.exponential());
            for (std::size_t i = 0; i < d; ++i) out(idx(i)) = std_devs[i] * magnitude * rng.sign();
            break;
        }
    }
}

Dataset simulate(const CascadeModel& m, const ErrorSampler& sampler, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw InvalidInputError("sample count must be at least 1");
    const std::size_t d = m.dimension();
    const RootedTree& rt = m.rooted_tree();
    std::vector<double> sd(d);
    for (std::size_t i = 0; i < d; ++i) sd[i] = std::sqrt(m.error_variance(i));

    // Row-major scratch so each draw writes contiguously.
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> x(idx(n), idx(d));
    Eigen::VectorXd e(idx(d));
    Rng rng(seed);
    for (std::size_t s = 0; s < n; ++s) {
        sampler.draw(rng, sd, e);
        auto row = x.row(idx(s));
        // x = B e evaluated along the tree: x_i = A(i, pa(i)) x_pa(i) + e_i.
        for (Vertex i : rt.topological_order()) {
            const auto p = rt.parent(i);
            row(idx(i)) = (p ? m.coefficients()[i] * row(idx(*p)) : 0.0) + e(idx(i));
        }
    }
    Dataset ds;
    ds.names = default_column_names(d);
    ds.values = x;
    return ds;
}

CascadeModel reroot(const CascadeModel& m, Vertex new_root) {
    if (!m.unit_variance()) throw UnsupportedInputError("reroot requires a unit-variance model");
    if (new_root >= m.dimension()) throw InvalidInputError("new root " + std::to_string(new_root) + " out of range");
    if (new_root == m.root()) return m;
    const Eigen::MatrixXd c = population_covariance(m);
    RootedTree rt(m.rooted_tree().tree(), new_root);
    std::vector<double> rho(m.dimension(), 0.0);
    for (Vertex i = 0; i < m.dimension(); ++i) {
        if (auto p = rt.parent(i)) rho[i] = c(idx(i), idx(*p));
    }
    return make_unit_variance_model(rt, rho);
}

CovarianceLemmaReport verify_covariance_lemmas(const CascadeModel& m, double tolerance) {
    if (!m.unit_variance()) throw UnsupportedInputError("covariance lemma checks require a unit-variance model");
    const std::size_t d = m.dimension();
    const RootedTree& rt = m.rooted_tree();
    const Tree& t = rt.tree();
    const Eigen::MatrixXd b = cascade_inverse(m);
    const Eigen::MatrixXd c = population_covariance(m);

    CovarianceLemmaReport report;
    report.ancestor_identity.name = "ancestor pairs: C_ij = B_ji";
    report.separated_identity.name = "incomparable pairs: C_ij = B_im B_jm (m = lca)";
    report.coefficient_bound.name = "coefficient bound: |A_i,pa(i)| < 1";
    report.neighbour_bound.name = "nonadjacent pairs: |C_ij| < min(|C_ik|, |C_kj|)";
    report.coefficient_bound.worst = std::numeric_limits<double>::infinity();
    report.neighbour_bound.worst = std::numeric_limits<double>::infinity();

    for (Vertex i = 0; i < d; ++i) {
        if (i == rt.root()) continue;
        const double slack = 1.0 - std::abs(m.coefficients()[i]);
        ++report.coefficient_bound.pairs_checked;
        report.coefficient_bound.worst = std::min(report.coefficient_bound.worst, slack);
        if (!(slack > 0.0)) report.coefficient_bound.passed = false;
    }

    for (Vertex i = 0; i < d; ++i) {
        for (Vertex j = 0; j < d; ++j) {
            if (i == j) continue;
            const double cij = c(idx(i), idx(j));
            if (rt.is_ancestor(i, j)) {
                LemmaCheck& chk = report.ancestor_identity;
                const double dev = std::abs(cij - b(idx(j), idx(i)));
                ++chk.pairs_checked;
                chk.worst = std::max(chk.worst, dev);
                if (!(dev <= tolerance)) chk.passed = false;
            } else if (!rt.is_ancestor(j, i) && i < j) {
                LemmaCheck& chk = report.separated_identity;
                const Vertex k = lca(rt, i, j);
                const double dev = std::abs(cij - b(idx(i), idx(k)) * b(idx(j), idx(k)));
                ++chk.pairs_checked;
                chk.worst = std::max(chk.worst, dev);
                if (!(dev <= tolerance)) chk.passed = false;
            }
            if (!t.has_edge(i, j)) {
                LemmaCheck& chk = report.neighbour_bound;
                const Vertex k = t.path(i, j)[1];
                const double slack =
                    std::min(std::abs(c(idx(i), idx(k))), std::abs(c(idx(k), idx(j)))) - std::abs(cij);
                ++chk.pairs_checked;
                chk.worst = std::min(chk.worst, slack);
                if (!(slack > 0.0)) chk.passed = false;
            }
        }
    }
    // Vacuous checks report zero slack rather than infinity.
    if (report.coefficient_bound.pairs_checked == 0) report.coefficient_bound.worst = 0.0;
    if (report.neighbour_bound.pairs_checked == 0) report.neighbour_bound.worst = 0.0;
    return report;
}

WeightedGraph squared_correlation_graph(const Eigen::MatrixXd& covariance) {
    if (covariance.rows() != covariance.cols()) throw InvalidInputError("covariance must be square");
    const auto d = static_cast<std::size_t>(covariance.rows());
    WeightedGraph g(d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i + 1; j < d; ++j) {
            const double cij = covariance(idx(i), idx(j));
            g.set_weight(i, j, cij * cij / (covariance(idx(i), idx(i)) * covariance(idx(j), idx(j))));
        }
    }
    return g;
}

}  // namespace treecascade
