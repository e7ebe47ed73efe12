#include <doctest.h>

#include <cmath>

#include "test_support.hpp"
#include "treecascade/cascade_model.hpp"
#include "treecascade/data_io.hpp"
#include "treecascade/error.hpp"
#include "treecascade/regression.hpp"

using namespace treecascade;
using treecascade::testing::random_spd;

namespace {

CorrelationSummary two_by_two(double rho) {
    Eigen::MatrixXd c(2, 2);
    c << 1.0, rho, rho, 1.0;
    return CorrelationSummary::from_correlation(c);
}

double edge_weight_sum(const FitResult& fit) {
    double s = 0.0;
    for (double w : fit.weights) s += w;
    return s;
}

// Direct Monte-Carlo estimate of E||Ax - x||^2 for a dense A.
double monte_carlo_risk(const Dataset& ds, const Eigen::MatrixXd& a) {
    const Eigen::MatrixXd resid = ds.values * a.transpose() - ds.values;
    return resid.squaredNorm() / static_cast<double>(ds.rows());
}

}  // namespace

TEST_CASE("CorrelationSummary validation") {
    Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(2, 2);
    bad(0, 1) = 0.3;
    CHECK_THROWS_AS(CorrelationSummary::from_correlation(bad), InvalidInputError);
    bad(1, 0) = 0.3;
    bad(0, 0) = 1.1;
    CHECK_THROWS_AS(CorrelationSummary::from_correlation(bad), InvalidInputError);
    Eigen::MatrixXd out = Eigen::MatrixXd::Identity(2, 2);
    out(0, 1) = out(1, 0) = 1.5;
    CHECK_THROWS_AS(CorrelationSummary::from_correlation(out), InvalidInputError);

    Eigen::MatrixXd cov(2, 2);
    cov << 4.0, 1.2, 1.2, 1.0;
    const CorrelationSummary c = CorrelationSummary::from_covariance(cov);
    CHECK(c(0, 0) == 1.0);
    CHECK(c(0, 1) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(c(0, 1) == c(1, 0));
}

TEST_CASE("optimal_coefficients") {
    const RootedTree rt(Tree(2, {{0, 1}}), 0);
    CHECK(optimal_coefficients(rt, two_by_two(0.6)) == std::vector<double>{0.0, 0.6});

    const RootedTree path(Tree(3, {{0, 1}, {1, 2}}), 1);
    const auto zero = optimal_coefficients(path, CorrelationSummary::from_correlation(Eigen::MatrixXd::Identity(3, 3)));
    CHECK(zero == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("optimal coefficients are a local minimum of the objective") {
    Rng rng(101);
    const CorrelationSummary c = CorrelationSummary::from_covariance(random_spd(4, rng));
    const RootedTree rt(random_tree(4, rng), 1);
    const auto best = optimal_coefficients(rt, c);
    const double best_obj = objective_value(rt, best, c);
    for (int trial = 0; trial < 1000; ++trial) {
        auto perturbed = best;
        for (Vertex i = 0; i < 4; ++i) {
            if (i != rt.root()) perturbed[i] += rng.uniform(-0.5, 0.5);
        }
        CHECK(objective_value(rt, perturbed, c) >= best_obj);
    }
}

TEST_CASE("objective_value") {
    const RootedTree rt(Tree(2, {{0, 1}}), 0);
    CHECK(objective_value(rt, {0.0, 0.0}, two_by_two(0.6)) == 2.0);
    CHECK(objective_value(rt, {0.0, 0.6}, two_by_two(0.6)) == doctest::Approx(1.64).epsilon(1e-15));
    CHECK_THROWS_AS(objective_value(rt, {0.3, 0.6}, two_by_two(0.6)), InvalidInputError);

    const RootedTree four(Tree(4, {{0, 1}, {1, 2}, {2, 3}}), 0);
    CHECK(objective_value(four, {0, 0, 0, 0}, CorrelationSummary::from_correlation(Eigen::MatrixXd::Identity(4, 4))) ==
          4.0);
}

TEST_CASE("objective matches a Monte-Carlo estimate") {
    Rng rng(103);
    const CascadeModel truth = random_unit_variance_model(5, rng);
    const Dataset ds = simulate(truth, ErrorSampler(SamplerKind::gaussian), 1'000'000, 8);
    const CorrelationSummary c = CorrelationSummary::from_covariance(population_covariance(truth));
    const FitResult fit = fit_cascade(c, 3);
    const CascadeModel fitted = fit.model();
    CHECK(std::abs(monte_carlo_risk(ds, fitted.dense_coefficients()) - fit.objective) <= 1e-2);
}

TEST_CASE("fit_cascade") {
    SUBCASE("two variables") {
        const FitResult fit = fit_cascade(two_by_two(-0.3));
        CHECK(fit.tree == Tree(2, {{0, 1}}));
        CHECK(fit.root == 0);
        CHECK(fit.root_source == RootSource::default_vertex);
        CHECK(fit.coeffs[1] == -0.3);
        CHECK(fit.objective == doctest::Approx(2.0 - 0.09).epsilon(1e-15));
        CHECK(fit.tree_unique);
    }
    SUBCASE("root hint is recorded and validated") {
        const FitResult fit = fit_cascade(two_by_two(0.5), 1);
        CHECK(fit.root == 1);
        CHECK(fit.root_source == RootSource::hint);
        CHECK(fit.coeffs[0] == 0.5);
        CHECK_THROWS_AS(fit_cascade(two_by_two(0.5), 2), InvalidInputError);
    }
    SUBCASE("population correlations of a cascade recover its tree") {
        Rng rng(107);
        for (int trial = 0; trial < 50; ++trial) {
            const CascadeModel m = random_unit_variance_model(3 + rng.uniform_index(6), rng);
            const FitResult fit =
                fit_cascade(CorrelationSummary::from_covariance(population_covariance(m)), m.root());
            CHECK(fit.tree == m.rooted_tree().tree());
            CHECK(fit.tree_unique);
            for (Vertex i = 0; i < m.dimension(); ++i) {
                if (i != m.root()) CHECK(fit.coeffs[i] == doctest::Approx(m.coefficient(i)).epsilon(1e-12));
            }
        }
    }
    SUBCASE("equicorrelated input reports a tie") {
        Eigen::MatrixXd c = Eigen::MatrixXd::Constant(4, 4, 0.3);
        c.diagonal().setOnes();
        const FitResult fit = fit_cascade(CorrelationSummary::from_correlation(c));
        CHECK_FALSE(fit.tree_unique);
        CHECK(fit.tree == Tree(4, {{0, 1}, {0, 2}, {0, 3}}));
    }
}

TEST_CASE("fit invariants") {
    Rng rng(109);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t d = 2 + rng.uniform_index(7);
        const CorrelationSummary c = CorrelationSummary::from_covariance(random_spd(d, rng));
        const FitResult base = fit_cascade(c);
        CHECK(std::abs(base.objective - (static_cast<double>(d) - edge_weight_sum(base))) <= 1e-12);
        const RootedTree rt = base.rooted_tree();
        for (Vertex i = 0; i < d; ++i) {
            if (auto p = rt.parent(i)) CHECK(base.coeffs[i] == c(i, *p));
        }
        for (Vertex r = 0; r < d; ++r) {
            const FitResult rooted = fit_cascade(c, r);
            CHECK(rooted.tree == base.tree);
            CHECK(rooted.objective == base.objective);
        }
    }
}

TEST_CASE("objective identity holds on arbitrary trees") {
    Rng rng(113);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t d = 2 + rng.uniform_index(9);
        const CorrelationSummary c = CorrelationSummary::from_covariance(random_spd(d, rng));
        const RootedTree rt(random_tree(d, rng), rng.uniform_index(d));
        double sum = 0.0;
        for (const Edge& e : rt.tree().edges()) sum += c(e.u, e.v) * c(e.u, e.v);
        CHECK(std::abs(objective_value(rt, optimal_coefficients(rt, c), c) - (static_cast<double>(d) - sum)) <= 1e-12);
    }
}

TEST_CASE("stronger edge correlations lower the objective") {
    Rng rng(127);
    const CascadeModel m = random_unit_variance_model(6, rng);
    const RootedTree& rt = m.rooted_tree();
    std::vector<double> weaker = m.coefficients();
    for (double& a : weaker) a *= 0.8;
    weaker[rt.root()] = 0.0;
    const CascadeModel weak = make_unit_variance_model(rt, weaker);
    const auto fit_of = [](const CascadeModel& model) {
        return fit_cascade(CorrelationSummary::from_covariance(population_covariance(model)));
    };
    CHECK(fit_of(m).objective <= fit_of(weak).objective);
}

TEST_CASE("brute_force_fit") {
    SUBCASE("two variables") {
        const FitResult fit = brute_force_fit(two_by_two(0.4));
        CHECK(fit.tree == Tree(2, {{0, 1}}));
    }
    SUBCASE("agrees with fit_cascade on cascade correlations") {
        Rng rng(131);
        const CascadeModel m = random_unit_variance_model(3, rng);
        const CorrelationSummary c = CorrelationSummary::from_covariance(population_covariance(m));
        CHECK(brute_force_fit(c).tree == fit_cascade(c).tree);
    }
    SUBCASE("objectives agree exactly on random correlations") {
        Rng rng(137);
        for (int trial = 0; trial < 100; ++trial) {
            const CorrelationSummary c = CorrelationSummary::from_covariance(random_spd(5, rng));
            const FitResult greedy = fit_cascade(c);
            const FitResult exhaustive = brute_force_fit(c);
            CHECK(greedy.objective == exhaustive.objective);
            if (greedy.tree_unique) CHECK(greedy.tree == exhaustive.tree);
        }
    }
    SUBCASE("ties resolve to the smallest edge list") {
        Eigen::MatrixXd c = Eigen::MatrixXd::Constant(4, 4, 0.3);
        c.diagonal().setOnes();
        const FitResult fit = brute_force_fit(CorrelationSummary::from_correlation(c));
        CHECK_FALSE(fit.tree_unique);
        CHECK(fit.tree == Tree(4, {{0, 1}, {0, 2}, {0, 3}}));
    }
    SUBCASE("size limit") {
        CHECK_THROWS_AS(brute_force_fit(CorrelationSummary::from_correlation(Eigen::MatrixXd::Identity(9, 9))),
                        SizeLimitError);
    }
}

TEST_CASE("empirical_fit") {
    SUBCASE("two rows") {
        Dataset ds;
        ds.names = {"a", "b"};
        ds.values.resize(2, 2);
        ds.values << 1.0, 5.0, 3.0, 2.0;
        const FitResult fit = empirical_fit(ds);
        // Two points are perfectly (anti-)correlated.
        CHECK(fit.coeffs[1] == doctest::Approx(-1.0).epsilon(1e-15));
        CHECK(fit.names == std::vector<std::string>{"a", "b"});
    }
    SUBCASE("constant column is a named error") {
        Dataset ds;
        ds.names = {"a", "flat"};
        ds.values.resize(3, 2);
        ds.values << 1.0, 2.0, 2.0, 2.0, 4.0, 2.0;
        CHECK_THROWS_WITH_AS(empirical_fit(ds), doctest::Contains("flat"), InvalidInputError);
    }
    SUBCASE("NaN is a named cell error") {
        Dataset ds;
        ds.names = {"a", "b"};
        ds.values.resize(3, 2);
        ds.values << 1.0, 2.0, std::nan(""), 1.0, 4.0, 2.0;
        CHECK_THROWS_WITH_AS(empirical_fit(ds), doctest::Contains("row 2, column a"), ParseError);
    }
    SUBCASE("positive column scaling does not change the tree") {
        Rng rng(139);
        const CascadeModel m = random_unit_variance_model(7, rng);
        Dataset ds = simulate(m, ErrorSampler(SamplerKind::uniform), 5000, 2);
        const FitResult before = empirical_fit(ds);
        ds.values.col(3) *= 1234.5;
        ds.values.col(5) *= 0.001;
        CHECK(empirical_fit(ds).tree == before.tree);
    }
    SUBCASE("recovers a d=10 cascade from laplace errors") {
        Rng rng(149);
        int recovered = 0;
        const int trials = 20;
        for (int trial = 0; trial < trials; ++trial) {
            const CascadeModel m = random_unit_variance_model(10, rng);
            const Dataset ds = simulate(m, ErrorSampler(SamplerKind::laplace), 100'000, 500 + trial);
            if (empirical_fit(ds).tree == m.rooted_tree().tree()) ++recovered;
        }
        CHECK(recovered >= 19);
    }
}
