#include <doctest.h>

#include <cmath>
#include <fstream>

#include "test_support.hpp"
#include "treecascade/cascade_model.hpp"
#include "treecascade/data_io.hpp"
#include "treecascade/error.hpp"
#include "treecascade/regression.hpp"

using namespace treecascade;
using treecascade::testing::random_spd;
using treecascade::testing::scratch_dir;

namespace {

void write(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

Eigen::MatrixXd pearson(const Eigen::MatrixXd& x) {
    const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
    Eigen::MatrixXd cov = centered.transpose() * centered;
    const Eigen::VectorXd sd = cov.diagonal().cwiseSqrt();
    return cov.array() / (sd * sd.transpose()).array();
}

}  // namespace

TEST_CASE("load_csv") {
    const auto dir = scratch_dir("load_csv");
    SUBCASE("basic shape") {
        write(dir / "a.csv", "x,y\n1,2\n3,4\n");
        const Dataset ds = load_csv(dir / "a.csv");
        CHECK(ds.rows() == 2);
        CHECK(ds.cols() == 2);
        CHECK(ds.names == std::vector<std::string>{"x", "y"});
        CHECK(ds.values(1, 0) == 3.0);
    }
    SUBCASE("trailing blank line, CRLF, quoted header, exponent") {
        write(dir / "b.csv", "\"a,b\",c\r\n1e-3,+2\r\n-0.5,  7 \r\n\r\n");
        const Dataset ds = load_csv(dir / "b.csv");
        CHECK(ds.names == std::vector<std::string>{"a,b", "c"});
        CHECK(ds.rows() == 2);
        CHECK(ds.values(0, 0) == 0.001);
        CHECK(ds.values(1, 1) == 7.0);
    }
    SUBCASE("non-numeric cell names row and column") {
        write(dir / "c.csv", "MSFT,AAPL\n1,2\n3,4\n5,abc\n");
        CHECK_THROWS_WITH_AS(load_csv(dir / "c.csv"), doctest::Contains("row 3 (line 4), column AAPL"), ParseError);
    }
    SUBCASE("ragged row") {
        write(dir / "d.csv", "a,b\n1,2\n3\n");
        CHECK_THROWS_WITH_AS(load_csv(dir / "d.csv"), doctest::Contains("row 2"), ParseError);
    }
    SUBCASE("duplicate header") {
        write(dir / "e.csv", "a,a\n1,2\n");
        CHECK_THROWS_WITH_AS(load_csv(dir / "e.csv"), doctest::Contains("duplicate"), ParseError);
    }
    SUBCASE("empty cell and NaN text are rejected") {
        write(dir / "f.csv", "a,b\n1,\n");
        CHECK_THROWS_AS(load_csv(dir / "f.csv"), ParseError);
        write(dir / "g.csv", "a,b\n1,nan\n");
        CHECK_THROWS_AS(load_csv(dir / "g.csv"), ParseError);
    }
    SUBCASE("missing file names the path") {
        CHECK_THROWS_WITH_AS(load_csv(dir / "missing.csv"), doctest::Contains("missing.csv"), IoError);
    }
    SUBCASE("header only") {
        write(dir / "h.csv", "a,b\n");
        CHECK(read_csv_header(dir / "h.csv") == std::vector<std::string>{"a", "b"});
        CHECK(load_csv(dir / "h.csv").rows() == 0);
    }
}

TEST_CASE("save_csv then load_csv is lossless") {
    const auto dir = scratch_dir("csv_round_trip");
    Rng rng(301);
    Dataset ds;
    ds.names = {"alpha", "with,comma", "q\"uote"};
    ds.values.resize(50, 3);
    for (Eigen::Index i = 0; i < ds.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < 3; ++j) ds.values(i, j) = rng.normal() * std::pow(10.0, rng.uniform(-30, 30));
    }
    ds.values(0, 0) = 0.1;
    ds.values(1, 1) = -0.0;
    save_csv(ds, dir / "rt.csv");
    const Dataset back = load_csv(dir / "rt.csv");
    CHECK(back.names == ds.names);
    CHECK(back.values == ds.values);
}

TEST_CASE("standardize") {
    Dataset ds;
    ds.names = {"v"};
    ds.values.resize(2, 1);
    ds.values << 1.0, 3.0;
    const Dataset z = standardize(ds);
    // mean 2, sample sd sqrt(2): values -1/sqrt(2), 1/sqrt(2).
    CHECK(z.values(0, 0) == doctest::Approx(-0.7071067811865475).epsilon(1e-15));
    CHECK(z.values(1, 0) == doctest::Approx(0.7071067811865475).epsilon(1e-15));
    CHECK(z.means[0] == 2.0);
    CHECK(z.scales[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(z.standardized);

    Dataset flat;
    flat.names = {"ok", "const"};
    flat.values.resize(3, 2);
    flat.values << 1, 5, 2, 5, 3, 5;
    CHECK_THROWS_WITH_AS(standardize(flat), doctest::Contains("const"), InvalidInputError);
}

TEST_CASE("standardize properties") {
    Rng rng(307);
    for (int trial = 0; trial < 20; ++trial) {
        Dataset ds;
        ds.names = default_column_names(4);
        ds.values.resize(200, 4);
        for (Eigen::Index i = 0; i < 200; ++i) {
            for (Eigen::Index j = 0; j < 4; ++j) ds.values(i, j) = 10.0 * j + (j + 1) * rng.normal();
        }
        const Dataset once = standardize(ds);
        const Dataset twice = standardize(once);
        CHECK((once.values - twice.values).cwiseAbs().maxCoeff() <= 1e-12);
        for (Eigen::Index j = 0; j < 4; ++j) {
            CHECK(std::abs(once.values.col(j).mean()) < 1e-10 * once.scales[static_cast<std::size_t>(j)]);
            CHECK(once.values.col(j).squaredNorm() / 199.0 == doctest::Approx(1.0).epsilon(1e-12));
        }
        const Eigen::MatrixXd from_std = CorrelationSummary::from_dataset(once).matrix();
        CHECK((from_std - pearson(ds.values)).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("price_changes") {
    Dataset ds;
    ds.names = {"p"};
    ds.values.resize(3, 1);
    ds.values << 10.0, 11.0, 13.0;
    const Dataset ch = price_changes(ds);
    CHECK(ch.rows() == 2);
    CHECK(ch.values(0, 0) == 1.0);
    CHECK(ch.values(1, 0) == 2.0);

    Dataset flat;
    flat.names = {"p", "q"};
    flat.values.resize(3, 2);
    flat.values << 5, 1, 5, 2, 5, 4;
    CHECK_THROWS_AS(standardize(price_changes(flat)), InvalidInputError);

    Dataset one;
    one.names = {"p"};
    one.values.resize(1, 1);
    CHECK_THROWS_AS(price_changes(one), InvalidInputError);
}

TEST_CASE("bundled sample prices") {
    const Dataset ds = load_csv(TREECASCADE_SAMPLE_CSV);
    CHECK(ds.cols() == 30);
    const Dataset ch = price_changes(ds);
    CHECK(ch.rows() == ds.rows() - 1);
    CHECK(ch.cols() == 30);
}

TEST_CASE("model documents") {
    Rng rng(311);
    const CascadeModel m = random_unit_variance_model(6, rng);
    const std::vector<std::string> names{"a", "b", "c", "d", "e", "f"};
    const auto doc = model_to_json(m, names);
    CHECK(doc["format_version"] == 1);
    CHECK(doc["edges"].size() == 5);
    CHECK(model_from_json(doc) == m);
    CHECK(names_from_json(doc) == names);

    const CascadeModel general(RootedTree(Tree(2, {{0, 1}}), 1), {0.0, 0.0}, {2.0, 3.0});
    CHECK(model_from_json(model_to_json(general)) == general);
    CHECK(names_from_json(model_to_json(general)) == std::vector<std::string>{"x0", "x1"});

    SUBCASE("schema errors carry the field path") {
        auto missing = doc;
        missing.erase("edges");
        CHECK_THROWS_WITH_AS(model_from_json(missing), doctest::Contains("/edges"), ParseError);
        auto bad_coeff = doc;
        bad_coeff["edges"][2]["coeff"] = "x";
        CHECK_THROWS_WITH_AS(model_from_json(bad_coeff), doctest::Contains("/edges/2/coeff"), ParseError);
        auto version = doc;
        version["format_version"] = 2;
        CHECK_THROWS_WITH_AS(model_from_json(version), doctest::Contains("/format_version"), ParseError);
        auto inconsistent = doc;
        inconsistent["error_vars"][0] = 0.5;
        CHECK_THROWS_AS(model_from_json(inconsistent), ParseError);
    }
    SUBCASE("zero coefficient in a unit-variance document is rejected by the constructor") {
        auto zero = doc;
        const std::size_t child = zero["edges"][0]["child"];
        zero["edges"][0]["coeff"] = 0.0;
        zero["error_vars"][child] = 1.0;
        CHECK_THROWS_AS(model_from_json(zero), InvalidInputError);
    }
}

TEST_CASE("fit documents round-trip") {
    const auto dir = scratch_dir("fit_docs");
    Rng rng(313);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t d = 1 + rng.uniform_index(8);
        FitResult fit = fit_cascade(CorrelationSummary::from_covariance(random_spd(d, rng)),
                                    trial % 2 ? std::optional<Vertex>(rng.uniform_index(d)) : std::nullopt);
        if (trial % 3 == 0) fit.correlation.reset();
        save_fit(fit, dir / "fit.json");
        const FitResult back = load_fit(dir / "fit.json");
        CHECK(back.tree == fit.tree);
        CHECK(back.root == fit.root);
        CHECK(back.root_source == fit.root_source);
        CHECK(back.coeffs == fit.coeffs);
        CHECK(back.objective == fit.objective);
        CHECK(back.weights == fit.weights);
        CHECK(back.tree_unique == fit.tree_unique);
        CHECK(back.names == fit.names);
        CHECK(back.correlation.has_value() == fit.correlation.has_value());
        if (fit.correlation) CHECK(*back.correlation == *fit.correlation);
    }

    SUBCASE("0.1 survives bit-exactly") {
        Eigen::MatrixXd c(2, 2);
        c << 1.0, 0.1, 0.1, 1.0;
        const FitResult fit = fit_cascade(CorrelationSummary::from_correlation(c));
        const FitResult back = fit_from_json(nlohmann::json::parse(fit_to_json(fit).dump()));
        CHECK(back.coeffs[1] == 0.1);
    }
    SUBCASE("zero-correlation fits still serialize") {
        const FitResult fit = fit_cascade(CorrelationSummary::from_correlation(Eigen::MatrixXd::Identity(3, 3)));
        const auto doc = fit_to_json(fit);
        CHECK(doc["unit_variance"] == false);
        CHECK(fit_from_json(doc).coeffs == fit.coeffs);
    }
    SUBCASE("missing fit fields") {
        Eigen::MatrixXd c(2, 2);
        c << 1.0, 0.5, 0.5, 1.0;
        auto doc = fit_to_json(fit_cascade(CorrelationSummary::from_correlation(c)));
        doc.erase("tree_unique");
        CHECK_THROWS_WITH_AS(fit_from_json(doc), doctest::Contains("/tree_unique"), ParseError);
    }
}
