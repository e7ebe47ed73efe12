#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "treecascade/cascade_model.hpp"
#include "treecascade/chow_liu.hpp"
#include "treecascade/cli.hpp"
#include "treecascade/data_io.hpp"
#include "treecascade/error.hpp"
#include "treecascade/random.hpp"
#include "treecascade/regression.hpp"

namespace py = pybind11;
using namespace treecascade;

namespace {

using EdgeList = std::vector<std::pair<Vertex, Vertex>>;

EdgeList edge_list(const Tree& t) {
    EdgeList out;
    for (const Edge& e : t.edges()) out.emplace_back(e.u, e.v);
    return out;
}

Tree make_tree(std::size_t d, const EdgeList& edges) {
    std::vector<Edge> es;
    for (const auto& [a, b] : edges) es.emplace_back(a, b);
    return Tree(d, std::move(es));
}

py::dict lemma_dict(const CovarianceLemmaReport& r) {
    py::dict out;
    for (const LemmaCheck& c : r.checks()) {
        py::dict row;
        row["passed"] = c.passed;
        row["pairs_checked"] = c.pairs_checked;
        row["worst"] = c.worst;
        out[py::str(c.name)] = row;
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Tree linear cascade models: fitting, simulation and verification";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InvalidInputError>(m, "InvalidInputError", base.ptr());
    py::register_exception<SizeLimitError>(m, "SizeLimitError", base.ptr());
    py::register_exception<SingularityError>(m, "SingularityError", base.ptr());
    py::register_exception<UnsupportedInputError>(m, "UnsupportedInputError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());

    py::class_<Tree>(m, "Tree")
        .def(py::init(&make_tree), py::arg("d"), py::arg("edges"))
        .def_property_readonly("vertex_count", &Tree::vertex_count)
        .def_property_readonly("edges", &edge_list)
        .def("has_edge", &Tree::has_edge)
        .def("path", &Tree::path)
        .def("__eq__", [](const Tree& a, const Tree& b) { return a == b; })
        .def("__repr__", [](const Tree& t) {
            std::ostringstream s;
            s << "Tree(" << t.vertex_count() << ", [";
            for (std::size_t i = 0; i < t.edges().size(); ++i) {
                s << (i ? ", " : "") << "(" << t.edges()[i].u << ", " << t.edges()[i].v << ")";
            }
            s << "])";
            return s.str();
        });

    py::class_<RootedTree>(m, "RootedTree")
        .def(py::init<Tree, Vertex>(), py::arg("tree"), py::arg("root"))
        .def_property_readonly("tree", &RootedTree::tree)
        .def_property_readonly("root", &RootedTree::root)
        .def("parent", &RootedTree::parent)
        .def("depth", &RootedTree::depth)
        .def("ancestors", &RootedTree::ancestors);

    py::class_<MstResult>(m, "MstResult")
        .def_readonly("tree", &MstResult::tree)
        .def_readonly("total_weight", &MstResult::total_weight)
        .def_readonly("is_unique", &MstResult::is_unique);

    m.def(
        "maximum_spanning_tree",
        [](const Eigen::MatrixXd& w) { return maximum_spanning_tree(WeightedGraph::from_matrix(w)); },
        py::arg("weights"), "Heaviest spanning tree of a symmetric weight matrix.");
    m.def("enumerate_spanning_trees", &enumerate_spanning_trees, py::arg("d"));
    m.def(
        "cluster",
        [](const Tree& t, const std::vector<double>& weights, std::size_t k) {
            return cluster_by_edge_deletion(t, weights, k);
        },
        py::arg("tree"), py::arg("edge_weights"), py::arg("k"));

    py::class_<CascadeModel>(m, "CascadeModel")
        .def(py::init<RootedTree, std::vector<double>, std::vector<double>>(), py::arg("rooted_tree"),
             py::arg("coeffs"), py::arg("error_vars"))
        .def_property_readonly("rooted_tree", &CascadeModel::rooted_tree)
        .def_property_readonly("dimension", &CascadeModel::dimension)
        .def_property_readonly("root", &CascadeModel::root)
        .def_property_readonly("coefficients", &CascadeModel::coefficients)
        .def_property_readonly("error_variances", &CascadeModel::error_variances)
        .def_property_readonly("unit_variance", &CascadeModel::unit_variance)
        .def("dense_coefficients", &CascadeModel::dense_coefficients)
        .def("__eq__", [](const CascadeModel& a, const CascadeModel& b) { return a == b; });

    m.def("make_unit_variance_model", &make_unit_variance_model, py::arg("rooted_tree"),
          py::arg("edge_correlations"));
    m.def(
        "random_unit_variance_model",
        [](std::size_t d, std::uint64_t seed, double min_abs, double max_abs) {
            Rng rng(seed);
            return random_unit_variance_model(d, rng, min_abs, max_abs);
        },
        py::arg("d"), py::arg("seed"), py::arg("min_abs") = 0.2, py::arg("max_abs") = 0.9);
    m.def("cascade_inverse", &cascade_inverse);
    m.def("population_covariance", &population_covariance);
    m.def("reroot", &reroot, py::arg("model"), py::arg("new_root"));
    m.def(
        "verify_covariance_lemmas",
        [](const CascadeModel& model, double tol) { return lemma_dict(verify_covariance_lemmas(model, tol)); },
        py::arg("model"), py::arg("tolerance") = kLemmaTolerance);
    m.def("sampler_names", &ErrorSampler::available_names);
    m.def(
        "simulate",
        [](const CascadeModel& model, const std::string& sampler, std::size_t n, std::uint64_t seed) {
            return simulate(model, ErrorSampler::from_name(sampler), n, seed).values;
        },
        py::arg("model"), py::arg("sampler"), py::arg("n"), py::arg("seed") = 0);

    py::class_<FitResult>(m, "FitResult")
        .def_readonly("tree", &FitResult::tree)
        .def_readonly("root", &FitResult::root)
        .def_readonly("coeffs", &FitResult::coeffs)
        .def_readonly("objective", &FitResult::objective)
        .def_readonly("weights", &FitResult::weights)
        .def_readonly("tree_unique", &FitResult::tree_unique)
        .def_readonly("names", &FitResult::names)
        .def_readonly("correlation", &FitResult::correlation)
        .def("model", &FitResult::model)
        .def("identity_objective", &FitResult::identity_objective);

    m.def(
        "fit_cascade",
        [](const Eigen::MatrixXd& cov, std::optional<Vertex> root) {
            return fit_cascade(CorrelationSummary::from_covariance(cov), root);
        },
        py::arg("covariance"), py::arg("root") = py::none(),
        "Optimal cascade for a covariance or correlation matrix.");
    m.def(
        "brute_force_fit",
        [](const Eigen::MatrixXd& cov) { return brute_force_fit(CorrelationSummary::from_covariance(cov)); },
        py::arg("covariance"));
    m.def(
        "empirical_fit",
        [](const Eigen::MatrixXd& values, std::vector<std::string> names, std::optional<Vertex> root) {
            Dataset ds;
            ds.values = values;
            ds.names = names.empty() ? default_column_names(static_cast<std::size_t>(values.cols())) : std::move(names);
            return empirical_fit(ds, root);
        },
        py::arg("values"), py::arg("names") = std::vector<std::string>{}, py::arg("root") = py::none());

    m.def(
        "chow_liu_tree", [](const Eigen::MatrixXd& cov) { return chow_liu_tree(GaussianSummary(cov)); },
        py::arg("covariance"));
    m.def(
        "correspondence_check",
        [](const Eigen::MatrixXd& cov) {
            const CorrespondenceReport r = correspondence_check(GaussianSummary(cov));
            py::dict out;
            out["trees_equal"] = r.trees_equal;
            out["monotone"] = r.monotone;
            out["tie_detected"] = r.tie_detected();
            out["chow_liu_tree"] = r.chow_liu.tree;
            out["cascade_tree"] = r.cascade.tree;
            return out;
        },
        py::arg("covariance"));

    m.def(
        "load_csv",
        [](const std::string& path) {
            Dataset ds = load_csv(path);
            return py::make_tuple(ds.names, ds.values);
        },
        py::arg("path"), "Returns (names, values).");
    m.def("save_fit", [](const FitResult& f, const std::string& path) { save_fit(f, path); });
    m.def("load_fit", [](const std::string& path) { return load_fit(path); });

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out;
            std::ostringstream err;
            const int code = cli::run(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs a treecascade subcommand; returns (exit_code, stdout, stderr).");
}
