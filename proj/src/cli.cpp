#include "treecascade/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "treecascade/cascade_model.hpp"
#include "treecascade/chow_liu.hpp"
#include "treecascade/data_io.hpp"
#include "treecascade/error.hpp"
#include "treecascade/graph.hpp"
#include "treecascade/random.hpp"
#include "treecascade/regression.hpp"

namespace treecascade::cli {

namespace {

// Raised for flag combinations CLI11 cannot express.
class UsageError : public Error {
public:
    using Error::Error;
};

std::string fixed(double v, int digits) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

std::string sci(double v) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(3) << v;
    return os.str();
}

std::string dot_quote(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"' || ch == '\\') out += '\\';
        out += ch;
    }
    return out + "\"";
}

struct FitOptions {
    std::string data;
    bool diff = false;
    std::optional<std::size_t> root;
    std::string out;
};

int cmd_fit(const FitOptions& opt, std::ostream& out) {
    const auto header = read_csv_header(opt.data);
    if (opt.root && *opt.root >= header.size()) {
        throw UsageError("--root " + std::to_string(*opt.root) + " is out of range for " +
                         std::to_string(header.size()) + " columns");
    }
    Dataset data = load_csv(opt.data);
    if (opt.diff) data = price_changes(data);
    const FitResult fit = empirical_fit(standardize(data), opt.root);
    save_fit(fit, opt.out);

    const double identity = fit.identity_objective();
    out << "variables: " << fit.tree.vertex_count() << "\n";
    out << "samples: " << data.rows() << "\n";
    out << "objective: " << std::setprecision(17) << fit.objective << "\n";
    out << "d - sum rho^2: " << std::setprecision(17) << identity << " (|difference| = "
        << sci(std::abs(fit.objective - identity)) << ")\n";
    out << "tree_unique: " << (fit.tree_unique ? "true" : "false") << "\n";
    return kOk;
}

struct SimulateOptions {
    std::string model;
    std::string sampler;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_simulate(const SimulateOptions& opt) {
    const ErrorSampler sampler = [&] {
        try {
            return ErrorSampler::from_name(opt.sampler);
        } catch (const InvalidInputError& e) {
            throw UsageError(e.what());
        }
    }();
    if (opt.n == 0) throw UsageError("--n must be at least 1");
    const auto doc = read_json_file(opt.model);
    const CascadeModel model = model_from_json(doc);
    Dataset data = simulate(model, sampler, opt.n, opt.seed);
    data.names = names_from_json(doc);
    save_csv(data, opt.out);
    return kOk;
}

struct VerifyRow {
    std::string name;
    bool passed;
    std::string detail;
};

int cmd_verify(const std::string& model_path, const std::vector<std::size_t>& random, std::ostream& out) {
    if (model_path.empty() == random.empty()) throw UsageError("verify needs exactly one of --model or --random");
    if (!random.empty() && random[0] == 0) throw UsageError("--random dimension must be at least 1");

    const CascadeModel model = [&] {
        if (!random.empty()) {
            Rng rng(random[1]);
            return random_unit_variance_model(random[0], rng);
        }
        return model_from_json(read_json_file(model_path));
    }();
    if (!model.unit_variance()) throw UnsupportedInputError("verify requires a unit-variance model");

    const std::size_t d = model.dimension();
    const Tree& tree = model.rooted_tree().tree();
    const Eigen::MatrixXd cov = population_covariance(model);
    std::vector<VerifyRow> rows;

    const CovarianceLemmaReport lemmas = verify_covariance_lemmas(model);
    for (const LemmaCheck& chk : lemmas.checks()) {
        rows.push_back({chk.name, chk.passed,
                        std::to_string(chk.pairs_checked) + " checked, worst " + sci(chk.worst)});
    }

    const WeightedGraph weights = squared_correlation_graph(cov);
    rows.push_back({"strict triangle condition on squared correlations", check_strict_triangle_condition(weights, tree),
                    "generating tree"});

    const MstResult mst = maximum_spanning_tree(weights);
    rows.push_back({"generating tree is the unique maximum spanning tree", mst.tree == tree && mst.is_unique,
                    std::string("is_unique=") + (mst.is_unique ? "true" : "false")});

    const FitResult fit = fit_cascade(CorrelationSummary::from_covariance(cov), model.root());
    const double gap = std::abs(fit.objective - fit.identity_objective());
    rows.push_back({"optimal objective equals d - sum of edge rho^2", gap <= 1e-12 && fit.tree == tree,
                    "|difference| = " + sci(gap)});

    bool all = true;
    out << "model: d=" << d << ", root=" << model.root() << "\n";
    for (const VerifyRow& row : rows) {
        out << (row.passed ? "PASS  " : "FAIL  ") << row.name << "  [" << row.detail << "]\n";
        all = all && row.passed;
    }
    out << (all ? "all checks passed" : "verification FAILED") << "\n";
    return all ? kOk : kVerificationFailed;
}

int cmd_cluster(const std::string& fit_path, std::size_t k, std::ostream& out) {
    if (k == 0) throw UsageError("--k must be at least 1");
    const FitResult fit = load_fit(fit_path);
    if (k > fit.tree.vertex_count()) {
        throw UsageError("--k " + std::to_string(k) + " exceeds the " + std::to_string(fit.tree.vertex_count()) +
                         " variables in the fit");
    }
    for (const auto& cluster : cluster_by_edge_deletion(fit.tree, fit.weights, k)) {
        for (std::size_t s = 0; s < cluster.size(); ++s) out << (s ? ", " : "") << fit.names[cluster[s]];
        out << "\n";
    }
    return kOk;
}

int cmd_export_dot(const std::string& fit_path, const std::string& out_path) {
    const FitResult fit = load_fit(fit_path);
    const bool directed = fit.root_source == RootSource::hint;
    const RootedTree rt = fit.rooted_tree();
    std::ofstream dot(out_path, std::ios::binary);
    if (!dot) throw IoError("cannot open '" + out_path + "' for writing");
    dot << (directed ? "digraph" : "graph") << " cascade_tree {\n";
    for (const auto& name : fit.names) dot << "  " << dot_quote(name) << ";\n";
    const auto& edges = fit.tree.edges();
    for (std::size_t s = 0; s < edges.size(); ++s) {
        Vertex a = edges[s].u;
        Vertex b = edges[s].v;
        if (directed && rt.parent(a) == b) std::swap(a, b);
        dot << "  " << dot_quote(fit.names[a]) << (directed ? " -> " : " -- ") << dot_quote(fit.names[b])
            << " [label=\"" << fixed(fit.weights[s], 4) << "\"];\n";
    }
    dot << "}\n";
    if (!dot) throw IoError("failed writing '" + out_path + "'");
    return kOk;
}

int cmd_chow_check(const std::string& data_path, bool diff, const std::string& fit_path, std::ostream& out) {
    if (data_path.empty() == fit_path.empty()) throw UsageError("chow-check needs exactly one of --data or --fit");
    Eigen::MatrixXd cov;
    std::vector<std::string> names;
    if (!data_path.empty()) {
        Dataset data = load_csv(data_path);
        if (diff) data = price_changes(data);
        cov = CorrelationSummary::from_dataset(data).matrix();
        names = data.names;
    } else {
        const FitResult fit = load_fit(fit_path);
        if (!fit.correlation) throw ParseError("'" + fit_path + "' has no correlation matrix to check");
        cov = *fit.correlation;
        names = fit.names;
    }
    const CorrespondenceReport report = correspondence_check(GaussianSummary(cov));
    out << "edge\trho^2\t-1/2 log(1 - rho^2)\n";
    for (const auto& pair : report.edge_weights) {
        out << names[pair.edge.u] << " -- " << names[pair.edge.v] << "\t" << fixed(pair.squared_correlation, 6) << "\t"
            << fixed(pair.mutual_information, 6) << "\n";
    }
    out << "weights monotone: " << (report.monotone ? "true" : "false") << "\n";
    out << "trees equal: " << (report.trees_equal ? "true" : "false") << "\n";
    if (report.tie_detected()) out << "note: tie detected, the maximum spanning tree is not unique\n";
    return report.trees_equal && report.monotone ? kOk : kVerificationFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fit, simulate and verify tree linear cascade models", "treecascade"};
    app.require_subcommand(1);

    FitOptions fit_opt;
    auto* fit = app.add_subcommand("fit", "Fit a cascade tree to a CSV dataset");
    fit->add_option("--data", fit_opt.data, "CSV with a header row")->required();
    fit->add_flag("--diff", fit_opt.diff, "Use first differences of the rows (price changes)");
    fit->add_option("--root", fit_opt.root, "Root vertex (column index); default 0");
    fit->add_option("--out", fit_opt.out, "Output fit document (JSON)")->required();

    SimulateOptions sim_opt;
    auto* sim = app.add_subcommand("simulate", "Draw samples from a model or fit document");
    sim->add_option("--model", sim_opt.model, "Model or fit document")->required();
    sim->add_option("--sampler", sim_opt.sampler, "Error distribution")->required();
    sim->add_option("--n", sim_opt.n, "Number of samples")->required();
    sim->add_option("--seed", sim_opt.seed, "Generator seed");
    sim->add_option("--out", sim_opt.out, "Output CSV")->required();

    std::string verify_model;
    std::vector<std::size_t> verify_random;
    auto* verify = app.add_subcommand("verify", "Check the covariance lemmas and tree identifiability of a model");
    auto* vm = verify->add_option("--model", verify_model, "Model or fit document");
    verify->add_option("--random", verify_random, "Random unit-variance model: dimension and seed")
        ->expected(2)
        ->excludes(vm);

    std::string cluster_fit;
    std::size_t cluster_k = 0;
    auto* cluster = app.add_subcommand("cluster", "Split the fitted tree into k clusters");
    cluster->add_option("--fit", cluster_fit, "Fit document")->required();
    cluster->add_option("--k", cluster_k, "Number of clusters")->required();

    std::string dot_fit;
    std::string dot_out;
    auto* dot = app.add_subcommand("export-dot", "Write the fitted tree as a DOT graph");
    dot->add_option("--fit", dot_fit, "Fit document")->required();
    dot->add_option("--out", dot_out, "Output DOT file")->required();

    std::string chow_data;
    bool chow_diff = false;
    std::string chow_fit;
    auto* chow = app.add_subcommand("chow-check", "Compare the cascade tree with the Gaussian Chow-Liu tree");
    auto* cd = chow->add_option("--data", chow_data, "CSV dataset");
    chow->add_flag("--diff", chow_diff, "Use first differences of the rows");
    chow->add_option("--fit", chow_fit, "Fit document with a stored correlation matrix")->excludes(cd);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*fit) return cmd_fit(fit_opt, out);
        if (*sim) return cmd_simulate(sim_opt);
        if (*verify) return cmd_verify(verify_model, verify_random, out);
        if (*cluster) return cmd_cluster(cluster_fit, cluster_k, out);
        if (*dot) return cmd_export_dot(dot_fit, dot_out);
        if (*chow) return cmd_chow_check(chow_data, chow_diff, chow_fit, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << "\n";
        return kIo;
    } catch (const ParseError& e) {
        err << "data error: " << e.what() << "\n";
        return kBadData;
    } catch (const Error& e) {
        err << "model error: " << e.what() << "\n";
        return kBadModel;
    }
    return kUsage;
}

}  // namespace treecascade::cli
