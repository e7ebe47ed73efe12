#include "treecascade/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "treecascade/error.hpp"

namespace treecascade {

using nlohmann::json;

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

// One logical CSV record; quoted fields may span lines. Returns false at EOF.
bool read_record(std::istream& in, char delim, std::vector<std::string>& fields, std::size_t& line_no) {
    fields.clear();
    std::string line;
    if (!std::getline(in, line)) return false;
    ++line_no;
    std::string field;
    bool quoted = false;
    bool was_quoted = false;
    for (std::size_t pos = 0;; ++pos) {
        if (pos == line.size() || (!quoted && line[pos] == '\r' && pos + 1 == line.size())) {
            if (quoted) {
                std::string more;
                if (!std::getline(in, more)) throw ParseError("line " + std::to_string(line_no) + ": unterminated quote");
                ++line_no;
                field += '\n';
                line = std::move(more);
                pos = static_cast<std::size_t>(-1);
                continue;
            }
            fields.push_back(was_quoted ? field : trim(field));
            return true;
        }
        const char ch = line[pos];
        if (quoted) {
            if (ch == '"') {
                if (pos + 1 < line.size() && line[pos + 1] == '"') {
                    field += '"';
                    ++pos;
                } else {
                    quoted = false;
                }
            } else {
                field += ch;
            }
        } else if (ch == '"' && trim(field).empty()) {
            field.clear();
            quoted = true;
            was_quoted = true;
        } else if (ch == delim) {
            fields.push_back(was_quoted ? field : trim(field));
            field.clear();
            was_quoted = false;
        } else {
            field += ch;
        }
    }
}

bool is_blank(const std::vector<std::string>& fields) { return fields.size() == 1 && fields[0].empty(); }

bool parse_double(const std::string& text, double& out) {
    if (text.empty()) return false;
    const char* begin = text.data();
    const char* end = text.data() + text.size();
    if (*begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, ptr);
}

std::string quote_if_needed(const std::string& s, char delim) {
    if (s.find_first_of(std::string("\"\n\r") + delim) == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    return in;
}

std::vector<std::string> parse_header(std::istream& in, const std::filesystem::path& path, char delim,
                                      std::size_t& line_no) {
    std::vector<std::string> names;
    if (!read_record(in, delim, names, line_no) || is_blank(names)) {
        throw ParseError("'" + path.string() + "': missing header row");
    }
    if (!names.empty() && names[0].rfind("\xEF\xBB\xBF", 0) == 0) names[0].erase(0, 3);
    std::set<std::string> seen;
    for (const auto& n : names) {
        if (n.empty()) throw ParseError("'" + path.string() + "': empty column name in header");
        if (!seen.insert(n).second) throw ParseError("'" + path.string() + "': duplicate column name '" + n + "'");
    }
    return names;
}

// Schema accessors: errors carry a JSON-pointer style path.
const json& field(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) throw ParseError("schema: " + (path.empty() ? std::string("/") : path) + " must be an object");
    const auto it = obj.find(key);
    if (it == obj.end()) throw ParseError("schema: missing field " + path + "/" + key);
    return *it;
}

double number_at(const json& v, const std::string& path) {
    if (!v.is_number()) throw ParseError("schema: " + path + " must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ParseError("schema: " + path + " must be finite");
    return x;
}

std::size_t index_at(const json& v, const std::string& path) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
        throw ParseError("schema: " + path + " must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

bool bool_at(const json& v, const std::string& path) {
    if (!v.is_boolean()) throw ParseError("schema: " + path + " must be a boolean");
    return v.get<bool>();
}

const json& array_at(const json& v, const std::string& path, std::optional<std::size_t> size = std::nullopt) {
    if (!v.is_array()) throw ParseError("schema: " + path + " must be an array");
    if (size && v.size() != *size) {
        throw ParseError("schema: " + path + " must have " + std::to_string(*size) + " entries, got " +
                         std::to_string(v.size()));
    }
    return v;
}

struct ParsedModel {
    RootedTree rt;
    std::vector<double> coeffs;
    std::vector<double> error_vars;
    bool unit_variance;
};

ParsedModel parse_model(const json& doc) {
    const json& version = field(doc, "format_version", "");
    if (!version.is_number_integer() || version.get<int>() != kFormatVersion) {
        throw ParseError("schema: /format_version must be " + std::to_string(kFormatVersion));
    }
    const std::size_t d = index_at(field(doc, "d", ""), "/d");
    if (d == 0) throw ParseError("schema: /d must be at least 1");
    const std::size_t root = index_at(field(doc, "root", ""), "/root");
    if (root >= d) throw ParseError("schema: /root out of range");
    const json& edges = array_at(field(doc, "edges", ""), "/edges", d - 1);

    std::vector<Edge> tree_edges;
    std::vector<std::pair<Vertex, Vertex>> child_parent;
    std::vector<double> coeffs(d, 0.0);
    for (std::size_t s = 0; s < edges.size(); ++s) {
        const std::string p = "/edges/" + std::to_string(s);
        const std::size_t child = index_at(field(edges[s], "child", p), p + "/child");
        const std::size_t parent = index_at(field(edges[s], "parent", p), p + "/parent");
        if (child >= d || parent >= d || child == parent) throw ParseError("schema: " + p + " has invalid endpoints");
        coeffs[child] = number_at(field(edges[s], "coeff", p), p + "/coeff");
        tree_edges.emplace_back(child, parent);
        child_parent.emplace_back(child, parent);
    }
    Tree tree = [&] {
        try {
            return Tree(d, tree_edges);
        } catch (const InvalidInputError& e) {
            throw ParseError(std::string("schema: /edges do not form a tree: ") + e.what());
        }
    }();
    RootedTree rt(std::move(tree), root);
    for (std::size_t s = 0; s < child_parent.size(); ++s) {
        if (rt.parent(child_parent[s].first) != child_parent[s].second) {
            throw ParseError("schema: /edges/" + std::to_string(s) + " is not oriented toward the root");
        }
    }
    const json& ev = array_at(field(doc, "error_vars", ""), "/error_vars", d);
    std::vector<double> error_vars(d);
    for (std::size_t i = 0; i < d; ++i) error_vars[i] = number_at(ev[i], "/error_vars/" + std::to_string(i));
    const bool unit = bool_at(field(doc, "unit_variance", ""), "/unit_variance");
    return {std::move(rt), std::move(coeffs), std::move(error_vars), unit};
}

CascadeModel build_model(const ParsedModel& pm) {
    if (!pm.unit_variance) return CascadeModel(pm.rt, pm.coeffs, pm.error_vars);
    CascadeModel m = make_unit_variance_model(pm.rt, pm.coeffs);
    for (std::size_t i = 0; i < m.dimension(); ++i) {
        if (std::abs(m.error_variance(i) - pm.error_vars[i]) > 1e-12) {
            throw ParseError("schema: /error_vars/" + std::to_string(i) +
                             " is inconsistent with unit_variance (expected 1 - coeff^2)");
        }
    }
    return m;
}

}  // namespace

std::vector<std::string> default_column_names(std::size_t d) {
    std::vector<std::string> names;
    names.reserve(d);
    for (std::size_t i = 0; i < d; ++i) names.push_back("x" + std::to_string(i));
    return names;
}

std::vector<std::string> read_csv_header(const std::filesystem::path& path, const CsvOptions& options) {
    std::ifstream in = open_input(path);
    std::size_t line_no = 0;
    return parse_header(in, path, options.delimiter, line_no);
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
    std::ifstream in = open_input(path);
    std::size_t line_no = 0;
    Dataset ds;
    ds.names = parse_header(in, path, options.delimiter, line_no);
    const std::size_t d = ds.names.size();

    std::vector<double> flat;
    std::vector<std::string> fields;
    std::size_t rows = 0;
    std::size_t pending_blank = 0;
    while (read_record(in, options.delimiter, fields, line_no)) {
        if (is_blank(fields)) {
            ++pending_blank;
            continue;
        }
        if (pending_blank > 0) {
            throw ParseError("'" + path.string() + "': blank line before row " + std::to_string(rows + 1));
        }
        ++rows;
        if (fields.size() != d) {
            throw ParseError("'" + path.string() + "': row " + std::to_string(rows) + " (line " +
                             std::to_string(line_no) + ") has " + std::to_string(fields.size()) +
                             " fields, expected " + std::to_string(d));
        }
        for (std::size_t j = 0; j < d; ++j) {
            double v = 0.0;
            if (!parse_double(fields[j], v) || !std::isfinite(v)) {
                throw ParseError("'" + path.string() + "': row " + std::to_string(rows) + " (line " +
                                 std::to_string(line_no) + "), column " + ds.names[j] + ": '" + fields[j] +
                                 "' is not a finite number");
            }
            flat.push_back(v);
        }
    }
    ds.values = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        flat.data(), idx(rows), idx(d));
    return ds;
}

void save_csv(const Dataset& data, const std::filesystem::path& path, const CsvOptions& options) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    for (std::size_t j = 0; j < data.cols(); ++j) {
        if (j) out << options.delimiter;
        out << quote_if_needed(data.names.at(j), options.delimiter);
    }
    out << '\n';
    for (std::size_t r = 0; r < data.rows(); ++r) {
        for (std::size_t j = 0; j < data.cols(); ++j) {
            if (j) out << options.delimiter;
            out << format_double(data.values(idx(r), idx(j)));
        }
        out << '\n';
    }
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void validate_finite(const Dataset& data) {
    for (std::size_t r = 0; r < data.rows(); ++r) {
        for (std::size_t j = 0; j < data.cols(); ++j) {
            if (!std::isfinite(data.values(idx(r), idx(j)))) {
                throw ParseError("row " + std::to_string(r + 1) + ", column " + data.names.at(j) +
                                 ": value is not finite");
            }
        }
    }
}

Dataset standardize(const Dataset& data) {
    if (data.names.size() != data.cols()) throw InvalidInputError("dataset has mismatched column names");
    validate_finite(data);
    if (data.rows() < 2) throw InvalidInputError("standardization needs at least 2 rows");
    Dataset out;
    out.names = data.names;
    out.values = data.values;
    out.standardized = true;
    const double denom = static_cast<double>(data.rows() - 1);
    for (std::size_t j = 0; j < data.cols(); ++j) {
        auto col = out.values.col(idx(j));
        const double mean = col.mean();
        col.array() -= mean;
        const double sd = std::sqrt(col.squaredNorm() / denom);
        if (!(sd > 0.0)) throw InvalidInputError("column " + data.names[j] + " has zero variance");
        col /= sd;
        out.means.push_back(mean);
        out.scales.push_back(sd);
    }
    return out;
}

Dataset price_changes(const Dataset& data) {
    if (data.rows() < 2) throw InvalidInputError("price changes need at least 2 rows");
    Dataset out;
    out.names = data.names;
    const auto n = idx(data.rows());
    out.values = data.values.bottomRows(n - 1) - data.values.topRows(n - 1);
    return out;
}

namespace {

json model_document(const RootedTree& rt, const std::vector<double>& coeffs, const std::vector<double>& error_vars,
                    bool unit_variance, const std::vector<std::string>& names) {
    json doc;
    doc["format_version"] = kFormatVersion;
    doc["d"] = rt.vertex_count();
    doc["root"] = rt.root();
    if (!names.empty()) doc["names"] = names;
    json edges = json::array();
    for (const Edge& e : rt.tree().edges()) {
        const Vertex child = rt.parent(e.u) == e.v ? e.u : e.v;
        edges.push_back({{"child", child}, {"parent", *rt.parent(child)}, {"coeff", coeffs[child]}});
    }
    doc["edges"] = std::move(edges);
    doc["error_vars"] = error_vars;
    doc["unit_variance"] = unit_variance;
    return doc;
}

}  // namespace

json model_to_json(const CascadeModel& m, const std::vector<std::string>& names) {
    return model_document(m.rooted_tree(), m.coefficients(), m.error_variances(), m.unit_variance(), names);
}

CascadeModel model_from_json(const json& doc) { return build_model(parse_model(doc)); }

std::vector<std::string> names_from_json(const json& doc) {
    const std::size_t d = index_at(field(doc, "d", ""), "/d");
    const auto it = doc.find("names");
    if (it == doc.end()) return default_column_names(d);
    const json& arr = array_at(*it, "/names", d);
    std::vector<std::string> names;
    for (std::size_t i = 0; i < d; ++i) {
        if (!arr[i].is_string()) throw ParseError("schema: /names/" + std::to_string(i) + " must be a string");
        names.push_back(arr[i].get<std::string>());
    }
    return names;
}

json fit_to_json(const FitResult& fit) {
    // Written directly rather than through fit.model(): a fitted edge may carry
    // a zero coefficient, which the unit-variance constructor rejects.
    const RootedTree rt = fit.rooted_tree();
    std::vector<double> error_vars(fit.coeffs.size(), 1.0);
    bool unit = true;
    for (Vertex i = 0; i < fit.coeffs.size(); ++i) {
        if (i == fit.root) continue;
        const double a = fit.coeffs[i];
        error_vars[i] = 1.0 - a * a;
        if (a == 0.0 || !(std::abs(a) < 1.0)) unit = false;
    }
    json doc = model_document(rt, fit.coeffs, error_vars, unit, fit.names);
    doc["objective"] = fit.objective;
    doc["weights"] = fit.weights;
    doc["tree_unique"] = fit.tree_unique;
    doc["root_hint_source"] = fit.root_source == RootSource::hint ? "hint" : "default";
    if (fit.correlation) {
        json rows = json::array();
        for (Eigen::Index i = 0; i < fit.correlation->rows(); ++i) {
            std::vector<double> row(static_cast<std::size_t>(fit.correlation->cols()));
            for (Eigen::Index j = 0; j < fit.correlation->cols(); ++j) row[static_cast<std::size_t>(j)] = (*fit.correlation)(i, j);
            rows.push_back(row);
        }
        doc["correlation"] = std::move(rows);
    }
    return doc;
}

FitResult fit_from_json(const json& doc) {
    const ParsedModel pm = parse_model(doc);
    FitResult fit;
    fit.tree = pm.rt.tree();
    fit.root = pm.rt.root();
    fit.coeffs = pm.coeffs;
    fit.names = names_from_json(doc);
    fit.objective = number_at(field(doc, "objective", ""), "/objective");
    fit.tree_unique = bool_at(field(doc, "tree_unique", ""), "/tree_unique");
    const json& src = field(doc, "root_hint_source", "");
    if (src == "hint") {
        fit.root_source = RootSource::hint;
    } else if (src == "default") {
        fit.root_source = RootSource::default_vertex;
    } else {
        throw ParseError("schema: /root_hint_source must be \"hint\" or \"default\"");
    }

    const std::size_t d = pm.rt.vertex_count();
    const json& w = array_at(field(doc, "weights", ""), "/weights", d - 1);
    const json& edges = doc.at("edges");
    fit.weights.assign(d - 1, 0.0);
    for (std::size_t s = 0; s < w.size(); ++s) {
        const Edge e(edges[s].at("child").get<std::size_t>(), edges[s].at("parent").get<std::size_t>());
        const auto pos = std::lower_bound(fit.tree.edges().begin(), fit.tree.edges().end(), e);
        fit.weights[static_cast<std::size_t>(pos - fit.tree.edges().begin())] =
            number_at(w[s], "/weights/" + std::to_string(s));
    }

    if (const auto it = doc.find("correlation"); it != doc.end()) {
        const json& rows = array_at(*it, "/correlation", d);
        Eigen::MatrixXd corr(idx(d), idx(d));
        for (std::size_t i = 0; i < d; ++i) {
            const std::string p = "/correlation/" + std::to_string(i);
            const json& row = array_at(rows[i], p, d);
            for (std::size_t j = 0; j < d; ++j) corr(idx(i), idx(j)) = number_at(row[j], p + "/" + std::to_string(j));
        }
        fit.correlation = std::move(corr);
    }
    for (std::size_t i = 0; i < d; ++i) {
        const double expected = i == fit.root ? 1.0 : 1.0 - fit.coeffs[i] * fit.coeffs[i];
        if (std::abs(pm.error_vars[i] - expected) > 1e-12) {
            throw ParseError("schema: /error_vars/" + std::to_string(i) + " is inconsistent with the fitted coefficients");
        }
    }
    return fit;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError("'" + path.string() + "': " + e.what());
    }
}

void write_json_file(const json& doc, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void save_fit(const FitResult& fit, const std::filesystem::path& path) { write_json_file(fit_to_json(fit), path); }

FitResult load_fit(const std::filesystem::path& path) { return fit_from_json(read_json_file(path)); }

}  // namespace treecascade
