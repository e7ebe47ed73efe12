#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "treecascade/cascade_model.hpp"
#include "treecascade/dataset.hpp"
#include "treecascade/regression.hpp"

namespace treecascade {

struct CsvOptions {
    char delimiter = ',';
};

/// Reads a header row of column names followed by rows of decimal reals.
/// Quoted fields follow RFC 4180. Trailing blank lines are ignored. Row numbers
/// in errors count data rows from 1 (the header is line 1, data row r is
/// line r + 1).
Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});

/// Column names only; reads the first line of the file.
std::vector<std::string> read_csv_header(const std::filesystem::path& path, const CsvOptions& options = {});

/// Writes names and values with 17 significant digits.
void save_csv(const Dataset& data, const std::filesystem::path& path, const CsvOptions& options = {});

/// Throws ParseError naming the first non-finite cell.
void validate_finite(const Dataset& data);

/// Subtracts column means and divides by the sample (n - 1) standard deviation.
Dataset standardize(const Dataset& data);

/// First differences row_{t+1} - row_t.
Dataset price_changes(const Dataset& data);

inline constexpr int kFormatVersion = 1;

/// Model document: {format_version, d, root, names?, edges: [{child, parent,
/// coeff}], error_vars, unit_variance}.
nlohmann::json model_to_json(const CascadeModel& m, const std::vector<std::string>& names = {});
CascadeModel model_from_json(const nlohmann::json& doc);

/// Model document of fit.model() plus {objective, weights, tree_unique,
/// root_hint_source, correlation?}. `weights` is aligned with `edges`.
nlohmann::json fit_to_json(const FitResult& fit);
FitResult fit_from_json(const nlohmann::json& doc);

/// Column names stored in a document, or x0..x{d-1} when absent.
std::vector<std::string> names_from_json(const nlohmann::json& doc);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const nlohmann::json& doc, const std::filesystem::path& path);

void save_fit(const FitResult& fit, const std::filesystem::path& path);
FitResult load_fit(const std::filesystem::path& path);

}  // namespace treecascade
