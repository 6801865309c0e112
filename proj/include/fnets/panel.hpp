#pragma once

#include "fnets/common.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace fnets {

/// A p x n panel: rows are series, columns are time points.
struct TimeSeriesPanel {
    Matrix values;
    std::vector<std::string> labels;
    bool centered = false;

    Index p() const { return values.rows(); }
    Index n() const { return values.cols(); }

    /// Throws if p < 2, n < 2, labels mismatch, non-finite entries, or a
    /// centered panel has a row whose mean is not zero.
    void validate() const;

    /// Columns [begin, end) as a new panel (time segment).
    TimeSeriesPanel segment(Index begin, Index end) const;
};

TimeSeriesPanel make_panel(Matrix values, std::vector<std::string> labels = {}, bool demean = false);

/// Subtracts each row mean in place and marks the panel centered.
void demean(TimeSeriesPanel& panel);

/// Reads a time-major CSV (header of series names, first column a time index).
TimeSeriesPanel load_panel(const std::filesystem::path& path, bool demean = true);

/// Writes a time-major CSV that load_panel reads back; time index is 1..n.
void write_panel(const TimeSeriesPanel& panel, const std::filesystem::path& path);

/// Plain numeric matrix CSV with a header row of column labels.
void write_matrix_csv(const Matrix& m, const std::filesystem::path& path,
                      const std::vector<std::string>& col_labels = {},
                      const std::vector<std::string>& row_labels = {});

/// Shortest decimal representation is not used; 17 significant digits always.
std::string format_double(double v);

struct RunConfig {
    std::optional<int> q;
    std::optional<int> r;
    std::optional<int> d;
    std::optional<int> bandwidth;
    std::optional<double> lambda;
    std::optional<double> eta;
    std::optional<double> threshold;
    std::optional<double> threshold_delta;
    std::optional<double> threshold_omega;
    Solver solver = Solver::lasso;
    int horizon = 1;
    int cv_folds = 1;
    int max_order = 5;
    CommonMethod common = CommonMethod::restricted;
    int truncation_lag = 20;
    int n_perm = 30;
    int block_max_order = 5;
    std::uint64_t seed = 0;

    /// Throws on negative counts, m >= n, or d * p > 10 n.
    void validate(Index p, Index n) const;
};

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& c);
RunConfig load_config(const std::filesystem::path& path);

} // namespace fnets
