#include "fnets/panel.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fnets {

void TimeSeriesPanel::validate() const
{
    if (p() < 2 || n() < 2)
        throw Error("panel must have p >= 2 series and n >= 2 time points (got p=" +
                    std::to_string(p()) + ", n=" + std::to_string(n()) + ")");
    if (static_cast<Index>(labels.size()) != p())
        throw Error("panel has " + std::to_string(labels.size()) + " labels for " +
                    std::to_string(p()) + " series");
    if (!values.allFinite()) throw Error("panel contains non-finite values");
    if (centered) {
        for (Index i = 0; i < p(); ++i) {
            const double scale = std::max(1.0, values.row(i).cwiseAbs().maxCoeff());
            if (std::abs(values.row(i).sum()) > 1e-9 * static_cast<double>(n()) * scale)
                throw Error("centered panel row " + std::to_string(i) + " has nonzero mean");
        }
    }
}

TimeSeriesPanel TimeSeriesPanel::segment(Index begin, Index end) const
{
    if (begin < 0 || end > n() || begin >= end) throw Error("invalid panel segment");
    TimeSeriesPanel out;
    out.values = values.middleCols(begin, end - begin);
    out.labels = labels;
    out.centered = false;
    return out;
}

TimeSeriesPanel make_panel(Matrix values, std::vector<std::string> labels, bool demean_rows)
{
    TimeSeriesPanel panel;
    panel.values = std::move(values);
    if (labels.empty()) {
        for (Index i = 0; i < panel.p(); ++i) labels.push_back("s" + std::to_string(i + 1));
    }
    panel.labels = std::move(labels);
    if (demean_rows) demean(panel);
    panel.validate();
    return panel;
}

void demean(TimeSeriesPanel& panel)
{
    panel.values.colwise() -= panel.values.rowwise().mean();
    panel.centered = true;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') {
            quoted = !quoted;
        } else if (c == ',' && !quoted) {
            cells.push_back(cell);
            cell.clear();
        } else if (c != '\r') {
            cell.push_back(c);
        }
    }
    cells.push_back(cell);
    return cells;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& raw, double& out)
{
    const std::string s = trim(raw);
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && std::isfinite(out);
}

} // namespace

TimeSeriesPanel load_panel(const std::filesystem::path& path, bool demean_rows)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open panel file " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw Error("panel file " + path.string() + " is empty");
    const auto header = split_csv_line(line);
    if (header.size() < 2) throw Error("panel header must have a time column and at least one series");
    std::vector<std::string> labels;
    for (std::size_t c = 1; c < header.size(); ++c) labels.push_back(trim(header[c]));
    const std::size_t p = labels.size();

    std::vector<std::vector<double>> rows;
    Index t = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        ++t;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw Error("ragged row at t=" + std::to_string(t) + ": expected " +
                        std::to_string(header.size()) + " cells, got " + std::to_string(cells.size()));
        std::vector<double> row(p);
        for (std::size_t c = 0; c < p; ++c) {
            if (!parse_double(cells[c + 1], row[c]))
                throw Error("non-numeric at (t=" + std::to_string(t) + ", series=" + labels[c] + "): '" +
                            cells[c + 1] + "'");
        }
        rows.push_back(std::move(row));
    }

    Matrix values(static_cast<Index>(p), static_cast<Index>(rows.size()));
    for (std::size_t tt = 0; tt < rows.size(); ++tt)
        for (std::size_t c = 0; c < p; ++c) values(static_cast<Index>(c), static_cast<Index>(tt)) = rows[tt][c];
    return make_panel(std::move(values), std::move(labels), demean_rows);
}

std::string format_double(double v)
{
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(17);
    os << v;
    return os.str();
}

void write_panel(const TimeSeriesPanel& panel, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) throw Error("cannot write panel file " + path.string());
    out << "t";
    for (const auto& l : panel.labels) out << ',' << l;
    out << '\n';
    for (Index t = 0; t < panel.n(); ++t) {
        out << (t + 1);
        for (Index i = 0; i < panel.p(); ++i) out << ',' << format_double(panel.values(i, t));
        out << '\n';
    }
    if (!out) throw Error("I/O failure writing " + path.string());
}

void write_matrix_csv(const Matrix& m, const std::filesystem::path& path,
                      const std::vector<std::string>& col_labels,
                      const std::vector<std::string>& row_labels)
{
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    const bool named_rows = static_cast<Index>(row_labels.size()) == m.rows();
    if (named_rows) out << "row";
    for (Index j = 0; j < m.cols(); ++j) {
        if (j > 0 || named_rows) out << ',';
        out << (static_cast<Index>(col_labels.size()) == m.cols() ? col_labels[j] : "c" + std::to_string(j + 1));
    }
    out << '\n';
    for (Index i = 0; i < m.rows(); ++i) {
        if (named_rows) out << row_labels[i];
        for (Index j = 0; j < m.cols(); ++j) {
            if (j > 0 || named_rows) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
    if (!out) throw Error("I/O failure writing " + path.string());
}

void RunConfig::validate(Index p, Index n) const
{
    auto nonneg = [](const auto& v, const char* name) {
        if (v && *v < 0) throw Error(std::string(name) + " must be nonnegative");
    };
    nonneg(q, "q");
    nonneg(r, "r");
    nonneg(lambda, "lambda");
    nonneg(eta, "eta");
    nonneg(threshold, "threshold");
    nonneg(threshold_delta, "threshold_delta");
    nonneg(threshold_omega, "threshold_omega");
    if (d && *d < 1) throw Error("VAR order d must be positive");
    if (bandwidth && (*bandwidth < 1 || *bandwidth >= n))
        throw Error("bandwidth m must satisfy 1 <= m < n");
    if (horizon < 0) throw Error("forecast horizon must be nonnegative");
    if (cv_folds < 1) throw Error("cv_folds must be positive");
    if (max_order < 1) throw Error("max_order must be positive");
    if (truncation_lag < 0) throw Error("truncation lag K must be nonnegative");
    if (n_perm < 1) throw Error("n_perm must be positive");
    if (block_max_order < 1) throw Error("block_max_order must be positive");
    if (d && static_cast<Index>(*d) * p > 10 * n)
        throw Error("d * p = " + std::to_string(*d * p) + " exceeds 10 n = " + std::to_string(10 * n) +
                    "; reduce the VAR order");
    if (q && *q >= p) throw Error("q must be smaller than p");
}

namespace {

template <typename T>
void read_auto(const nlohmann::json& j, const char* key, std::optional<T>& dst)
{
    if (!j.contains(key) || j.at(key).is_null()) return;
    const auto& v = j.at(key);
    if (v.is_string()) {
        if (v.get<std::string>() == "auto") return;
        throw Error(std::string("config key '") + key + "' must be a number or \"auto\"");
    }
    dst = v.get<T>();
}

template <typename T>
nlohmann::json write_auto(const std::optional<T>& v)
{
    return v ? nlohmann::json(*v) : nlohmann::json("auto");
}

} // namespace

RunConfig config_from_json(const nlohmann::json& j)
{
    RunConfig c;
    try {
        read_auto(j, "q", c.q);
        read_auto(j, "r", c.r);
        read_auto(j, "d", c.d);
        read_auto(j, "bandwidth", c.bandwidth);
        read_auto(j, "lambda", c.lambda);
        read_auto(j, "eta", c.eta);
        read_auto(j, "threshold", c.threshold);
        read_auto(j, "threshold_delta", c.threshold_delta);
        read_auto(j, "threshold_omega", c.threshold_omega);
        if (j.contains("solver")) c.solver = parse_solver(j.at("solver").get<std::string>());
        if (j.contains("common")) c.common = parse_common_method(j.at("common").get<std::string>());
        c.horizon = j.value("horizon", c.horizon);
        c.cv_folds = j.value("cv_folds", c.cv_folds);
        c.max_order = j.value("max_order", c.max_order);
        c.truncation_lag = j.value("K", c.truncation_lag);
        c.n_perm = j.value("n_perm", c.n_perm);
        c.block_max_order = j.value("block_max_order", c.block_max_order);
        c.seed = j.value("seed", c.seed);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("invalid config: ") + e.what());
    }
    return c;
}

nlohmann::json config_to_json(const RunConfig& c)
{
    return {
        {"q", write_auto(c.q)},
        {"r", write_auto(c.r)},
        {"d", write_auto(c.d)},
        {"bandwidth", write_auto(c.bandwidth)},
        {"lambda", write_auto(c.lambda)},
        {"eta", write_auto(c.eta)},
        {"threshold", write_auto(c.threshold)},
        {"threshold_delta", write_auto(c.threshold_delta)},
        {"threshold_omega", write_auto(c.threshold_omega)},
        {"solver", to_string(c.solver)},
        {"common", to_string(c.common)},
        {"horizon", c.horizon},
        {"cv_folds", c.cv_folds},
        {"max_order", c.max_order},
        {"K", c.truncation_lag},
        {"n_perm", c.n_perm},
        {"block_max_order", c.block_max_order},
        {"seed", c.seed},
    };
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open config " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

} // namespace fnets
