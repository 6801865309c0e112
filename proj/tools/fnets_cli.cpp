#include "fnets/pipeline.hpp"
#include "fnets/simulate.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>

namespace fs = std::filesystem;
using namespace fnets;

namespace {

// Flags shared by estimate, forecast and tune. Values stay as strings so that "auto" is accepted.
struct ModelFlags {
    std::string input;
    std::string output = ".";
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string q = "auto", r = "auto", var_order = "auto", lambda = "auto";
    std::string solver;
    std::string threshold = "auto", eta = "auto", threshold_delta = "auto", threshold_omega = "auto";
};

template <typename T>
std::optional<T> parse_auto(const std::string& flag, const std::string& text)
{
    if (text == "auto") return std::nullopt;
    try {
        std::size_t used = 0;
        T value;
        if constexpr (std::is_integral_v<T>) {
            value = static_cast<T>(std::stoll(text, &used));
        } else {
            value = std::stod(text, &used);
        }
        if (used != text.size()) throw std::invalid_argument(text);
        return value;
    } catch (const std::exception&) {
        throw Error("--" + flag + ": expected 'auto' or a number, got '" + text + "'");
    }
}

// Explicit command-line values override the JSON config; "auto" leaves the config value alone.
template <typename T>
void override_with(std::optional<T>& slot, const std::string& flag, const std::string& text)
{
    if (auto v = parse_auto<T>(flag, text)) slot = v;
}

void add_model_flags(CLI::App* cmd, ModelFlags& f)
{
    cmd->add_option("--input", f.input, "Panel CSV: time column then one column per series")->required();
    cmd->add_option("--output", f.output, "Output directory");
    cmd->add_option("--config", f.config, "JSON run configuration");
    cmd->add_option("--seed", f.seed, "Random seed for permutation-based steps");
    cmd->add_option("--q", f.q, "Number of dynamic factors (auto|N)");
    cmd->add_option("--r", f.r, "Number of static factors (auto|N)");
    cmd->add_option("--var-order", f.var_order, "VAR order d (auto|N)");
    cmd->add_option("--lambda", f.lambda, "l1 penalty for the VAR step (auto|X)");
    cmd->add_option("--solver", f.solver, "lasso|dantzig");
    cmd->add_option("--threshold", f.threshold, "Granger edge threshold (auto|X)");
    cmd->add_option("--eta", f.eta, "Precision-matrix budget (auto|X)");
    cmd->add_option("--threshold-delta", f.threshold_delta, "Contemporaneous edge threshold (auto|X)");
    cmd->add_option("--threshold-omega", f.threshold_omega, "Long-run edge threshold (auto|X)");
}

RunConfig resolve_config(const ModelFlags& f)
{
    RunConfig cfg = f.config.empty() ? RunConfig{} : load_config(f.config);
    override_with(cfg.q, "q", f.q);
    override_with(cfg.r, "r", f.r);
    override_with(cfg.d, "var-order", f.var_order);
    override_with(cfg.lambda, "lambda", f.lambda);
    override_with(cfg.eta, "eta", f.eta);
    override_with(cfg.threshold, "threshold", f.threshold);
    override_with(cfg.threshold_delta, "threshold-delta", f.threshold_delta);
    override_with(cfg.threshold_omega, "threshold-omega", f.threshold_omega);
    if (!f.solver.empty()) cfg.solver = parse_solver(f.solver);
    if (f.seed) cfg.seed = *f.seed;
    return cfg;
}

int run_estimate(const ModelFlags& f, bool dump_acv)
{
    const TimeSeriesPanel panel = load_panel(f.input);
    const FnetsFit fit = fnets_estimate(panel, resolve_config(f));
    write_estimate_outputs(fit, panel, f.output, dump_acv);
    for (const auto& w : fit.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << "q=" << fit.factors.q << " r=" << fit.factors.r << " d=" << fit.var.d << " lambda=" << format_double(fit.var.lambda)
              << " eta=" << format_double(fit.precision.eta) << "\n";
    return 0;
}

struct ForecastFlags {
    int horizon = 1;
    std::string common;
    std::optional<int> truncation;
    std::optional<int> n_perm;
};

int run_forecast(const ModelFlags& f, const ForecastFlags& ff)
{
    const TimeSeriesPanel panel = load_panel(f.input);
    RunConfig cfg = resolve_config(f);
    cfg.horizon = ff.horizon;
    if (!ff.common.empty()) cfg.common = parse_common_method(ff.common);
    if (ff.truncation) cfg.truncation_lag = *ff.truncation;
    if (ff.n_perm) cfg.n_perm = *ff.n_perm;
    const FnetsFit fit = fnets_estimate(panel, cfg);
    const ForecastResult fc = fnets_forecast(fit, panel, cfg.horizon, cfg.common);
    write_forecast_outputs(fit, panel, fc, f.output);
    for (const auto& w : fit.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << "wrote " << (fs::path(f.output) / "forecast.json").string() << "\n";
    return 0;
}

int run_tune(const ModelFlags& f)
{
    const TimeSeriesPanel panel = load_panel(f.input);
    RunConfig cfg = resolve_config(f);
    cfg.lambda.reset();
    cfg.eta.reset();
    const FnetsFit fit = fnets_estimate(panel, cfg);
    std::cout << "stage,lambda,d,eta,score\n";
    if (fit.lambda_cv) {
        for (const auto& s : fit.lambda_cv->table)
            std::cout << "var," << format_double(s.lambda) << "," << s.d << ",," << format_double(s.score) << "\n";
    }
    if (fit.eta_cv) {
        for (const auto& s : fit.eta_cv->table)
            std::cout << "precision,,," << format_double(s.eta) << "," << format_double(s.score) << "\n";
    }
    std::cerr << "selected lambda=" << format_double(fit.var.lambda) << " d=" << fit.var.d
              << " eta=" << format_double(fit.precision.eta) << "\n";
    return 0;
}

struct SimulateFlags {
    std::string dgp = "C1xE1";
    Index n = 200;
    Index p = 50;
    int q = 2;
    int reps = 20;
    std::uint64_t seed = 0;
    std::string output = ".";
    std::string config;
    bool write_panels = false;
};

double tpr_or_nan(const Matrix& est, const Matrix& truth, bool off_diagonal)
{
    try {
        return roc_curve(est, truth, off_diagonal).tpr_at_5pct;
    } catch (const Error&) {
        return std::nan("");
    }
}

int run_simulate(const SimulateFlags& s)
{
    const std::vector<std::string> columns = {"beta_LF",  "beta_L2",  "beta_TPR",  "delta_LF", "delta_L2",
                                              "delta_TPR", "omega_LF", "omega_L2", "omega_TPR"};
    fs::create_directories(s.output);
    std::ofstream per_rep(fs::path(s.output) / "replications.csv");
    per_rep << "rep,seed";
    for (const auto& c : columns) per_rep << "," << c;
    per_rep << "\n";

    const RunConfig base = s.config.empty() ? RunConfig{} : load_config(s.config);
    std::vector<std::vector<double>> table;
    for (int rep = 0; rep < s.reps; ++rep) {
        DgpSpec spec = parse_dgp(s.dgp);
        spec.n = s.n;
        spec.p = s.p;
        spec.q = s.q;
        spec.seed = s.seed + static_cast<std::uint64_t>(rep);
        spec.validate();
        const IdioSample idio = gen_idio(spec);
        const TimeSeriesPanel panel = make_panel(idio.xi + gen_common(spec, idio.xi), {}, true);
        if (s.write_panels) write_panel(panel, fs::path(s.output) / ("panel_" + std::to_string(rep) + ".csv"));

        RunConfig cfg = base;
        if (!cfg.q) cfg.q = spec.common == CommonDgp::C0 ? 0 : spec.q;
        if (!cfg.d) cfg.d = 1;
        cfg.seed = spec.seed;
        const FnetsFit fit = fnets_estimate(panel, cfg);

        const Matrix beta_truth = idio.truth.A1.transpose();
        const MatrixErrors eb = score_matrix(fit.var.beta, beta_truth);
        const MatrixErrors ed = score_matrix(fit.precision.delta_hat, idio.truth.delta);
        const MatrixErrors eo = score_matrix(fit.longrun.omega_hat, idio.truth.omega);
        const bool delta_has_offdiag = !(idio.truth.delta - Matrix(idio.truth.delta.diagonal().asDiagonal())).isZero(0.0);
        std::vector<double> row = {eb.frobenius,
                                   eb.spectral,
                                   tpr_or_nan(fit.var.beta, beta_truth, false),
                                   ed.frobenius,
                                   ed.spectral,
                                   tpr_or_nan(fit.precision.delta_hat, idio.truth.delta, delta_has_offdiag),
                                   eo.frobenius,
                                   eo.spectral,
                                   tpr_or_nan(fit.longrun.omega_hat, idio.truth.omega, true)};
        per_rep << rep << "," << spec.seed;
        for (double v : row) per_rep << "," << format_double(v);
        per_rep << "\n";
        table.push_back(std::move(row));
        std::cerr << "rep " << rep + 1 << "/" << s.reps << " done\n";
    }

    std::ofstream summary(fs::path(s.output) / "summary.csv");
    const std::string head = "metric,mean,sd\n";
    summary << head;
    std::cout << "dgp=" << s.dgp << " n=" << s.n << " p=" << s.p << " reps=" << s.reps << "\n" << head;
    for (std::size_t c = 0; c < columns.size(); ++c) {
        std::vector<double> vals;
        for (const auto& row : table)
            if (!std::isnan(row[c])) vals.push_back(row[c]);
        double mean = std::nan(""), sd = std::nan("");
        if (!vals.empty()) {
            mean = std::accumulate(vals.begin(), vals.end(), 0.0) / static_cast<double>(vals.size());
            double ss = 0.0;
            for (double v : vals) ss += (v - mean) * (v - mean);
            sd = vals.size() > 1 ? std::sqrt(ss / static_cast<double>(vals.size() - 1)) : 0.0;
        }
        const std::string line = columns[c] + "," + format_double(mean) + "," + format_double(sd) + "\n";
        summary << line;
        std::cout << line;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Factor-adjusted network estimation and forecasting for high-dimensional time series"};
    app.require_subcommand(1);

    ModelFlags est_flags;
    bool dump_acv = false;
    auto* estimate = app.add_subcommand("estimate", "Estimate Granger, contemporaneous and long-run networks");
    add_model_flags(estimate, est_flags);
    estimate->add_flag("--dump-acv", dump_acv, "Write idiosyncratic autocovariances at lags 0..d");

    ModelFlags fc_flags;
    ForecastFlags ff;
    auto* forecast = app.add_subcommand("forecast", "Forecast the panel a number of steps ahead");
    add_model_flags(forecast, fc_flags);
    forecast->add_option("--horizon", ff.horizon, "Forecast horizon")->check(CLI::PositiveNumber);
    forecast->add_option("--common", ff.common, "restricted|unrestricted");
    forecast->add_option("--K", ff.truncation, "Impulse-response truncation lag");
    forecast->add_option("--n-perm", ff.n_perm, "Cross-sectional permutations for the unrestricted method");

    ModelFlags tune_flags;
    auto* tune = app.add_subcommand("tune", "Print cross-validation score tables as CSV");
    add_model_flags(tune, tune_flags);

    SimulateFlags sim;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimation study on a simulated design");
    simulate->add_option("--dgp", sim.dgp, "Design tag such as C1xE1");
    simulate->add_option("--n", sim.n, "Sample length")->check(CLI::PositiveNumber);
    simulate->add_option("--p", sim.p, "Number of series")->check(CLI::PositiveNumber);
    simulate->add_option("--q", sim.q, "Number of factors in the common design");
    simulate->add_option("--reps", sim.reps, "Replications")->check(CLI::PositiveNumber);
    simulate->add_option("--seed", sim.seed, "Seed of the first replication");
    simulate->add_option("--output", sim.output, "Output directory");
    simulate->add_option("--config", sim.config, "JSON run configuration for the estimator");
    simulate->add_flag("--write-panels", sim.write_panels, "Also write each simulated panel as CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*estimate) return run_estimate(est_flags, dump_acv);
        if (*forecast) return run_forecast(fc_flags, ff);
        if (*tune) return run_tune(tune_flags);
        if (*simulate) return run_simulate(sim);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
