#include "fnets/pipeline.hpp"

#include <fstream>

namespace fnets {

namespace {

template <typename F>
auto run_stage(const char* stage, F&& body) -> decltype(body())
{
    try {
        return body();
    } catch (const std::exception& e) {
        rethrow_tagged(stage, e);
    }
}

Matrix off_diagonal(const Matrix& m)
{
    Matrix out = m;
    out.diagonal().setZero();
    return out;
}

} // namespace

FnetsFit fnets_estimate(const TimeSeriesPanel& panel, const RunConfig& config)
{
    panel.validate();
    const Index p = panel.p();
    const Index n = panel.n();
    const Matrix& x = panel.values;
    config.validate(p, n);

    FnetsFit fit;
    RunConfig& cfg = fit.config;
    cfg = config;

    const int m = cfg.bandwidth ? *cfg.bandwidth : run_stage("bandwidth", [&] { return default_bandwidth(n); });
    cfg.bandwidth = m;

    // Factor numbers.
    run_stage("factor_numbers", [&] {
        const int kmax = std::min<int>(default_max_factors(p), static_cast<int>(p) - 1);
        if (cfg.q) {
            fit.factors.q = *cfg.q;
            fit.factors.q_method = FactorMethod::user;
        } else {
            const AcvSet acv = sample_acv(x, m);
            fit.factors.q = estimate_q(spectral_density(acv, m), kmax);
            fit.factors.q_method = FactorMethod::eigen_ratio;
        }
        cfg.q = fit.factors.q;
        return 0;
    });

    const int max_lag = m;
    fit.adjustment = run_stage("spectral", [&] { return factor_adjust(x, fit.factors.q, m, max_lag); });

    run_stage("factor_numbers", [&] {
        const int kmax = std::min<int>(default_max_factors(p), static_cast<int>(p) - 1);
        if (cfg.r) {
            fit.factors.r = *cfg.r;
            fit.factors.r_method = FactorMethod::user;
        } else if (fit.factors.q == 0) {
            fit.factors.r = 0;
            fit.factors.r_method = FactorMethod::user;
        } else {
            fit.factors.r = estimate_r(fit.adjustment.acv_chi, kmax);
            fit.factors.r_method = FactorMethod::eigen_ratio;
        }
        if (fit.factors.q_method == FactorMethod::eigen_ratio && fit.factors.r_method == FactorMethod::eigen_ratio &&
            fit.factors.q > fit.factors.r) {
            fit.factors.warning = "estimated q exceeds estimated r";
            fit.warnings.push_back(fit.factors.warning);
        }
        cfg.r = fit.factors.r;
        return 0;
    });

    // Sparse VAR.
    run_stage("tuning", [&] {
        if (cfg.lambda && cfg.d) return 0;
        CvGrid grid;
        grid.folds = cfg.cv_folds;
        grid.orders = cfg.d ? std::vector<int>{*cfg.d} : default_order_grid(p, n, cfg.cv_folds, cfg.max_order);
        const int d_max = *std::max_element(grid.orders.begin(), grid.orders.end());
        grid.lambdas = cfg.lambda ? std::vector<double>{*cfg.lambda} : default_lambda_grid(fit.adjustment.acv_xi, d_max);
        fit.lambda_cv = cv_select_lambda_d(x, fit.factors.q, grid, cfg.solver);
        cfg.lambda = fit.lambda_cv->lambda;
        cfg.d = fit.lambda_cv->d;
        return 0;
    });
    fit.var = run_stage("var_network", [&] {
        return estimate_beta(build_yw(fit.adjustment.acv_xi, *cfg.d), *cfg.lambda, cfg.solver);
    });
    for (std::size_t j = 0; j < fit.var.reports.size(); ++j)
        if (!fit.var.reports[j].converged)
            fit.warnings.push_back("VAR column " + std::to_string(j) + " did not reach the solver tolerance");
    if (!cfg.threshold) cfg.threshold = select_threshold(fit.var.beta);

    // Precision and long-run matrices.
    fit.innovation = run_stage("precision_network", [&] { return innovation_cov(fit.adjustment.acv_xi, fit.var); });
    if (!fit.innovation.warning.empty()) fit.warnings.push_back(fit.innovation.warning);
    run_stage("tuning", [&] {
        if (cfg.eta) return 0;
        const auto folds = eta_folds(x, fit.factors.q, *cfg.lambda, *cfg.d, cfg.solver, cfg.cv_folds);
        fit.eta_cv = cv_select_eta(folds, default_eta_grid(fit.innovation.gamma));
        cfg.eta = fit.eta_cv->eta;
        return 0;
    });
    fit.precision = run_stage("precision_network", [&] { return estimate_delta(fit.innovation.gamma, *cfg.eta); });
    if (!cfg.threshold_delta) cfg.threshold_delta = select_threshold(off_diagonal(fit.precision.delta_hat));
    fit.longrun = run_stage("precision_network", [&] { return longrun_matrix(fit.var, *cfg.threshold, fit.precision.delta_hat); });
    if (!cfg.threshold_omega) cfg.threshold_omega = select_threshold(off_diagonal(fit.longrun.omega_hat));

    run_stage("networks", [&] {
        NetworkSet& nets = fit.networks;
        nets.labels = panel.labels;
        nets.threshold_beta = *cfg.threshold;
        nets.threshold_delta = *cfg.threshold_delta;
        nets.threshold_omega = *cfg.threshold_omega;
        nets.granger = granger_network(fit.var, nets.threshold_beta);
        nets.contemporaneous = contemporaneous_network(fit.precision.delta_hat, nets.threshold_delta);
        nets.longrun = longrun_network(fit.longrun, nets.threshold_omega);
        return 0;
    });
    return fit;
}

ForecastResult fnets_forecast(const FnetsFit& fit, const TimeSeriesPanel& panel, int a, CommonMethod method)
{
    if (a < 1) throw Error("fnets_forecast: horizon must be at least 1");
    const Matrix& x = panel.values;
    const AcvSet& acv_chi = fit.adjustment.acv_chi;
    const RunConfig& cfg = fit.config;
    CommonForecast common = run_stage("forecast", [&] {
        if (fit.factors.q == 0) {
            CommonForecast zero;
            zero.insample = Matrix::Zero(x.rows(), x.cols());
            zero.horizons.assign(static_cast<std::size_t>(a), Vector::Zero(x.rows()));
            return zero;
        }
        if (method == CommonMethod::restricted) return restricted_common_forecast(x, acv_chi, fit.factors.r, a);
        UnrestrictedOptions opt;
        opt.truncation_lag = cfg.truncation_lag;
        opt.n_perm = cfg.n_perm;
        opt.block_max_order = cfg.block_max_order;
        opt.seed = cfg.seed;
        return unrestricted_common_forecast(x, acv_chi, fit.factors.q, a, opt);
    });
    std::vector<Vector> xi = run_stage("forecast", [&] { return idio_forecast(fit.var, x - common.insample, a); });
    return assemble_forecast(std::move(common), std::move(xi), method);
}

nlohmann::json run_manifest(const FnetsFit& fit)
{
    nlohmann::json j;
    j["config"] = config_to_json(fit.config);
    j["factors"] = {{"q", fit.factors.q},
                    {"r", fit.factors.r},
                    {"q_method", to_string(fit.factors.q_method)},
                    {"r_method", to_string(fit.factors.r_method)}};
    j["resolved"] = {{"bandwidth", *fit.config.bandwidth},
                     {"q", fit.factors.q},
                     {"r", fit.factors.r},
                     {"d", fit.var.d},
                     {"lambda", fit.var.lambda},
                     {"eta", fit.precision.eta},
                     {"threshold", fit.networks.threshold_beta},
                     {"threshold_delta", fit.networks.threshold_delta},
                     {"threshold_omega", fit.networks.threshold_omega},
                     {"solver", to_string(fit.var.solver)}};
    j["resolution_order"] = {"bandwidth", "q", "r", "lambda_d", "eta", "thresholds"};
    j["deviations"] = {
        "number of dynamic factors chosen by an eigenvalue-ratio rule on frequency-averaged dynamic eigenvalues",
        "thresholds chosen by the sparsity-kink rule on log(1 + edge count)",
        "blockwise VAR orders chosen by a Schwarz criterion on the Yule-Walker residual covariance"};
    j["edges"] = {{"granger", fit.networks.granger.edges().size()},
                  {"contemporaneous", fit.networks.contemporaneous.edges().size()},
                  {"longrun", fit.networks.longrun.edges().size()}};
    j["warnings"] = fit.warnings;
    return j;
}

namespace {

void write_json(const nlohmann::json& j, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw Error("I/O failure writing " + path.string());
}

std::vector<std::string> lagged_labels(const std::vector<std::string>& labels, int d)
{
    std::vector<std::string> out;
    for (int l = 1; l <= d; ++l)
        for (const auto& s : labels) out.push_back(s + "_lag" + std::to_string(l));
    return out;
}

} // namespace

void write_estimate_outputs(const FnetsFit& fit, const TimeSeriesPanel& panel, const std::filesystem::path& dir,
                            bool dump_acv)
{
    std::filesystem::create_directories(dir);
    write_json(run_manifest(fit), dir / "manifest.json");
    write_matrix_csv(fit.var.beta, dir / "beta.csv", panel.labels, lagged_labels(panel.labels, fit.var.d));
    write_matrix_csv(fit.precision.delta_hat, dir / "delta.csv", panel.labels, panel.labels);
    write_matrix_csv(fit.longrun.omega_hat, dir / "omega.csv", panel.labels, panel.labels);
    write_network_edgelist(fit.networks, dir);
    if (fit.lambda_cv) {
        std::ofstream out(dir / "cv_lambda.csv");
        out << "lambda,d,score\n";
        for (const auto& row : fit.lambda_cv->table) out << format_double(row.lambda) << ',' << row.d << ',' << format_double(row.score) << '\n';
    }
    if (fit.eta_cv) {
        std::ofstream out(dir / "cv_eta.csv");
        out << "eta,score\n";
        for (const auto& row : fit.eta_cv->table) out << format_double(row.eta) << ',' << format_double(row.score) << '\n';
    }
    if (dump_acv)
        for (int l = 0; l <= fit.var.d; ++l)
            write_matrix_csv(fit.adjustment.acv_xi.at(l), dir / ("acv_xi_lag" + std::to_string(l) + ".csv"), panel.labels,
                             panel.labels);
}

void write_forecast_outputs(const FnetsFit& fit, const TimeSeriesPanel& panel, const ForecastResult& fc,
                            const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    // One array per horizon, entries in the order of "series".
    auto to_json = [](const std::vector<Vector>& vs) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& v : vs) arr.push_back(std::vector<double>(v.data(), v.data() + v.size()));
        return arr;
    };
    nlohmann::json j;
    j["method"] = to_string(fc.method);
    j["horizon"] = fc.x.size();
    j["series"] = panel.labels;
    j["x"] = to_json(fc.x);
    j["chi"] = to_json(fc.chi);
    j["xi"] = to_json(fc.xi);
    j["manifest"] = run_manifest(fit);
    write_json(j, dir / "forecast.json");
}

} // namespace fnets
