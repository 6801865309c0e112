#pragma once

#include "fnets/factor_numbers.hpp"
#include "fnets/forecast.hpp"
#include "fnets/network.hpp"
#include "fnets/panel.hpp"
#include "fnets/precision_network.hpp"
#include "fnets/spectral.hpp"
#include "fnets/tuning.hpp"
#include "fnets/var_network.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace fnets {

/// Complete network-estimation state. Every auto parameter is resolved in `config`.
struct FnetsFit {
    RunConfig config;
    FactorCounts factors;
    FactorAdjustment adjustment;
    VarEstimate var;
    InnovationCovariance innovation;
    PrecisionEstimate precision;
    LongRunEstimate longrun;
    NetworkSet networks;
    std::optional<LambdaOrderSelection> lambda_cv;
    std::optional<EtaSelection> eta_cv;
    std::vector<std::string> warnings;
};

/// Factor adjustment, sparse VAR, precision and long-run estimation with defaults resolved
/// in the order bandwidth, factor numbers, (lambda, d), eta, thresholds.
FnetsFit fnets_estimate(const TimeSeriesPanel& panel, const RunConfig& config);

/// Forecasts for horizons 1..a with the chosen common-component method.
ForecastResult fnets_forecast(const FnetsFit& fit, const TimeSeriesPanel& panel, int a, CommonMethod method);

/// Resolved parameters, methods and warnings as JSON.
nlohmann::json run_manifest(const FnetsFit& fit);

/// Writes manifest.json, beta.csv, delta.csv, omega.csv, the three edge lists and, when
/// requested, the idiosyncratic ACVs at lags 0..d.
void write_estimate_outputs(const FnetsFit& fit, const TimeSeriesPanel& panel, const std::filesystem::path& dir,
                            bool dump_acv);

/// forecast.json with per-horizon vectors plus the manifest.
void write_forecast_outputs(const FnetsFit& fit, const TimeSeriesPanel& panel, const ForecastResult& fc,
                            const std::filesystem::path& dir);

} // namespace fnets
