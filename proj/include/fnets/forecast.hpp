#pragma once

#include "fnets/spectral.hpp"
#include "fnets/var_network.hpp"

#include <cstdint>
#include <vector>

namespace fnets {

/// Leading eigen-pairs of the common-component lag-0 covariance.
struct RestrictedFactorModel {
    Matrix loadings;    // p x r, orthonormal columns
    Vector eigenvalues; // r, descending, positive
    int r = 0;
};

RestrictedFactorModel restricted_model(const AcvSet& acv_chi, int r);

/// Forecasts for horizons 1..a plus the in-sample fit (p x n).
struct CommonForecast {
    std::vector<Vector> horizons;
    Matrix insample;
};

/// chi_{n+h|n} = Gamma_chi(-h) E M^{-1} E^T X_n and in-sample E E^T X_t.
CommonForecast restricted_common_forecast(const Matrix& x, const AcvSet& acv_chi, int r, int a);

/// One block of the blockwise VAR representation of the common component.
struct BlockVar {
    std::vector<Index> series;
    int order = 1;
    std::vector<Matrix> coefs; // A_1..A_order, each b x b
    double schwarz = 0.0;
};

/// Partition of `ordering` into consecutive blocks of size q+1, the last one taking the remainder.
std::vector<std::vector<Index>> partition_blocks(const std::vector<Index>& ordering, int q);

/// Yule-Walker VAR per block with the order picked by a Schwarz criterion over 1..s_max.
std::vector<BlockVar> fit_block_var(const AcvSet& acv_chi, int q, int s_max, Index n,
                                    const std::vector<Index>& ordering);

struct UnrestrictedOptions {
    int truncation_lag = 20;
    int n_perm = 30;
    int block_max_order = 5;
    std::uint64_t seed = 0;
};

/// Blockwise-VAR dynamic factor forecast averaged over cross-sectional permutations.
CommonForecast unrestricted_common_forecast(const Matrix& x, const AcvSet& acv_chi, int q, int a,
                                            const UnrestrictedOptions& opt);

/// Same computation for a single, fixed series ordering.
CommonForecast unrestricted_single(const Matrix& x, const AcvSet& acv_chi, int q, int a, int truncation_lag,
                                   int block_max_order, const std::vector<Index>& ordering);

/// Best linear predictor recursion of the idiosyncratic VAR for horizons 1..a.
std::vector<Vector> idio_forecast(const VarEstimate& est, const Matrix& xi_insample, int a, double threshold = 0.0);

struct ForecastResult {
    std::vector<Vector> chi;
    std::vector<Vector> xi;
    std::vector<Vector> x;
    Matrix insample_chi;
    CommonMethod method = CommonMethod::restricted;
};

/// Adds common and idiosyncratic forecasts horizon by horizon.
ForecastResult assemble_forecast(CommonForecast common, std::vector<Vector> xi, CommonMethod method);

} // namespace fnets
