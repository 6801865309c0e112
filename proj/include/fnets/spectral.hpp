#pragma once

#include "fnets/common.hpp"
#include "fnets/panel.hpp"

#include <vector>

namespace fnets {

enum class AcvComponent { x, chi, xi };

/// Autocovariance matrices Gamma(l) = E(X_{t-l} X_t^T) for lags -L..L.
struct AcvSet {
    AcvComponent component = AcvComponent::x;
    Index max_lag = 0;
    std::vector<Matrix> gammas; // index lag + max_lag

    Index p() const { return gammas.empty() ? 0 : gammas.front().rows(); }
    const Matrix& at(Index lag) const;
    Matrix& at(Index lag);
    bool covers(Index lag) const { return lag >= -max_lag && lag <= max_lag; }
};

/// Lag-window estimate at the 2m+1 Fourier frequencies omega_k = 2 pi k / (2m+1).
struct SpectralEstimate {
    int bandwidth = 0;
    std::vector<CMatrix> matrices; // index k + m, k = -m..m

    Index p() const { return matrices.empty() ? 0 : matrices.front().rows(); }
    const CMatrix& at(int k) const { return matrices[static_cast<std::size_t>(k + bandwidth)]; }
    double frequency(int k) const { return 2.0 * kPi * k / (2.0 * bandwidth + 1.0); }
};

struct DynamicPcaResult {
    int q = 0;
    int bandwidth = 0;
    std::vector<Vector> eigenvalues;   // per frequency, length q, descending
    std::vector<CMatrix> eigenvectors; // per frequency, p x q, unit columns
    std::vector<CMatrix> sigma_chi;    // per frequency, rank-q part

    SpectralEstimate common_spectrum() const { return {bandwidth, sigma_chi}; }
};

double bartlett_kernel(double u);

/// Sample ACV with divisor n for lags -maxlag..maxlag.
AcvSet sample_acv(const Matrix& x, Index maxlag);
inline AcvSet sample_acv(const TimeSeriesPanel& panel, Index maxlag) { return sample_acv(panel.values, maxlag); }

/// Bartlett lag-window spectral density by direct summation over lags.
SpectralEstimate spectral_density(const AcvSet& acv, int m);

/// Same estimate via a length-(2m+1) FFT over the lag axis.
SpectralEstimate spectral_density_fft(const AcvSet& acv, int m);

/// (2 pi / (2m+1)) sum_k S(omega_k) exp(i lag omega_k), imaginary part returned separately.
CMatrix inverse_fourier(const SpectralEstimate& spec, Index lag);

/// Keeps the q leading eigen-pairs at every frequency; q may equal p.
DynamicPcaResult retain_leading_components(const SpectralEstimate& spec, int q);

/// Dynamic PCA with 0 <= q < p.
DynamicPcaResult dynamic_pca(const SpectralEstimate& spec, int q);

/// ACV of the common component for lags -max_lag..max_lag (max_lag <= m).
AcvSet common_acv(const DynamicPcaResult& pca, Index max_lag);

/// Gamma_xi(l) = Gamma_x(l) - Gamma_chi(l) on matching lag ranges.
AcvSet idio_acv(const AcvSet& acv_x, const AcvSet& acv_chi);

/// floor(4 (n / log n)^{1/3}) clamped to [1, n-1].
int default_bandwidth(Index n);

/// Hermitian eigen-pairs sorted descending; phase fixed so the largest-modulus
/// entry of each eigenvector is real positive.
struct HermitianEigen {
    Vector values;
    CMatrix vectors;
};
HermitianEigen hermitian_eigen_desc(const CMatrix& s);

} // namespace fnets

namespace fnets {

/// Output of the factor-adjustment step on one panel segment.
struct FactorAdjustment {
    int bandwidth = 0;
    int q = 0;
    AcvSet acv_x;   // lags up to max(bandwidth, max_lag)
    AcvSet acv_chi; // lags up to max_lag
    AcvSet acv_xi;  // lags up to max_lag
};

/// Sample ACV, lag-window spectrum, dynamic PCA with q factors, and the common and
/// idiosyncratic ACVs on lags -max_lag..max_lag (max_lag <= bandwidth). For q > 0 the
/// idiosyncratic ACV is K(l/m) Gamma_x(l) - Gamma_chi(l); for q = 0 it is the raw sample ACV.
FactorAdjustment factor_adjust(const Matrix& x, int q, int bandwidth, Index max_lag);

/// Restriction of an ACV set to lags -max_lag..max_lag.
AcvSet truncate_lags(const AcvSet& acv, Index max_lag);

} // namespace fnets
