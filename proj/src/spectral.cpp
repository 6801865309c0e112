#include "fnets/spectral.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fnets {

const Matrix& AcvSet::at(Index lag) const
{
    if (!covers(lag)) throw Error("ACV lag " + std::to_string(lag) + " outside stored range +-" + std::to_string(max_lag));
    return gammas[static_cast<std::size_t>(lag + max_lag)];
}

Matrix& AcvSet::at(Index lag)
{
    if (!covers(lag)) throw Error("ACV lag " + std::to_string(lag) + " outside stored range +-" + std::to_string(max_lag));
    return gammas[static_cast<std::size_t>(lag + max_lag)];
}

double bartlett_kernel(double u)
{
    const double a = std::abs(u);
    return a < 1.0 ? 1.0 - a : 0.0;
}

AcvSet sample_acv(const Matrix& x, Index maxlag)
{
    const Index n = x.cols();
    if (maxlag < 0 || maxlag >= n)
        throw Error("sample_acv: maxlag " + std::to_string(maxlag) + " must lie in [0, n) with n=" + std::to_string(n));
    AcvSet acv;
    acv.component = AcvComponent::x;
    acv.max_lag = maxlag;
    acv.gammas.resize(static_cast<std::size_t>(2 * maxlag + 1));
    for (Index l = 0; l <= maxlag; ++l) {
        const Index len = n - l;
        Matrix g = x.leftCols(len) * x.rightCols(len).transpose() / static_cast<double>(n);
        acv.at(-l) = g.transpose();
        acv.at(l) = std::move(g);
    }
    return acv;
}

namespace {

void check_spectral_inputs(const AcvSet& acv, int m)
{
    if (m < 1) throw Error("spectral_density: bandwidth m must be positive");
    if (acv.max_lag < m)
        throw Error("spectral_density: ACV covers lags up to " + std::to_string(acv.max_lag) + " but m=" + std::to_string(m));
}

} // namespace

SpectralEstimate spectral_density(const AcvSet& acv, int m)
{
    check_spectral_inputs(acv, m);
    const Index p = acv.p();
    SpectralEstimate spec;
    spec.bandwidth = m;
    spec.matrices.assign(static_cast<std::size_t>(2 * m + 1), CMatrix::Zero(p, p));
    for (int k = 0; k <= m; ++k) {
        const double w = spec.frequency(k);
        CMatrix s = CMatrix::Zero(p, p);
        for (int l = -m; l <= m; ++l) {
            const double weight = bartlett_kernel(static_cast<double>(l) / m);
            if (weight == 0.0) continue;
            const std::complex<double> phase = std::polar(weight, -l * w);
            s += phase * acv.at(l).cast<std::complex<double>>();
        }
        s /= 2.0 * kPi;
        spec.matrices[static_cast<std::size_t>(m - k)] = s.conjugate();
        spec.matrices[static_cast<std::size_t>(m + k)] = std::move(s);
    }
    return spec;
}

SpectralEstimate spectral_density_fft(const AcvSet& acv, int m)
{
    check_spectral_inputs(acv, m);
    const Index p = acv.p();
    const int len = 2 * m + 1;
    SpectralEstimate spec;
    spec.bandwidth = m;
    spec.matrices.assign(static_cast<std::size_t>(len), CMatrix::Zero(p, p));

    // Forward FFT of the lag sequence placed at positions l mod (2m+1):
    // sum_l c_l exp(-i 2 pi k l / (2m+1)) is the spectral sum at omega_k.
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> in(static_cast<std::size_t>(len));
    std::vector<std::complex<double>> out;
    for (Index i = 0; i < p; ++i) {
        for (Index j = 0; j < p; ++j) {
            for (int l = -m; l <= m; ++l) {
                const int pos = (l + len) % len;
                in[static_cast<std::size_t>(pos)] = bartlett_kernel(static_cast<double>(l) / m) * acv.at(l)(i, j);
            }
            fft.fwd(out, in);
            for (int k = -m; k <= m; ++k)
                spec.matrices[static_cast<std::size_t>(k + m)](i, j) = out[static_cast<std::size_t>((k + len) % len)] / (2.0 * kPi);
        }
    }
    return spec;
}

CMatrix inverse_fourier(const SpectralEstimate& spec, Index lag)
{
    const int m = spec.bandwidth;
    const Index p = spec.p();
    CMatrix g = CMatrix::Zero(p, p);
    for (int k = -m; k <= m; ++k) {
        const std::complex<double> phase = std::polar(1.0, static_cast<double>(lag) * spec.frequency(k));
        g += phase * spec.at(k);
    }
    return g * (2.0 * kPi / (2.0 * m + 1.0));
}

HermitianEigen hermitian_eigen_desc(const CMatrix& s)
{
    Eigen::SelfAdjointEigenSolver<CMatrix> es(s);
    if (es.info() != Eigen::Success) throw Error("Hermitian eigendecomposition failed");
    const Index p = s.rows();
    CMatrix vecs = es.eigenvectors();
    for (Index j = 0; j < p; ++j) {
        Index imax = 0;
        vecs.col(j).cwiseAbs().maxCoeff(&imax);
        const std::complex<double> v = vecs(imax, j);
        vecs.col(j) *= std::conj(v) / std::abs(v);
        vecs(imax, j) = std::abs(vecs(imax, j));
    }
    const Vector& vals = es.eigenvalues();
    std::vector<Index> order(static_cast<std::size_t>(p));
    std::iota(order.begin(), order.end(), Index(0));
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        if (vals(a) != vals(b)) return vals(a) > vals(b);
        for (Index i = 0; i < p; ++i) {
            if (vecs(i, a).real() != vecs(i, b).real()) return vecs(i, a).real() > vecs(i, b).real();
            if (vecs(i, a).imag() != vecs(i, b).imag()) return vecs(i, a).imag() > vecs(i, b).imag();
        }
        return false;
    });
    HermitianEigen out{Vector(p), CMatrix(p, p)};
    for (Index j = 0; j < p; ++j) {
        out.values(j) = vals(order[static_cast<std::size_t>(j)]);
        out.vectors.col(j) = vecs.col(order[static_cast<std::size_t>(j)]);
    }
    return out;
}

DynamicPcaResult retain_leading_components(const SpectralEstimate& spec, int q)
{
    const Index p = spec.p();
    if (q < 0 || q > p) throw Error("dynamic_pca: q must lie in [0, p]");
    DynamicPcaResult out;
    out.q = q;
    out.bandwidth = spec.bandwidth;
    const std::size_t nfreq = spec.matrices.size();
    out.eigenvalues.resize(nfreq);
    out.eigenvectors.resize(nfreq);
    out.sigma_chi.resize(nfreq);
    // Eigen-pairs at -omega are conjugates of those at +omega.
    const int m = spec.bandwidth;
    for (int k = 0; k <= m; ++k) {
        const auto idx = static_cast<std::size_t>(k + m);
        const HermitianEigen eig = hermitian_eigen_desc(spec.at(k));
        out.eigenvalues[idx] = eig.values.head(q);
        out.eigenvectors[idx] = eig.vectors.leftCols(q);
        const CMatrix& e = out.eigenvectors[idx];
        out.sigma_chi[idx] = e * out.eigenvalues[idx].cast<std::complex<double>>().asDiagonal() * e.adjoint();
        if (k > 0) {
            const auto neg = static_cast<std::size_t>(m - k);
            out.eigenvalues[neg] = out.eigenvalues[idx];
            out.eigenvectors[neg] = out.eigenvectors[idx].conjugate();
            out.sigma_chi[neg] = out.sigma_chi[idx].conjugate();
        }
    }
    return out;
}

DynamicPcaResult dynamic_pca(const SpectralEstimate& spec, int q)
{
    if (q < 0 || q >= spec.p())
        throw Error("dynamic_pca: q=" + std::to_string(q) + " must satisfy 0 <= q < p=" + std::to_string(spec.p()));
    return retain_leading_components(spec, q);
}

AcvSet common_acv(const DynamicPcaResult& pca, Index max_lag)
{
    if (max_lag < 0 || max_lag > pca.bandwidth)
        throw Error("common_acv: lag " + std::to_string(max_lag) + " exceeds bandwidth m=" + std::to_string(pca.bandwidth));
    const SpectralEstimate spec = pca.common_spectrum();
    const Index p = spec.p();
    AcvSet acv;
    acv.component = AcvComponent::chi;
    acv.max_lag = max_lag;
    acv.gammas.assign(static_cast<std::size_t>(2 * max_lag + 1), Matrix::Zero(p, p));
    for (Index l = 0; l <= max_lag; ++l) {
        const CMatrix g = inverse_fourier(spec, l);
        const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
        if (g.imag().cwiseAbs().maxCoeff() > 1e-9 * scale)
            throw Error("common_acv: imaginary residue at lag " + std::to_string(l) + " breaks conjugate symmetry");
        Matrix re = g.real();
        if (l > 0) {
            const Matrix neg = inverse_fourier(spec, -l).real();
            if ((neg - re.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
                throw Error("common_acv: Gamma(-l) != Gamma(l)^T at lag " + std::to_string(l));
        } else {
            re = symmetrize(re);
        }
        acv.at(-l) = re.transpose();
        acv.at(l) = std::move(re);
    }
    return acv;
}

AcvSet idio_acv(const AcvSet& acv_x, const AcvSet& acv_chi)
{
    if (acv_x.max_lag != acv_chi.max_lag || acv_x.p() != acv_chi.p())
        throw Error("idio_acv: lag range or dimension mismatch between x and chi ACVs");
    AcvSet acv;
    acv.component = AcvComponent::xi;
    acv.max_lag = acv_x.max_lag;
    acv.gammas.reserve(acv_x.gammas.size());
    for (std::size_t i = 0; i < acv_x.gammas.size(); ++i) acv.gammas.push_back(acv_x.gammas[i] - acv_chi.gammas[i]);
    return acv;
}

int default_bandwidth(Index n)
{
    if (n < 3) throw Error("default_bandwidth: n must be at least 3");
    const double nd = static_cast<double>(n);
    const auto m = static_cast<Index>(std::floor(4.0 * std::cbrt(nd / std::log(nd))));
    return static_cast<int>(std::clamp<Index>(m, 1, n - 1));
}

} // namespace fnets

namespace fnets {

AcvSet truncate_lags(const AcvSet& acv, Index max_lag)
{
    if (max_lag > acv.max_lag) throw Error("truncate_lags: requested lags beyond the stored range");
    AcvSet out;
    out.component = acv.component;
    out.max_lag = max_lag;
    for (Index l = -max_lag; l <= max_lag; ++l) out.gammas.push_back(acv.at(l));
    return out;
}

FactorAdjustment factor_adjust(const Matrix& x, int q, int bandwidth, Index max_lag)
{
    if (max_lag > bandwidth)
        throw Error("factor_adjust: lag " + std::to_string(max_lag) + " exceeds bandwidth m=" + std::to_string(bandwidth));
    FactorAdjustment out;
    out.bandwidth = bandwidth;
    out.q = q;
    out.acv_x = sample_acv(x, bandwidth);
    AcvSet acv_x_lags = truncate_lags(out.acv_x, max_lag);
    if (q == 0) {
        out.acv_chi = acv_x_lags;
        out.acv_chi.component = AcvComponent::chi;
        for (auto& g : out.acv_chi.gammas) g.setZero();
    } else {
        const SpectralEstimate spec = spectral_density(out.acv_x, bandwidth);
        out.acv_chi = common_acv(dynamic_pca(spec, q), max_lag);
        // With weighted lags, acv_xi is the inverse transform of the residual spectrum.
        for (Index l = -max_lag; l <= max_lag; ++l)
            acv_x_lags.at(l) *= bartlett_kernel(static_cast<double>(l) / bandwidth);
    }
    out.acv_xi = idio_acv(acv_x_lags, out.acv_chi);
    return out;
}

} // namespace fnets
