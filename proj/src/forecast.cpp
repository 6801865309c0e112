#include "fnets/forecast.hpp"
#include "fnets/rng.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace fnets {

RestrictedFactorModel restricted_model(const AcvSet& acv_chi, int r)
{
    const Index p = acv_chi.p();
    if (r < 0 || r > p) throw Error("restricted forecast: r must lie in [0, p]");
    const SymEigen eig = sym_eigen_desc(symmetrize(acv_chi.at(0)));
    RestrictedFactorModel model;
    model.r = r;
    model.loadings = eig.vectors.leftCols(r);
    model.eigenvalues = eig.values.head(r);
    if (r > 0) {
        const double top = std::max(eig.values(0), 0.0);
        if (!(eig.values(r - 1) > 1e-10 * top))
            throw Error("restricted forecast: eigenvalue " + std::to_string(r) + " of the common covariance is not positive (" +
                        std::to_string(eig.values(r - 1)) + "); use a smaller r");
    }
    return model;
}

CommonForecast restricted_common_forecast(const Matrix& x, const AcvSet& acv_chi, int r, int a)
{
    if (a < 0) throw Error("restricted forecast: horizon must be nonnegative");
    if (!acv_chi.covers(a))
        throw Error("restricted forecast: horizon " + std::to_string(a) + " exceeds the available common lags (" +
                    std::to_string(acv_chi.max_lag) + ")");
    const RestrictedFactorModel model = restricted_model(acv_chi, r);
    const Matrix& e = model.loadings;
    CommonForecast out;
    out.insample = e * (e.transpose() * x);
    const Vector scores = model.eigenvalues.cwiseInverse().asDiagonal() * (e.transpose() * x.col(x.cols() - 1));
    for (int h = 1; h <= a; ++h) out.horizons.push_back(acv_chi.at(-h) * (e * scores));
    return out;
}

std::vector<std::vector<Index>> partition_blocks(const std::vector<Index>& ordering, int q)
{
    const auto p = static_cast<Index>(ordering.size());
    const Index size = q + 1;
    if (q < 1 || p < size) throw Error("block partition needs q >= 1 and at least q+1 series");
    const Index count = p / size;
    std::vector<std::vector<Index>> blocks;
    for (Index h = 0; h < count; ++h) {
        const Index begin = h * size;
        const Index end = h + 1 == count ? p : begin + size;
        blocks.emplace_back(ordering.begin() + begin, ordering.begin() + end);
    }
    return blocks;
}

namespace {

AcvSet sub_acv(const AcvSet& acv, const std::vector<Index>& idx, Index max_lag)
{
    AcvSet sub;
    sub.component = acv.component;
    sub.max_lag = max_lag;
    sub.gammas.resize(static_cast<std::size_t>(2 * max_lag + 1));
    for (Index l = -max_lag; l <= max_lag; ++l) sub.at(l) = acv.at(l)(idx, idx);
    return sub;
}

/// Solves gram * beta = cross, with one ridge retry when gram is not positive definite.
Matrix solve_gram(const Matrix& gram, const Matrix& cross, std::size_t block)
{
    Eigen::LLT<Matrix> llt(gram);
    if (llt.info() == Eigen::Success) return llt.solve(cross);
    const double jitter = 1e-8 * gram.trace() / static_cast<double>(gram.rows());
    llt.compute(gram + jitter * Matrix::Identity(gram.rows(), gram.cols()));
    if (llt.info() != Eigen::Success)
        throw Error("block VAR " + std::to_string(block) + ": Yule-Walker matrix is singular even after ridge jitter");
    return llt.solve(cross);
}

} // namespace

std::vector<BlockVar> fit_block_var(const AcvSet& acv_chi, int q, int s_max, Index n, const std::vector<Index>& ordering)
{
    if (s_max < 1) throw Error("fit_block_var: maximum order must be positive");
    if (acv_chi.max_lag < s_max)
        throw Error("fit_block_var: common ACVs cover lags up to " + std::to_string(acv_chi.max_lag) + " but s_max=" +
                    std::to_string(s_max));
    std::vector<BlockVar> out;
    const auto blocks = partition_blocks(ordering, q);
    for (std::size_t h = 0; h < blocks.size(); ++h) {
        const auto& idx = blocks[h];
        const auto b = static_cast<double>(idx.size());
        const AcvSet sub = sub_acv(acv_chi, idx, s_max);
        BlockVar best;
        best.series = idx;
        best.schwarz = std::numeric_limits<double>::infinity();
        for (int s = 1; s <= s_max; ++s) {
            const YwSystem yw = build_yw(sub, s);
            const Matrix beta = solve_gram(yw.gram, yw.cross, h);
            const Matrix resid = symmetrize(sub.at(0) - beta.transpose() * yw.cross);
            Eigen::LLT<Matrix> llt(resid);
            if (llt.info() != Eigen::Success) continue;
            const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
            const double score = logdet + s * b * b * std::log(static_cast<double>(n)) / static_cast<double>(n);
            if (score < best.schwarz) {
                best.schwarz = score;
                best.order = s;
                best.coefs.clear();
                const Index bs = static_cast<Index>(idx.size());
                for (int k = 0; k < s; ++k) best.coefs.push_back(beta.middleRows(k * bs, bs).transpose());
            }
        }
        if (best.coefs.empty())
            throw Error("block VAR " + std::to_string(h) + ": no candidate order gives a positive definite residual covariance");
        out.push_back(std::move(best));
    }
    return out;
}

CommonForecast unrestricted_single(const Matrix& x, const AcvSet& acv_chi, int q, int a, int truncation_lag,
                                   int block_max_order, const std::vector<Index>& ordering)
{
    const Index p = x.rows();
    const Index n = x.cols();
    CommonForecast out;
    out.insample = Matrix::Zero(p, n);
    if (q == 0) {
        out.horizons.assign(static_cast<std::size_t>(a), Vector::Zero(p));
        return out;
    }
    if (truncation_lag < a) throw Error("unrestricted forecast: truncation lag K must be at least the horizon");
    const std::vector<BlockVar> blocks = fit_block_var(acv_chi, q, block_max_order, n, ordering);
    int s = 0;
    for (const auto& blk : blocks) s = std::max(s, blk.order);
    if (n <= s + 1) throw Error("unrestricted forecast: sample too short for the selected block orders");

    // Full-dimension block-diagonal lag matrices.
    std::vector<Matrix> lags(static_cast<std::size_t>(s), Matrix::Zero(p, p));
    for (const auto& blk : blocks)
        for (int k = 0; k < blk.order; ++k) lags[static_cast<std::size_t>(k)](blk.series, blk.series) = blk.coefs[static_cast<std::size_t>(k)];

    const Index len = n - s;
    Matrix z = x.rightCols(len);
    for (int k = 1; k <= s; ++k) z.noalias() -= lags[static_cast<std::size_t>(k - 1)] * x.middleCols(s - k, len);
    const Matrix gamma_z = z * z.transpose() / static_cast<double>(len);
    const SymEigen eig = sym_eigen_desc(symmetrize(gamma_z));
    if (!(eig.values(q - 1) > 0.0)) throw Error("unrestricted forecast: filtered covariance has fewer than q positive eigenvalues");
    const Matrix eq = eig.vectors.leftCols(q);
    const Vector root = eig.values.head(q).cwiseSqrt();
    const Matrix loading = eq * root.asDiagonal();
    const Matrix shocks = root.cwiseInverse().asDiagonal() * eq.transpose() * z; // q x len, column j is time s + j

    const int depth = truncation_lag + a;
    std::vector<Matrix> impulse(static_cast<std::size_t>(depth + 1));
    impulse[0] = loading;
    for (int l = 1; l <= depth; ++l) {
        Matrix acc = Matrix::Zero(p, q);
        for (int k = 1; k <= std::min(l, s); ++k) acc.noalias() += lags[static_cast<std::size_t>(k - 1)] * impulse[static_cast<std::size_t>(l - k)];
        impulse[static_cast<std::size_t>(l)] = std::move(acc);
    }

    auto shock_at = [&](Index t) { return shocks.col(t - s); };
    for (Index t = s; t < n; ++t) {
        for (int l = 0; l <= truncation_lag && t - l >= s; ++l)
            out.insample.col(t).noalias() += impulse[static_cast<std::size_t>(l)] * shock_at(t - l);
    }
    for (int h = 1; h <= a; ++h) {
        Vector f = Vector::Zero(p);
        for (int l = 0; l <= truncation_lag && n - 1 - l >= s; ++l)
            f.noalias() += impulse[static_cast<std::size_t>(l + h)] * shock_at(n - 1 - l);
        out.horizons.push_back(std::move(f));
    }
    return out;
}

CommonForecast unrestricted_common_forecast(const Matrix& x, const AcvSet& acv_chi, int q, int a, const UnrestrictedOptions& opt)
{
    if (opt.n_perm < 1) throw Error("unrestricted forecast: n_perm must be positive");
    const Index p = x.rows();
    std::vector<Index> ordering(static_cast<std::size_t>(p));
    std::iota(ordering.begin(), ordering.end(), Index(0));
    CounterRng rng(opt.seed, 0x70657266ULL);

    CommonForecast total = unrestricted_single(x, acv_chi, q, a, opt.truncation_lag, opt.block_max_order, ordering);
    for (int k = 1; k < opt.n_perm; ++k) {
        std::vector<Index> perm = ordering;
        std::shuffle(perm.begin(), perm.end(), rng);
        const CommonForecast one = unrestricted_single(x, acv_chi, q, a, opt.truncation_lag, opt.block_max_order, perm);
        total.insample += one.insample;
        for (std::size_t h = 0; h < total.horizons.size(); ++h) total.horizons[h] += one.horizons[h];
    }
    const double scale = 1.0 / opt.n_perm;
    total.insample *= scale;
    for (auto& v : total.horizons) v *= scale;
    return total;
}

std::vector<Vector> idio_forecast(const VarEstimate& est, const Matrix& xi_insample, int a, double threshold)
{
    if (a < 1) throw Error("idio_forecast: horizon must be at least 1");
    const Index n = xi_insample.cols();
    if (xi_insample.rows() != est.p()) throw Error("idio_forecast: dimension mismatch");
    if (n < est.d) throw Error("idio_forecast: fewer in-sample points than the VAR order");
    const std::vector<Matrix> lags = est.transitions(threshold);

    // path[j] holds xi at time n - d + 1 + j (observed), then the forecasts.
    std::vector<Vector> path;
    for (Index t = n - est.d; t < n; ++t) path.emplace_back(xi_insample.col(t));
    std::vector<Vector> out;
    for (int h = 1; h <= a; ++h) {
        Vector f = Vector::Zero(est.p());
        const std::size_t now = path.size();
        for (int l = 1; l <= est.d; ++l) f.noalias() += lags[static_cast<std::size_t>(l - 1)] * path[now - static_cast<std::size_t>(l)];
        path.push_back(f);
        out.push_back(std::move(f));
    }
    return out;
}

ForecastResult assemble_forecast(CommonForecast common, std::vector<Vector> xi, CommonMethod method)
{
    if (common.horizons.size() != xi.size()) throw Error("forecast assembly: horizon counts differ");
    ForecastResult out;
    out.method = method;
    out.insample_chi = std::move(common.insample);
    out.chi = std::move(common.horizons);
    out.xi = std::move(xi);
    for (std::size_t h = 0; h < out.chi.size(); ++h) out.x.push_back(out.chi[h] + out.xi[h]);
    return out;
}

} // namespace fnets
