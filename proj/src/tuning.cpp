#include "fnets/tuning.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>

namespace fnets {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

FactorAdjustment adjust_segment(const Matrix& x, Index begin, Index end, int q, Index max_lag, const std::string& what)
{
    const Index len = end - begin;
    if (len < 3) throw Error("cross-validation " + what + " segment [" + std::to_string(begin) + ", " + std::to_string(end) + ") is too short");
    const int m = default_bandwidth(len);
    if (m < max_lag)
        throw Error("cross-validation " + what + " segment [" + std::to_string(begin) + ", " + std::to_string(end) +
                    ") is too short for lag " + std::to_string(max_lag) + " (bandwidth " + std::to_string(m) + ")");
    return factor_adjust(x.middleCols(begin, len), q, m, max_lag);
}

} // namespace

void CvGrid::validate() const
{
    if (lambdas.empty() || orders.empty()) throw Error("CV grid must be nonempty");
    if (folds < 1) throw Error("CV needs at least one fold");
    for (double l : lambdas)
        if (!(l >= 0.0)) throw Error("CV penalties must be nonnegative");
    for (int d : orders)
        if (d < 1) throw Error("CV orders must be positive");
}

std::vector<FoldSplit> cv_folds(Index n, int folds)
{
    if (folds < 1) throw Error("cv_folds: need at least one fold");
    const Index width = (n + folds - 1) / folds;
    std::vector<FoldSplit> out;
    for (int l = 0; l < folds; ++l) {
        const Index begin = std::min<Index>(l * width, n);
        const Index end = std::min<Index>((l + 1) * width, n);
        const Index half = (end - begin) / 2;
        out.push_back({begin, begin + half, end});
    }
    return out;
}

double yw_prediction_score(const Matrix& beta, const AcvSet& test_xi, int d)
{
    const YwSystem yw = build_yw(test_xi, d);
    const Matrix bg = beta.transpose() * yw.cross;
    return (test_xi.at(0) - bg - bg.transpose() + beta.transpose() * yw.gram * beta).trace();
}

LambdaOrderSelection cv_select_lambda_d(const Matrix& x, int q, const CvGrid& grid, Solver solver)
{
    grid.validate();
    const int d_max = *std::max_element(grid.orders.begin(), grid.orders.end());
    std::vector<double> lambdas = grid.lambdas;
    std::sort(lambdas.begin(), lambdas.end(), std::greater<>());

    std::vector<std::vector<double>> scores(grid.orders.size(), std::vector<double>(lambdas.size(), 0.0));
    const auto splits = cv_folds(x.cols(), grid.folds);
    for (std::size_t f = 0; f < splits.size(); ++f) {
        const auto& s = splits[f];
        const std::string tag = "fold " + std::to_string(f);
        const FactorAdjustment train = adjust_segment(x, s.train_begin, s.train_end, q, d_max, tag + " train");
        const FactorAdjustment test = adjust_segment(x, s.train_end, s.test_end, q, d_max, tag + " test");
        for (std::size_t o = 0; o < grid.orders.size(); ++o) {
            const int d = grid.orders[o];
            const YwSystem yw = build_yw(truncate_lags(train.acv_xi, d), d);
            const AcvSet test_xi = truncate_lags(test.acv_xi, d);
            Matrix warm;
            for (std::size_t k = 0; k < lambdas.size(); ++k) {
                double score = kInf;
                try {
                    const VarEstimate est = estimate_beta(yw, lambdas[k], solver, warm.size() ? &warm : nullptr);
                    warm = est.beta;
                    score = yw_prediction_score(est.beta, test_xi, d);
                } catch (const Error&) {
                    score = kInf;
                }
                scores[o][k] += score;
            }
        }
    }

    LambdaOrderSelection out;
    double best = kInf;
    for (std::size_t o = 0; o < grid.orders.size(); ++o) {
        for (std::size_t k = 0; k < lambdas.size(); ++k) {
            const double sc = scores[o][k];
            out.table.push_back({lambdas[k], grid.orders[o], sc});
            const bool better = sc < best || (sc == best && std::isfinite(sc) &&
                                              (lambdas[k] > out.lambda || (lambdas[k] == out.lambda && grid.orders[o] < out.d)));
            if (better) {
                best = sc;
                out.lambda = lambdas[k];
                out.d = grid.orders[o];
            }
        }
    }
    if (!std::isfinite(best)) throw Error("cv_select_lambda_d: every grid point failed; widen the penalty grid");
    return out;
}

double burg_divergence(const Matrix& delta, const Matrix& gamma)
{
    const Matrix prod = delta * gamma;
    const Eigen::PartialPivLU<Matrix> lu(prod);
    const Matrix& u = lu.matrixLU();
    double logdet = 0.0;
    double sign = lu.permutationP().determinant();
    for (Index i = 0; i < u.rows(); ++i) {
        const double v = u(i, i);
        if (v == 0.0) return kInf;
        sign *= v > 0.0 ? 1.0 : -1.0;
        logdet += std::log(std::abs(v));
    }
    if (sign <= 0.0) return kInf;
    return prod.trace() - logdet - static_cast<double>(prod.rows());
}

EtaSelection cv_select_eta(const std::vector<EtaFold>& folds, const std::vector<double>& etas)
{
    if (etas.empty()) throw Error("cv_select_eta: empty grid");
    EtaSelection out;
    double best = kInf;
    for (double eta : etas) {
        double score = 0.0;
        for (const auto& fold : folds) {
            try {
                const PrecisionEstimate pe = estimate_delta(fold.gamma_train, eta);
                score += burg_divergence(pe.delta_hat, fold.gamma_test);
            } catch (const Error&) {
                score = kInf;
            }
            if (!std::isfinite(score)) break;
        }
        out.table.push_back({eta, score});
        if (score < best || (score == best && std::isfinite(score) && eta > out.eta)) {
            best = score;
            out.eta = eta;
        }
    }
    if (!std::isfinite(best)) throw Error("cv_select_eta: every grid point is infeasible or singular; widen the eta grid");
    return out;
}

std::vector<EtaFold> eta_folds(const Matrix& x, int q, double lambda, int d, Solver solver, int folds)
{
    std::vector<EtaFold> out;
    const auto splits = cv_folds(x.cols(), folds);
    for (std::size_t f = 0; f < splits.size(); ++f) {
        const auto& s = splits[f];
        const std::string tag = "fold " + std::to_string(f);
        EtaFold fold;
        for (int part = 0; part < 2; ++part) {
            const Index b = part == 0 ? s.train_begin : s.train_end;
            const Index e = part == 0 ? s.train_end : s.test_end;
            const FactorAdjustment adj = adjust_segment(x, b, e, q, d, tag + (part == 0 ? " train" : " test"));
            const VarEstimate est = estimate_beta(build_yw(adj.acv_xi, d), lambda, solver);
            (part == 0 ? fold.gamma_train : fold.gamma_test) = innovation_cov(adj.acv_xi, est).gamma;
        }
        out.push_back(std::move(fold));
    }
    return out;
}

std::vector<double> log_spaced(double hi, double lo, int count)
{
    if (count < 1 || !(hi > 0.0) || !(lo > 0.0)) throw Error("log_spaced: need positive bounds and count");
    std::vector<double> out;
    if (count == 1) return {hi};
    const double a = std::log(hi);
    const double b = std::log(lo);
    for (int k = 0; k < count; ++k) out.push_back(std::exp(a + (b - a) * k / (count - 1)));
    out.front() = hi;
    out.back() = lo;
    return out;
}

double select_threshold(const Matrix& est)
{
    double lo = kInf;
    double hi = 0.0;
    for (Index i = 0; i < est.size(); ++i) {
        const double v = std::abs(est.data()[i]);
        if (v > 0.0) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (hi == 0.0 || lo == hi) return 0.0;
    constexpr int kCandidates = 100;
    const std::vector<double> grid = log_spaced(lo, hi, kCandidates);
    std::vector<double> f(kCandidates);
    for (int k = 0; k < kCandidates; ++k) {
        const double t = grid[static_cast<std::size_t>(k)];
        const auto count = (est.array().abs() > t).count();
        f[static_cast<std::size_t>(k)] = std::log1p(static_cast<double>(count));
    }
    int best = 1;
    double best_curv = -kInf;
    for (int k = 1; k + 1 < kCandidates; ++k) {
        const auto i = static_cast<std::size_t>(k);
        const double curv = f[i + 1] - 2.0 * f[i] + f[i - 1];
        if (curv > best_curv) {
            best_curv = curv;
            best = k;
        }
    }
    return grid[static_cast<std::size_t>(best)];
}

std::vector<double> default_lambda_grid(const AcvSet& acv_xi, int max_order, int count)
{
    double top = 0.0;
    for (int l = 1; l <= max_order; ++l) top = std::max(top, acv_xi.at(l).cwiseAbs().maxCoeff());
    const double lambda_max = 2.0 * top;
    if (!(lambda_max > 0.0)) throw Error("default_lambda_grid: idiosyncratic autocovariances are all zero");
    return log_spaced(lambda_max, lambda_max / 100.0, count);
}

std::vector<int> default_order_grid(Index p, Index n, int folds, int max_order)
{
    Index shortest = n;
    for (const auto& s : cv_folds(n, folds)) shortest = std::min(shortest, s.train_end - s.train_begin);
    std::vector<int> out;
    for (int d = 1; d <= max_order; ++d)
        if (static_cast<Index>(d) * p < shortest) out.push_back(d);
    if (out.empty()) out.push_back(1);
    return out;
}

std::vector<double> default_eta_grid(const Matrix& gamma, int count)
{
    const double scale = gamma.cwiseAbs().maxCoeff();
    if (!(scale > 0.0)) throw Error("default_eta_grid: innovation covariance is zero");
    return log_spaced(scale, 0.01 * scale, count);
}

} // namespace fnets
