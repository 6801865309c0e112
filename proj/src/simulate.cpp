#include "fnets/simulate.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>

namespace fnets {

namespace {

constexpr std::uint64_t kGraphStream = 1;
constexpr std::uint64_t kIdioNoiseStream = 2;
constexpr std::uint64_t kCommonParamStream = 3;
constexpr std::uint64_t kCommonNoiseStream = 4;
constexpr int kMaxRegenerations = 100;

/// Standard-variance shock: Gaussian, or t5 rescaled to unit variance.
class ShockSource {
public:
    ShockSource(CounterRng rng, bool heavy) : rng_(rng), heavy_(heavy) {}
    double operator()() { return heavy_ ? t5_(rng_) / std::sqrt(5.0 / 3.0) : normal_(rng_); }

private:
    CounterRng rng_;
    bool heavy_;
    std::normal_distribution<double> normal_;
    std::student_t_distribution<double> t5_{5.0};
};

Matrix draw_transition(CounterRng& rng, Index p)
{
    std::bernoulli_distribution link(1.0 / static_cast<double>(p));
    for (int attempt = 0; attempt < kMaxRegenerations; ++attempt) {
        Matrix a = Matrix::Zero(p, p);
        for (Index i = 0; i < p; ++i)
            for (Index j = 0; j < p; ++j)
                if (link(rng)) a(i, j) = 0.275;
        if (spectral_radius(a) < 1.0) return a;
    }
    throw Error("gen_idio: could not draw a stable transition matrix");
}

Matrix draw_precision(CounterRng& rng, Index p)
{
    std::bernoulli_distribution link(1.0 / static_cast<double>(p));
    for (int attempt = 0; attempt < kMaxRegenerations; ++attempt) {
        Matrix adj = Matrix::Zero(p, p);
        for (Index i = 0; i < p; ++i)
            for (Index j = i + 1; j < p; ++j)
                if (link(rng)) adj(i, j) = adj(j, i) = 1.0;
        const Vector degree = adj.rowwise().sum();
        Matrix delta = 1.5 * Matrix::Identity(p, p);
        for (Index i = 0; i < p; ++i)
            for (Index j = 0; j < p; ++j)
                if (adj(i, j) != 0.0) delta(i, j) = -1.0 / std::sqrt(degree(i) * degree(j));
        Eigen::SelfAdjointEigenSolver<Matrix> es(delta, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() > 1e-8) return delta;
    }
    throw Error("gen_idio: could not draw a positive definite precision matrix");
}

} // namespace

void DgpSpec::validate() const
{
    if (n < 2 || p < 2) throw Error("DGP needs n >= 2 and p >= 2");
    if (common != CommonDgp::C0 && q < 1) throw Error("C1/C2 need q >= 1");
    if (burnin < 1) throw Error("burn-in must be positive");
}

DgpSpec parse_dgp(const std::string& tag)
{
    std::string t;
    for (char c : tag) t.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    const auto x = t.find('X');
    if (x == std::string::npos) throw Error("DGP tag must look like C1xE1, got '" + tag + "'");
    const std::string c = t.substr(0, x);
    const std::string e = t.substr(x + 1);
    DgpSpec spec;
    if (c == "C0") spec.common = CommonDgp::C0;
    else if (c == "C1") spec.common = CommonDgp::C1;
    else if (c == "C2") spec.common = CommonDgp::C2;
    else throw Error("unknown common DGP '" + c + "'");
    if (e == "E1") spec.idio = IdioDgp::E1;
    else if (e == "E2") spec.idio = IdioDgp::E2;
    else if (e == "E3") spec.idio = IdioDgp::E3;
    else throw Error("unknown idiosyncratic DGP '" + e + "'");
    return spec;
}

std::string dgp_tag(const DgpSpec& spec)
{
    static const char* commons[] = {"C0", "C1", "C2"};
    static const char* idios[] = {"E1", "E2", "E3"};
    return std::string(commons[static_cast<int>(spec.common)]) + "x" + idios[static_cast<int>(spec.idio)];
}

double spectral_radius(const Matrix& m)
{
    if (m.size() == 0) return 0.0;
    Eigen::EigenSolver<Matrix> es(m, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

IdioSample gen_idio(const DgpSpec& spec)
{
    spec.validate();
    const Index p = spec.p;
    CounterRng base(spec.seed);
    CounterRng graph = base.substream(kGraphStream);

    IdioSample out;
    GroundTruth& truth = out.truth;
    truth.A1 = draw_transition(graph, p);
    truth.delta = spec.idio == IdioDgp::E2 ? draw_precision(graph, p) : Matrix::Identity(p, p);
    truth.gamma = spec.idio == IdioDgp::E2 ? Matrix(truth.delta.inverse()) : Matrix::Identity(p, p);
    truth.gamma = symmetrize(truth.gamma);
    const Matrix a1 = Matrix::Identity(p, p) - truth.A1;
    truth.omega = 2.0 * kPi * a1.transpose() * truth.delta * a1;
    truth.omega_support = structural_longrun_support({truth.A1}, truth.delta);

    const Matrix chol = truth.gamma.llt().matrixL();
    const int burnin = spectral_radius(truth.A1) > 0.9 ? 2 * spec.burnin : spec.burnin;
    ShockSource shock(base.substream(kIdioNoiseStream), spec.idio == IdioDgp::E3);
    out.xi.resize(p, spec.n);
    Vector state = Vector::Zero(p);
    Vector eps(p);
    for (Index t = -burnin; t < spec.n; ++t) {
        for (Index i = 0; i < p; ++i) eps(i) = shock();
        state = truth.A1 * state + chol * eps;
        if (t >= 0) out.xi.col(t) = state;
    }
    return out;
}

Matrix gen_common(const DgpSpec& spec, const Matrix& xi)
{
    spec.validate();
    const Index p = spec.p;
    const Index n = spec.n;
    if (spec.common == CommonDgp::C0) return Matrix::Zero(p, n);

    CounterRng params = CounterRng(spec.seed).substream(kCommonParamStream);
    ShockSource shock(CounterRng(spec.seed).substream(kCommonNoiseStream), spec.idio == IdioDgp::E3);
    const int q = spec.q;
    const Index total = n + spec.burnin;
    Matrix u(q, total);
    for (Index t = 0; t < total; ++t)
        for (int j = 0; j < q; ++j) u(j, t) = shock();

    Matrix chi = Matrix::Zero(p, n);
    if (spec.common == CommonDgp::C1) {
        std::uniform_real_distribution<double> loading(-1.0, 1.0);
        std::uniform_real_distribution<double> root(-0.8, 0.8);
        for (Index i = 0; i < p; ++i) {
            for (int j = 0; j < q; ++j) {
                const double a = loading(params);
                const double alpha = root(params);
                double y = 0.0;
                for (Index t = 0; t < total; ++t) {
                    y = alpha * y + u(j, t);
                    if (t >= spec.burnin) chi(i, t - spec.burnin) += a * y;
                }
            }
        }
        return chi;
    }

    // Static representation: two lags of a VAR(1) dynamic factor.
    std::uniform_real_distribution<double> off(0.0, 0.3);
    std::uniform_real_distribution<double> diag(0.5, 0.8);
    std::normal_distribution<double> normal;
    Matrix d0(q, q);
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) d0(i, j) = i == j ? diag(params) : off(params);
    const Matrix d = 0.7 * d0 / spectral_radius(d0);
    Matrix lam0(p, q);
    Matrix lam1(p, q);
    for (Index i = 0; i < p; ++i)
        for (int j = 0; j < q; ++j) {
            lam0(i, j) = normal(params);
            lam1(i, j) = normal(params);
        }
    Matrix f(q, total);
    Vector state = Vector::Zero(q);
    for (Index t = 0; t < total; ++t) {
        state = d * state + u.col(t);
        f.col(t) = state;
    }
    for (Index t = 0; t < n; ++t) {
        const Index s = t + spec.burnin;
        chi.col(t) = lam0 * f.col(s) + lam1 * f.col(s - 1);
    }
    if (xi.rows() != p || xi.cols() != n) throw Error("gen_common: calibration panel has the wrong shape");
    auto var = [](const Eigen::Ref<const Eigen::RowVectorXd>& row) {
        const double mean = row.mean();
        return (row.array() - mean).square().sum() / static_cast<double>(row.size() - 1);
    };
    for (Index i = 0; i < p; ++i) {
        const double vc = var(chi.row(i));
        if (vc > 0.0) chi.row(i) *= std::sqrt(var(xi.row(i)) / vc);
    }
    return chi;
}

MatrixErrors score_matrix(const Matrix& est, const Matrix& truth)
{
    if (est.rows() != truth.rows() || est.cols() != truth.cols()) throw Error("score_matrix: shape mismatch");
    const double tf = truth.norm();
    if (tf == 0.0) throw Error("score_matrix: truth is the zero matrix");
    Eigen::JacobiSVD<Matrix> t_svd(truth);
    Eigen::JacobiSVD<Matrix> e_svd(est - truth);
    return {(est - truth).norm() / tf, e_svd.singularValues()(0) / t_svd.singularValues()(0)};
}

double tpr_at_fpr(const std::vector<RocPoint>& points, double fpr)
{
    double best = 0.0;
    for (std::size_t k = 0; k < points.size(); ++k) {
        const RocPoint& pt = points[k];
        if (pt.fpr <= fpr) best = std::max(best, pt.tpr);
        if (k > 0 && points[k - 1].fpr < fpr && pt.fpr > fpr) {
            const RocPoint& lo = points[k - 1];
            const double w = (fpr - lo.fpr) / (pt.fpr - lo.fpr);
            best = std::max(best, lo.tpr + w * (pt.tpr - lo.tpr));
        }
    }
    return best;
}

RocCurve roc_curve(const Matrix& est, const Matrix& truth, bool off_diagonal)
{
    if (est.rows() != truth.rows() || est.cols() != truth.cols()) throw Error("roc_curve: shape mismatch");
    struct Item {
        double magnitude;
        bool positive;
    };
    std::vector<Item> items;
    for (Index i = 0; i < est.rows(); ++i)
        for (Index j = off_diagonal ? i + 1 : 0; j < est.cols(); ++j) items.push_back({std::abs(est(i, j)), truth(i, j) != 0.0});
    const auto positives = static_cast<double>(std::count_if(items.begin(), items.end(), [](const Item& it) { return it.positive; }));
    const double negatives = static_cast<double>(items.size()) - positives;
    if (positives == 0.0 || negatives == 0.0) throw Error("roc_curve: truth support must contain positives and negatives");
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.magnitude > b.magnitude; });

    RocCurve curve;
    double tp = 0.0;
    double fp = 0.0;
    curve.points.push_back({items.front().magnitude, 0.0, 0.0});
    for (std::size_t k = 0; k < items.size();) {
        const double level = items[k].magnitude;
        if (level == 0.0) break;
        while (k < items.size() && items[k].magnitude == level) {
            (items[k].positive ? tp : fp) += 1.0;
            ++k;
        }
        const double next = k < items.size() ? items[k].magnitude : 0.0;
        curve.points.push_back({next, fp / negatives, tp / positives});
    }
    if (curve.points.back().fpr < 1.0 || curve.points.back().tpr < 1.0) curve.points.push_back({0.0, 1.0, 1.0});
    curve.tpr_at_5pct = tpr_at_fpr(curve.points, 0.05);
    for (std::size_t k = 1; k < curve.points.size(); ++k)
        curve.auc += 0.5 * (curve.points[k].fpr - curve.points[k - 1].fpr) * (curve.points[k].tpr + curve.points[k - 1].tpr);
    return curve;
}

double forecast_errors(const Vector& xhat, const Vector& x, ForecastErrorMode mode)
{
    if (xhat.size() != x.size()) throw Error("forecast_errors: size mismatch");
    const Vector diff = xhat - x;
    switch (mode) {
    case ForecastErrorMode::predictor_l2:
        if (x.squaredNorm() == 0.0) throw Error("forecast_errors: zero target");
        return diff.squaredNorm() / x.squaredNorm();
    case ForecastErrorMode::realized_l2:
        if (x.norm() == 0.0) throw Error("forecast_errors: zero target");
        return diff.squaredNorm() / x.norm();
    case ForecastErrorMode::predictor_max:
    case ForecastErrorMode::realized_max:
        if (x.lpNorm<Eigen::Infinity>() == 0.0) throw Error("forecast_errors: zero target");
        return diff.lpNorm<Eigen::Infinity>() / x.lpNorm<Eigen::Infinity>();
    }
    return 0.0;
}

double insample_error(const Matrix& est, const Matrix& truth)
{
    if (truth.squaredNorm() == 0.0) throw Error("insample_error: zero target");
    return (est - truth).squaredNorm() / truth.squaredNorm();
}

} // namespace fnets
